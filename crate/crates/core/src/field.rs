//! Exact coefficient fields: prime fields `Z/pZ` with word-size moduli and
//! the rationals.
//!
//! Solvers are generic over [`Field`]; element values are opaque
//! (`PrimeField` keeps them in Montgomery form) and are converted to
//! canonical [`ScalarValue`]s at the boundary.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which field the coefficients live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Prime(u64),
    Rationals,
}

impl FieldDescriptor {
    /// Checked constructor for `Z/pZ`. Moduli must be odd primes below 2^62.
    pub fn prime(modulus: u64) -> Result<Self> {
        if modulus < 3 || modulus >= 1 << 62 || !is_prime(modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(FieldDescriptor::Prime(modulus))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Prime(p) => *p,
            FieldDescriptor::Rationals => 0,
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Prime(p) => write!(f, "p:{p}"),
            FieldDescriptor::Rationals => write!(f, "q"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "q" || s == "Q" {
            return Ok(FieldDescriptor::Rationals);
        }
        let digits = s
            .strip_prefix("p:")
            .ok_or_else(|| Error::parse(1, 1, format!("unknown field `{s}`")))?;
        let p = digits
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::parse(1, 3, format!("bad modulus `{digits}`: {e}")))?;
        FieldDescriptor::prime(p)
    }
}

/// Fails with `CharacteristicTooSmall` unless every integer in `1..n` is a unit.
pub fn ensure_characteristic(descriptor: FieldDescriptor, n: usize) -> Result<()> {
    let c = descriptor.characteristic();
    if c == 0 || c >= n as u64 {
        Ok(())
    } else {
        Err(Error::CharacteristicTooSmall {
            characteristic: c,
            required: n as u64,
        })
    }
}

/// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Canonical, field-independent view of a scalar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScalarValue {
    /// Representative in `0..p`.
    Prime(u64),
    /// Lowest terms, positive denominator.
    Rational(BigRational),
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Prime(v) => write!(f, "{v}"),
            ScalarValue::Rational(q) => write!(f, "{q}"),
        }
    }
}

/// Parses `a` or `a/b` with optional sign into a rational.
pub fn parse_rational(token: &str) -> Option<BigRational> {
    let token = token.trim();
    let (num, den) = match token.split_once('/') {
        Some((n, d)) => (n, d),
        None => (token, "1"),
    };
    let num = BigInt::from_str(num.trim()).ok()?;
    let den = BigInt::from_str(den.trim()).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Arithmetic of an exact field.
///
/// `Elem` values are only meaningful relative to the field instance that
/// produced them.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn descriptor(&self) -> FieldDescriptor;

    fn characteristic(&self) -> u64 {
        self.descriptor().characteristic()
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, v: u64) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem {
        let m = self.from_u64(v.unsigned_abs());
        if v < 0 {
            self.neg(&m)
        } else {
            m
        }
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let ib = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, &ib))
    }

    fn to_value(&self, a: &Self::Elem) -> ScalarValue;
    /// Image of a rational; fails when the denominator vanishes in the field.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;

    fn format(&self, a: &Self::Elem) -> String {
        self.to_value(a).to_string()
    }

    fn parse(&self, token: &str) -> Result<Self::Elem> {
        let q = parse_rational(token)
            .ok_or_else(|| Error::parse(0, 0, format!("bad scalar `{token}`")))?;
        self.from_rational(&q)
    }

    /// Number-theoretic transform support, when the field has one.
    fn transform(&self) -> Option<&dyn Transform<Self::Elem>> {
        None
    }
}

/// Cyclic convolution transform of power-of-two length.
pub trait Transform<E>: Send + Sync {
    /// Largest supported `log2(len)`.
    fn max_log_len(&self) -> u32;
    fn forward(&self, a: &mut [E]);
    /// Inverse including the `1/len` scaling.
    fn inverse(&self, a: &mut [E]);
}

/// Element of `Z/pZ` in Montgomery form (`a·2^64 mod p`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(u64);

#[derive(Clone, Copy, Debug)]
struct Montgomery {
    p: u64,
    /// `-p^{-1} mod 2^64`
    p_neg_inv: u64,
    /// `2^128 mod p`
    r2: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = mul_mod(r, r, p);
        Montgomery {
            p,
            p_neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.p_neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn to_mont(&self, v: u64) -> u64 {
        self.mul(v % self.p, self.r2)
    }

    fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }
}

/// `Z/pZ` for an odd prime `p < 2^62`.
#[derive(Clone, Debug)]
pub struct PrimeField {
    mont: Montgomery,
    ntt: Option<Arc<NttTables>>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        FieldDescriptor::prime(p)?;
        let mont = Montgomery::new(p);
        let mut field = PrimeField { mont, ntt: None };
        let two_adicity = (p - 1).trailing_zeros().min(NttTables::MAX_LOG);
        if two_adicity >= 1 {
            let root = field.find_root_of_unity(two_adicity);
            field.ntt = Some(Arc::new(NttTables::new(mont, two_adicity, root, field.inv(&root).unwrap())));
        }
        Ok(field)
    }

    pub fn modulus(&self) -> u64 {
        self.mont.p
    }

    /// Canonical representative in `0..p`.
    pub fn value(&self, a: Fp) -> u64 {
        self.mont.from_mont(a.0)
    }

    pub fn pow(&self, a: &Fp, mut e: u64) -> Fp {
        let mut base = *a;
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }

    /// A primitive `2^log`-th root of unity: `x^((p-1)/2^log)` for the first
    /// `x` whose image has the full order.
    fn find_root_of_unity(&self, log: u32) -> Fp {
        let p = self.mont.p;
        let minus_one = self.neg(&self.one());
        for x in 2..p {
            let w = self.pow(&self.from_u64(x), (p - 1) >> log);
            if self.pow(&w, 1 << (log - 1)) == minus_one {
                return w;
            }
        }
        unreachable!("Z/pZ always has a primitive root")
    }
}

impl Field for PrimeField {
    type Elem = Fp;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Prime(self.mont.p)
    }

    #[inline]
    fn zero(&self) -> Fp {
        Fp(0)
    }

    #[inline]
    fn one(&self) -> Fp {
        Fp(self.mont.to_mont(1))
    }

    fn from_u64(&self, v: u64) -> Fp {
        Fp(self.mont.to_mont(v))
    }

    #[inline(always)]
    fn add(&self, a: &Fp, b: &Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.mont.p { s - self.mont.p } else { s })
    }

    #[inline(always)]
    fn sub(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.mont.p - b.0
        })
    }

    #[inline(always)]
    fn neg(&self, a: &Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.mont.p - a.0 })
    }

    #[inline(always)]
    fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(self.mont.mul(a.0, b.0))
    }

    fn inv(&self, a: &Fp) -> Option<Fp> {
        let v = self.value(*a);
        inv_mod(v, self.mont.p).map(|i| self.from_u64(i))
    }

    #[inline]
    fn is_zero(&self, a: &Fp) -> bool {
        a.0 == 0
    }

    fn to_value(&self, a: &Fp) -> ScalarValue {
        ScalarValue::Prime(self.value(*a))
    }

    fn from_rational(&self, q: &BigRational) -> Result<Fp> {
        let p = BigInt::from(self.mont.p);
        let reduce = |x: &BigInt| x.mod_floor(&p).to_u64().expect("reduced below p");
        let num = self.from_u64(reduce(q.numer()));
        let den = self.from_u64(reduce(q.denom()));
        self.div(&num, &den)
    }

    fn transform(&self) -> Option<&dyn Transform<Fp>> {
        match &self.ntt {
            Some(t) => Some(t.as_ref()),
            None => None,
        }
    }
}

/// Twiddle tables for radix-2 transforms; level `l` holds the first
/// `2^(l-1)` powers of a primitive `2^l`-th root and is built on first use.
#[derive(Debug)]
pub struct NttTables {
    mont: Montgomery,
    max_log: u32,
    root: Fp,
    root_inv: Fp,
    forward: Vec<OnceLock<Vec<Fp>>>,
    backward: Vec<OnceLock<Vec<Fp>>>,
    inv_len: Vec<OnceLock<Fp>>,
}

impl NttTables {
    const MAX_LOG: u32 = 30;

    fn new(mont: Montgomery, max_log: u32, root: Fp, root_inv: Fp) -> Self {
        let levels = max_log as usize + 1;
        NttTables {
            mont,
            max_log,
            root,
            root_inv,
            forward: (0..levels).map(|_| OnceLock::new()).collect(),
            backward: (0..levels).map(|_| OnceLock::new()).collect(),
            inv_len: (0..levels).map(|_| OnceLock::new()).collect(),
        }
    }

    fn level<'a>(&self, tables: &'a [OnceLock<Vec<Fp>>], base: Fp, log: u32) -> &'a [Fp] {
        tables[log as usize].get_or_init(|| {
            let mut w = base.0;
            for _ in log..self.max_log {
                w = self.mont.mul(w, w);
            }
            let half = 1usize << (log - 1);
            let mut out = Vec::with_capacity(half);
            let mut cur = self.mont.to_mont(1);
            for _ in 0..half {
                out.push(Fp(cur));
                cur = self.mont.mul(cur, w);
            }
            out
        })
    }

    fn run(&self, a: &mut [Fp], inverse: bool) {
        let n = a.len();
        assert!(n.is_power_of_two(), "transform length must be a power of two");
        let log = n.trailing_zeros();
        assert!(log <= self.max_log, "transform length exceeds 2-adicity");
        if n == 1 {
            return;
        }
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let p = self.mont.p;
        for l in 1..=log {
            let roots = if inverse {
                self.level(&self.backward, self.root_inv, l)
            } else {
                self.level(&self.forward, self.root, l)
            };
            let half = 1usize << (l - 1);
            for block in a.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for ((x, y), w) in lo.iter_mut().zip(hi.iter_mut()).zip(roots) {
                    let u = x.0;
                    let v = self.mont.mul(y.0, w.0);
                    let s = u + v;
                    x.0 = if s >= p { s - p } else { s };
                    y.0 = if u >= v { u - v } else { u + p - v };
                }
            }
        }
    }
}

impl Transform<Fp> for NttTables {
    fn max_log_len(&self) -> u32 {
        self.max_log
    }

    fn forward(&self, a: &mut [Fp]) {
        self.run(a, false);
    }

    fn inverse(&self, a: &mut [Fp]) {
        self.run(a, true);
        let log = a.len().trailing_zeros() as usize;
        let scale = *self.inv_len[log].get_or_init(|| {
            let n = self.mont.to_mont(a.len() as u64 % self.mont.p);
            let v = inv_mod(self.mont.from_mont(n), self.mont.p).expect("p > len");
            Fp(self.mont.to_mont(v))
        });
        for x in a.iter_mut() {
            x.0 = self.mont.mul(x.0, scale.0);
        }
    }
}

/// The field of rational numbers over arbitrary-precision integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_u64(&self, v: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn to_value(&self, a: &BigRational) -> ScalarValue {
        ScalarValue::Rational(a.clone())
    }

    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A scalar tagged with its field, for callers working with runtime-selected
/// fields rather than a concrete [`Field`] type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldScalar {
    descriptor: FieldDescriptor,
    value: ScalarValue,
}

impl FieldScalar {
    /// Image of the rational `q` in the given field.
    pub fn new(descriptor: FieldDescriptor, q: &BigRational) -> Result<Self> {
        let value = match descriptor {
            FieldDescriptor::Prime(p) => {
                let m = BigInt::from(p);
                let num = q.numer().mod_floor(&m).to_u64().unwrap();
                let den = q.denom().mod_floor(&m).to_u64().unwrap();
                let inv = inv_mod(den, p).ok_or(Error::DivisionByZero)?;
                ScalarValue::Prime(mul_mod(num, inv, p))
            }
            FieldDescriptor::Rationals => ScalarValue::Rational(q.clone()),
        };
        Ok(FieldScalar { descriptor, value })
    }

    pub fn from_i64(descriptor: FieldDescriptor, v: i64) -> Self {
        Self::new(descriptor, &BigRational::from_integer(v.into())).expect("integers are always representable")
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        self.descriptor
    }

    pub fn value(&self) -> &ScalarValue {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            ScalarValue::Prime(v) => *v == 0,
            ScalarValue::Rational(q) => q.is_zero(),
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Exact `a op b` in the common field of `a` and `b`.
pub fn field_arith(a: &FieldScalar, b: &FieldScalar, op: ArithOp) -> Result<FieldScalar> {
    if a.descriptor != b.descriptor {
        return Err(Error::MixedFields);
    }
    let value = match (&a.value, &b.value, a.descriptor) {
        (ScalarValue::Prime(x), ScalarValue::Prime(y), FieldDescriptor::Prime(p)) => {
            let (x, y) = (*x, *y);
            ScalarValue::Prime(match op {
                ArithOp::Add => ((x as u128 + y as u128) % p as u128) as u64,
                ArithOp::Sub => ((x as u128 + p as u128 - y as u128) % p as u128) as u64,
                ArithOp::Mul => mul_mod(x, y, p),
                ArithOp::Div => mul_mod(x, inv_mod(y, p).ok_or(Error::DivisionByZero)?, p),
            })
        }
        (ScalarValue::Rational(x), ScalarValue::Rational(y), FieldDescriptor::Rationals) => {
            ScalarValue::Rational(match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
                ArithOp::Div => {
                    if y.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    x / y
                }
            })
        }
        _ => return Err(Error::MixedFields),
    };
    Ok(FieldScalar {
        descriptor: a.descriptor,
        value,
    })
}

/// Renders a rational the way the text formats expect (`n` or `n/d`).
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-{}/{}", q.numer().abs(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
