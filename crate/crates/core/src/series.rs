//! Truncated power series and the ring context that multiplies them.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::field::{ensure_characteristic, Field, Transform};

/// `c_0 + c_1 t + ... + c_{n-1} t^{n-1} mod t^n`; the precision is the
/// number of stored coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series<E> {
    coeffs: Vec<E>,
}

impl<E: Clone> Series<E> {
    pub fn from_coeffs(coeffs: Vec<E>) -> Self {
        Series { coeffs }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [E] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &E {
        &self.coeffs[i]
    }

    /// `f mod t^k`; `k` must not exceed the precision.
    pub fn low(&self, k: usize) -> Result<Self> {
        if k > self.precision() {
            return Err(out_of_range("low", k, self.precision()));
        }
        Ok(Series::from_coeffs(self.coeffs[..k].to_vec()))
    }

    /// `f div t^k`, precision `n - k`.
    pub fn high(&self, k: usize) -> Result<Self> {
        if k > self.precision() {
            return Err(out_of_range("high", k, self.precision()));
        }
        Ok(Series::from_coeffs(self.coeffs[k..].to_vec()))
    }

    /// `(f mod t^l) div t^k`, precision `l - k`.
    pub fn mid(&self, k: usize, l: usize) -> Result<Self> {
        if k > l || l > self.precision() {
            return Err(Error::IndexOutOfRange(format!(
                "mid({k}, {l}) of a series of precision {}",
                self.precision()
            )));
        }
        Ok(Series::from_coeffs(self.coeffs[k..l].to_vec()))
    }

    /// Truncates or zero-extends to precision `n`, reading the series as the
    /// polynomial formed by its stored coefficients.
    pub fn resized(&self, n: usize, zero: &E) -> Self {
        let mut coeffs: Vec<E> = self.coeffs.iter().take(n).cloned().collect();
        coeffs.resize(n, zero.clone());
        Series { coeffs }
    }

    pub fn truncate(&mut self, n: usize) {
        self.coeffs.truncate(n);
    }
}

fn out_of_range(op: &str, k: usize, n: usize) -> Error {
    Error::IndexOutOfRange(format!("{op}({k}) of a series of precision {n}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MulAlgorithm {
    Naive,
    Karatsuba,
    Ntt,
}

/// Size thresholds for product algorithm selection. Outputs never depend on
/// them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MulConfig {
    /// Shorter operand length from which Karatsuba replaces the naive product.
    pub karatsuba_threshold: usize,
    /// Shorter operand length from which transforms are used when available.
    pub ntt_threshold: usize,
    /// Overrides the size-based choice.
    pub forced: Option<MulAlgorithm>,
}

impl Default for MulConfig {
    fn default() -> Self {
        MulConfig {
            karatsuba_threshold: 32,
            ntt_threshold: 64,
            forced: None,
        }
    }
}

/// Power series over `F` with instrumented multiplication.
///
/// Cloning shares the operation counter.
#[derive(Clone, Debug)]
pub struct Ring<F: Field> {
    field: F,
    counter: Arc<OpCounter>,
    config: MulConfig,
}

impl<F: Field> Ring<F> {
    pub fn new(field: F) -> Self {
        Self::with_counter(field, Arc::new(OpCounter::new()))
    }

    pub fn with_counter(field: F, counter: Arc<OpCounter>) -> Self {
        Ring {
            field,
            counter,
            config: MulConfig::default(),
        }
    }

    pub fn with_config(mut self, config: MulConfig) -> Self {
        self.config = config;
        self
    }

    /// Same field and counter, schoolbook products only.
    pub fn naive(&self) -> Self {
        let mut r = self.clone();
        r.config.forced = Some(MulAlgorithm::Naive);
        r
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn counter(&self) -> &Arc<OpCounter> {
        &self.counter
    }

    pub fn config(&self) -> MulConfig {
        self.config
    }

    pub fn ensure_characteristic(&self, n: usize) -> Result<()> {
        ensure_characteristic(self.field.descriptor(), n)
    }

    pub fn zero(&self, n: usize) -> Series<F::Elem> {
        Series::from_coeffs(vec![self.field.zero(); n])
    }

    /// The constant `c` at precision `n`.
    pub fn constant(&self, c: F::Elem, n: usize) -> Series<F::Elem> {
        let mut s = self.zero(n);
        if n > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(&self, n: usize) -> Series<F::Elem> {
        self.constant(self.field.one(), n)
    }

    pub fn from_i64s(&self, values: &[i64]) -> Series<F::Elem> {
        Series::from_coeffs(values.iter().map(|&v| self.field.from_i64(v)).collect())
    }

    pub fn resize(&self, f: &Series<F::Elem>, n: usize) -> Series<F::Elem> {
        f.resized(n, &self.field.zero())
    }

    /// Coefficientwise sum at the smaller of the two precisions.
    pub fn add(&self, f: &Series<F::Elem>, g: &Series<F::Elem>) -> Series<F::Elem> {
        let k = &self.field;
        Series::from_coeffs(f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| k.add(a, b)).collect())
    }

    pub fn sub(&self, f: &Series<F::Elem>, g: &Series<F::Elem>) -> Series<F::Elem> {
        let k = &self.field;
        Series::from_coeffs(f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| k.sub(a, b)).collect())
    }

    pub fn neg(&self, f: &Series<F::Elem>) -> Series<F::Elem> {
        Series::from_coeffs(f.coeffs.iter().map(|a| self.field.neg(a)).collect())
    }

    pub fn scale(&self, c: &F::Elem, f: &Series<F::Elem>) -> Series<F::Elem> {
        self.counter.add_field_muls(f.precision() as u64);
        Series::from_coeffs(f.coeffs.iter().map(|a| self.field.mul(c, a)).collect())
    }

    /// `t^k · f`, precision `n + k`.
    pub fn shift(&self, f: &Series<F::Elem>, k: usize) -> Series<F::Elem> {
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend_from_slice(&f.coeffs);
        Series::from_coeffs(coeffs)
    }

    pub fn is_zero(&self, f: &Series<F::Elem>) -> bool {
        f.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    /// `f · g mod t^n`. Operands are read as polynomials: coefficients past
    /// `n` are dropped and missing ones are zero.
    pub fn mul(&self, f: &Series<F::Elem>, g: &Series<F::Elem>, n: usize) -> Series<F::Elem> {
        let algo = self.choose(f.precision().min(n), g.precision().min(n));
        self.mul_with(f, g, n, algo)
    }

    fn choose(&self, la: usize, lb: usize) -> MulAlgorithm {
        if let Some(a) = self.config.forced {
            return a;
        }
        let short = la.min(lb);
        if short < self.config.karatsuba_threshold {
            MulAlgorithm::Naive
        } else if short >= self.config.ntt_threshold && self.transform_fits(la + lb) {
            MulAlgorithm::Ntt
        } else {
            MulAlgorithm::Karatsuba
        }
    }

    pub(crate) fn transform_fits(&self, len: usize) -> bool {
        match self.field.transform() {
            Some(t) => len.next_power_of_two().trailing_zeros() <= t.max_log_len(),
            None => false,
        }
    }

    /// `f · g mod t^n` with an explicit algorithm. A transform that does not
    /// exist for the field or size falls back to Karatsuba.
    pub fn mul_with(
        &self,
        f: &Series<F::Elem>,
        g: &Series<F::Elem>,
        n: usize,
        algo: MulAlgorithm,
    ) -> Series<F::Elem> {
        let a = &f.coeffs[..f.precision().min(n)];
        let b = &g.coeffs[..g.precision().min(n)];
        self.counter.record_poly_mul(n);
        let mut out = if a.is_empty() || b.is_empty() {
            Vec::new()
        } else {
            match algo {
                MulAlgorithm::Naive => {
                    self.counter.add_field_muls((a.len() * b.len()) as u64);
                    naive_product(&self.field, a, b, n)
                }
                MulAlgorithm::Karatsuba => self.karatsuba_product(a, b),
                MulAlgorithm::Ntt => match self.field.transform() {
                    Some(t) if self.transform_fits(a.len() + b.len()) => self.ntt_product(t, a, b),
                    _ => self.karatsuba_product(a, b),
                },
            }
        };
        out.resize(n, self.field.zero());
        Series::from_coeffs(out)
    }

    fn karatsuba_product(&self, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let mut muls = 0u64;
        let threshold = self.config.karatsuba_threshold.max(2);
        let out = karatsuba(&self.field, a, b, threshold, &mut muls);
        self.counter.add_field_muls(muls);
        out
    }

    fn ntt_product(&self, t: &dyn Transform<F::Elem>, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let out_len = a.len() + b.len() - 1;
        let len = out_len.next_power_of_two();
        let zero = self.field.zero();
        let mut fa = a.to_vec();
        fa.resize(len, zero.clone());
        let mut fb = b.to_vec();
        fb.resize(len, zero);
        t.forward(&mut fa);
        t.forward(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = self.field.mul(x, y);
        }
        t.inverse(&mut fa);
        self.counter.add_field_muls(3 * transform_muls(len) + 2 * len as u64);
        fa.truncate(out_len);
        fa
    }

    /// Inverses of `1, 2, ..., n` with a single field inversion.
    pub fn integer_inverses(&self, n: usize) -> Result<Vec<F::Elem>> {
        self.ensure_characteristic(n + 1)?;
        let k = &self.field;
        let ints: Vec<F::Elem> = (1..=n as u64).map(|i| k.from_u64(i)).collect();
        batch_inverse(k, &ints).ok_or(Error::DivisionByZero)
    }

    /// Primitive with zero constant term, precision `n + 1`.
    pub fn integrate(&self, f: &Series<F::Elem>) -> Result<Series<F::Elem>> {
        let inv = self.integer_inverses(f.precision())?;
        Ok(self.integrate_with(f, &inv))
    }

    pub(crate) fn integrate_with(&self, f: &Series<F::Elem>, inv: &[F::Elem]) -> Series<F::Elem> {
        let k = &self.field;
        let mut coeffs = Vec::with_capacity(f.precision() + 1);
        coeffs.push(k.zero());
        coeffs.extend(f.coeffs.iter().zip(inv).map(|(c, i)| k.mul(c, i)));
        self.counter.add_field_muls(f.precision() as u64);
        Series::from_coeffs(coeffs)
    }

    /// `f'`, precision `n - 1` (zero precision stays zero).
    pub fn differentiate(&self, f: &Series<F::Elem>) -> Series<F::Elem> {
        let k = &self.field;
        Series::from_coeffs(
            f.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| k.mul(&k.from_u64(i as u64), c))
                .collect(),
        )
    }

    /// `g` with `f·g ≡ 1 mod t^n`, by Newton iteration `g ← g + g(1 − f g)`.
    pub fn series_inverse(&self, f: &Series<F::Elem>, n: usize) -> Result<Series<F::Elem>> {
        let k = &self.field;
        let f0 = f.coeffs.first().ok_or(Error::NotInvertible)?;
        let g0 = k.inv(f0).ok_or(Error::NotInvertible)?;
        let mut g = self.constant(g0, n.min(1));
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let fg = self.mul(f, &g, prec);
            let mut e = self.neg(&fg);
            e.coeffs[0] = k.add(&e.coeffs[0], &k.one());
            let corr = self.mul(&g, &e, prec);
            g = self.add(&self.resize(&g, prec), &corr);
        }
        Ok(g)
    }

    /// Whitespace-separated canonical coefficients.
    pub fn format_series(&self, f: &Series<F::Elem>) -> String {
        let mut out = String::new();
        for (i, c) in f.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", self.field.format(c));
        }
        out
    }

    pub fn parse_series(&self, text: &str) -> Result<Series<F::Elem>> {
        text.split_whitespace()
            .map(|tok| self.field.parse(tok))
            .collect::<Result<Vec<_>>>()
            .map(Series::from_coeffs)
    }
}

/// Field multiplications in one radix-2 transform of length `len`.
pub(crate) fn transform_muls(len: usize) -> u64 {
    (len as u64 / 2) * len.trailing_zeros() as u64
}

/// Inverses of all entries, or `None` if one of them is zero.
pub(crate) fn batch_inverse<F: Field>(k: &F, xs: &[F::Elem]) -> Option<Vec<F::Elem>> {
    if xs.is_empty() {
        return Some(Vec::new());
    }
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = k.one();
    for x in xs {
        acc = k.mul(&acc, x);
        prefix.push(acc.clone());
    }
    let mut inv = k.inv(&acc)?;
    let mut out = vec![k.zero(); xs.len()];
    for i in (0..xs.len()).rev() {
        out[i] = if i == 0 { inv.clone() } else { k.mul(&inv, &prefix[i - 1]) };
        inv = k.mul(&inv, &xs[i]);
    }
    Some(out)
}

/// Schoolbook product truncated to `n` coefficients.
pub fn naive_product<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem], n: usize) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(n);
    let mut out = vec![k.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

fn add_into<F: Field>(k: &F, acc: &mut [F::Elem], x: &[F::Elem]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a = k.add(a, b);
    }
}

fn sub_into<F: Field>(k: &F, acc: &mut [F::Elem], x: &[F::Elem]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a = k.sub(a, b);
    }
}

fn karatsuba<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem], threshold: usize, muls: &mut u64) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let out_len = a.len() + b.len() - 1;
    if b.len() < threshold {
        *muls += (a.len() * b.len()) as u64;
        return naive_product(k, a, b, out_len);
    }
    let mut out = vec![k.zero(); out_len];
    if a.len() >= 2 * b.len() {
        // unbalanced: slice the long operand into pieces of the short one's length
        for (c, chunk) in a.chunks(b.len()).enumerate() {
            let part = karatsuba(k, chunk, b, threshold, muls);
            add_into(k, &mut out[c * b.len()..], &part);
        }
        return out;
    }
    let h = a.len().div_ceil(2);
    let (a0, a1) = a.split_at(h);
    if b.len() <= h {
        let lo = karatsuba(k, a0, b, threshold, muls);
        let hi = karatsuba(k, a1, b, threshold, muls);
        add_into(k, &mut out, &lo);
        add_into(k, &mut out[h..], &hi);
        return out;
    }
    let (b0, b1) = b.split_at(h);
    let z0 = karatsuba(k, a0, b0, threshold, muls);
    let z2 = karatsuba(k, a1, b1, threshold, muls);
    let mut sa = a0.to_vec();
    add_into(k, &mut sa, a1);
    let mut sb = b0.to_vec();
    add_into(k, &mut sb, b1);
    let mut z1 = karatsuba(k, &sa, &sb, threshold, muls);
    sub_into(k, &mut z1, &z0);
    sub_into(k, &mut z1, &z2);
    add_into(k, &mut out, &z0);
    add_into(k, &mut out[h..], &z1);
    add_into(k, &mut out[2 * h..], &z2);
    out
}
