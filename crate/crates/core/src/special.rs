//! Constant and polynomial coefficients.
//!
//! For constant `A`, the Laplace transform `z_i = i!·y_i` of the solution of
//! `y' = A·y` is `Σ A^i v t^i`, whose coordinates are rational functions of
//! degree at most `r`. They are recovered by Padé approximation from the
//! first `2r + 1` Krylov vectors and expanded by their recurrence.
//! Polynomial coefficients of degree `d` give recurrences of order `d + 1`
//! (systems) or `d + r` (equations) on the coefficients directly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, SeriesMatrix, SeriesVector};
use crate::poly;
use crate::series::{batch_inverse, Ring, Series};

/// `numerator / denominator` with `denominator(0) = 1`, in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction<E> {
    numerator: Vec<E>,
    denominator: Vec<E>,
}

impl<E: Clone> RationalFunction<E> {
    /// Normalizes `den(0)` to one; the pair is not reduced.
    pub fn new<F: Field<Elem = E>>(k: &F, mut numerator: Vec<E>, mut denominator: Vec<E>) -> Result<Self> {
        poly::trim(k, &mut numerator);
        poly::trim(k, &mut denominator);
        let c = denominator.first().ok_or(Error::PadeFailure)?;
        let c = k.inv(c).ok_or(Error::PadeFailure)?;
        Ok(RationalFunction {
            numerator: poly::scale(k, &c, &numerator),
            denominator: poly::scale(k, &c, &denominator),
        })
    }

    pub fn numerator(&self) -> &[E] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[E] {
        &self.denominator
    }
}

/// Krylov vectors `v, Av, …, A^{2r} v` stored as columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrylovBlock<E> {
    columns: Vec<Vec<E>>,
}

impl<E: Clone> KrylovBlock<E> {
    pub fn columns(&self) -> &[Vec<E>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[E] {
        &self.columns[j]
    }

    /// The sequence `(A^i v)_coord` as a series of precision `2r + 1`.
    pub fn coordinate(&self, coord: usize) -> Series<E> {
        Series::from_coeffs(self.columns.iter().map(|c| c[coord].clone()).collect())
    }
}

/// `0!, …, (n−1)!` and their inverses.
pub(crate) fn factorials<F: Field>(ring: &Ring<F>, n: usize) -> Result<(Vec<F::Elem>, Vec<F::Elem>)> {
    ring.ensure_characteristic(n)?;
    let k = ring.field();
    let mut fact = Vec::with_capacity(n);
    let mut acc = k.one();
    for i in 0..n as u64 {
        if i > 0 {
            acc = k.mul(&acc, &k.from_u64(i));
        }
        fact.push(acc.clone());
    }
    let inv = batch_inverse(k, &fact).ok_or(Error::DivisionByZero)?;
    ring.counter().add_field_muls(4 * n as u64);
    Ok((fact, inv))
}

fn scale_coefficients<F: Field>(ring: &Ring<F>, y: &SeriesVector<F::Elem>, w: &[F::Elem]) -> Result<SeriesVector<F::Elem>> {
    let k = ring.field();
    let entries = y
        .entries()
        .iter()
        .map(|e| Series::from_coeffs(e.coeffs().iter().zip(w).map(|(c, f)| k.mul(c, f)).collect()))
        .collect();
    ring.counter().add_field_muls((y.entries().len() * y.precision()) as u64);
    SeriesMatrix::new(y.rows(), y.cols(), entries)
}

/// `z_i = i!·y_i` entrywise.
pub fn laplace<F: Field>(ring: &Ring<F>, y: &SeriesVector<F::Elem>) -> Result<SeriesVector<F::Elem>> {
    let (fact, _) = factorials(ring, y.precision())?;
    scale_coefficients(ring, y, &fact)
}

/// `y_i = z_i / i!` entrywise.
pub fn inverse_laplace<F: Field>(ring: &Ring<F>, z: &SeriesVector<F::Elem>) -> Result<SeriesVector<F::Elem>> {
    let (_, inv) = factorials(ring, z.precision())?;
    scale_coefficients(ring, z, &inv)
}

/// `v, Av, …, A^{2r} v` by repeated squaring: the block `[v | … | A^{2^κ−1} v]`
/// is doubled by one product with `A^{2^κ}`.
pub fn krylov_doubling<F: Field>(ring: &Ring<F>, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Result<KrylovBlock<F::Elem>> {
    let r = a.rows();
    if a.cols() != r || v.len() != r {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with a vector of length {}",
            a.rows(),
            a.cols(),
            v.len()
        )));
    }
    let count = 2 * r + 1;
    let mut columns = vec![v.to_vec()];
    let mut power = a.clone();
    while columns.len() < count {
        let width = columns.len();
        let block = Matrix::from_vec(r, width, (0..r).flat_map(|i| columns.iter().map(move |c| c[i].clone())).collect())?;
        let next = ring.scalar_mat_mul(&power, &block)?;
        columns.extend((0..width).map(|j| next.column_values(j)));
        if columns.len() < count {
            power = ring.scalar_mat_mul(&power, &power)?;
        }
    }
    columns.truncate(count);
    Ok(KrylovBlock { columns })
}

/// `(r, r)` Padé approximant of `u mod t^{2r+1}`, by the extended Euclidean
/// algorithm on `(t^{2r+1}, u)` stopped at the first remainder of degree `≤ r`.
pub fn pade<F: Field>(ring: &Ring<F>, u: &Series<F::Elem>, r: usize) -> Result<RationalFunction<F::Elem>> {
    let k = ring.field();
    let len = 2 * r + 1;
    if u.precision() < len {
        return Err(Error::IndexOutOfRange(format!(
            "Padé approximant of type ({r}, {r}) needs {len} coefficients, got {}",
            u.precision()
        )));
    }
    let mut r0 = vec![k.zero(); len + 1];
    r0[len] = k.one();
    let mut r1 = u.coeffs()[..len].to_vec();
    poly::trim(k, &mut r1);
    let mut t0: Vec<F::Elem> = Vec::new();
    let mut t1 = vec![k.one()];
    while poly::degree(k, &r1).is_some_and(|d| d > r) {
        let (q, rem) = poly::divrem(k, &r0, &r1);
        let t2 = poly::sub(k, &t0, &poly::mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.first().map_or(true, |c| k.is_zero(c)) {
        return Err(Error::PadeFailure);
    }
    reduce(k, r1, t1)
}

fn reduce<F: Field>(k: &F, num: Vec<F::Elem>, den: Vec<F::Elem>) -> Result<RationalFunction<F::Elem>> {
    let mut num = num;
    let mut den = den;
    poly::trim(k, &mut num);
    poly::trim(k, &mut den);
    if num.is_empty() {
        return RationalFunction::new(k, num, vec![k.one()]);
    }
    let g = poly::gcd(k, &num, &den);
    if g.len() > 1 {
        num = poly::divrem(k, &num, &g).0;
        den = poly::divrem(k, &den, &g).0;
    }
    RationalFunction::new(k, num, den)
}

/// First `n + 1` coefficients of `num/den`, by the recurrence
/// `c_i = num_i − Σ_{j≥1} den_j c_{i−j}`.
pub fn expand_rational<F: Field>(ring: &Ring<F>, f: &RationalFunction<F::Elem>, n: usize) -> Series<F::Elem> {
    let k = ring.field();
    let den = &f.denominator;
    let len = n + 1;
    let mut c: Vec<F::Elem> = Vec::with_capacity(len);
    for i in 0..len {
        let mut acc = f.numerator.get(i).cloned().unwrap_or_else(|| k.zero());
        for j in 1..den.len().min(i + 1) {
            acc = k.sub(&acc, &k.mul(&den[j], &c[i - j]));
        }
        c.push(acc);
    }
    ring.counter()
        .add_field_muls((len * den.len().saturating_sub(1)) as u64);
    Series::from_coeffs(c)
}

/// [`expand_rational`] by slices of `b = max(deg den, 1)` coefficients:
/// `B_k = R_k·den^{-1} mod t^b`, `R_{k+1} = (R_k − den·B_k) / t^b`.
pub fn expand_rational_sliced<F: Field>(ring: &Ring<F>, f: &RationalFunction<F::Elem>, n: usize) -> Result<Series<F::Elem>> {
    let k = ring.field();
    let den = Series::from_coeffs(f.denominator.clone());
    let b = f.denominator.len().saturating_sub(1).max(1);
    let len = n + 1;
    let den_inv = ring.series_inverse(&den, b)?;
    let mut rem = Series::from_coeffs(f.numerator.clone());
    let mut out = Vec::with_capacity(len + b);
    while out.len() < len {
        let block = ring.mul(&rem, &den_inv, b);
        let width = rem.precision().max(den.precision() + b - 1).max(b);
        let prod = ring.mul(&den, &block, width);
        let next = ring.sub(&ring.resize(&rem, width), &prod);
        debug_assert!(next.coeffs()[..b].iter().all(|c| k.is_zero(c)));
        rem = next.high(b)?;
        out.extend(block.into_coeffs());
    }
    out.truncate(len);
    Ok(Series::from_coeffs(out))
}

fn square_system<F: Field>(a: &Matrix<F::Elem>, v_len: usize) -> Result<usize> {
    let r = a.rows();
    if a.cols() != r || v_len != r || r == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with {v_len} initial values",
            a.rows(),
            a.cols()
        )));
    }
    Ok(r)
}

/// `y' = A·y`, `y(0) = v` for constant `A`, at precision `n`.
#[allow(non_snake_case)]
pub fn solve_const_II<F: Field>(ring: &Ring<F>, a: &Matrix<F::Elem>, v: &[F::Elem], n: usize) -> Result<SeriesVector<F::Elem>> {
    let r = square_system::<F>(a, v.len())?;
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    ring.ensure_characteristic(n + 1)?;
    let krylov = krylov_doubling(ring, a, v)?;
    let z = (0..r)
        .into_par_iter()
        .map(|i| {
            let f = pade(ring, &krylov.coordinate(i), r)?;
            Ok(expand_rational(ring, &f, n - 1))
        })
        .collect::<Result<Vec<_>>>()?;
    inverse_laplace(ring, &SeriesMatrix::column(z)?)
}

/// Basis `Y` with `Y' = A·Y`, `Y(0) = V0`, column by column.
#[allow(non_snake_case)]
pub fn solve_const_I<F: Field>(ring: &Ring<F>, a: &Matrix<F::Elem>, v0: &Matrix<F::Elem>, n: usize) -> Result<SeriesMatrix<F::Elem>> {
    square_system::<F>(a, v0.rows())?;
    if v0.cols() != v0.rows() {
        return Err(Error::DimensionMismatch("initial matrix must be square".into()));
    }
    ring.mat_inverse_const(v0)?;
    let columns = (0..v0.cols())
        .map(|j| solve_const_II(ring, a, &v0.column_values(j), n))
        .collect::<Result<Vec<_>>>()?;
    SeriesMatrix::from_columns(&columns)
}

/// `Σ_k a_k y^{(k)} = 0` with constant `a_0..a_r` and `y^{(k)}(0) = α_k`.
///
/// `z_i = i!·y_i` satisfies `Σ_k a_k z_{i+k} = 0`, so its generating series is
/// rational with denominator `Σ_k a_{r−k} t^k`.
pub fn solve_const_ii<F: Field>(ring: &Ring<F>, a: &[F::Elem], alpha: &[F::Elem], n: usize) -> Result<Series<F::Elem>> {
    let k = ring.field();
    let r = a.len().saturating_sub(1);
    if r == 0 {
        return Err(Error::DimensionMismatch("an equation of order r needs r + 1 coefficients, r >= 1".into()));
    }
    if alpha.len() != r {
        return Err(Error::DimensionMismatch(format!("{} initial values for order {r}", alpha.len())));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    let lead = k.inv(&a[r]).ok_or(Error::NotOrdinaryPoint)?;
    ring.ensure_characteristic(n.max(r))?;
    let (_, inv_fact) = factorials(ring, n.max(r))?;
    // z_k = k!·y_k = α_k
    let den: Vec<F::Elem> = (0..=r).map(|j| k.mul(&a[r - j], &lead)).collect();
    let mut num = poly::mul(k, alpha, &den);
    num.truncate(r);
    let f = RationalFunction::new(k, num, den)?;
    let z = expand_rational(ring, &f, n - 1);
    let y = z.coeffs().iter().zip(&inv_fact).map(|(c, i)| k.mul(c, i)).collect();
    ring.counter().add_field_muls(n as u64);
    Ok(Series::from_coeffs(y))
}

/// Basis `y_0..y_{r−1}` with `y_j^{(k)}(0) = δ_{jk}`.
pub fn solve_const_i<F: Field>(ring: &Ring<F>, a: &[F::Elem], n: usize) -> Result<Vec<Series<F::Elem>>> {
    let k = ring.field();
    let r = a.len().saturating_sub(1);
    (0..r)
        .map(|j| {
            let alpha: Vec<F::Elem> = (0..r).map(|i| if i == j { k.one() } else { k.zero() }).collect();
            solve_const_ii(ring, a, &alpha, n)
        })
        .collect()
}

/// `y' = A·y + b`, `y(0) = v` for polynomial `A` and `b` (stored as series
/// whose precision is one more than the degree bound), at precision `n`:
/// `y_{k+1} = (k+1)^{-1} (Σ_{i ≤ min(d, k)} A_i y_{k−i} + b_k)`.
#[allow(non_snake_case)]
pub fn solve_polycoeff_II<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    b: Option<&SeriesVector<F::Elem>>,
    v: &[F::Elem],
    n: usize,
) -> Result<SeriesVector<F::Elem>> {
    let k = ring.field();
    let r = a.rows();
    if a.cols() != r || v.len() != r || b.is_some_and(|b| b.rows() != r || b.cols() != 1) {
        return Err(Error::DimensionMismatch(format!("system of size {}x{} with {} initial values", r, a.cols(), v.len())));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    ring.ensure_characteristic(n)?;
    let inv = ring.integer_inverses(n - 1)?;
    let coeffs: Vec<Matrix<F::Elem>> = (0..a.precision()).map(|i| a.coefficient(i)).collect();
    let rhs: Vec<Vec<F::Elem>> = b.map_or_else(Vec::new, |b| (0..b.precision()).map(|i| b.coefficient(i).column_values(0)).collect());
    let mut ys: Vec<Vec<F::Elem>> = Vec::with_capacity(n);
    ys.push(v.to_vec());
    let mut muls = 0u64;
    for step in 0..n - 1 {
        let mut acc = rhs.get(step).cloned().unwrap_or_else(|| vec![k.zero(); r]);
        for (i, ai) in coeffs.iter().enumerate().take(step + 1) {
            let y = &ys[step - i];
            for (row, out) in acc.iter_mut().enumerate() {
                for (col, yc) in y.iter().enumerate() {
                    *out = k.add(out, &k.mul(ai.get(row, col), yc));
                }
            }
            muls += (r * r) as u64;
        }
        for x in acc.iter_mut() {
            *x = k.mul(x, &inv[step]);
        }
        muls += r as u64;
        ys.push(acc);
    }
    ring.counter().add_field_muls(muls);
    let entries = (0..r)
        .map(|i| Series::from_coeffs(ys.iter().map(|y| y[i].clone()).collect()))
        .collect();
    SeriesMatrix::column(entries)
}

/// `Σ_j a_j(t) y^{(j)} = 0` with polynomial `a_j` (series whose precision is
/// one more than the degree bound) and `y^{(k)}(0) = α_k`, at precision `n`.
///
/// The coefficient of `t^m` gives `y_{m+r}` from the `d + r` previous
/// coefficients, with `[t^m] y^{(j)} = (m+j)!/m! · y_{m+j}`.
pub fn solve_polycoeff_ii<F: Field>(ring: &Ring<F>, a: &[Series<F::Elem>], alpha: &[F::Elem], n: usize) -> Result<Series<F::Elem>> {
    let k = ring.field();
    let r = a.len().saturating_sub(1);
    if r == 0 {
        return Err(Error::DimensionMismatch("an equation of order r needs r + 1 coefficients, r >= 1".into()));
    }
    if alpha.len() != r {
        return Err(Error::DimensionMismatch(format!("{} initial values for order {r}", alpha.len())));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    let lead = a[r].coeffs().first().and_then(|c| k.inv(c)).ok_or(Error::NotOrdinaryPoint)?;
    ring.ensure_characteristic(n + r)?;
    let size = n.max(r);
    let (fact, inv_fact) = factorials(ring, size)?;
    let mut y: Vec<F::Elem> = alpha.iter().zip(&inv_fact).map(|(x, i)| k.mul(x, i)).collect();
    // deriv[j][m] = [t^m] y^{(j)}
    let mut deriv: Vec<Vec<F::Elem>> = vec![Vec::with_capacity(size); r + 1];
    let mut muls = 2 * r as u64;
    let push = |deriv: &mut Vec<Vec<F::Elem>>, y: &[F::Elem], idx: usize| {
        for (j, dj) in deriv.iter_mut().enumerate().take(idx + 1) {
            if dj.len() == idx - j {
                dj.push(k.mul(&k.mul(&fact[idx], &inv_fact[idx - j]), &y[idx]));
            }
        }
    };
    for idx in 0..y.len() {
        push(&mut deriv, &y, idx);
        muls += 2 * (idx.min(r) + 1) as u64;
    }
    for m in 0..n.saturating_sub(r) {
        let mut s = k.zero();
        for (j, aj) in a.iter().enumerate() {
            for (i, c) in aj.coeffs().iter().enumerate().take(m + 1) {
                if j == r && i == 0 {
                    continue;
                }
                s = k.add(&s, &k.mul(c, &deriv[j][m - i]));
                muls += 1;
            }
        }
        let w = k.mul(&k.mul(&lead, &fact[m]), &inv_fact[m + r]);
        y.push(k.neg(&k.mul(&s, &w)));
        push(&mut deriv, &y, m + r);
        muls += 3 + 2 * (r + 1) as u64;
    }
    ring.counter().add_field_muls(muls);
    y.truncate(n);
    Ok(Series::from_coeffs(y))
}
