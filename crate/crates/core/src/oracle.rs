//! Slow reference solvers by undetermined coefficients. They share no code
//! with the fast solvers beyond field arithmetic and use schoolbook
//! products only.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{SeriesMatrix, SeriesVector};
use crate::nonlinear::NonlinearEvaluator;
use crate::series::{Ring, Series};

/// `y' = A·y + b`, `y(0) = v` by `(k+1)·y_{k+1} = Σ_{i≤k} A_i y_{k−i} + b_k`.
/// Coefficients past the stored precision of `A` or `b` count as zero.
#[allow(non_snake_case)]
pub fn naive_solve_II<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    b: Option<&SeriesVector<F::Elem>>,
    n: usize,
    v: &[F::Elem],
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
    let zero = k.zero();
    let mut y: Vec<Vec<F::Elem>> = vec![v.to_vec()];
    let mut muls = 0u64;
    for step in 0..n - 1 {
        let mut next = Vec::with_capacity(r);
        for row in 0..r {
            let mut acc = b.map_or(zero.clone(), |b| b.component(row).coeffs().get(step).cloned().unwrap_or_else(|| zero.clone()));
            for i in 0..=step.min(a.precision().saturating_sub(1)) {
                for col in 0..r {
                    acc = k.add(&acc, &k.mul(a.get(row, col).coeff(i), &y[step - i][col]));
                }
            }
            muls += ((step.min(a.precision().saturating_sub(1)) + 1) * r) as u64;
            next.push(k.div(&acc, &k.from_u64(step as u64 + 1))?);
        }
        y.push(next);
    }
    ring.counter().add_field_muls(muls);
    SeriesMatrix::column((0..r).map(|i| Series::from_coeffs(y.iter().map(|c| c[i].clone()).collect())).collect())
}

/// Basis of `Y' = A·Y`, `Y(0) = V0`, column by column.
#[allow(non_snake_case)]
pub fn naive_solve_I<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    n: usize,
    v0: &crate::matrix::Matrix<F::Elem>,
) -> Result<SeriesMatrix<F::Elem>> {
    ring.mat_inverse_const(v0)?;
    let cols = (0..v0.cols())
        .map(|j| naive_solve_II(ring, a, None, n, &v0.column_values(j)))
        .collect::<Result<Vec<_>>>()?;
    SeriesMatrix::from_columns(&cols)
}

/// `Σ_j a_j y^{(j)} = rhs`, `y^{(k)}(0) = α_k`, solved for one coefficient
/// at a time from the coefficient of `t^m`.
pub fn naive_solve_scalar<F: Field>(
    ring: &Ring<F>,
    a: &[Series<F::Elem>],
    rhs: Option<&Series<F::Elem>>,
    alpha: &[F::Elem],
    n: usize,
) -> Result<Series<F::Elem>> {
    let k = ring.field();
    let r = a.len().saturating_sub(1);
    if r == 0 || alpha.len() != r {
        return Err(Error::DimensionMismatch(format!("{} initial values for {} coefficients", alpha.len(), a.len())));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    let lead = a[r].coeffs().first().filter(|c| !k.is_zero(c)).ok_or(Error::NotOrdinaryPoint)?;
    ring.ensure_characteristic(n.max(r))?;
    let size = n.max(r);
    // falling[x][j] = x (x−1) ⋯ (x−j+1)
    let falling: Vec<Vec<F::Elem>> = (0..size)
        .map(|x| {
            let mut row = vec![k.one()];
            for j in 1..=r {
                let f = if x + 1 >= j { k.from_u64((x + 1 - j) as u64) } else { k.zero() };
                row.push(k.mul(&row[j - 1], &f));
            }
            row
        })
        .collect();
    let mut y: Vec<F::Elem> = Vec::with_capacity(size);
    for (i, al) in alpha.iter().enumerate() {
        y.push(k.div(al, &falling[i][i])?);
    }
    let zero = k.zero();
    let mut muls = 0u64;
    for m in 0..n.saturating_sub(r) {
        let mut s = rhs.and_then(|f| f.coeffs().get(m)).cloned().unwrap_or_else(|| zero.clone());
        for (j, aj) in a.iter().enumerate() {
            for i in 0..=m.min(aj.precision().saturating_sub(1)) {
                if j == r && i == 0 {
                    continue;
                }
                let x = m - i + j;
                let term = k.mul(&k.mul(aj.coeff(i), &falling[x][j]), &y[x]);
                s = k.sub(&s, &term);
                muls += 2;
            }
        }
        let d = k.mul(lead, &falling[m + r][r]);
        y.push(k.div(&s, &d)?);
    }
    ring.counter().add_field_muls(muls);
    y.truncate(n);
    Ok(Series::from_coeffs(y))
}

/// Picard iteration `y ← v + ∫ φ(t, y)`. Round `j` settles coefficient
/// `j + 1`, so it only needs `φ` modulo `t^{j+1}`.
pub fn picard_solve_nonlinear<F: Field>(
    ring: &Ring<F>,
    phi: &dyn NonlinearEvaluator<F>,
    v: &[F::Elem],
    n: usize,
) -> Result<SeriesVector<F::Elem>> {
    let r = phi.arity();
    if v.len() != r {
        return Err(Error::DimensionMismatch(format!("{} initial values for {r} unknowns", v.len())));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    ring.ensure_characteristic(n)?;
    let k = ring.field();
    let slow = ring.naive();
    let constant = |i: usize| slow.constant(v[i].clone(), n);
    let mut y = SeriesMatrix::column((0..r).map(constant).collect())?;
    for j in 0..n - 1 {
        let value = phi.value(&slow, &y, j + 1)?;
        let entries = value
            .entries()
            .iter()
            .zip(v)
            .map(|(f, c)| {
                let mut coeffs = Vec::with_capacity(n);
                coeffs.push(c.clone());
                for (i, x) in f.coeffs().iter().enumerate() {
                    coeffs.push(k.div(x, &k.from_u64(i as u64 + 1))?);
                }
                coeffs.resize(n, k.zero());
                Ok(Series::from_coeffs(coeffs))
            })
            .collect::<Result<Vec<_>>>()?;
        y = SeriesMatrix::column(entries)?;
    }
    Ok(y)
}
