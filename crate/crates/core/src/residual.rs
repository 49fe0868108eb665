//! Defining congruences of each problem, evaluated by direct arithmetic.
//! A solver output is correct iff the returned residual is zero.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{SeriesMatrix, SeriesVector};
use crate::series::{Ring, Series};

/// `Y' − A·Y − B mod t^order`; `order` must not exceed `precision(Y) − 1`.
pub fn linear_residual<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    b: Option<&SeriesMatrix<F::Elem>>,
    y: &SeriesMatrix<F::Elem>,
    order: usize,
) -> Result<SeriesMatrix<F::Elem>> {
    if order + 1 > y.precision().max(1) {
        return Err(Error::IndexOutOfRange(format!(
            "residual order {order} for a solution of precision {}",
            y.precision()
        )));
    }
    let dy = ring.mat_resize(&ring.mat_differentiate(y), order);
    let ay = ring.mat_mul(a, y, order)?;
    let mut res = ring.mat_sub(&dy, &ay)?;
    if let Some(b) = b {
        res = ring.mat_sub(&res, &ring.mat_resize(b, order))?;
    }
    Ok(res)
}

/// `t·y' + (p·I − t·A)·y − s mod t^m`.
pub fn shifted_residual<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    s: &SeriesVector<F::Elem>,
    p: u64,
    m: usize,
    y: &SeriesVector<F::Elem>,
) -> Result<SeriesVector<F::Elem>> {
    let k = ring.field();
    let y = ring.mat_resize(y, m);
    let pk = k.from_u64(p);
    let entries: Vec<Series<F::Elem>> = y
        .entries()
        .iter()
        .map(|e| {
            Series::from_coeffs(
                e.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| k.mul(&k.add(&k.from_u64(i as u64), &pk), c))
                    .collect(),
            )
        })
        .collect();
    let lhs = SeriesMatrix::column(entries)?;
    let tay = ring.mat_shift(&ring.mat_mul(a, &y, m.saturating_sub(1))?, 1);
    let lhs = ring.mat_sub(&lhs, &ring.mat_resize(&tay, m))?;
    ring.mat_sub(&lhs, &ring.mat_resize(s, m))
}

/// `Σ_j a_j · y^{(j)} − rhs mod t^order` for the scalar equation with
/// coefficients `a_0..a_r`.
pub fn scalar_residual<F: Field>(
    ring: &Ring<F>,
    a: &[Series<F::Elem>],
    rhs: Option<&Series<F::Elem>>,
    y: &Series<F::Elem>,
    order: usize,
) -> Result<Series<F::Elem>> {
    let r = a.len().saturating_sub(1);
    if order + r > y.precision() {
        return Err(Error::IndexOutOfRange(format!(
            "residual order {order} needs precision {} for an order-{r} equation",
            order + r
        )));
    }
    let mut acc = ring.zero(order);
    let mut deriv = y.clone();
    for (j, aj) in a.iter().enumerate() {
        if j > 0 {
            deriv = ring.differentiate(&deriv);
        }
        acc = ring.add(&acc, &ring.mul(aj, &deriv, order));
    }
    if let Some(rhs) = rhs {
        acc = ring.sub(&acc, &ring.resize(rhs, order));
    }
    Ok(acc)
}
