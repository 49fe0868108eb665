//! Fundamental solutions of `Y' = A Y` by simultaneous Newton iteration on
//! the solution and its inverse, and the inhomogeneous variant obtained by
//! variation of parameters.
//!
//! Each doubling round costs five polynomial-matrix products:
//! `Y·Z`, `Z·(I − YZ)`, `A·Y`, `Z·(Y' − AY)` and `Y·∫(…)`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, SeriesMatrix, SeriesVector};
use crate::series::Ring;

/// Output of [`solve_hom`]: `Y' ≡ AY mod t^{N-1}` with `Y(0) = Y0` at
/// precision `N`, and `Z ≡ Y^{-1}` at precision `⌈N/2⌉`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSolution<E> {
    pub y: SeriesMatrix<E>,
    pub z: SeriesMatrix<E>,
}

/// One round at parameter `m`: on entry `Y` has precision `m`, `Z` has
/// precision `m/2` and is correct to that order; on exit `Z` is correct mod
/// `t^m` and `Y` solves the system mod `t^{min(2m, cap) - 1}`.
fn double<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    y: &SeriesMatrix<F::Elem>,
    z: &SeriesMatrix<F::Elem>,
    m: usize,
    cap: usize,
) -> Result<(SeriesMatrix<F::Elem>, SeriesMatrix<F::Elem>)> {
    let z = ring.schulz_step(z, y, m)?;
    let p = (2 * m).min(cap);
    let dy = ring.mat_resize(&ring.mat_differentiate(y), p - 1);
    let ay = ring.mat_mul(a, y, p - 1)?;
    let defect = ring.mat_sub(&dy, &ay)?;
    let q = ring.mat_mul(&z, &defect, p - 1)?;
    let iq = ring.mat_integrate(&q)?;
    let corr = ring.mat_mul(y, &iq, p)?;
    let y = ring.mat_sub(&ring.mat_resize(y, p), &corr)?;
    Ok((y, z))
}

fn check_square(name: &str, rows: usize, cols: usize, r: usize) -> Result<()> {
    if rows != r || cols != r {
        return Err(Error::DimensionMismatch(format!("{name} is {rows}x{cols}, expected {r}x{r}")));
    }
    Ok(())
}

fn check_precision(name: &str, have: usize, need: usize) -> Result<()> {
    if have < need {
        return Err(Error::IndexOutOfRange(format!(
            "{name} has precision {have}, at least {need} is needed"
        )));
    }
    Ok(())
}

/// Single lifting step from an order-`m/2` inverse and an order-`(m−1)`
/// solution to orders `m` and `2m − 1`. `m` must be even.
pub fn newton_step<F: Field>(
    ring: &Ring<F>,
    y0: &SeriesMatrix<F::Elem>,
    z0: &SeriesMatrix<F::Elem>,
    a: &SeriesMatrix<F::Elem>,
    m: usize,
) -> Result<(SeriesMatrix<F::Elem>, SeriesMatrix<F::Elem>)> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::IndexOutOfRange(format!("step parameter {m} must be even and positive")));
    }
    let r = a.rows();
    check_square("A", a.rows(), a.cols(), r)?;
    check_square("Y0", y0.rows(), y0.cols(), r)?;
    check_square("Z0", z0.rows(), z0.cols(), r)?;
    ring.ensure_characteristic(2 * m)?;
    let y0 = ring.mat_resize(y0, m);
    let z0 = ring.mat_resize(z0, m / 2);
    double(ring, a, &y0, &z0, m, 2 * m)
}

/// Fundamental matrix with `Y(0) = Y0`. `A` must be known to precision
/// `N − 1`.
pub fn solve_hom<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    n: usize,
    y0: &Matrix<F::Elem>,
) -> Result<HomSolution<F::Elem>> {
    let r = a.rows();
    check_square("A", a.rows(), a.cols(), r)?;
    check_square("Y0", y0.rows(), y0.cols(), r)?;
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    check_precision("A", a.precision(), n - 1)?;
    ring.ensure_characteristic(n)?;
    let z0 = ring.mat_inverse_const(y0)?;

    // Y ← (I + t A_0) Y_0, Z ← Y_0^{-1}
    let a0 = if a.precision() > 0 {
        a.coefficient(0)
    } else {
        ring.zero_scalar_matrix(r, r)
    };
    let a0y0 = ring.scalar_mat_mul(&a0, y0)?;
    let mut y = ring.from_coefficient_matrices(&[y0.clone(), a0y0])?;
    y = ring.mat_resize(&y, n.min(2));
    let mut z = ring.constant_matrix(&z0, 1);

    let mut m = 2;
    while m < n {
        (y, z) = double(ring, a, &y, &z, m, n)?;
        m *= 2;
    }
    let z = ring.mat_resize(&z, n.div_ceil(2));
    Ok(HomSolution { y, z })
}

/// `Y' = AY + B`, `Y(0) = Y0` at precision `N`; `B` must be known to
/// precision `N − 1`.
pub fn solve_inhom<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    b: &SeriesMatrix<F::Elem>,
    n: usize,
    y0: &Matrix<F::Elem>,
) -> Result<SeriesMatrix<F::Elem>> {
    let r = a.rows();
    check_square("B", b.rows(), b.cols(), r)?;
    check_precision("B", b.precision(), n.saturating_sub(1))?;
    let hom = solve_hom(ring, a, n, y0)?;
    let z = ring.schulz_step(&hom.z, &hom.y, n)?;
    let zb = ring.mat_mul(&z, b, n - 1)?;
    let izb = ring.mat_integrate(&zb)?;
    let particular = ring.mat_mul(&hom.y, &izb, n)?;
    ring.mat_add(&particular, &hom.y)
}

/// Single solution `y' = Ay + b`, `y(0) = v`, as `Ỹ (v + ∫ Z̃ b)` with `Ỹ`
/// the fundamental matrix normalised at the identity.
pub fn solve_inhom_vector<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    b: &SeriesVector<F::Elem>,
    n: usize,
    v: &[F::Elem],
) -> Result<SeriesVector<F::Elem>> {
    let r = a.rows();
    if b.rows() != r || b.cols() != 1 || v.len() != r {
        return Err(Error::DimensionMismatch(format!("system of size {r} with mismatched b or v")));
    }
    check_precision("b", b.precision(), n.saturating_sub(1))?;
    let hom = solve_hom(ring, a, n, &ring.identity(r))?;
    let z = ring.schulz_step(&hom.z, &hom.y, n)?;
    let zb = ring.mat_mul(&z, b, n - 1)?;
    let w = ring.mat_integrate(&zb)?;
    let init = ring.constant_matrix(&Matrix::column(v.to_vec()), n);
    let w = ring.mat_add(&w, &init)?;
    ring.mat_mul(&hom.y, &w, n)
}
