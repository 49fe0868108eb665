//! Single solutions of `y' = A y + b` by divide and conquer on the shifted
//! equation `t·y' + (p·I − t·A)·y = s mod t^m`.
//!
//! Solving at precision `m` splits into the lower `⌊m/2⌋` coefficients and a
//! shifted equation for the upper part; the only divisions are by the
//! shifts `p ∈ 1..N`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, SeriesMatrix, SeriesVector};
use crate::series::{Ring, Series};

/// How the system matrix acts on a vector of series.
pub trait SystemOperator<F: Field>: Sync {
    fn dim(&self) -> usize;
    /// `A·y mod t^n`.
    fn apply(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<SeriesVector<F::Elem>>;
}

/// A general dense `r × r` series matrix.
pub struct DenseOperator<'a, E>(pub &'a SeriesMatrix<E>);

impl<F: Field> SystemOperator<F> for DenseOperator<'_, F::Elem> {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn apply(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<SeriesVector<F::Elem>> {
        ring.mat_mul(self.0, y, n)
    }
}

/// Companion matrix: shift rows, last row `(c_0, …, c_{r−1})`. Applying it
/// takes `r` series products instead of `r²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionOperator<E> {
    last_row: Vec<Series<E>>,
}

impl<E: Clone> CompanionOperator<E> {
    pub fn new(last_row: Vec<Series<E>>) -> Self {
        CompanionOperator { last_row }
    }

    pub fn last_row(&self) -> &[Series<E>] {
        &self.last_row
    }
}

impl<F: Field> SystemOperator<F> for CompanionOperator<F::Elem> {
    fn dim(&self) -> usize {
        self.last_row.len()
    }

    fn apply(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<SeriesVector<F::Elem>> {
        let r = self.last_row.len();
        let mut out = Vec::with_capacity(r);
        for i in 1..r {
            out.push(ring.resize(y.component(i), n));
        }
        let mut last = ring.zero(n);
        for (c, yi) in self.last_row.iter().zip(y.entries()) {
            last = ring.add(&last, &ring.mul(c, yi, n));
        }
        out.push(last);
        SeriesMatrix::column(out)
    }
}

/// Last row `−a_i / a_r` of the companion system of `Σ a_j y^{(j)} = rhs`,
/// at precision `n`.
pub fn companion_row<F: Field>(ring: &Ring<F>, a: &[Series<F::Elem>], n: usize) -> Result<Vec<Series<F::Elem>>> {
    let lead_inv = leading_inverse(ring, a, n)?;
    let r = a.len() - 1;
    Ok(a[..r]
        .iter()
        .map(|ai| ring.neg(&ring.mul(ai, &lead_inv, n)))
        .collect())
}

fn leading_inverse<F: Field>(ring: &Ring<F>, a: &[Series<F::Elem>], n: usize) -> Result<Series<F::Elem>> {
    if a.len() < 2 {
        return Err(Error::DimensionMismatch("an equation of order r needs r + 1 coefficients, r >= 1".into()));
    }
    let lead = &a[a.len() - 1];
    if lead.precision() == 0 || ring.field().is_zero(lead.coeff(0)) {
        return Err(Error::NotOrdinaryPoint);
    }
    ring.series_inverse(lead, n)
}

/// Dense companion matrix of the equation at precision `n`.
pub fn companion_matrix<F: Field>(ring: &Ring<F>, a: &[Series<F::Elem>], n: usize) -> Result<SeriesMatrix<F::Elem>> {
    let row = companion_row(ring, a, n)?;
    let r = row.len();
    let mut entries = Vec::with_capacity(r * r);
    for i in 0..r - 1 {
        for j in 0..r {
            entries.push(if j == i + 1 { ring.one(n) } else { ring.zero(n) });
        }
    }
    entries.extend(row);
    SeriesMatrix::new(r, r, entries)
}

fn check_shapes<F: Field>(op: &dyn SystemOperator<F>, s: &SeriesVector<F::Elem>, v: &[F::Elem]) -> Result<()> {
    let r = op.dim();
    if s.rows() != r || s.cols() != 1 || v.len() != r {
        return Err(Error::DimensionMismatch(format!(
            "system of size {r} with a {}x{} right-hand side and {} initial values",
            s.rows(),
            s.cols(),
            v.len()
        )));
    }
    Ok(())
}

/// Solution of `t·y' + (p·I − t·A)·y ≡ s mod t^m` with `y(0) = v` when
/// `p = 0`.
pub fn divide_and_conquer<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    s: &SeriesVector<F::Elem>,
    p: u64,
    m: usize,
    v: &[F::Elem],
) -> Result<SeriesVector<F::Elem>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("system matrix must be square".into()));
    }
    solve_shifted(ring, &DenseOperator(a), s, p, m, v)
}

/// [`divide_and_conquer`] for any [`SystemOperator`].
pub fn solve_shifted<F: Field>(
    ring: &Ring<F>,
    op: &dyn SystemOperator<F>,
    s: &SeriesVector<F::Elem>,
    p: u64,
    m: usize,
    v: &[F::Elem],
) -> Result<SeriesVector<F::Elem>> {
    check_shapes(op, s, v)?;
    if m == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    if s.precision() < m {
        return Err(Error::IndexOutOfRange(format!(
            "right-hand side has precision {}, {m} needed",
            s.precision()
        )));
    }
    // shifts p, …, p + m − 1 are divided by (0 only when p = 0)
    let c = ring.field().characteristic();
    if c != 0 && p + m as u64 - 1 >= c {
        return Err(Error::CharacteristicTooSmall {
            characteristic: c,
            required: p + m as u64,
        });
    }
    let s = s.low(m)?;
    recurse(ring, op, &s, p, m, v)
}

fn recurse<F: Field>(
    ring: &Ring<F>,
    op: &dyn SystemOperator<F>,
    s: &SeriesVector<F::Elem>,
    p: u64,
    m: usize,
    v: &[F::Elem],
) -> Result<SeriesVector<F::Elem>> {
    let k = ring.field();
    if m == 1 {
        let entries = if p == 0 {
            if s.entries().iter().any(|e| !k.is_zero(e.coeff(0))) {
                return Err(Error::InconsistentBaseCase);
            }
            v.iter().map(|c| Series::from_coeffs(vec![c.clone()])).collect()
        } else {
            ring.counter().record_division(p);
            let pinv = k.inv(&k.from_u64(p)).ok_or(Error::DivisionByZero)?;
            s.entries()
                .iter()
                .map(|e| Series::from_coeffs(vec![k.mul(&pinv, e.coeff(0))]))
                .collect()
        };
        return SeriesMatrix::column(entries);
    }
    let d = m / 2;
    let y0 = recurse(ring, op, &s.low(d)?, p, d, v)?;
    // t·y0' and p·y0 vanish above degree d − 1, so the middle part of the
    // defect is s[d..m] + (A·y0)[d−1..m−1].
    let ay = op.apply(ring, &y0, m - 1)?;
    let upper = s.mid(d, m)?;
    let shifted = ay.mid(d - 1, m - 1)?;
    let rest = ring.mat_add(&upper, &shifted)?;
    let y1 = recurse(ring, op, &rest, p + d as u64, m - d, v)?;
    let entries = y0
        .into_entries()
        .into_iter()
        .zip(y1.into_entries())
        .map(|(lo, hi)| {
            let mut c = lo.into_coeffs();
            c.extend(hi.into_coeffs());
            Series::from_coeffs(c)
        })
        .collect();
    SeriesMatrix::column(entries)
}

/// `y' = A·y + b mod t^{N−1}`, `y(0) = v`, precision `N`. `A` and `b` must
/// be known to precision `N − 1`.
pub fn solve<F: Field>(
    ring: &Ring<F>,
    a: &SeriesMatrix<F::Elem>,
    b: &SeriesVector<F::Elem>,
    n: usize,
    v: &[F::Elem],
) -> Result<SeriesVector<F::Elem>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("system matrix must be square".into()));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    ring.ensure_characteristic(n)?;
    check_input_precision(a.precision(), b.precision(), n)?;
    let s = ring.mat_shift(&ring.mat_resize(b, n - 1), 1);
    solve_shifted(ring, &DenseOperator(a), &s, 0, n, v)
}

fn check_input_precision(pa: usize, pb: usize, n: usize) -> Result<()> {
    if pa < n - 1 || pb < n - 1 {
        return Err(Error::IndexOutOfRange(format!(
            "coefficients known to precision {}, {} needed",
            pa.min(pb),
            n - 1
        )));
    }
    Ok(())
}

/// Solution of `Σ_{j=0}^{r} a_j y^{(j)} = rhs` with `y^{(k)}(0) = α_k`,
/// through the companion system with the cheap companion product.
pub fn solve_companion<F: Field>(
    ring: &Ring<F>,
    a: &[Series<F::Elem>],
    rhs: Option<&Series<F::Elem>>,
    n: usize,
    alpha: &[F::Elem],
) -> Result<Series<F::Elem>> {
    let (op, s) = companion_system(ring, a, rhs, n, alpha)?;
    let y = solve_shifted(ring, &op, &s, 0, n, alpha)?;
    Ok(y.component(0).clone())
}

/// Companion operator and shifted right-hand side `t·(0, …, 0, rhs/a_r)`.
pub fn companion_system<F: Field>(
    ring: &Ring<F>,
    a: &[Series<F::Elem>],
    rhs: Option<&Series<F::Elem>>,
    n: usize,
    alpha: &[F::Elem],
) -> Result<(CompanionOperator<F::Elem>, SeriesVector<F::Elem>)> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    let r = a.len().saturating_sub(1);
    if alpha.len() != r {
        return Err(Error::DimensionMismatch(format!("{} initial values for order {r}", alpha.len())));
    }
    ring.ensure_characteristic(n)?;
    let pa = a.iter().map(Series::precision).min().unwrap_or(0);
    check_input_precision(pa, rhs.map_or(n, Series::precision), n)?;
    let lead_inv = leading_inverse(ring, a, n - 1)?;
    let row = a[..r]
        .iter()
        .map(|ai| ring.neg(&ring.mul(ai, &lead_inv, n - 1)))
        .collect();
    let mut s: Vec<Series<F::Elem>> = vec![ring.zero(n); r];
    if let Some(rhs) = rhs {
        s[r - 1] = ring.shift(&ring.mul(rhs, &lead_inv, n - 1), 1);
    }
    Ok((CompanionOperator::new(row), SeriesMatrix::column(s)?))
}

/// Companion data as an explicit dense system: `(A, b)` with `b = (0, …, rhs/a_r)`.
pub fn companion_dense_system<F: Field>(
    ring: &Ring<F>,
    a: &[Series<F::Elem>],
    rhs: Option<&Series<F::Elem>>,
    n: usize,
) -> Result<(SeriesMatrix<F::Elem>, SeriesVector<F::Elem>)> {
    let m = companion_matrix(ring, a, n)?;
    let r = m.rows();
    let mut b = vec![ring.zero(n); r];
    if let Some(rhs) = rhs {
        let lead_inv = leading_inverse(ring, a, n)?;
        b[r - 1] = ring.mul(rhs, &lead_inv, n);
    }
    Ok((m, SeriesMatrix::column(b)?))
}

/// Scalar vector as a constant column.
pub fn constant_vector<F: Field>(ring: &Ring<F>, v: &[F::Elem], n: usize) -> SeriesVector<F::Elem> {
    ring.constant_matrix(&Matrix::column(v.to_vec()), n)
}
