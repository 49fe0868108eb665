//! Scalar matrices and matrices of truncated series.
//!
//! A [`SeriesMatrix`] is equivalently a polynomial with matrix coefficients;
//! products go through the transform domain when the field has one, which
//! gives the `r²·M(d) + r³·d` cost shape.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::series::{transform_muls, MulAlgorithm, Ring, Series};

/// Dense row-major matrix over the field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Column vector.
    pub fn column(values: Vec<E>) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn column_values(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_values(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
}

/// `rows × cols` array of series sharing one precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesMatrix<E> {
    rows: usize,
    cols: usize,
    precision: usize,
    entries: Vec<Series<E>>,
}

/// Column of series (`cols == 1`).
pub type SeriesVector<E> = SeriesMatrix<E>;

impl<E: Clone> SeriesMatrix<E> {
    /// Row-major entries; all must share `precision`.
    pub fn new(rows: usize, cols: usize, entries: Vec<Series<E>>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} series matrix",
                entries.len()
            )));
        }
        let precision = entries[0].precision();
        if entries.iter().any(|e| e.precision() != precision) {
            return Err(Error::DimensionMismatch("entries of unequal precision".into()));
        }
        Ok(SeriesMatrix {
            rows,
            cols,
            precision,
            entries,
        })
    }

    pub fn column(entries: Vec<Series<E>>) -> Result<Self> {
        let n = entries.len();
        Self::new(n, 1, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn get(&self, i: usize, j: usize) -> &Series<E> {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Series<E>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Series<E>> {
        self.entries
    }

    /// Entry `i` of a column vector.
    pub fn component(&self, i: usize) -> &Series<E> {
        self.get(i, 0)
    }

    pub fn column_of(&self, j: usize) -> SeriesVector<E> {
        let entries = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
        SeriesMatrix::column(entries).expect("rows > 0")
    }

    pub fn from_columns(columns: &[SeriesVector<E>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.rows);
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for c in columns {
                if c.rows != rows || c.cols != 1 {
                    return Err(Error::DimensionMismatch("columns of different shapes".into()));
                }
                entries.push(c.get(i, 0).clone());
            }
        }
        Self::new(rows, cols, entries)
    }

    /// Entrywise `mod t^k`.
    pub fn low(&self, k: usize) -> Result<Self> {
        self.map_entries(|e| e.low(k))
    }

    pub fn mid(&self, k: usize, l: usize) -> Result<Self> {
        self.map_entries(|e| e.mid(k, l))
    }

    fn map_entries(&self, f: impl Fn(&Series<E>) -> Result<Series<E>>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        let precision = entries.first().map_or(0, Series::precision);
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            precision,
            entries,
        })
    }

    /// Coefficient of `t^k` as a scalar matrix.
    pub fn coefficient(&self, k: usize) -> Matrix<E> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.entries.iter().map(|e| e.coeff(k).clone()).collect(),
        }
    }
}

impl<F: Field> Ring<F> {
    pub fn identity(&self, r: usize) -> Matrix<F::Elem> {
        let mut m = Matrix {
            rows: r,
            cols: r,
            data: vec![self.field().zero(); r * r],
        };
        for i in 0..r {
            m.set(i, i, self.field().one());
        }
        m
    }

    pub fn zero_scalar_matrix(&self, rows: usize, cols: usize) -> Matrix<F::Elem> {
        Matrix {
            rows,
            cols,
            data: vec![self.field().zero(); rows * cols],
        }
    }

    pub fn zero_matrix(&self, rows: usize, cols: usize, n: usize) -> SeriesMatrix<F::Elem> {
        SeriesMatrix {
            rows,
            cols,
            precision: n,
            entries: vec![self.zero(n); rows * cols],
        }
    }

    /// The constant matrix `m` at precision `n`.
    pub fn constant_matrix(&self, m: &Matrix<F::Elem>, n: usize) -> SeriesMatrix<F::Elem> {
        SeriesMatrix {
            rows: m.rows,
            cols: m.cols,
            precision: n,
            entries: m.data.iter().map(|c| self.constant(c.clone(), n)).collect(),
        }
    }

    pub fn identity_matrix(&self, r: usize, n: usize) -> SeriesMatrix<F::Elem> {
        self.constant_matrix(&self.identity(r), n)
    }

    /// `Σ_k coeffs[k] t^k`.
    pub fn from_coefficient_matrices(&self, coeffs: &[Matrix<F::Elem>]) -> Result<SeriesMatrix<F::Elem>> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no coefficients".into()))?;
        let (rows, cols) = (first.rows, first.cols);
        if coeffs.iter().any(|c| c.rows != rows || c.cols != cols) {
            return Err(Error::DimensionMismatch("coefficient matrices differ in shape".into()));
        }
        let entries = (0..rows * cols)
            .map(|idx| Series::from_coeffs(coeffs.iter().map(|c| c.data[idx].clone()).collect()))
            .collect();
        SeriesMatrix::new(rows, cols, entries)
    }

    fn map_matrix(
        &self,
        m: &SeriesMatrix<F::Elem>,
        f: impl Fn(&Series<F::Elem>) -> Series<F::Elem>,
    ) -> SeriesMatrix<F::Elem> {
        let entries: Vec<_> = m.entries.iter().map(f).collect();
        SeriesMatrix {
            rows: m.rows,
            cols: m.cols,
            precision: entries.first().map_or(0, Series::precision),
            entries,
        }
    }

    fn zip_matrix(
        &self,
        a: &SeriesMatrix<F::Elem>,
        b: &SeriesMatrix<F::Elem>,
        f: impl Fn(&Series<F::Elem>, &Series<F::Elem>) -> Series<F::Elem>,
    ) -> Result<SeriesMatrix<F::Elem>> {
        if a.rows != b.rows || a.cols != b.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        let entries: Vec<_> = a.entries.iter().zip(&b.entries).map(|(x, y)| f(x, y)).collect();
        Ok(SeriesMatrix {
            rows: a.rows,
            cols: a.cols,
            precision: a.precision.min(b.precision),
            entries,
        })
    }

    /// Entrywise sum at the smaller precision.
    pub fn mat_add(&self, a: &SeriesMatrix<F::Elem>, b: &SeriesMatrix<F::Elem>) -> Result<SeriesMatrix<F::Elem>> {
        self.zip_matrix(a, b, |x, y| self.add(x, y))
    }

    pub fn mat_sub(&self, a: &SeriesMatrix<F::Elem>, b: &SeriesMatrix<F::Elem>) -> Result<SeriesMatrix<F::Elem>> {
        self.zip_matrix(a, b, |x, y| self.sub(x, y))
    }

    pub fn mat_resize(&self, m: &SeriesMatrix<F::Elem>, n: usize) -> SeriesMatrix<F::Elem> {
        let mut out = self.map_matrix(m, |e| self.resize(e, n));
        out.precision = n;
        out
    }

    pub fn mat_shift(&self, m: &SeriesMatrix<F::Elem>, k: usize) -> SeriesMatrix<F::Elem> {
        let mut out = self.map_matrix(m, |e| self.shift(e, k));
        out.precision = m.precision + k;
        out
    }

    pub fn mat_differentiate(&self, m: &SeriesMatrix<F::Elem>) -> SeriesMatrix<F::Elem> {
        let mut out = self.map_matrix(m, |e| self.differentiate(e));
        out.precision = m.precision.saturating_sub(1);
        out
    }

    pub fn mat_integrate(&self, m: &SeriesMatrix<F::Elem>) -> Result<SeriesMatrix<F::Elem>> {
        let inv = self.integer_inverses(m.precision)?;
        let mut out = self.map_matrix(m, |e| self.integrate_with(e, &inv));
        out.precision = m.precision + 1;
        Ok(out)
    }

    pub fn mat_scale(&self, c: &F::Elem, m: &SeriesMatrix<F::Elem>) -> SeriesMatrix<F::Elem> {
        self.map_matrix(m, |e| self.scale(c, e))
    }

    pub fn mat_is_zero(&self, m: &SeriesMatrix<F::Elem>) -> bool {
        m.entries.iter().all(|e| self.is_zero(e))
    }

    /// `F·G mod t^n`, operands read as polynomials.
    pub fn mat_mul(
        &self,
        a: &SeriesMatrix<F::Elem>,
        b: &SeriesMatrix<F::Elem>,
        n: usize,
    ) -> Result<SeriesMatrix<F::Elem>> {
        if a.cols != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        self.counter().record_mat_mul(a.rows, n);
        let la = a.precision.min(n);
        let lb = b.precision.min(n);
        let cfg = self.config();
        let use_transform = match cfg.forced {
            Some(MulAlgorithm::Ntt) => true,
            Some(_) => false,
            None => la.min(lb) >= cfg.ntt_threshold,
        };
        if use_transform && la > 0 && lb > 0 && self.transform_fits(la + lb) {
            return Ok(self.mat_mul_transform(a, b, la, lb, n));
        }
        let k = self.field();
        let entries = (0..a.rows * b.cols)
            .map(|idx| {
                let (i, j) = (idx / b.cols, idx % b.cols);
                let mut acc = self.zero(n);
                for l in 0..a.cols {
                    let p = self.mul(a.get(i, l), b.get(l, j), n);
                    for (x, y) in acc.coeffs_mut().iter_mut().zip(p.coeffs()) {
                        *x = k.add(x, y);
                    }
                }
                acc
            })
            .collect();
        SeriesMatrix::new(a.rows, b.cols, entries)
    }

    /// Evaluate every entry, multiply scalar matrices pointwise (schoolbook),
    /// interpolate.
    fn mat_mul_transform(
        &self,
        a: &SeriesMatrix<F::Elem>,
        b: &SeriesMatrix<F::Elem>,
        la: usize,
        lb: usize,
        n: usize,
    ) -> SeriesMatrix<F::Elem> {
        let k = self.field();
        let t = k.transform().expect("checked by caller");
        let len = (la + lb - 1).next_power_of_two();
        let zero = k.zero();
        let forward = |e: &Series<F::Elem>, l: usize| {
            let mut v = e.coeffs()[..l].to_vec();
            v.resize(len, zero.clone());
            t.forward(&mut v);
            v
        };
        let ta: Vec<Vec<F::Elem>> = a.entries.par_iter().map(|e| forward(e, la)).collect();
        let tb: Vec<Vec<F::Elem>> = b.entries.par_iter().map(|e| forward(e, lb)).collect();
        let inner = a.cols;
        let entries: Vec<Series<F::Elem>> = (0..a.rows * b.cols)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / b.cols, idx % b.cols);
                let mut acc = vec![zero.clone(); len];
                for l in 0..inner {
                    let x = &ta[i * inner + l];
                    let y = &tb[l * b.cols + j];
                    for ((s, u), v) in acc.iter_mut().zip(x).zip(y) {
                        *s = k.add(s, &k.mul(u, v));
                    }
                }
                t.inverse(&mut acc);
                acc.resize(n, zero.clone());
                Series::from_coeffs(acc)
            })
            .collect();
        let transforms = (a.entries.len() + b.entries.len() + entries.len()) as u64;
        let pointwise = (a.rows * inner * b.cols * len) as u64;
        self.counter()
            .add_field_muls(transforms * transform_muls(len) + pointwise + (entries.len() * len) as u64);
        SeriesMatrix {
            rows: a.rows,
            cols: b.cols,
            precision: n,
            entries,
        }
    }

    pub fn scalar_mat_mul(&self, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>> {
        if a.cols != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        let k = self.field();
        let mut out = self.zero_scalar_matrix(a.rows, b.cols);
        for i in 0..a.rows {
            for l in 0..a.cols {
                let x = a.get(i, l);
                if k.is_zero(x) {
                    continue;
                }
                for j in 0..b.cols {
                    let idx = i * b.cols + j;
                    out.data[idx] = k.add(&out.data[idx], &k.mul(x, b.get(l, j)));
                }
            }
        }
        self.counter().add_field_muls((a.rows * a.cols * b.cols) as u64);
        Ok(out)
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn mat_inverse_const(&self, m: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let k = self.field();
        let r = m.rows;
        let mut a = m.clone();
        let mut inv = self.identity(r);
        for col in 0..r {
            let pivot = (col..r).find(|&i| !k.is_zero(a.get(i, col))).ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for j in 0..r {
                    a.data.swap(pivot * r + j, col * r + j);
                    inv.data.swap(pivot * r + j, col * r + j);
                }
            }
            let pinv = k.inv(a.get(col, col)).expect("pivot is nonzero");
            for j in 0..r {
                a.data[col * r + j] = k.mul(&a.data[col * r + j], &pinv);
                inv.data[col * r + j] = k.mul(&inv.data[col * r + j], &pinv);
            }
            for i in (0..r).filter(|&i| i != col) {
                let factor = a.get(i, col).clone();
                if k.is_zero(&factor) {
                    continue;
                }
                for j in 0..r {
                    let da = k.mul(&factor, &a.data[col * r + j]);
                    a.data[i * r + j] = k.sub(&a.data[i * r + j], &da);
                    let di = k.mul(&factor, &inv.data[col * r + j]);
                    inv.data[i * r + j] = k.sub(&inv.data[i * r + j], &di);
                }
            }
        }
        Ok(inv)
    }

    /// `I − Y·Z mod t^m`.
    pub(crate) fn inverse_defect(
        &self,
        y: &SeriesMatrix<F::Elem>,
        z: &SeriesMatrix<F::Elem>,
        m: usize,
    ) -> Result<SeriesMatrix<F::Elem>> {
        let yz = self.mat_mul(y, z, m)?;
        self.mat_sub(&self.identity_matrix(y.rows, m), &yz)
    }

    /// One Schulz update `Z + Z(I − YZ) mod t^m`; doubles the order of
    /// `I − YZ` up to `m`.
    pub fn schulz_step(
        &self,
        z: &SeriesMatrix<F::Elem>,
        y: &SeriesMatrix<F::Elem>,
        m: usize,
    ) -> Result<SeriesMatrix<F::Elem>> {
        let defect = self.inverse_defect(y, z, m)?;
        let corr = self.mat_mul(z, &defect, m)?;
        self.mat_add(&self.mat_resize(z, m), &corr)
    }

    /// `Y^{-1} mod t^n` by doubling Schulz steps from `Y(0)^{-1}`.
    pub fn mat_series_inverse(&self, y: &SeriesMatrix<F::Elem>, n: usize) -> Result<SeriesMatrix<F::Elem>> {
        if y.rows != y.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        if y.precision == 0 {
            return Err(Error::SingularMatrix);
        }
        let z0 = self.mat_inverse_const(&y.coefficient(0))?;
        let mut z = self.constant_matrix(&z0, n.min(1));
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            z = self.schulz_step(&z, y, prec)?;
        }
        Ok(z)
    }
}
