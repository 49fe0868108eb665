//! Seeded random operands for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seriesolve::{Field, Fp, Matrix, PrimeField, Ring, Series, SeriesMatrix};

/// 2^27 · 15 + 1, with 2^27-th roots of unity.
pub const PRIME: u64 = 2_013_265_921;

pub struct Operands {
    rng: ChaCha8Rng,
    field: PrimeField,
}

impl Operands {
    pub fn new(seed: u64) -> Self {
        Operands {
            rng: ChaCha8Rng::seed_from_u64(seed),
            field: PrimeField::new(PRIME).expect("prime modulus"),
        }
    }

    pub fn ring(&self) -> Ring<PrimeField> {
        Ring::new(self.field.clone())
    }

    pub fn scalars(&mut self, n: usize) -> Vec<Fp> {
        (0..n).map(|_| self.field.from_u64(self.rng.gen_range(0..PRIME))).collect()
    }

    pub fn series(&mut self, n: usize) -> Series<Fp> {
        Series::from_coeffs(self.scalars(n))
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, n: usize) -> SeriesMatrix<Fp> {
        let entries = (0..rows * cols).map(|_| self.series(n)).collect();
        SeriesMatrix::new(rows, cols, entries).expect("shape")
    }

    pub fn constant_matrix(&mut self, r: usize) -> Matrix<Fp> {
        Matrix::from_vec(r, r, self.scalars(r * r)).expect("shape")
    }
}
