#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seriesolve::{poly, Field, Matrix, PrimeField, Ring, Series, SeriesMatrix};

pub const P: u64 = 2_013_265_921;

pub fn ring() -> Ring<PrimeField> {
    Ring::new(PrimeField::new(P).unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scalar<F: Field>(k: &F, rng: &mut ChaCha8Rng) -> F::Elem {
    k.from_u64(rng.gen_range(0..P))
}

pub fn series<F: Field>(k: &F, rng: &mut ChaCha8Rng, n: usize) -> Series<F::Elem> {
    Series::from_coeffs((0..n).map(|_| scalar(k, rng)).collect())
}

pub fn unit_series<F: Field>(k: &F, rng: &mut ChaCha8Rng, n: usize) -> Series<F::Elem> {
    let mut c: Vec<_> = (0..n).map(|_| scalar(k, rng)).collect();
    if n > 0 && k.is_zero(&c[0]) {
        c[0] = k.one();
    }
    Series::from_coeffs(c)
}

pub fn matrix<F: Field>(k: &F, rng: &mut ChaCha8Rng, rows: usize, cols: usize, n: usize) -> SeriesMatrix<F::Elem> {
    SeriesMatrix::new(rows, cols, (0..rows * cols).map(|_| series(k, rng, n)).collect()).unwrap()
}

pub fn scalars<F: Field>(k: &F, rng: &mut ChaCha8Rng, n: usize) -> Vec<F::Elem> {
    (0..n).map(|_| scalar(k, rng)).collect()
}

pub fn const_matrix<F: Field>(k: &F, rng: &mut ChaCha8Rng, r: usize) -> Matrix<F::Elem> {
    Matrix::from_vec(r, r, scalars(k, rng, r * r)).unwrap()
}

/// Unit upper triangular, hence invertible.
pub fn invertible<F: Field>(k: &F, rng: &mut ChaCha8Rng, r: usize) -> Matrix<F::Elem> {
    let mut m = Matrix::from_vec(r, r, vec![k.zero(); r * r]).unwrap();
    for i in 0..r {
        m.set(i, i, k.one());
        for j in i + 1..r {
            m.set(i, j, scalar(k, rng));
        }
    }
    m
}

/// `det(I − tA)` by evaluation at `0..=r` and interpolation.
pub fn reversed_charpoly<F: Field>(k: &F, a: &Matrix<F::Elem>) -> Vec<F::Elem> {
    let r = a.rows();
    let xs: Vec<F::Elem> = (0..=r as u64).map(|x| k.from_u64(x)).collect();
    let ys: Vec<F::Elem> = xs
        .iter()
        .map(|x| {
            let m: Vec<F::Elem> = (0..r * r)
                .map(|idx| {
                    let (i, j) = (idx / r, idx % r);
                    let d = if i == j { k.one() } else { k.zero() };
                    k.sub(&d, &k.mul(x, a.get(i, j)))
                })
                .collect();
            det(k, m, r)
        })
        .collect();
    let mut out = vec![k.zero(); r + 1];
    for (i, xi) in xs.iter().enumerate() {
        let mut basis = vec![k.one()];
        let mut denom = k.one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = poly::mul(k, &basis, &[k.neg(xj), k.one()]);
                denom = k.mul(&denom, &k.sub(xi, xj));
            }
        }
        let c = k.mul(&ys[i], &k.inv(&denom).unwrap());
        for (o, bj) in out.iter_mut().zip(&basis) {
            *o = k.add(o, &k.mul(&c, bj));
        }
    }
    out
}

pub fn det<F: Field>(k: &F, mut m: Vec<F::Elem>, r: usize) -> F::Elem {
    let mut acc = k.one();
    for c in 0..r {
        let Some(p) = (c..r).find(|&i| !k.is_zero(&m[i * r + c])) else {
            return k.zero();
        };
        if p != c {
            for j in 0..r {
                m.swap(p * r + j, c * r + j);
            }
            acc = k.neg(&acc);
        }
        let piv = m[c * r + c].clone();
        acc = k.mul(&acc, &piv);
        let inv = k.inv(&piv).unwrap();
        for i in c + 1..r {
            let f = k.mul(&m[i * r + c], &inv);
            for j in c..r {
                let d = k.mul(&f, &m[c * r + j]);
                m[i * r + j] = k.sub(&m[i * r + j], &d);
            }
        }
    }
    acc
}
