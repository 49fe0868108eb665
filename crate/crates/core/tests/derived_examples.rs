//! Examples whose expected values come from the reference solvers or from
//! direct arithmetic.

mod common;

use std::sync::Arc;

use common::*;
use seriesolve::dac::{self, CompanionOperator};
use seriesolve::residual::{linear_residual, scalar_residual, shifted_residual};
use seriesolve::series::naive_product;
use seriesolve::{
    newton, nonlinear, oracle, poly, special, Field, LinearEvaluator, MulAlgorithm, MulConfig, NonlinearEvaluator, OpCounter, PrimeField,
    Rationals, Result, Ring, Series, SeriesMatrix, SeriesVector, SparsePolySystem,
};

#[test]
fn ntt_product_matches_schoolbook() {
    let r = ring();
    let k = r.field();
    let mut g = rng(1);
    let a = series(k, &mut g, 512);
    let b = series(k, &mut g, 512);
    let fast = r.mul_with(&a, &b, 1023, MulAlgorithm::Ntt);
    assert_eq!(fast.coeffs(), naive_product(k, a.coeffs(), b.coeffs(), 1023).as_slice());
}

#[test]
fn integration_and_inversion() {
    let r = ring();
    let k = r.field();
    let mut g = rng(2);
    for n in 1..101 {
        let f = series(k, &mut g, n);
        assert_eq!(r.differentiate(&r.integrate(&f).unwrap()), f);
    }
    let f = unit_series(k, &mut g, 64);
    let inv = r.series_inverse(&f, 64).unwrap();
    assert_eq!(r.mul(&f, &inv, 64), r.one(64));
}

#[test]
fn matrix_product_matches_entrywise_schoolbook() {
    let r = ring();
    let k = r.field();
    let mut g = rng(3);
    let a = matrix(k, &mut g, 3, 3, 64);
    let b = matrix(k, &mut g, 3, 3, 64);
    let fast = r.mat_mul(&a, &b, 127).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = vec![k.zero(); 127];
            for l in 0..3 {
                let p = naive_product(k, a.get(i, l).coeffs(), b.get(l, j).coeffs(), 127);
                for (x, y) in acc.iter_mut().zip(p) {
                    *x = k.add(x, &y);
                }
            }
            assert_eq!(fast.get(i, j).coeffs(), acc.as_slice());
        }
    }
}

#[test]
fn matrix_inverse_residual() {
    let r = ring();
    let k = r.field();
    let mut g = rng(4);
    for (dim, n) in [(3, 64), (4, 128)] {
        let mut y = matrix(k, &mut g, dim, dim, n);
        let y0 = invertible(k, &mut g, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut c = y.get(i, j).coeffs().to_vec();
                c[0] = y0.get(i, j).clone();
                y = replace(&y, i, j, Series::from_coeffs(c));
            }
        }
        let z = r.mat_series_inverse(&y, n).unwrap();
        assert_eq!(r.mat_mul(&y, &z, n).unwrap(), r.identity_matrix(dim, n));
    }
}

fn replace<E: Clone>(m: &SeriesMatrix<E>, i: usize, j: usize, s: Series<E>) -> SeriesMatrix<E> {
    let mut e = m.entries().to_vec();
    e[i * m.cols() + j] = s;
    SeriesMatrix::new(m.rows(), m.cols(), e).unwrap()
}

#[test]
fn newton_step_from_verified_state() {
    let r = ring();
    let k = r.field();
    let mut g = rng(5);
    let a = matrix(k, &mut g, 3, 3, 16);
    let y0 = invertible(k, &mut g, 3);
    // verified state at m = 8: solution to order 7 and inverse to order 4
    let hom = newton::solve_hom(&r, &a, 8, &y0).unwrap();
    assert!(r.mat_is_zero(&linear_residual(&r, &a, None, &hom.y, 7).unwrap()));
    let (y, z) = newton::newton_step(&r, &hom.y, &hom.z, &a, 8).unwrap();
    assert_eq!(r.mat_mul(&y, &z, 8).unwrap(), r.identity_matrix(3, 8));
    assert!(r.mat_is_zero(&linear_residual(&r, &a, None, &y, 15).unwrap()));
}

#[test]
fn fundamental_matrix_matches_oracle() {
    let r = ring();
    let k = r.field();
    let mut g = rng(6);
    let n = 256;
    let a = matrix(k, &mut g, 4, 4, n - 1);
    let y0 = invertible(k, &mut g, 4);
    let hom = newton::solve_hom(&r, &a, n, &y0).unwrap();
    assert_eq!(hom.y, oracle::naive_solve_I(&r, &a, n, &y0).unwrap());
    assert_eq!(r.mat_mul(&hom.y, &hom.z, n / 2).unwrap(), r.identity_matrix(4, n / 2));
}

#[test]
fn inhomogeneous_matrix_matches_oracle() {
    let r = ring();
    let k = r.field();
    let mut g = rng(7);
    let n = 128;
    let a = matrix(k, &mut g, 3, 3, n - 1);
    let b = matrix(k, &mut g, 3, 3, n - 1);
    let y0 = invertible(k, &mut g, 3);
    let y = newton::solve_inhom(&r, &a, &b, n, &y0).unwrap();
    assert!(r.mat_is_zero(&linear_residual(&r, &a, Some(&b), &y, n - 1).unwrap()));
    for j in 0..3 {
        let col = oracle::naive_solve_II(&r, &a, Some(&b.column_of(j)), n, &y0.column_values(j)).unwrap();
        assert_eq!(y.column_of(j), col);
    }
}

#[test]
fn shifted_equation_residual() {
    let r = ring();
    let k = r.field();
    let mut g = rng(8);
    for p in [0u64, 1, 5, 40] {
        let a = matrix(k, &mut g, 3, 3, 64);
        let mut s = matrix(k, &mut g, 3, 1, 64);
        if p == 0 {
            s = r.mat_shift(&r.mat_resize(&s, 63), 1);
        }
        let v = scalars(k, &mut g, 3);
        let y = dac::divide_and_conquer(&r, &a, &s, p, 64, &v).unwrap();
        assert!(r.mat_is_zero(&shifted_residual(&r, &a, &s, p, 64, &y).unwrap()));
    }
}

#[test]
fn dac_solve_matches_newton_and_oracle() {
    let r = ring();
    let k = r.field();
    let mut g = rng(9);
    let n = 256;
    let a = matrix(k, &mut g, 4, 4, n - 1);
    let b = matrix(k, &mut g, 4, 1, n - 1);
    let v = scalars(k, &mut g, 4);
    let y = dac::solve(&r, &a, &b, n, &v).unwrap();
    assert_eq!(y, oracle::naive_solve_II(&r, &a, Some(&b), n, &v).unwrap());
    assert_eq!(y, newton::solve_inhom_vector(&r, &a, &b, n, &v).unwrap());
    let zero = r.zero_matrix(4, 1, n - 1);
    let basis = newton::solve_hom(&r, &a, n, &r.identity(4)).unwrap().y;
    let e2: Vec<_> = (0..4).map(|i| if i == 2 { k.one() } else { k.zero() }).collect();
    assert_eq!(dac::solve(&r, &a, &zero, n, &e2).unwrap(), basis.column_of(2));
}

#[test]
fn companion_matches_oracle_and_generic_path() {
    let r = ring();
    let k = r.field();
    let mut g = rng(10);
    let n = 128;
    let mut a: Vec<_> = (0..5).map(|_| series(k, &mut g, n - 1)).collect();
    a[4].coeffs_mut()[0] = k.one();
    let rhs = series(k, &mut g, n - 1);
    let alpha = scalars(k, &mut g, 4);
    let y = dac::solve_companion(&r, &a, Some(&rhs), n, &alpha).unwrap();
    assert_eq!(y, oracle::naive_solve_scalar(&r, &a, Some(&rhs), &alpha, n).unwrap());
    let (dense, b) = dac::companion_dense_system(&r, &a, Some(&rhs), n - 1).unwrap();
    let generic = dac::solve(&r, &dense, &b, n, &alpha).unwrap();
    assert_eq!(generic.component(0), &y);
    let (op, s) = dac::companion_system(&r, &a, Some(&rhs), n, &alpha).unwrap();
    let fast = dac::solve_shifted(&r, &op as &CompanionOperator<_>, &s, 0, n, &alpha).unwrap();
    assert_eq!(fast, generic);
    assert!(r.is_zero(&scalar_residual(&r, &a, Some(&rhs), &y, n - 4).unwrap()));
}

#[test]
fn dac_divides_only_by_small_integers() {
    let k = PrimeField::new(P).unwrap();
    let counter = Arc::new(OpCounter::with_division_log());
    let r = Ring::with_counter(k, counter.clone());
    let mut g = rng(11);
    let n = 100;
    let a = matrix(r.field(), &mut g, 2, 2, n - 1);
    let b = matrix(r.field(), &mut g, 2, 1, n - 1);
    dac::solve(&r, &a, &b, n, &scalars(r.field(), &mut g, 2)).unwrap();
    let divs = counter.divisions();
    assert_eq!(divs.len(), n - 1);
    assert!(divs.iter().all(|&d| (1..n as u64).contains(&d)));
}

#[test]
fn pade_denominator_divides_charpoly() {
    let r = ring();
    let k = r.field();
    let mut g = rng(12);
    let a = const_matrix(k, &mut g, 4);
    let v = scalars(k, &mut g, 4);
    let block = special::krylov_doubling(&r, &a, &v).unwrap();
    let chi = reversed_charpoly(k, &a);
    for i in 0..4 {
        let u = block.coordinate(i);
        let f = special::pade(&r, &u, 4).unwrap();
        let (_, rem) = poly::divrem(k, &chi, f.denominator());
        assert!(rem.is_empty());
        assert_eq!(special::expand_rational(&r, &f, 8), u);
    }
}

#[test]
fn rational_expansion_is_series_division() {
    let r = ring();
    let k = r.field();
    let mut g = rng(13);
    let num = scalars(k, &mut g, 5);
    let mut den = scalars(k, &mut g, 6);
    den[0] = k.one();
    let f = special::RationalFunction::new(k, num.clone(), den.clone()).unwrap();
    let want = r.mul(&Series::from_coeffs(num), &r.series_inverse(&Series::from_coeffs(den), 300).unwrap(), 300);
    assert_eq!(special::expand_rational(&r, &f, 299), want);
    assert_eq!(special::expand_rational_sliced(&r, &f, 299).unwrap(), want);
}

#[test]
fn constant_solvers_match_general_ones() {
    let r = ring();
    let k = r.field();
    let mut g = rng(14);
    let n = 512;
    let a = const_matrix(k, &mut g, 6);
    let v = scalars(k, &mut g, 6);
    let zero = r.zero_matrix(6, 1, n - 1);
    assert_eq!(special::solve_const_II(&r, &a, &v, n).unwrap(), dac::solve(&r, &r.constant_matrix(&a, n - 1), &zero, n, &v).unwrap());

    let a4 = const_matrix(k, &mut g, 4);
    let v0 = invertible(k, &mut g, 4);
    let n = 128;
    let hom = newton::solve_hom(&r, &r.constant_matrix(&a4, n - 1), n, &v0).unwrap();
    assert_eq!(special::solve_const_I(&r, &a4, &v0, n).unwrap(), hom.y);

    let mut coeffs = scalars(k, &mut g, 6);
    coeffs[5] = k.one();
    let alpha = scalars(k, &mut g, 5);
    let n = 256;
    let series: Vec<_> = coeffs.iter().map(|c| r.constant(c.clone(), n - 1)).collect();
    let want = oracle::naive_solve_scalar(&r, &series, None, &alpha, n).unwrap();
    assert_eq!(special::solve_const_ii(&r, &coeffs, &alpha, n).unwrap(), want);
    let basis = special::solve_const_i(&r, &coeffs, n).unwrap();
    for (j, y) in basis.iter().enumerate() {
        let e: Vec<_> = (0..5).map(|i| if i == j { k.one() } else { k.zero() }).collect();
        assert_eq!(y, &oracle::naive_solve_scalar(&r, &series, None, &e, n).unwrap());
    }
}

#[test]
fn polynomial_solvers_match_general_ones() {
    let r = ring();
    let k = r.field();
    let mut g = rng(15);
    let n = 128;
    let a = matrix(k, &mut g, 3, 3, 3);
    let b = matrix(k, &mut g, 3, 1, 3);
    let v = scalars(k, &mut g, 3);
    let want = dac::solve(&r, &r.mat_resize(&a, n - 1), &r.mat_resize(&b, n - 1), n, &v).unwrap();
    assert_eq!(special::solve_polycoeff_II(&r, &a, Some(&b), &v, n).unwrap(), want);

    let n = 256;
    let mut coeffs: Vec<_> = (0..4).map(|_| series(k, &mut g, 3)).collect();
    coeffs[3].coeffs_mut()[0] = k.one();
    let alpha = scalars(k, &mut g, 3);
    let padded: Vec<_> = coeffs.iter().map(|c| r.resize(c, n - 1)).collect();
    let want = dac::solve_companion(&r, &padded, None, n, &alpha).unwrap();
    assert_eq!(special::solve_polycoeff_ii(&r, &coeffs, &alpha, n).unwrap(), want);
    assert_eq!(oracle::naive_solve_scalar(&r, &padded, None, &alpha, n).unwrap(), want);
}

#[test]
fn airy_against_oracle() {
    let r = Ring::new(Rationals);
    let k = r.field();
    let n = 10;
    let a = [r.resize(&r.from_i64s(&[0, -1]), n - 1), r.zero(n - 1), r.one(n - 1)];
    let alpha = [k.one(), k.zero()];
    let want = oracle::naive_solve_scalar(&r, &a, None, &alpha, n).unwrap();
    let q = |x: i64, y: i64| num_rational::BigRational::new(x.into(), y.into());
    assert_eq!(&want.coeffs()[..7], &[q(1, 1), q(0, 1), q(0, 1), q(1, 6), q(0, 1), q(0, 1), q(1, 180)]);
    let sys = SeriesMatrix::new(2, 2, vec![r.zero(2), r.one(2), r.from_i64s(&[0, 1]), r.zero(2)]).unwrap();
    assert_eq!(special::solve_polycoeff_II(&r, &sys, None, &alpha, n).unwrap().component(0), &want);
}

#[test]
fn jacobian_matches_perturbation() {
    let r = ring();
    let k = r.field();
    let mut g = rng(16);
    let text = format!(
        "dy1 = {}*y1^2 + {}*t*y1*y2 + {}\ndy2 = {}*y2^2 + {}*t^2*y1 + {}*y1*y2",
        common::P - 3,
        5,
        7,
        11,
        common::P - 13,
        17
    );
    let sys = SparsePolySystem::parse(k, &text, 0).unwrap();
    let (n, shift) = (32, 16);
    let y = matrix(k, &mut g, 2, 1, n);
    let (phi, jac) = sys.eval(&r, &y, n).unwrap();
    for j in 0..2 {
        let e = series(k, &mut g, n - shift);
        let mut entries = y.entries().to_vec();
        entries[j] = r.add(&entries[j], &r.shift(&e, shift));
        let moved = sys.value(&r, &SeriesMatrix::column(entries).unwrap(), n).unwrap();
        let diff = r.mat_sub(&moved, &phi).unwrap();
        for i in 0..2 {
            let d = diff.component(i);
            assert!(d.coeffs()[..shift].iter().all(|c| k.is_zero(c)));
            let want = r.mul(jac.get(i, j), &e, n - shift);
            assert_eq!(&d.coeffs()[shift..], want.coeffs());
        }
    }
}

struct Riccati;

impl NonlinearEvaluator<PrimeField> for Riccati {
    fn arity(&self) -> usize {
        1
    }

    fn eval(&self, ring: &Ring<PrimeField>, y: &SeriesVector<seriesolve::Fp>, n: usize) -> Result<(SeriesVector<seriesolve::Fp>, SeriesMatrix<seriesolve::Fp>)> {
        let y0 = ring.resize(y.component(0), n);
        let t = ring.resize(&ring.from_i64s(&[0, 1]), n);
        let phi = ring.add(&t, &ring.mul(&y0, &y0, n));
        let jac = ring.scale(&ring.field().from_u64(2), &y0);
        Ok((SeriesMatrix::column(vec![phi])?, SeriesMatrix::new(1, 1, vec![jac])?))
    }
}

#[test]
fn riccati_against_picard() {
    let r = ring();
    let k = r.field();
    let sys = SparsePolySystem::parse(k, "dy1 = t + y1^2", 0).unwrap();
    let want = oracle::picard_solve_nonlinear(&r, &sys, &[k.zero()], 16).unwrap();
    assert_eq!(nonlinear::solve_nonlinear(&r, &sys, &[k.zero()], 16).unwrap(), want);
    assert_eq!(nonlinear::solve_nonlinear(&r, &Riccati, &[k.zero()], 16).unwrap(), want);
    // y = t²/2 + t⁵/20 + …
    assert_eq!(want.component(0).coeff(2), &k.inv(&k.from_u64(2)).unwrap());
    assert_eq!(want.component(0).coeff(5), &k.inv(&k.from_u64(20)).unwrap());
}

#[test]
fn quadratic_system_against_picard() {
    let r = ring();
    let k = r.field();
    let mut g = rng(17);
    let sys = SparsePolySystem::parse(k, "dy1 = 3*y1*y2 + t\ndy2 = 5*y1^2 - 2*t^2*y2 + 1\ndy3 = y1*y3 + 7*y2", 0).unwrap();
    let v = scalars(k, &mut g, 3);
    let n = 40;
    let y = nonlinear::solve_nonlinear(&r, &sys, &v, n).unwrap();
    assert_eq!(y, oracle::picard_solve_nonlinear(&r, &sys, &v, n).unwrap());
}

#[test]
fn linear_evaluator_matches_dac() {
    let r = ring();
    let k = r.field();
    let mut g = rng(18);
    let n = 64;
    let a = matrix(k, &mut g, 3, 3, n - 1);
    let b = matrix(k, &mut g, 3, 1, n - 1);
    let v = scalars(k, &mut g, 3);
    let lin = LinearEvaluator { a: &a, b: Some(&b) };
    assert_eq!(nonlinear::solve_nonlinear(&r, &lin, &v, n).unwrap(), dac::solve(&r, &a, &b, n, &v).unwrap());
}

#[test]
fn oracle_residuals() {
    let r = ring();
    let k = r.field();
    let mut g = rng(19);
    let n = 60;
    let a = matrix(k, &mut g, 3, 3, n - 1);
    let b = matrix(k, &mut g, 3, 1, n - 1);
    let y = oracle::naive_solve_II(&r, &a, Some(&b), n, &scalars(k, &mut g, 3)).unwrap();
    assert!(r.mat_is_zero(&linear_residual(&r, &a, Some(&b), &y, n - 1).unwrap()));
    let mut eq: Vec<_> = (0..4).map(|_| series(k, &mut g, n)).collect();
    eq[3].coeffs_mut()[0] = k.one();
    let y = oracle::naive_solve_scalar(&r, &eq, None, &scalars(k, &mut g, 3), n).unwrap();
    assert!(r.is_zero(&scalar_residual(&r, &eq, None, &y, n - 3).unwrap()));
}

#[test]
fn forced_algorithms_give_identical_solutions() {
    let mut g = rng(20);
    let base = ring();
    let a = matrix(base.field(), &mut g, 2, 2, 199);
    let outputs: Vec<_> = [MulAlgorithm::Naive, MulAlgorithm::Karatsuba, MulAlgorithm::Ntt]
        .into_iter()
        .map(|alg| {
            let r = ring().with_config(MulConfig { forced: Some(alg), ..MulConfig::default() });
            newton::solve_hom(&r, &a, 200, &r.identity(2)).unwrap().y.column_of(0)
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let e0 = vec![base.field().one(), base.field().zero()];
    assert_eq!(outputs[0], dac::solve(&base, &a, &base.zero_matrix(2, 1, 199), 200, &e0).unwrap());
}
