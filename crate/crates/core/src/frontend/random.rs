use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CoeffClass, ProblemKind, ProblemSpec};
use crate::error::Result;
use crate::field::{FieldDescriptor, Rationals};
use crate::nonlinear::{Monomial, SparsePolySystem};

struct Gen {
    rng: ChaCha8Rng,
    field: FieldDescriptor,
}

impl Gen {
    fn scalar(&mut self) -> BigRational {
        match self.field {
            FieldDescriptor::Prime(p) => BigRational::from_integer(self.rng.gen_range(0..p).into()),
            FieldDescriptor::Rationals => BigRational::from_integer(self.rng.gen_range(-5i64..=5).into()),
        }
    }

    fn nonzero(&mut self) -> BigRational {
        loop {
            let c = self.scalar();
            if c != BigRational::from_integer(0.into()) {
                return c;
            }
        }
    }

    fn list(&mut self, len: usize) -> Vec<BigRational> {
        (0..len).map(|_| self.scalar()).collect()
    }
}

/// Reproducible random instance. Constant instances are homogeneous,
/// polynomial ones have degree bound `1 + seed mod 3`, scalar equations have
/// `a_r(0) ≠ 0`, initial matrices are unit upper triangular and non-linear
/// systems are sparse and quadratic.
pub fn random_spec(kind: ProblemKind, coeffs: CoeffClass, field: FieldDescriptor, r: usize, n: usize, seed: u64) -> Result<ProblemSpec> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed ^ ((r as u64) << 40) ^ ((n as u64) << 20)),
        field,
    };
    let coeffs = if kind == ProblemKind::Nonlinear { CoeffClass::Series } else { coeffs };
    let degree = (coeffs == CoeffClass::Polynomial).then_some(1 + (seed % 3) as usize);
    let len = match coeffs {
        CoeffClass::Series => n.saturating_sub(1).max(1),
        CoeffClass::Constant => 1,
        CoeffClass::Polynomial => degree.unwrap_or(0) + 1,
    };
    let inhomogeneous = coeffs != CoeffClass::Constant;
    let mut spec = ProblemSpec {
        kind,
        coeffs,
        degree,
        field,
        r,
        n,
        matrix_a: Vec::new(),
        vector_b: None,
        equation: Vec::new(),
        rhs: None,
        system: None,
        init: Vec::new(),
    };
    match kind {
        ProblemKind::SystemSingle | ProblemKind::SystemBasis => {
            spec.matrix_a = (0..r * r).map(|_| g.list(len)).collect();
            if kind == ProblemKind::SystemSingle && inhomogeneous {
                spec.vector_b = Some((0..r).map(|_| g.list(len)).collect());
            }
        }
        ProblemKind::ScalarSingle | ProblemKind::ScalarBasis => {
            spec.equation = (0..=r).map(|_| g.list(len)).collect();
            spec.equation[r][0] = g.nonzero();
            if kind == ProblemKind::ScalarSingle && coeffs == CoeffClass::Series {
                spec.rhs = Some(g.list(len));
            }
        }
        ProblemKind::Nonlinear => {
            let eqs = (0..r)
                .map(|_| {
                    let terms = g.rng.gen_range(1..=3);
                    (0..terms)
                        .map(|_| {
                            let mut y_exps = vec![0u32; r];
                            for _ in 0..g.rng.gen_range(0..=2) {
                                y_exps[g.rng.gen_range(0..r)] += 1;
                            }
                            Monomial {
                                coeff: g.nonzero(),
                                t_exp: g.rng.gen_range(0..=2),
                                y_exps,
                            }
                        })
                        .collect()
                })
                .collect();
            spec.system = Some(SparsePolySystem::new(&Rationals, eqs)?);
        }
    }
    match kind {
        ProblemKind::SystemBasis => {
            spec.init = (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| match i.cmp(&j) {
                            std::cmp::Ordering::Less => g.scalar(),
                            std::cmp::Ordering::Equal => BigRational::from_integer(1.into()),
                            std::cmp::Ordering::Greater => BigRational::from_integer(0.into()),
                        })
                        .collect()
                })
                .collect();
        }
        ProblemKind::ScalarBasis => {}
        _ => spec.init = vec![g.list(r)],
    }
    spec.validate()
}
