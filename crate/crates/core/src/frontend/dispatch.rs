use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use super::{CoeffClass, Engine, ProblemKind, ProblemSpec};
use crate::counter::{CounterSnapshot, OpCounter};
use crate::dac;
use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor, PrimeField, Rationals};
use crate::matrix::{Matrix, SeriesMatrix, SeriesVector};
use crate::newton;
use crate::nonlinear::{self, Monomial, SparsePolySystem};
use crate::oracle;
use crate::residual::{linear_residual, scalar_residual};
use crate::series::{Ring, Series};
use crate::special;

/// Solver output, shaped by the problem class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution<E> {
    /// Problems II and non-linear.
    Vector(SeriesVector<E>),
    /// Problem I.
    Matrix(SeriesMatrix<E>),
    /// Problem ii.
    Scalar(Series<E>),
    /// Problem i: `y_j` with `y_j^{(k)}(0) = δ_{jk}`.
    Basis(Vec<Series<E>>),
}

impl<E: Clone> Solution<E> {
    /// Labelled series in output order.
    pub fn entries(&self) -> Vec<(String, Series<E>)> {
        match self {
            Solution::Vector(v) => v.entries().iter().enumerate().map(|(i, s)| (format!("y{}", i + 1), s.clone())).collect(),
            Solution::Matrix(m) => m
                .entries()
                .iter()
                .enumerate()
                .map(|(idx, s)| (format!("Y[{},{}]", idx / m.cols() + 1, idx % m.cols() + 1), s.clone()))
                .collect(),
            Solution::Scalar(s) => vec![("y".to_string(), s.clone())],
            Solution::Basis(b) => b.iter().enumerate().map(|(i, s)| (format!("y{}", i + 1), s.clone())).collect(),
        }
    }
}

fn unsupported(engine: Engine, what: impl Into<String>) -> Error {
    Error::EngineUnsupported {
        engine: engine.to_string(),
        what: what.into(),
    }
}

fn inhomogeneous(spec: &ProblemSpec) -> bool {
    spec.vector_b.is_some() || spec.rhs.is_some()
}

/// The engine that `engine` stands for on `spec`, or `EngineUnsupported`.
pub(crate) fn resolve(spec: &ProblemSpec, engine: Engine) -> Result<Engine> {
    let kind = spec.kind;
    let resolved = match engine {
        Engine::Auto => match (kind, spec.coeffs) {
            (ProblemKind::Nonlinear, _) => Engine::Newton,
            (_, CoeffClass::Constant) if !inhomogeneous(spec) => Engine::Const,
            (ProblemKind::ScalarSingle, CoeffClass::Constant | CoeffClass::Polynomial) if spec.rhs.is_some() => Engine::Dac,
            (_, CoeffClass::Constant | CoeffClass::Polynomial) => Engine::Polycoeff,
            (ProblemKind::ScalarBasis | ProblemKind::SystemBasis, CoeffClass::Series) => Engine::Newton,
            (_, CoeffClass::Series) => Engine::Dac,
        },
        Engine::Const => {
            if kind == ProblemKind::Nonlinear || spec.coeffs != CoeffClass::Constant || inhomogeneous(spec) {
                return Err(unsupported(engine, format!("problem {kind} with {} coefficients{}", spec.coeffs, if inhomogeneous(spec) { " and a right-hand side" } else { "" })));
            }
            Engine::Const
        }
        Engine::Polycoeff => {
            if kind == ProblemKind::Nonlinear || spec.coeffs == CoeffClass::Series || spec.rhs.is_some() {
                return Err(unsupported(engine, format!("problem {kind} with {} coefficients{}", spec.coeffs, if spec.rhs.is_some() { " and a right-hand side" } else { "" })));
            }
            Engine::Polycoeff
        }
        other => other,
    };
    if engine == Engine::Auto {
        log::info!("engine auto: problem {kind} with {} coefficients uses {resolved}", spec.coeffs);
    }
    Ok(resolved)
}

/// Field images of the problem data.
struct Data<E> {
    n: usize,
    /// Series length of the coefficients for the general solvers.
    len: usize,
    /// Short series are suspicious; short constant or polynomial lists are not.
    warn_short: bool,
    r: usize,
    a: Vec<Series<E>>,
    b: Option<Vec<Series<E>>>,
    equation: Vec<Series<E>>,
    rhs: Option<Series<E>>,
    init: Vec<Vec<E>>,
}

fn to_series<F: Field>(k: &F, list: &[BigRational]) -> Result<Series<F::Elem>> {
    list.iter().map(|q| k.from_rational(q)).collect::<Result<Vec<_>>>().map(Series::from_coeffs)
}

fn convert<F: Field>(ring: &Ring<F>, spec: &ProblemSpec) -> Result<Data<F::Elem>> {
    let k = ring.field();
    let lists = |v: &[Vec<BigRational>]| v.iter().map(|l| to_series(k, l)).collect::<Result<Vec<_>>>();
    let init = spec
        .init
        .iter()
        .map(|row| row.iter().map(|q| k.from_rational(q)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Data {
        n: spec.n,
        len: spec.n.saturating_sub(1).max(1),
        warn_short: spec.coeffs == CoeffClass::Series,
        r: spec.r,
        a: lists(&spec.matrix_a)?,
        b: spec.vector_b.as_deref().map(lists).transpose()?,
        equation: lists(&spec.equation)?,
        rhs: spec.rhs.as_deref().map(|l| to_series(k, l)).transpose()?,
        init,
    })
}

impl<E: Clone> Data<E> {
    /// Entries padded or cut to `len` coefficients.
    fn fit<F: Field<Elem = E>>(&self, ring: &Ring<F>, list: &[Series<E>], len: usize) -> Vec<Series<E>> {
        if self.warn_short && len > 1 && list.iter().any(|s| s.precision() < len) {
            log::warn!("coefficients shorter than {len} terms are padded with zeros");
        }
        list.iter().map(|s| ring.resize(s, len)).collect()
    }

    fn series_a<F: Field<Elem = E>>(&self, ring: &Ring<F>, len: usize) -> Result<SeriesMatrix<E>> {
        SeriesMatrix::new(self.r, self.r, self.fit(ring, &self.a, len))
    }

    fn series_b<F: Field<Elem = E>>(&self, ring: &Ring<F>, len: usize) -> Result<Option<SeriesVector<E>>> {
        self.b.as_ref().map(|b| SeriesMatrix::column(self.fit(ring, b, len))).transpose()
    }

    fn series_eq<F: Field<Elem = E>>(&self, ring: &Ring<F>, len: usize) -> Vec<Series<E>> {
        self.fit(ring, &self.equation, len)
    }

    fn series_rhs<F: Field<Elem = E>>(&self, ring: &Ring<F>, len: usize) -> Option<Series<E>> {
        self.rhs.as_ref().map(|s| self.fit(ring, std::slice::from_ref(s), len).remove(0))
    }

    /// Length of the longest stored coefficient list.
    fn stored_len(&self) -> usize {
        self.a
            .iter()
            .chain(self.b.iter().flatten())
            .chain(&self.equation)
            .map(Series::precision)
            .max()
            .unwrap_or(1)
    }

    fn v(&self) -> &[E] {
        &self.init[0]
    }

    fn v0<F: Field<Elem = E>>(&self, ring: &Ring<F>) -> Result<Matrix<E>> {
        if self.init.is_empty() {
            Ok(ring.identity(self.r))
        } else {
            Matrix::from_rows(self.init.clone())
        }
    }

    fn constant_a<F: Field<Elem = E>>(&self, ring: &Ring<F>) -> Result<Matrix<E>> {
        Ok(self.series_a(ring, 1)?.coefficient(0))
    }
}

fn unit<F: Field>(k: &F, r: usize, j: usize) -> Vec<F::Elem> {
    (0..r).map(|i| if i == j { k.one() } else { k.zero() }).collect()
}

fn to_system<F: Field>(k: &F, sys: &SparsePolySystem<BigRational>) -> Result<SparsePolySystem<F::Elem>> {
    let eqs = sys
        .equations()
        .iter()
        .map(|eq| {
            eq.iter()
                .map(|m| {
                    Ok(Monomial {
                        coeff: k.from_rational(&m.coeff)?,
                        t_exp: m.t_exp,
                        y_exps: m.y_exps.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SparsePolySystem::new(k, eqs)
}

/// Solves `spec` with `engine` over the ring's field, which must match
/// `spec.field`. Returns the engine actually used.
pub fn dispatch<F: Field>(ring: &Ring<F>, spec: &ProblemSpec, engine: Engine) -> Result<(Engine, Solution<F::Elem>)> {
    if ring.field().descriptor() != spec.field {
        return Err(Error::MixedFields);
    }
    let engine = resolve(spec, engine)?;
    let k = ring.field();
    let d = convert(ring, spec)?;
    let (n, len, r) = (d.n, d.len, d.r);
    let zero_b = || ring.zero_matrix(r, 1, len);
    let sol = match (engine, spec.kind) {
        (_, ProblemKind::Nonlinear) => {
            let phi = to_system(k, spec.system.as_ref().expect("validated"))?;
            let y = if engine == Engine::Naive {
                oracle::picard_solve_nonlinear(ring, &phi, d.v(), n)?
            } else {
                nonlinear::solve_nonlinear(ring, &phi, d.v(), n)?
            };
            Solution::Vector(y)
        }

        (Engine::Newton, ProblemKind::SystemBasis) => Solution::Matrix(newton::solve_hom(ring, &d.series_a(ring, len)?, n, &d.v0(ring)?)?.y),
        (Engine::Newton, ProblemKind::SystemSingle) => {
            let b = d.series_b(ring, len)?.unwrap_or_else(zero_b);
            Solution::Vector(newton::solve_inhom_vector(ring, &d.series_a(ring, len)?, &b, n, d.v())?)
        }
        (Engine::Newton, ProblemKind::ScalarBasis) => {
            let a = dac::companion_matrix(ring, &d.series_eq(ring, len), len)?;
            let y = newton::solve_hom(ring, &a, n, &ring.identity(r))?.y;
            Solution::Basis((0..r).map(|j| y.get(0, j).clone()).collect())
        }
        (Engine::Newton, ProblemKind::ScalarSingle) => {
            let (a, b) = dac::companion_dense_system(ring, &d.series_eq(ring, len), d.series_rhs(ring, len).as_ref(), len)?;
            let y = newton::solve_inhom_vector(ring, &a, &b, n, d.v())?;
            Solution::Scalar(y.component(0).clone())
        }

        (Engine::Dac, ProblemKind::SystemSingle) => {
            let b = d.series_b(ring, len)?.unwrap_or_else(zero_b);
            Solution::Vector(dac::solve(ring, &d.series_a(ring, len)?, &b, n, d.v())?)
        }
        (Engine::Dac, ProblemKind::SystemBasis) => {
            let a = d.series_a(ring, len)?;
            let v0 = d.v0(ring)?;
            ring.mat_inverse_const(&v0)?;
            let cols = (0..r)
                .map(|j| dac::solve(ring, &a, &zero_b(), n, &v0.column_values(j)))
                .collect::<Result<Vec<_>>>()?;
            Solution::Matrix(SeriesMatrix::from_columns(&cols)?)
        }
        (Engine::Dac, ProblemKind::ScalarSingle) => {
            Solution::Scalar(dac::solve_companion(ring, &d.series_eq(ring, len), d.series_rhs(ring, len).as_ref(), n, d.v())?)
        }
        (Engine::Dac, ProblemKind::ScalarBasis) => {
            let a = d.series_eq(ring, len);
            let basis = (0..r)
                .map(|j| dac::solve_companion(ring, &a, None, n, &unit(k, r, j)))
                .collect::<Result<Vec<_>>>()?;
            Solution::Basis(basis)
        }

        (Engine::Const, ProblemKind::SystemSingle) => Solution::Vector(special::solve_const_II(ring, &d.constant_a(ring)?, d.v(), n)?),
        (Engine::Const, ProblemKind::SystemBasis) => Solution::Matrix(special::solve_const_I(ring, &d.constant_a(ring)?, &d.v0(ring)?, n)?),
        (Engine::Const, ProblemKind::ScalarSingle) => {
            let a: Vec<_> = d.series_eq(ring, 1).into_iter().map(|s| s.coeff(0).clone()).collect();
            Solution::Scalar(special::solve_const_ii(ring, &a, d.v(), n)?)
        }
        (Engine::Const, ProblemKind::ScalarBasis) => {
            let a: Vec<_> = d.series_eq(ring, 1).into_iter().map(|s| s.coeff(0).clone()).collect();
            Solution::Basis(special::solve_const_i(ring, &a, n)?)
        }

        (Engine::Polycoeff, kind) => {
            let plen = d.stored_len();
            match kind {
                ProblemKind::SystemSingle => {
                    let b = d.series_b(ring, plen)?;
                    Solution::Vector(special::solve_polycoeff_II(ring, &d.series_a(ring, plen)?, b.as_ref(), d.v(), n)?)
                }
                ProblemKind::SystemBasis => {
                    let a = d.series_a(ring, plen)?;
                    let v0 = d.v0(ring)?;
                    ring.mat_inverse_const(&v0)?;
                    let cols = (0..r)
                        .map(|j| special::solve_polycoeff_II(ring, &a, None, &v0.column_values(j), n))
                        .collect::<Result<Vec<_>>>()?;
                    Solution::Matrix(SeriesMatrix::from_columns(&cols)?)
                }
                ProblemKind::ScalarSingle => Solution::Scalar(special::solve_polycoeff_ii(ring, &d.series_eq(ring, plen), d.v(), n)?),
                _ => {
                    let a = d.series_eq(ring, plen);
                    let basis = (0..r)
                        .map(|j| special::solve_polycoeff_ii(ring, &a, &unit(k, r, j), n))
                        .collect::<Result<Vec<_>>>()?;
                    Solution::Basis(basis)
                }
            }
        }

        (Engine::Naive, ProblemKind::SystemSingle) => {
            let b = d.series_b(ring, len)?;
            Solution::Vector(oracle::naive_solve_II(ring, &d.series_a(ring, len)?, b.as_ref(), n, d.v())?)
        }
        (Engine::Naive, ProblemKind::SystemBasis) => Solution::Matrix(oracle::naive_solve_I(ring, &d.series_a(ring, len)?, n, &d.v0(ring)?)?),
        (Engine::Naive, ProblemKind::ScalarSingle) => {
            Solution::Scalar(oracle::naive_solve_scalar(ring, &d.series_eq(ring, len), d.series_rhs(ring, len).as_ref(), d.v(), n)?)
        }
        (Engine::Naive, ProblemKind::ScalarBasis) => {
            let a = d.series_eq(ring, len);
            let basis = (0..r)
                .map(|j| oracle::naive_solve_scalar(ring, &a, None, &unit(k, r, j), n))
                .collect::<Result<Vec<_>>>()?;
            Solution::Basis(basis)
        }
        (Engine::Auto, _) => unreachable!("resolved above"),
    };
    Ok((engine, sol))
}

/// One labelled output series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub label: String,
    pub coefficients: Vec<String>,
}

/// Field-independent rendering of a solve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub problem: String,
    pub engine: String,
    pub field: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<Entry>,
    pub counters: CounterSnapshot,
}

impl SolutionReport {
    /// `# label` followed by one coefficient per line, for every entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "# {}", e.label);
            for c in &e.coefficients {
                let _ = writeln!(out, "{c}");
            }
        }
        out
    }
}

fn report<F: Field>(field: F, spec: &ProblemSpec, engine: Engine) -> Result<SolutionReport> {
    let counter = Arc::new(OpCounter::new());
    let ring = Ring::with_counter(field, counter.clone());
    let (used, sol) = dispatch(&ring, spec, engine)?;
    let k = ring.field();
    let entries = sol
        .entries()
        .into_iter()
        .map(|(label, s)| Entry {
            label,
            coefficients: s.coeffs().iter().map(|c| k.format(c)).collect(),
        })
        .collect();
    Ok(SolutionReport {
        problem: spec.kind.to_string(),
        engine: used.to_string(),
        field: spec.field.to_string(),
        n: spec.n,
        entries,
        counters: counter.snapshot(),
    })
}

/// Solves `spec` in its own field.
pub fn solve_spec(spec: &ProblemSpec, engine: Engine) -> Result<SolutionReport> {
    match spec.field {
        FieldDescriptor::Prime(p) => report(PrimeField::new(p)?, spec, engine),
        FieldDescriptor::Rationals => report(Rationals, spec, engine),
    }
}

/// Outcome of [`check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub engine: String,
    /// Fast output equals the oracle's coefficient for coefficient.
    pub matches_oracle: bool,
    /// The defining congruence and initial conditions hold.
    pub residual_zero: bool,
    pub oracle_residual_zero: bool,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.matches_oracle && self.residual_zero && self.oracle_residual_zero
    }
}

/// Whether `sol` satisfies the problem's defining congruence at its
/// contracted order and its initial conditions.
pub(crate) fn residual_holds<F: Field>(ring: &Ring<F>, spec: &ProblemSpec, sol: &Solution<F::Elem>) -> Result<bool> {
    let k = ring.field();
    let d = convert(ring, spec)?;
    let (n, len, r) = (d.n, d.len, d.r);
    let order = n - 1;
    let init_ok = |y: &Series<F::Elem>, alpha: &[F::Elem]| -> Result<bool> {
        let mut fact = k.one();
        for (i, al) in alpha.iter().enumerate().take(n) {
            if i > 0 {
                fact = k.mul(&fact, &k.from_u64(i as u64));
            }
            if k.mul(y.coeff(i), &fact) != *al {
                return Ok(false);
            }
        }
        Ok(true)
    };
    Ok(match (spec.kind, sol) {
        (ProblemKind::SystemSingle, Solution::Vector(y)) => {
            let a = d.series_a(ring, len)?;
            let b = d.series_b(ring, len)?;
            ring.mat_is_zero(&linear_residual(ring, &a, b.as_ref(), y, order)?) && y.coefficient(0).column_values(0) == d.v()
        }
        (ProblemKind::SystemBasis, Solution::Matrix(y)) => {
            let a = d.series_a(ring, len)?;
            ring.mat_is_zero(&linear_residual(ring, &a, None, y, order)?) && y.coefficient(0) == d.v0(ring)?
        }
        (ProblemKind::ScalarSingle, Solution::Scalar(y)) => {
            let ord = n.saturating_sub(r);
            let eq = d.series_eq(ring, len);
            let rhs = d.series_rhs(ring, len);
            ring.is_zero(&scalar_residual(ring, &eq, rhs.as_ref(), y, ord)?) && init_ok(y, d.v())?
        }
        (ProblemKind::ScalarBasis, Solution::Basis(ys)) => {
            let ord = n.saturating_sub(r);
            let eq = d.series_eq(ring, len);
            let mut ok = ys.len() == r;
            for (j, y) in ys.iter().enumerate() {
                ok &= ring.is_zero(&scalar_residual(ring, &eq, None, y, ord)?) && init_ok(y, &unit(k, r, j))?;
            }
            ok
        }
        (ProblemKind::Nonlinear, Solution::Vector(y)) => {
            let phi = to_system(k, spec.system.as_ref().expect("validated"))?;
            let value = nonlinear::NonlinearEvaluator::value(&phi, ring, y, order)?;
            let res = ring.mat_sub(&ring.mat_differentiate(y), &value)?;
            ring.mat_is_zero(&res) && y.coefficient(0).column_values(0) == d.v()
        }
        _ => false,
    })
}

fn check_in<F: Field>(field: F, spec: &ProblemSpec, engine: Engine) -> Result<CheckReport> {
    let ring = Ring::new(field);
    let (used, fast) = dispatch(&ring, spec, engine)?;
    let (_, slow) = dispatch(&ring, spec, Engine::Naive)?;
    Ok(CheckReport {
        engine: used.to_string(),
        matches_oracle: fast == slow,
        residual_zero: residual_holds(&ring, spec, &fast)?,
        oracle_residual_zero: residual_holds(&ring, spec, &slow)?,
    })
}

/// Runs `engine` and the oracle on `spec` and checks both outputs.
pub fn check(spec: &ProblemSpec, engine: Engine) -> Result<CheckReport> {
    match spec.field {
        FieldDescriptor::Prime(p) => check_in(PrimeField::new(p)?, spec, engine),
        FieldDescriptor::Rationals => check_in(Rationals, spec, engine),
    }
}
