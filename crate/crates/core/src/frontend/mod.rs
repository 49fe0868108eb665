//! Problem-level interface: problem descriptions, their text format,
//! engine dispatch, consistency checks, benchmarks and random instances.

mod bench;
mod dispatch;
mod format;
mod random;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Rationals};
use crate::nonlinear::SparsePolySystem;

pub use bench::{bench, parse_grid, write_csv, BenchPoint, BenchRecord, CSV_HEADER};
pub use dispatch::{check, dispatch, solve_spec, CheckReport, Entry, Solution, SolutionReport};
pub use format::{parse_problem, render_problem};
pub use random::random_spec;

/// The five problem classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// Basis of solutions of a scalar equation.
    ScalarBasis,
    /// One solution of a scalar equation.
    ScalarSingle,
    /// Fundamental matrix of a first-order system.
    SystemBasis,
    /// One solution of a first-order system.
    SystemSingle,
    Nonlinear,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::ScalarBasis,
        ProblemKind::ScalarSingle,
        ProblemKind::SystemBasis,
        ProblemKind::SystemSingle,
        ProblemKind::Nonlinear,
    ];

    pub fn is_scalar(self) -> bool {
        matches!(self, ProblemKind::ScalarBasis | ProblemKind::ScalarSingle)
    }

    pub fn is_system(self) -> bool {
        matches!(self, ProblemKind::SystemBasis | ProblemKind::SystemSingle)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::ScalarBasis => "i",
            ProblemKind::ScalarSingle => "ii",
            ProblemKind::SystemBasis => "I",
            ProblemKind::SystemSingle => "II",
            ProblemKind::Nonlinear => "nonlinear",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "i" => ProblemKind::ScalarBasis,
            "ii" => ProblemKind::ScalarSingle,
            "I" => ProblemKind::SystemBasis,
            "II" => ProblemKind::SystemSingle,
            "nonlinear" => ProblemKind::Nonlinear,
            other => return Err(Error::parse(0, 0, format!("unknown problem kind `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffClass {
    Series,
    Constant,
    Polynomial,
}

impl fmt::Display for CoeffClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoeffClass::Series => "series",
            CoeffClass::Constant => "constant",
            CoeffClass::Polynomial => "polynomial",
        })
    }
}

impl FromStr for CoeffClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "series" => CoeffClass::Series,
            "constant" => CoeffClass::Constant,
            "polynomial" => CoeffClass::Polynomial,
            other => return Err(Error::parse(0, 0, format!("unknown coefficient class `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Auto,
    Newton,
    Dac,
    Const,
    Polycoeff,
    Naive,
}

impl Engine {
    pub const ALL: [Engine; 6] = [Engine::Auto, Engine::Newton, Engine::Dac, Engine::Const, Engine::Polycoeff, Engine::Naive];
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Newton => "newton",
            Engine::Dac => "dac",
            Engine::Const => "const",
            Engine::Polycoeff => "polycoeff",
            Engine::Naive => "naive",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.to_string() == s.trim())
            .ok_or_else(|| Error::parse(0, 0, format!("unknown engine `{s}`")))
    }
}

/// Coefficients are lowest degree first. Scalars are stored as rationals;
/// over `Z/pZ` they are kept reduced to `0..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub coeffs: CoeffClass,
    /// Degree bound, required for polynomial coefficients.
    pub degree: Option<usize>,
    pub field: FieldDescriptor,
    pub r: usize,
    pub n: usize,
    /// `r × r` entries, row-major (systems).
    pub matrix_a: Vec<Vec<BigRational>>,
    /// `r` entries (problem II, optional).
    pub vector_b: Option<Vec<Vec<BigRational>>>,
    /// `a_0, …, a_r` (scalar equations).
    pub equation: Vec<Vec<BigRational>>,
    /// Right-hand side (problem ii, optional).
    pub rhs: Option<Vec<BigRational>>,
    /// Problem nonlinear.
    pub system: Option<SparsePolySystem<BigRational>>,
    /// `r` values, or `r` rows of `r` values for problem I. Empty means the
    /// standard basis for problems i and I.
    pub init: Vec<Vec<BigRational>>,
}

impl ProblemSpec {
    /// Checks shapes and the coefficient class, and reduces scalars modulo
    /// the characteristic.
    pub fn validate(mut self) -> Result<Self> {
        let r = self.r;
        if r == 0 || self.n == 0 {
            return Err(Error::DimensionMismatch("r and N must be positive".into()));
        }
        let dims = |what: &str, got: usize, want: usize| -> Result<()> {
            if got == want {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!("{what}: {got} entries, expected {want}")))
            }
        };
        match self.kind {
            ProblemKind::SystemBasis | ProblemKind::SystemSingle => {
                dims("matrix A", self.matrix_a.len(), r * r)?;
                if let Some(b) = &self.vector_b {
                    if self.kind == ProblemKind::SystemBasis {
                        return Err(Error::DimensionMismatch("problem I takes no vector b".into()));
                    }
                    dims("vector b", b.len(), r)?;
                }
            }
            ProblemKind::ScalarBasis | ProblemKind::ScalarSingle => {
                dims("equation coefficients", self.equation.len(), r + 1)?;
                if self.rhs.is_some() && self.kind == ProblemKind::ScalarBasis {
                    return Err(Error::DimensionMismatch("problem i takes no right-hand side".into()));
                }
            }
            ProblemKind::Nonlinear => {
                let sys = self
                    .system
                    .as_ref()
                    .ok_or_else(|| Error::DimensionMismatch("non-linear problem without equations".into()))?;
                dims("equations", sys.equations().len(), r)?;
                if self.coeffs != CoeffClass::Series {
                    return Err(Error::DimensionMismatch("non-linear problems take series coefficients".into()));
                }
            }
        }
        match self.kind {
            ProblemKind::SystemBasis => {
                if !self.init.is_empty() {
                    dims("initial matrix rows", self.init.len(), r)?;
                    for row in &self.init {
                        dims("initial matrix row", row.len(), r)?;
                    }
                }
            }
            ProblemKind::ScalarBasis => {
                if !self.init.is_empty() {
                    return Err(Error::DimensionMismatch("problem i uses the standard initial conditions".into()));
                }
            }
            _ => {
                dims("initial value lines", self.init.len(), 1)?;
                dims("initial values", self.init[0].len(), r)?;
            }
        }
        let bound = match self.coeffs {
            CoeffClass::Series => None,
            CoeffClass::Constant => Some(1),
            CoeffClass::Polynomial => Some(
                self.degree
                    .ok_or_else(|| Error::DimensionMismatch("polynomial coefficients need a degree bound".into()))?
                    + 1,
            ),
        };
        if self.coeffs != CoeffClass::Polynomial && self.degree.is_some() {
            return Err(Error::DimensionMismatch("degree bound given for non-polynomial coefficients".into()));
        }
        let field = self.field;
        let mut lists: Vec<&mut Vec<BigRational>> = Vec::new();
        lists.extend(self.matrix_a.iter_mut());
        lists.extend(self.vector_b.iter_mut().flatten());
        lists.extend(self.equation.iter_mut());
        lists.extend(self.rhs.iter_mut());
        for list in lists {
            if list.is_empty() {
                return Err(Error::DimensionMismatch("empty coefficient list".into()));
            }
            if let Some(b) = bound {
                if list.len() > b {
                    return Err(Error::DimensionMismatch(format!(
                        "{} coefficients exceed the {} class bound of {b}",
                        list.len(),
                        self.coeffs
                    )));
                }
            }
            for c in list.iter_mut() {
                *c = canonical(field, c)?;
            }
        }
        for c in self.init.iter_mut().flatten() {
            *c = canonical(field, c)?;
        }
        if let Some(sys) = &self.system {
            let eqs = sys
                .equations()
                .iter()
                .map(|eq| {
                    eq.iter()
                        .map(|m| {
                            Ok(crate::nonlinear::Monomial {
                                coeff: canonical(field, &m.coeff)?,
                                ..m.clone()
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            self.system = Some(SparsePolySystem::new(&Rationals, eqs)?);
        }
        Ok(self)
    }
}

/// `q` reduced to `0..p` over `Z/pZ`, unchanged over the rationals.
pub(crate) fn canonical(field: FieldDescriptor, q: &BigRational) -> Result<BigRational> {
    match field {
        FieldDescriptor::Rationals => Ok(q.clone()),
        FieldDescriptor::Prime(p) => {
            let m = BigInt::from(p);
            let den = q.denom().mod_floor(&m);
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            // p is prime, so den^{p−2} is the inverse
            let inv = den.modpow(&(&m - 2u32), &m);
            Ok(BigRational::from_integer((q.numer() * inv).mod_floor(&m)))
        }
    }
}
