//! Truncated power-series solutions of linear differential systems at an
//! ordinary point, and of first-order non-linear systems, over exact fields.

pub mod counter;
pub mod dac;
pub mod error;
pub mod field;
pub mod frontend;
pub mod matrix;
pub mod newton;
pub mod nonlinear;
pub mod oracle;
pub mod poly;
pub mod residual;
pub mod series;
pub mod special;

pub use counter::{CounterSnapshot, OpCounter};
pub use error::{Error, Result};
pub use field::{ensure_characteristic, field_arith, ArithOp, Field, FieldDescriptor, FieldScalar, Fp, PrimeField, Rationals, ScalarValue};
pub use matrix::{Matrix, SeriesMatrix, SeriesVector};
pub use series::{MulAlgorithm, MulConfig, Ring, Series};
pub use dac::{CompanionOperator, DenseOperator, SystemOperator};
pub use frontend::{CoeffClass, Engine, ProblemKind, ProblemSpec, Solution};
pub use newton::HomSolution;
pub use nonlinear::{LinearEvaluator, Monomial, NonlinearEvaluator, NonlinearOptions, SparsePolySystem};
pub use special::{KrylovBlock, RationalFunction};
