//! Embeddings between weighted Cesàro and Copson function spaces.
//!
//! The pipeline rewrites an embedding `X -> Y` into the canonical inequality
//!
//! ```text
//! (int_a^b (int_a^t f^r v)^(q/r) u dt)^(1/q) <= C (int_a^b (int_a^t f)^p w dt)^(1/p)
//! ```
//!
//! ([`reduce`]), decides finiteness of `C` through the constants `C1..C7`
//! ([`constants`]) and cross-checks the answer with a direct maximization over
//! step functions ([`oracle`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); exponents are
//! exact rationals. The `*64` aliases below fix the scalar to `f64`.

pub mod constants;
pub mod error;
pub mod exponent;
pub mod extreal;
pub mod funcspace;
pub mod interval;
pub mod oracle;
pub mod quad;
pub mod reduce;
pub mod scalar;
pub mod search;
pub mod weights;

pub use constants::{classify_regime, eval_constant, theorem_verdict, ConstantId, Regime};
pub use error::{Error, Result};
pub use exponent::{Exponent, Rational};
pub use extreal::ExtReal;
pub use funcspace::{space_norm, SpaceKind, SpaceSpec, StepFunction};
pub use interval::Interval;
pub use oracle::{estimate_best_constant, estimate_original_constant, OracleConfig, OracleResult};
pub use reduce::{canonicalize, CanonicalProblem, EmbeddingProblem};
pub use scalar::Scalar;
pub use weights::{parse_weight, Weight, WeightExpr};

pub type Weight64 = Weight<f64>;
pub type WeightExpr64 = WeightExpr<f64>;
pub type Interval64 = Interval<f64>;
pub type ExtReal64 = ExtReal<f64>;
pub type StepFunction64 = StepFunction<f64>;
pub type SpaceSpec64 = SpaceSpec<f64>;
pub type CanonicalProblem64 = CanonicalProblem<f64>;
pub type EmbeddingProblem64 = EmbeddingProblem<f64>;
pub type ConstantsConfig64 = constants::ConstantsConfig<f64>;
pub type ConstantsReport64 = constants::ConstantsReport<f64>;
pub type OracleConfig64 = OracleConfig<f64>;
pub type OracleResult64 = OracleResult<f64>;
