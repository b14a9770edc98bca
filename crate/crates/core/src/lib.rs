//! Dimensional tolerance chains in one dimension.
//!
//! A [`ToleranceChain`] is an ordered list of toleranced dimensions whose
//! signed, weighted sum forms a functional condition (a clearance, a gap, a
//! resulting length). Two complementary engines analyse it:
//!
//! - [`worst_case`]: extreme-value arithmetic, the arithmetic IT budget,
//!   conformity against imposed limits, and inversion for one unknown member.
//! - [`monte_carlo`]: normal sampling of every dimension, moment propagation,
//!   statistical intervals and scrap rates.
//!
//! [`synthesis`] closes the loop, adjusting tolerances until the simulated
//! scrap rate meets a target.
//!
//! All math is generic over [`Scalar`] (`f32` / `f64`); the aliases below fix
//! the common `f64` instantiation.

pub mod chain;
pub mod export;
pub mod monte_carlo;
pub mod normal;
mod rng;
pub mod scalar;
pub mod synthesis;
pub mod worst_case;

pub use chain::{
    it_of, parse_chain, ChainDocument, ChainError, ConditionDocument, ConformityStatus,
    ConformityVerdict, DimensionDocument, DimensionSpec, FunctionalCondition, ToleranceChain,
};
pub use export::{format_sig9, histogram, histogram_csv, samples_csv, HistogramBin};
pub use monte_carlo::{
    analytic_scrap, derive_distribution, propagate_analytic, sample_chain, sample_chain_with,
    scrap_rate, statistical_interval, DimensionSamples, DistributionParams, Parallelism,
    SampleBatch, ScrapReport, SigmaRule, SimulationError,
};
pub use scalar::Scalar;
pub use synthesis::{
    respecify, synthesize, Action, ScrapBasis, SynthesisConfig, SynthesisError, SynthesisIteration,
    SynthesisReport,
};
pub use worst_case::{
    it_budget, solve_unknown, verify_worst_case, worst_case, IntervalResult, SolveError,
};

/// `f64` chain, the instantiation used by the file format and the CLI.
pub type Chain = ToleranceChain<f64>;
/// `f64` dimension.
pub type Dimension = DimensionSpec<f64>;
/// `f64` functional condition.
pub type Condition = FunctionalCondition<f64>;
/// `f64` interval.
pub type Interval = IntervalResult<f64>;
/// `f64` sample table.
pub type Batch = SampleBatch<f64>;

/// Single precision chain.
pub type ChainF32 = ToleranceChain<f32>;
/// Single precision dimension.
pub type DimensionF32 = DimensionSpec<f32>;
/// Single precision interval.
pub type IntervalF32 = IntervalResult<f32>;
