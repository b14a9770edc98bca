//! Worst-case (extreme value) stack-up.
//!
//! Every dimension is pushed to whichever limit maximises (or minimises) its
//! signed contribution, giving the guaranteed range of the functional
//! condition under total interchangeability.

use serde::Serialize;
use thiserror::Error;

use crate::chain::{
    ChainError, ConformityStatus, ConformityVerdict, DimensionSpec, ToleranceChain,
};
use crate::scalar::Scalar;

/// A computed `[min, max]` range and its width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalResult<T> {
    pub min: T,
    pub max: T,
    pub it: T,
}

impl<T: Scalar> IntervalResult<T> {
    pub fn new(min: T, max: T) -> Self {
        debug_assert!(min <= max);
        Self {
            min,
            max,
            it: max - min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("solving for an unknown dimension requires both an imposed min and max")]
    MissingBounds,
    #[error("infeasible: the other dimensions already use an IT of {fixed} but the condition only allows {allowed}")]
    Infeasible { allowed: f64, fixed: f64 },
}

/// Largest and smallest signed contribution of one dimension.
fn contribution_range<T: Scalar>(d: &DimensionSpec<T>) -> (T, T) {
    let a = d.coefficient();
    if a > T::zero() {
        (a * d.min_limit(), a * d.max_limit())
    } else {
        (a * d.max_limit(), a * d.min_limit())
    }
}

fn extreme_sums<'a, T: Scalar>(dims: impl Iterator<Item = &'a DimensionSpec<T>>) -> (T, T) {
    dims.fold((T::zero(), T::zero()), |(lo, hi), d| {
        let (c_lo, c_hi) = contribution_range(d);
        (lo + c_lo, hi + c_hi)
    })
}

/// Extreme values of the functional condition.
///
/// `max` sums `coefficient * max_limit` for positive coefficients and
/// `coefficient * min_limit` for negative ones, in chain order; `min` is the
/// mirror image.
pub fn worst_case<T: Scalar>(chain: &ToleranceChain<T>) -> IntervalResult<T> {
    let (min, max) = extreme_sums(chain.dimensions().iter());
    IntervalResult::new(min, max)
}

/// Arithmetic IT budget, `sum(|coefficient| * IT)`.
pub fn it_budget<T: Scalar>(chain: &ToleranceChain<T>) -> T {
    chain
        .dimensions()
        .iter()
        .fold(T::zero(), |acc, d| acc + d.coefficient().abs() * d.it())
}

/// Worst-case interval checked against the chain's imposed condition.
pub fn verify_worst_case<T: Scalar>(chain: &ToleranceChain<T>) -> ConformityVerdict<T> {
    ConformityVerdict::assess(worst_case(chain), chain.condition())
}

/// Widest deviations for `unknown` that keep the worst-case interval inside
/// the imposed condition. The unknown's current deviations are ignored; its
/// nominal and coefficient are kept.
pub fn solve_unknown<T: Scalar>(
    chain: &ToleranceChain<T>,
    unknown: &str,
) -> Result<DimensionSpec<T>, SolveError> {
    let target = chain
        .dimension(unknown)
        .ok_or_else(|| ChainError::UnknownDimension(unknown.to_string()))?;
    let (imposed_min, imposed_max) = match chain.condition().map(|c| (c.min(), c.max())) {
        Some((Some(lo), Some(hi))) => (lo, hi),
        _ => return Err(SolveError::MissingBounds),
    };

    let (rest_min, rest_max) =
        extreme_sums(chain.dimensions().iter().filter(|d| d.name() != unknown));
    let a = target.coefficient();

    // a * x must lie in [imposed_min - rest_min, imposed_max - rest_max].
    let contrib_lo = imposed_min - rest_min;
    let contrib_hi = imposed_max - rest_max;
    if contrib_lo > contrib_hi {
        return Err(SolveError::Infeasible {
            allowed: (imposed_max - imposed_min).as_f64(),
            fixed: (rest_max - rest_min).as_f64(),
        });
    }
    let (x_lo, x_hi) = if a > T::zero() {
        (contrib_lo / a, contrib_hi / a)
    } else {
        (contrib_hi / a, contrib_lo / a)
    };

    let nominal = target.nominal();
    let mut upper = x_hi - nominal;
    let mut lower = x_lo - nominal;

    // Rounding in `nominal + dev` can push a limit a few ulps outside the
    // domain; pull the offending side in until the exact check passes.
    let step = (nominal.abs() + upper.abs().max(lower.abs())) * T::epsilon();
    for _ in 0..64 {
        if lower > upper {
            break;
        }
        let candidate = target.with_deviations(upper, lower)?;
        let completed = chain.with_dimension(candidate.clone())?;
        match verify_worst_case(&completed).status {
            ConformityStatus::Conforming => return Ok(candidate),
            status => {
                let (too_low, too_high) = match status {
                    ConformityStatus::NonConformingLow => (true, false),
                    ConformityStatus::NonConformingHigh => (false, true),
                    _ => (true, true),
                };
                // With a negative coefficient a low condition means the dimension is too large.
                let (shrink_lower, shrink_upper) = if a > T::zero() {
                    (too_low, too_high)
                } else {
                    (too_high, too_low)
                };
                if shrink_lower {
                    lower = lower + step;
                }
                if shrink_upper {
                    upper = upper - step;
                }
            }
        }
    }
    Err(SolveError::Infeasible {
        allowed: (imposed_max - imposed_min).as_f64(),
        fixed: (rest_max - rest_min).as_f64(),
    })
}
