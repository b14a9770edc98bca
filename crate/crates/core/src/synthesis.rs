//! Scrap-driven tolerance synthesis.
//!
//! Each round simulates the chain, compares the scrap estimate with the
//! target and, when outside the acceptance band, tightens the widest or
//! loosens the narrowest adjustable tolerance by a relative step. Nominals and
//! zone midpoints never move.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainError, ToleranceChain};
use crate::monte_carlo::{
    analytic_scrap, sample_chain_with, scrap_rate, Parallelism, ScrapReport, SigmaRule,
    SimulationError,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("synthesis requires an imposed condition with both min and max")]
    MissingBounds,
    #[error("invalid synthesis configuration: {0}")]
    InvalidConfig(String),
    #[error("frozen dimension `{0}` is not in the chain")]
    UnknownFrozen(String),
    #[error("every dimension is frozen; nothing to adjust")]
    NothingAdjustable,
    #[error("an explicit sigma rule does not respond to tolerance changes; use it6 or it3")]
    ExplicitSigma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisConfig {
    /// Imposed scrap fraction, in (0, 1).
    pub target_scrap: f64,
    pub n_per_iteration: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Relative IT step per adjustment, in (0, 1).
    pub adjustment_factor: f64,
    /// Accepted `|scrap - target| / target`.
    pub tolerance_band: f64,
    pub frozen: BTreeSet<String>,
    #[serde(skip)]
    pub parallelism: Parallelism,
}

impl SynthesisConfig {
    pub fn new(target_scrap: f64) -> Self {
        Self {
            target_scrap,
            n_per_iteration: 100_000,
            seed: 1,
            max_iterations: 100,
            adjustment_factor: 0.1,
            tolerance_band: 0.25,
            frozen: BTreeSet::new(),
            parallelism: Parallelism::Parallel,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        let bad = |m: &str| Err(SynthesisError::InvalidConfig(m.to_string()));
        if !(self.target_scrap > 0.0 && self.target_scrap < 1.0) {
            return bad("target_scrap must lie in (0, 1)");
        }
        if self.n_per_iteration == 0 {
            return bad("n_per_iteration must be at least 1");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.adjustment_factor > 0.0 && self.adjustment_factor < 1.0) {
            return bad("adjustment_factor must lie in (0, 1)");
        }
        if !(self.tolerance_band.is_finite() && self.tolerance_band >= 0.0) {
            return bad("tolerance_band must be finite and >= 0");
        }
        Ok(())
    }

    fn accepts(&self, scrap: f64) -> bool {
        (scrap - self.target_scrap).abs() / self.target_scrap <= self.tolerance_band
    }
}

/// What one round decided.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action<T> {
    /// Scrap inside the band; the chain is kept.
    Retain,
    Shrink {
        dimension: String,
        it_before: T,
        it_after: T,
    },
    Widen {
        dimension: String,
        it_before: T,
        it_after: T,
    },
    /// Scrap below target but every adjustable dimension has a zero IT.
    NoCandidate,
}

/// Which estimate steered the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrapBasis {
    MonteCarlo,
    /// The sample saw no scrap and cannot resolve the target (rule of three),
    /// so the exact normal tail decided the direction.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisIteration<T: Scalar> {
    pub index: usize,
    pub seed: u64,
    /// Chain as simulated in this round.
    pub chain: ToleranceChain<T>,
    pub scrap: ScrapReport,
    pub analytic_scrap: f64,
    pub basis: ScrapBasis,
    pub action: Action<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisReport<T: Scalar> {
    pub iterations: Vec<SynthesisIteration<T>>,
    /// Last simulated chain. When the budget runs out, the final round's
    /// action is recorded but not applied.
    pub final_chain: ToleranceChain<T>,
    pub converged: bool,
}

/// Replaces one dimension's deviations, leaving the input untouched.
pub fn respecify<T: Scalar>(
    chain: &ToleranceChain<T>,
    name: &str,
    new_upper: T,
    new_lower: T,
) -> Result<ToleranceChain<T>, ChainError> {
    let d = chain
        .dimension(name)
        .ok_or_else(|| ChainError::UnknownDimension(name.to_string()))?;
    chain.with_dimension(d.with_deviations(new_upper, new_lower)?)
}

/// Rescales one IT by `factor` about its zone midpoint.
fn rescale<T: Scalar>(
    chain: &ToleranceChain<T>,
    idx: usize,
    factor: T,
) -> Result<(ToleranceChain<T>, T, T), ChainError> {
    let d = &chain.dimensions()[idx];
    let two = T::lit(2.0);
    let centre = (d.upper_dev() + d.lower_dev()) / two;
    let it_after = d.it() * factor;
    let half = it_after / two;
    let next = chain.with_dimension(d.with_deviations(centre + half, centre - half)?)?;
    Ok((next, d.it(), it_after))
}

/// Picks the dimension to adjust: widest IT to shrink, narrowest non-zero IT to
/// widen. Ties go to the earlier dimension.
fn pick<T: Scalar>(
    chain: &ToleranceChain<T>,
    frozen: &BTreeSet<String>,
    shrink: bool,
) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, d) in chain.dimensions().iter().enumerate() {
        if frozen.contains(d.name()) {
            continue;
        }
        let it = d.it();
        if !shrink && it == T::zero() {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => {
                if shrink {
                    it > b
                } else {
                    it < b
                }
            }
        };
        if better {
            best = Some((i, it));
        }
    }
    best.map(|(i, _)| i)
}

/// Runs the adjustment loop. Round `i` samples with seed `cfg.seed + i`.
pub fn synthesize<T: Scalar>(
    chain: &ToleranceChain<T>,
    rule: &SigmaRule<T>,
    cfg: &SynthesisConfig,
) -> Result<SynthesisReport<T>, SynthesisError> {
    cfg.validate()?;
    if matches!(rule, SigmaRule::Explicit(_)) {
        return Err(SynthesisError::ExplicitSigma);
    }
    let condition = chain
        .condition()
        .filter(|c| c.min().is_some() && c.max().is_some())
        .ok_or(SynthesisError::MissingBounds)?
        .clone();
    if let Some(name) = cfg.frozen.iter().find(|n| chain.dimension(n).is_none()) {
        return Err(SynthesisError::UnknownFrozen(name.clone()));
    }
    if chain
        .dimensions()
        .iter()
        .all(|d| cfg.frozen.contains(d.name()))
    {
        return Err(SynthesisError::NothingAdjustable);
    }

    let shrink_factor = T::lit(1.0 - cfg.adjustment_factor);
    let widen_factor = T::lit(1.0 + cfg.adjustment_factor);
    let rule_of_three = 3.0 / cfg.n_per_iteration as f64;

    let mut current = chain.clone();
    let mut iterations = Vec::new();
    let mut converged = false;

    for index in 0..cfg.max_iterations {
        let seed = cfg.seed.wrapping_add(index as u64);
        let batch = sample_chain_with(&current, rule, cfg.n_per_iteration, seed, cfg.parallelism)?;
        let scrap = scrap_rate(&batch.fc_samples, &condition)?;
        let analytic = analytic_scrap(&current, rule)?;

        let mut record = SynthesisIteration {
            index,
            seed,
            chain: current.clone(),
            scrap,
            analytic_scrap: analytic,
            basis: ScrapBasis::MonteCarlo,
            action: Action::Retain,
        };

        if cfg.accepts(scrap.scrap_rate) {
            iterations.push(record);
            converged = true;
            break;
        }

        let estimate = if scrap.below + scrap.above == 0 && cfg.target_scrap <= rule_of_three {
            record.basis = ScrapBasis::Analytic;
            analytic
        } else {
            scrap.scrap_rate
        };
        let shrink = estimate > cfg.target_scrap;

        let next = match pick(&current, &cfg.frozen, shrink) {
            None => {
                record.action = Action::NoCandidate;
                iterations.push(record);
                break;
            }
            Some(idx) => {
                let factor = if shrink { shrink_factor } else { widen_factor };
                let (next, it_before, it_after) = rescale(&current, idx, factor)?;
                let dimension = current.dimensions()[idx].name().to_string();
                record.action = if shrink {
                    Action::Shrink {
                        dimension,
                        it_before,
                        it_after,
                    }
                } else {
                    Action::Widen {
                        dimension,
                        it_before,
                        it_after,
                    }
                };
                next
            }
        };
        iterations.push(record);
        if index + 1 < cfg.max_iterations {
            current = next;
        }
    }

    Ok(SynthesisReport {
        iterations,
        final_chain: current,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{parse_chain, DimensionSpec, FunctionalCondition};
    use crate::monte_carlo::sample_chain;
    use crate::monte_carlo::statistical_interval;

    const ACTUATOR: &str = include_str!("../../../fixtures/actuator.json");

    fn actuator() -> ToleranceChain<f64> {
        parse_chain(ACTUATOR).unwrap()
    }

    #[test]
    fn respecify_a3() {
        let original = actuator();
        let changed = respecify(&original, "a3", 0.15, -0.2).unwrap();
        assert!((changed.dimension("a3").unwrap().it() - 0.35).abs() < 1e-15);
        assert_eq!(original, actuator());

        let before = sample_chain(&original, &SigmaRule::It6, 100_000, 42).unwrap();
        let after = sample_chain(&changed, &SigmaRule::It6, 100_000, 42).unwrap();
        let it_before = statistical_interval(&before.fc_samples, 3.0).unwrap().it;
        let it_after = statistical_interval(&after.fc_samples, 3.0).unwrap().it;
        assert!(it_after < it_before, "{it_after} !< {it_before}");
    }

    #[test]
    fn respecify_identity_and_errors() {
        let same = respecify(&actuator(), "a2", 0.1, -0.1).unwrap();
        assert_eq!(same, actuator());
        assert_eq!(
            respecify(&actuator(), "a9", 0.1, -0.1),
            Err(ChainError::UnknownDimension("a9".into()))
        );
        assert!(matches!(
            respecify(&actuator(), "a2", -0.1, 0.1),
            Err(ChainError::InvertedDeviations { .. })
        ));
    }

    #[test]
    fn first_action_widens_a7() {
        let mut cfg = SynthesisConfig::new(1e-3);
        cfg.max_iterations = 1;
        let report = synthesize(&actuator(), &SigmaRule::It6, &cfg).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations.len(), 1);
        match &report.iterations[0].action {
            Action::Widen {
                dimension,
                it_before,
                it_after,
            } => {
                assert_eq!(dimension, "a7");
                assert!((it_before - 0.06).abs() < 1e-15);
                assert!((it_after - 0.066).abs() < 1e-15);
            }
            other => panic!("unexpected first action {other:?}"),
        }
        // budget exhausted: the pending widen is not applied
        assert_eq!(report.final_chain, actuator());
    }

    #[test]
    fn retains_chain_already_in_band() {
        let p = crate::monte_carlo::propagate_analytic(&actuator(), &SigmaRule::It6).unwrap();
        // Bounds at mu ± 2.5758 sigma leave about 1% scrap.
        let k = 2.575_829_303_548_901;
        let chain = actuator().with_condition(Some(
            FunctionalCondition::new("Ja", Some(p.mean - k * p.sigma), Some(p.mean + k * p.sigma))
                .unwrap(),
        ));
        let report = synthesize(&chain, &SigmaRule::It6, &SynthesisConfig::new(0.01)).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations.len(), 1);
        assert_eq!(report.iterations[0].action, Action::Retain);
        assert_eq!(report.final_chain, chain);
    }

    #[test]
    fn shrinks_widest_when_scrap_too_high() {
        let chain = actuator().with_condition(Some(
            FunctionalCondition::new("Ja", Some(10.4), Some(10.76)).unwrap(),
        ));
        let mut cfg = SynthesisConfig::new(1e-3);
        cfg.max_iterations = 2;
        let report = synthesize(&chain, &SigmaRule::It6, &cfg).unwrap();
        match &report.iterations[0].action {
            Action::Shrink { dimension, .. } => assert_eq!(dimension, "a1"),
            other => panic!("expected shrink, got {other:?}"),
        }
        let a1 = report.iterations[1].chain.dimension("a1").unwrap();
        assert!((a1.it() - 0.45).abs() < 1e-15);
        assert!((a1.midpoint() - 25.55).abs() < 1e-12);
    }

    #[test]
    fn frozen_dimensions_are_skipped() {
        let mut cfg = SynthesisConfig::new(1e-3);
        cfg.max_iterations = 1;
        cfg.frozen.insert("a7".into());
        let report = synthesize(&actuator(), &SigmaRule::It6, &cfg).unwrap();
        match &report.iterations[0].action {
            Action::Widen { dimension, .. } => assert_eq!(dimension, "a2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precondition_errors() {
        let cfg = SynthesisConfig::new(1e-3);
        let open = actuator().with_condition(None);
        assert_eq!(
            synthesize(&open, &SigmaRule::It6, &cfg),
            Err(SynthesisError::MissingBounds)
        );

        let mut all = cfg.clone();
        all.frozen = ["a1", "a2", "a3", "a7"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            synthesize(&actuator(), &SigmaRule::It6, &all),
            Err(SynthesisError::NothingAdjustable)
        );

        let mut unknown = cfg.clone();
        unknown.frozen.insert("zz".into());
        assert_eq!(
            synthesize(&actuator(), &SigmaRule::It6, &unknown),
            Err(SynthesisError::UnknownFrozen("zz".into()))
        );

        for bad in [0.0, 1.0, -0.5] {
            let c = SynthesisConfig::new(bad);
            assert!(matches!(
                synthesize(&actuator(), &SigmaRule::It6, &c),
                Err(SynthesisError::InvalidConfig(_))
            ));
        }
        let mut zero_iter = cfg.clone();
        zero_iter.max_iterations = 0;
        assert!(zero_iter.validate().is_err());
        let mut bad_step = cfg.clone();
        bad_step.adjustment_factor = 1.0;
        assert!(bad_step.validate().is_err());

        let explicit: SigmaRule<f64> = "explicit:a1=0.1,a2=0.1,a3=0.1,a7=0.1".parse().unwrap();
        assert_eq!(
            synthesize(&actuator(), &explicit, &cfg),
            Err(SynthesisError::ExplicitSigma)
        );
    }

    #[test]
    fn zero_it_dimensions_cannot_widen() {
        let chain = ToleranceChain::<f64>::new(
            "fixed",
            vec![DimensionSpec::new("d", 1.0, 0.0, 0.0, 1.0).unwrap()],
            Some(FunctionalCondition::new("J", Some(0.0), Some(2.0)).unwrap()),
        )
        .unwrap();
        let report = synthesize(&chain, &SigmaRule::It6, &SynthesisConfig::new(0.01)).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations.len(), 1);
        assert_eq!(report.iterations[0].action, Action::NoCandidate);
    }

    #[test]
    fn analytic_basis_when_under_resolved() {
        let mut cfg = SynthesisConfig::new(1e-3);
        cfg.n_per_iteration = 1000;
        cfg.max_iterations = 1;
        let report = synthesize(&actuator(), &SigmaRule::It6, &cfg).unwrap();
        let first = &report.iterations[0];
        assert_eq!(first.scrap.below + first.scrap.above, 0);
        assert_eq!(first.basis, ScrapBasis::Analytic);
        assert!(matches!(first.action, Action::Widen { .. }));
    }
}
