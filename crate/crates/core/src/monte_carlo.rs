//! Monte Carlo simulation of a chain under independent normal dimensions.
//!
//! Each dimension is drawn from `Normal(midpoint, sigma)`, where `sigma`
//! comes from a [`SigmaRule`]. Samples are not clipped to the tolerance
//! limits; out-of-limit realizations are what the scrap rate counts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{DimensionSpec, FunctionalCondition, ToleranceChain};
use crate::normal::{standard_normal_cdf, standard_normal_sf};
use crate::rng::fill_unit_normals;
use crate::scalar::{compensated_sum, Scalar};
use crate::worst_case::IntervalResult;

/// Samples generated per work unit. Output does not depend on this value.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("sample set is empty")]
    EmptySamples,
    #[error("the functional condition has no imposed bound")]
    NoBounds,
    #[error("dimension `{name}`: sigma must be finite and >= 0, got {sigma}")]
    InvalidSigma { name: String, sigma: f64 },
    #[error("explicit sigma rule has no entry for dimension `{0}`")]
    MissingSigma(String),
    #[error("coverage must be a finite positive number of sigmas, got {0}")]
    InvalidCoverage(f64),
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error(
        "unrecognised sigma rule {0:?}: expected `it6`, `it3` or `explicit:<name>=<sigma>,...`"
    )]
    InvalidSigmaRule(String),
}

/// How a tolerance zone maps to a process standard deviation.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SigmaRule<T> {
    /// `sigma = IT / 6`: the zone spans ±3 sigma (a centred process with Cp = 1).
    #[default]
    It6,
    /// `sigma = IT / 3`.
    It3,
    /// Per-dimension sigma, by name.
    Explicit(BTreeMap<String, T>),
}

impl<T: Scalar> fmt::Display for SigmaRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaRule::It6 => f.write_str("it6"),
            SigmaRule::It3 => f.write_str("it3"),
            SigmaRule::Explicit(map) => {
                f.write_str("explicit:")?;
                for (i, (name, sigma)) in map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{name}={sigma}")?;
                }
                Ok(())
            }
        }
    }
}

impl<T: Scalar> FromStr for SigmaRule<T> {
    type Err = SimulationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimulationError::InvalidSigmaRule(s.to_string());
        match s.to_ascii_lowercase().as_str() {
            "it6" => return Ok(SigmaRule::It6),
            "it3" => return Ok(SigmaRule::It3),
            _ => {}
        }
        let body = s.strip_prefix("explicit:").ok_or_else(bad)?;
        let mut map = BTreeMap::new();
        for entry in body.split(',').filter(|e| !e.trim().is_empty()) {
            let (name, value) = entry.split_once('=').ok_or_else(bad)?;
            let sigma: f64 = value.trim().parse().map_err(|_| bad())?;
            map.insert(name.trim().to_string(), T::lit(sigma));
        }
        if map.is_empty() {
            return Err(bad());
        }
        Ok(SigmaRule::Explicit(map))
    }
}

impl<T: Scalar> Serialize for SigmaRule<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionParams<T> {
    pub mean: T,
    pub sigma: T,
}

/// Normal parameters of one dimension: mean at the zone midpoint, sigma per `rule`.
pub fn derive_distribution<T: Scalar>(
    d: &DimensionSpec<T>,
    rule: &SigmaRule<T>,
) -> Result<DistributionParams<T>, SimulationError> {
    let sigma = match rule {
        SigmaRule::It6 => d.it() / T::lit(6.0),
        SigmaRule::It3 => d.it() / T::lit(3.0),
        SigmaRule::Explicit(map) => *map
            .get(d.name())
            .ok_or_else(|| SimulationError::MissingSigma(d.name().to_string()))?,
    };
    if !(sigma.is_finite() && sigma >= T::zero()) {
        return Err(SimulationError::InvalidSigma {
            name: d.name().to_string(),
            sigma: sigma.as_f64(),
        });
    }
    Ok(DistributionParams {
        mean: d.midpoint(),
        sigma,
    })
}

/// Mean and standard deviation of the functional condition for independent
/// normal dimensions: `mu = sum(a_i mu_i)`, `sigma = sqrt(sum(a_i^2 sigma_i^2))`.
pub fn propagate_analytic<T: Scalar>(
    chain: &ToleranceChain<T>,
    rule: &SigmaRule<T>,
) -> Result<DistributionParams<T>, SimulationError> {
    let mut mean = T::zero();
    let mut variance = T::zero();
    for d in chain.dimensions() {
        let p = derive_distribution(d, rule)?;
        let a = d.coefficient();
        mean = mean + a * p.mean;
        variance = variance + a * a * p.sigma * p.sigma;
    }
    Ok(DistributionParams {
        mean,
        sigma: variance.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

/// Realizations of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionSamples<T> {
    pub name: String,
    pub coefficient: T,
    pub values: Vec<T>,
}

/// The realization table: one column per dimension plus the assembled condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T> {
    pub chain_name: String,
    pub fc_name: String,
    pub n: usize,
    pub seed: u64,
    pub per_dimension: Vec<DimensionSamples<T>>,
    /// `fc_samples[k] = sum_i(coefficient_i * per_dimension[i].values[k])`, summed in chain order.
    pub fc_samples: Vec<T>,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn dimension(&self, name: &str) -> Option<&[T]> {
        self.per_dimension
            .iter()
            .find(|d| d.name == name)
            .map(|d| d.values.as_slice())
    }
}

fn fill_column<T: Scalar>(
    params: DistributionParams<T>,
    seed: u64,
    stream: u64,
    values: &mut [T],
    parallelism: Parallelism,
) {
    let fill = |(c, chunk): (usize, &mut [T])| {
        let mut z = vec![0.0f64; chunk.len()];
        fill_unit_normals(seed, stream, (c * CHUNK) as u64, &mut z);
        for (v, z) in chunk.iter_mut().zip(z) {
            *v = params.mean + params.sigma * T::lit(z);
        }
    };
    match parallelism {
        Parallelism::Sequential => values.chunks_mut(CHUNK).enumerate().for_each(fill),
        Parallelism::Parallel => values.par_chunks_mut(CHUNK).enumerate().for_each(fill),
    }
}

/// [`sample_chain_with`] using the parallel path.
pub fn sample_chain<T: Scalar>(
    chain: &ToleranceChain<T>,
    rule: &SigmaRule<T>,
    n: usize,
    seed: u64,
) -> Result<SampleBatch<T>, SimulationError> {
    sample_chain_with(chain, rule, n, seed, Parallelism::Parallel)
}

/// Draws `n` independent assemblies. Dimension `i` uses random stream `i`, so
/// the output is identical for any `parallelism`.
pub fn sample_chain_with<T: Scalar>(
    chain: &ToleranceChain<T>,
    rule: &SigmaRule<T>,
    n: usize,
    seed: u64,
    parallelism: Parallelism,
) -> Result<SampleBatch<T>, SimulationError> {
    if n == 0 {
        return Err(SimulationError::NoSamples);
    }
    let mut per_dimension = Vec::with_capacity(chain.dimensions().len());
    for (i, d) in chain.dimensions().iter().enumerate() {
        let params = derive_distribution(d, rule)?;
        let mut values = vec![T::zero(); n];
        fill_column(params, seed, i as u64, &mut values, parallelism);
        per_dimension.push(DimensionSamples {
            name: d.name().to_string(),
            coefficient: d.coefficient(),
            values,
        });
    }

    let mut fc_samples = vec![T::zero(); n];
    let assemble = |(k, fc): (usize, &mut T)| {
        *fc = per_dimension
            .iter()
            .fold(T::zero(), |acc, col| acc + col.coefficient * col.values[k]);
    };
    match parallelism {
        Parallelism::Sequential => fc_samples.iter_mut().enumerate().for_each(assemble),
        Parallelism::Parallel => fc_samples.par_iter_mut().enumerate().for_each(assemble),
    }

    Ok(SampleBatch {
        chain_name: chain.name().to_string(),
        fc_name: chain.condition_name().to_string(),
        n,
        seed,
        per_dimension,
        fc_samples,
    })
}

/// Sample mean and standard deviation (`n - 1` denominator; 0 for a single sample).
pub fn mean_and_stdev<T: Scalar>(samples: &[T]) -> Result<(T, T), SimulationError> {
    let first = *samples.first().ok_or(SimulationError::EmptySamples)?;
    if samples.iter().all(|&x| x == first) {
        return Ok((first, T::zero()));
    }
    let n = T::from_usize(samples.len()).expect("sample count fits the scalar type");
    let mean = compensated_sum(samples.iter().copied()) / n;
    let ss = compensated_sum(samples.iter().map(|&x| (x - mean) * (x - mean)));
    let stdev = if samples.len() > 1 {
        (ss / (n - T::one())).sqrt()
    } else {
        T::zero()
    };
    Ok((mean, stdev))
}

/// `mean ± coverage_sigmas * stdev` of the samples.
pub fn statistical_interval<T: Scalar>(
    samples: &[T],
    coverage_sigmas: T,
) -> Result<IntervalResult<T>, SimulationError> {
    if !(coverage_sigmas.is_finite() && coverage_sigmas > T::zero()) {
        return Err(SimulationError::InvalidCoverage(coverage_sigmas.as_f64()));
    }
    let (mean, stdev) = mean_and_stdev(samples)?;
    let half = coverage_sigmas * stdev;
    Ok(IntervalResult::new(mean - half, mean + half))
}

/// Fraction of samples outside the imposed condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScrapReport {
    pub n: usize,
    pub below: usize,
    pub above: usize,
    pub scrap_rate: f64,
    /// Normal approximation to the binomial, `1.96 * sqrt(p (1 - p) / n)`.
    pub ci95_half_width: f64,
}

impl ScrapReport {
    pub fn from_counts(n: usize, below: usize, above: usize) -> Self {
        debug_assert!(below + above <= n && n > 0);
        let p = (below + above) as f64 / n as f64;
        Self {
            n,
            below,
            above,
            scrap_rate: p,
            ci95_half_width: 1.96 * (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

/// Counts samples strictly below `min` or strictly above `max`.
pub fn scrap_rate<T: Scalar>(
    samples: &[T],
    condition: &FunctionalCondition<T>,
) -> Result<ScrapReport, SimulationError> {
    if !condition.has_bounds() {
        return Err(SimulationError::NoBounds);
    }
    if samples.is_empty() {
        return Err(SimulationError::EmptySamples);
    }
    let below = condition
        .min()
        .map_or(0, |lo| samples.iter().filter(|&&x| x < lo).count());
    let above = condition
        .max()
        .map_or(0, |hi| samples.iter().filter(|&&x| x > hi).count());
    Ok(ScrapReport::from_counts(samples.len(), below, above))
}

/// Exact scrap probability of the propagated normal:
/// `Φ((min - mu) / sigma) + 1 - Φ((max - mu) / sigma)`.
pub fn analytic_scrap<T: Scalar>(
    chain: &ToleranceChain<T>,
    rule: &SigmaRule<T>,
) -> Result<f64, SimulationError> {
    let condition = chain
        .condition()
        .filter(|c| c.has_bounds())
        .ok_or(SimulationError::NoBounds)?;
    let p = propagate_analytic(chain, rule)?;
    let (mean, sigma) = (p.mean.as_f64(), p.sigma.as_f64());
    let lo = condition.min().map(Scalar::as_f64);
    let hi = condition.max().map(Scalar::as_f64);
    if sigma == 0.0 {
        let below = lo.is_some_and(|lo| mean < lo);
        let above = hi.is_some_and(|hi| mean > hi);
        return Ok(if below || above { 1.0 } else { 0.0 });
    }
    let below = lo.map_or(0.0, |lo| standard_normal_cdf((lo - mean) / sigma));
    let above = hi.map_or(0.0, |hi| standard_normal_sf((hi - mean) / sigma));
    Ok(below + above)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::parse_chain;

    const ACTUATOR: &str = include_str!("../../../fixtures/actuator.json");

    fn actuator() -> ToleranceChain<f64> {
        parse_chain(ACTUATOR).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn distribution_from_tolerance_zone() {
        let chain = actuator();
        let a1 = derive_distribution(chain.dimension("a1").unwrap(), &SigmaRule::It6).unwrap();
        assert!(close(a1.mean, 25.55, 1e-12));
        assert!(close(a1.sigma, 0.5 / 6.0, 1e-15));
        let a2 = derive_distribution(chain.dimension("a2").unwrap(), &SigmaRule::It6).unwrap();
        assert_eq!(a2.mean, 9.0);
        assert!(close(a2.sigma, 0.2 / 6.0, 1e-15));
        let a2_it3 = derive_distribution(chain.dimension("a2").unwrap(), &SigmaRule::It3).unwrap();
        assert!(close(a2_it3.sigma, 0.2 / 3.0, 1e-15));

        let fixed = DimensionSpec::new("z", 7.0, 0.0, 0.0, 1.0).unwrap();
        for rule in [SigmaRule::It6, SigmaRule::It3] {
            assert_eq!(
                derive_distribution(&fixed, &rule).unwrap(),
                DistributionParams {
                    mean: 7.0,
                    sigma: 0.0
                }
            );
        }
    }

    #[test]
    fn explicit_sigma() {
        let chain = actuator();
        let rule: SigmaRule<f64> = "explicit:a1=0.02,a2=-0.1".parse().unwrap();
        let a1 = derive_distribution(chain.dimension("a1").unwrap(), &rule).unwrap();
        assert_eq!(a1.sigma, 0.02);
        assert!(matches!(
            derive_distribution(chain.dimension("a2").unwrap(), &rule),
            Err(SimulationError::InvalidSigma { .. })
        ));
        assert_eq!(
            derive_distribution(chain.dimension("a3").unwrap(), &rule),
            Err(SimulationError::MissingSigma("a3".into()))
        );
    }

    #[test]
    fn sigma_rule_text_round_trip() {
        for text in ["it6", "it3", "explicit:a1=0.02,a2=0.5"] {
            let rule: SigmaRule<f64> = text.parse().unwrap();
            assert_eq!(rule.to_string(), text);
        }
        assert!("it9".parse::<SigmaRule<f64>>().is_err());
        assert!("explicit:".parse::<SigmaRule<f64>>().is_err());
        assert!("explicit:a1".parse::<SigmaRule<f64>>().is_err());
    }

    #[test]
    fn propagation_formulas() {
        let p = propagate_analytic(&actuator(), &SigmaRule::It6).unwrap();
        let expected_sigma =
            (0.5f64.powi(2) + 0.2f64.powi(2) + 0.4f64.powi(2) + 0.06f64.powi(2)).sqrt() / 6.0;
        assert!(close(p.mean, 10.58, 1e-12));
        assert!(close(p.sigma, expected_sigma, 1e-15));
        assert!(close(p.sigma, 0.112_249_721_603_218_24, 1e-15));

        let one = ToleranceChain::<f64>::new(
            "one",
            vec![DimensionSpec::new("d", 5.0, 0.3, -0.3, 1.0).unwrap()],
            None,
        )
        .unwrap();
        let single = propagate_analytic(&one, &SigmaRule::It6).unwrap();
        let direct = derive_distribution(&one.dimensions()[0], &SigmaRule::It6).unwrap();
        assert_eq!(single, direct);

        let pair = ToleranceChain::<f64>::new(
            "pair",
            vec![
                DimensionSpec::new("p", 5.0, 0.3, -0.3, 1.0).unwrap(),
                DimensionSpec::new("q", 5.0, 0.3, -0.3, -1.0).unwrap(),
            ],
            None,
        )
        .unwrap();
        let diff = propagate_analytic(&pair, &SigmaRule::It6).unwrap();
        assert_eq!(diff.mean, 0.0);
        assert!(close(diff.sigma, 0.1 * 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn degenerate_samples_are_constant() {
        let chain = ToleranceChain::<f64>::new(
            "fixed",
            vec![
                DimensionSpec::new("p", 5.0, 0.0, 0.0, 1.0).unwrap(),
                DimensionSpec::new("q", 2.5, 0.0, 0.0, -1.0).unwrap(),
            ],
            None,
        )
        .unwrap();
        let batch = sample_chain(&chain, &SigmaRule::It6, 1000, 3).unwrap();
        assert!(batch.fc_samples.iter().all(|&x| x == 2.5));
    }

    #[test]
    fn zero_samples_rejected() {
        assert_eq!(
            sample_chain(&actuator(), &SigmaRule::It6, 0, 1),
            Err(SimulationError::NoSamples)
        );
    }

    #[test]
    fn batch_shape_and_consistency() {
        let batch = sample_chain(&actuator(), &SigmaRule::It6, 10_000, 42).unwrap();
        assert_eq!(batch.n, 10_000);
        assert_eq!(batch.fc_name, "Ja");
        assert_eq!(batch.per_dimension.len(), 4);
        for col in &batch.per_dimension {
            assert_eq!(col.values.len(), batch.n);
        }
        for k in 0..batch.n {
            let mut fc = 0.0;
            for col in &batch.per_dimension {
                fc += col.coefficient * col.values[k];
            }
            assert_eq!(fc.to_bits(), batch.fc_samples[k].to_bits());
        }
    }

    #[test]
    fn deterministic_across_parallelism() {
        let a = sample_chain_with(
            &actuator(),
            &SigmaRule::It6,
            20_000,
            9,
            Parallelism::Sequential,
        )
        .unwrap();
        let b = sample_chain_with(
            &actuator(),
            &SigmaRule::It6,
            20_000,
            9,
            Parallelism::Parallel,
        )
        .unwrap();
        let c = sample_chain(&actuator(), &SigmaRule::It6, 20_000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        let d = sample_chain(&actuator(), &SigmaRule::It6, 20_000, 10).unwrap();
        assert_ne!(c.fc_samples, d.fc_samples);
    }

    #[test]
    fn moments_match_propagation() {
        let n = 100_000;
        let analytic = propagate_analytic(&actuator(), &SigmaRule::It6).unwrap();
        let batch = sample_chain(&actuator(), &SigmaRule::It6, n, 42).unwrap();
        let (mean, stdev) = mean_and_stdev(&batch.fc_samples).unwrap();
        assert!((mean - 10.58).abs() <= 4.0 * analytic.sigma / (n as f64).sqrt());
        assert!((stdev / analytic.sigma - 1.0).abs() <= 0.02);
    }

    #[test]
    fn statistical_interval_cases() {
        let constant = vec![3.7; 50];
        let r = statistical_interval(&constant, 3.0).unwrap();
        assert_eq!((r.min, r.max, r.it), (3.7, 3.7, 0.0));

        let batch = sample_chain(&actuator(), &SigmaRule::It6, 100_000, 42).unwrap();
        let r = statistical_interval(&batch.fc_samples, 3.0).unwrap();
        let sigma = propagate_analytic(&actuator(), &SigmaRule::It6)
            .unwrap()
            .sigma;
        assert!((r.it / (6.0 * sigma) - 1.0).abs() <= 0.03);
        assert!(r.it < 1.16);

        let unit = ToleranceChain::<f64>::new(
            "unit",
            vec![DimensionSpec::new("z", 0.0, 3.0, -3.0, 1.0).unwrap()],
            None,
        )
        .unwrap();
        let z = sample_chain(&unit, &SigmaRule::It6, 50_000, 5).unwrap();
        let r = statistical_interval(&z.fc_samples, 1.0).unwrap();
        assert!((r.it - 2.0).abs() < 0.03, "it = {}", r.it);

        assert_eq!(
            statistical_interval::<f64>(&[], 3.0),
            Err(SimulationError::EmptySamples)
        );
        assert!(matches!(
            statistical_interval(&[1.0, 2.0], 0.0),
            Err(SimulationError::InvalidCoverage(_))
        ));
        let single = statistical_interval(&[4.0], 3.0).unwrap();
        assert_eq!(single.it, 0.0);
    }

    #[test]
    fn scrap_counts() {
        let cond = FunctionalCondition::new("J", Some(0.0), Some(1.0)).unwrap();
        let inside = [0.0, 0.5, 1.0];
        let r = scrap_rate(&inside, &cond).unwrap();
        assert_eq!(
            (r.below, r.above, r.scrap_rate, r.ci95_half_width),
            (0, 0, 0.0, 0.0)
        );

        let mixed = [-1.0, 0.5, 2.0, 3.0];
        let r = scrap_rate(&mixed, &cond).unwrap();
        assert_eq!((r.n, r.below, r.above), (4, 1, 2));
        assert_eq!(r.scrap_rate, 0.75);
        assert!(close(
            r.ci95_half_width,
            1.96 * (0.75f64 * 0.25 / 4.0).sqrt(),
            1e-15
        ));

        let upper_only = FunctionalCondition::new("J", None, Some(1.0)).unwrap();
        assert_eq!(scrap_rate(&mixed, &upper_only).unwrap().below, 0);

        let unbounded = FunctionalCondition::new("J", None, None).unwrap();
        assert_eq!(
            scrap_rate(&mixed, &unbounded),
            Err(SimulationError::NoBounds)
        );
        assert_eq!(
            scrap_rate::<f64>(&[], &cond),
            Err(SimulationError::EmptySamples)
        );
    }

    #[test]
    fn scrap_half_mass_excluded() {
        // Symmetric samples, bound at the median: half the mass is above.
        let unit = ToleranceChain::<f64>::new(
            "unit",
            vec![DimensionSpec::new("z", 0.0, 3.0, -3.0, 1.0).unwrap()],
            None,
        )
        .unwrap();
        let n = 100_000;
        let batch = sample_chain(&unit, &SigmaRule::It6, n, 11).unwrap();
        let cond = FunctionalCondition::new("J", None, Some(0.0)).unwrap();
        let r = scrap_rate(&batch.fc_samples, &cond).unwrap();
        let ci99 = 2.576 * (0.25f64 / n as f64).sqrt();
        assert!(
            (r.scrap_rate - 0.5).abs() <= ci99,
            "scrap = {}",
            r.scrap_rate
        );
    }

    #[test]
    fn actuator_scrap_is_tiny() {
        let analytic = analytic_scrap(&actuator(), &SigmaRule::It6).unwrap();
        assert!(close(analytic, 2.378_167_985_638_855_6e-7, 1e-18));
        let batch = sample_chain(&actuator(), &SigmaRule::It6, 1_000_000, 42).unwrap();
        let r = scrap_rate(&batch.fc_samples, actuator().condition().unwrap()).unwrap();
        assert!(r.scrap_rate <= 1e-4);
    }

    #[test]
    fn analytic_scrap_cases() {
        // Bounds at mu ± 3 sigma: 2 (1 - Φ(3)).
        let p = propagate_analytic(&actuator(), &SigmaRule::It6).unwrap();
        let centred = actuator().with_condition(Some(
            FunctionalCondition::new(
                "Ja",
                Some(p.mean - 3.0 * p.sigma),
                Some(p.mean + 3.0 * p.sigma),
            )
            .unwrap(),
        ));
        let s = analytic_scrap(&centred, &SigmaRule::It6).unwrap();
        assert!(close(s, 0.002_699_796_063_260_186_6, 1e-12));

        let upper_only = actuator().with_condition(Some(
            FunctionalCondition::new("Ja", None, Some(p.mean)).unwrap(),
        ));
        assert!(close(
            analytic_scrap(&upper_only, &SigmaRule::It6).unwrap(),
            0.5,
            1e-15
        ));

        let fixed = ToleranceChain::<f64>::new(
            "fixed",
            vec![DimensionSpec::new("d", 1.0, 0.0, 0.0, 1.0).unwrap()],
            Some(FunctionalCondition::new("J", Some(0.5), Some(1.5)).unwrap()),
        )
        .unwrap();
        assert_eq!(analytic_scrap(&fixed, &SigmaRule::It6).unwrap(), 0.0);
        let outside = fixed.with_condition(Some(
            FunctionalCondition::new("J", Some(2.0), None).unwrap(),
        ));
        assert_eq!(analytic_scrap(&outside, &SigmaRule::It6).unwrap(), 1.0);

        assert_eq!(
            analytic_scrap(&actuator().with_condition(None), &SigmaRule::It6),
            Err(SimulationError::NoBounds)
        );
    }

    #[test]
    fn f32_sampling() {
        let chain: ToleranceChain<f32> = parse_chain(ACTUATOR).unwrap();
        let batch = sample_chain(&chain, &SigmaRule::It6, 50_000, 42).unwrap();
        let (mean, stdev): (f32, f32) = mean_and_stdev(&batch.fc_samples).unwrap();
        assert!((mean - 10.58).abs() < 2e-3);
        assert!((stdev / 0.112_25 - 1.0).abs() < 0.03);
    }
}
