//! Report documents emitted by the CLI.
//!
//! Every report is wrapped in an [`Envelope`] carrying the tool version, the
//! SHA-256 of the chain file and the configuration that produced it, so a
//! report can be re-run exactly. Output paths and thread counts are left out
//! of the configuration because they do not influence the results.

use serde::Serialize;
use tolchain::{
    Action, Chain, ConformityStatus, Dimension, DistributionParams, FunctionalCondition,
    HistogramBin, Interval, ScrapBasis, ScrapReport, SynthesisReport,
};

#[derive(Debug, Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: InputRef<'a>,
    pub config: &'a ConfigEcho,
    pub chain: &'a Chain,
    pub result: R,
}

#[derive(Debug, Serialize)]
pub struct InputRef<'a> {
    pub path: &'a str,
    pub sha256: String,
}

/// Result-affecting configuration, echoed verbatim.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub chain: String,
    pub format: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub sigma_rule: String,
    pub coverage_sigmas: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_scrap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unknown: Option<String>,
    pub bins: usize,
    pub max_iterations: usize,
    pub adjustment_factor: f64,
    pub tolerance_band: f64,
    pub frozen: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct DimensionRow {
    pub name: String,
    pub nominal: f64,
    pub upper_dev: f64,
    pub lower_dev: f64,
    pub coefficient: f64,
    pub min_limit: f64,
    pub max_limit: f64,
    pub it: f64,
}

impl From<&Dimension> for DimensionRow {
    fn from(d: &Dimension) -> Self {
        Self {
            name: d.name().to_string(),
            nominal: d.nominal(),
            upper_dev: d.upper_dev(),
            lower_dev: d.lower_dev(),
            coefficient: d.coefficient(),
            min_limit: d.min_limit(),
            max_limit: d.max_limit(),
            it: d.it(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConditionRow {
    pub name: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl From<&FunctionalCondition<f64>> for ConditionRow {
    fn from(c: &FunctionalCondition<f64>) -> Self {
        Self {
            name: c.name().to_string(),
            min: c.min(),
            max: c.max(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeResult {
    pub worst_case: Interval,
    pub it_budget: f64,
    pub dimensions: Vec<DimensionRow>,
}

#[derive(Debug, Serialize)]
pub struct VerifyResult {
    pub status: ConformityStatus,
    pub computed: Interval,
    pub imposed: Option<ConditionRow>,
}

#[derive(Debug, Serialize)]
pub struct SolveResult {
    pub unknown: String,
    pub dimension: DimensionRow,
    pub completed_chain: Chain,
    pub worst_case: Interval,
    pub status: ConformityStatus,
}

#[derive(Debug, Serialize)]
pub struct SampleMoments {
    pub mean: f64,
    pub stdev: f64,
}

#[derive(Debug, Serialize)]
pub struct DimensionSummary {
    pub name: String,
    pub analytic: DistributionParams<f64>,
    pub sample: SampleMoments,
    pub statistical_interval: Interval,
    pub arithmetic_it: f64,
    /// Realizations outside the dimension's own limits.
    pub out_of_limits: ScrapReport,
}

#[derive(Debug, Serialize)]
pub struct ConditionSummary {
    pub name: String,
    pub analytic: DistributionParams<f64>,
    pub sample: SampleMoments,
    pub statistical_interval: Interval,
    pub worst_case: Interval,
    pub scrap: Option<ScrapReport>,
    pub analytic_scrap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulateResult {
    pub n: usize,
    pub seed: u64,
    pub sigma_rule: String,
    pub coverage_sigmas: f64,
    pub dimensions: Vec<DimensionSummary>,
    pub condition: ConditionSummary,
    pub histogram: Vec<HistogramBin<f64>>,
}

#[derive(Debug, Serialize)]
pub struct DeviationRow {
    pub name: String,
    pub upper_dev: f64,
    pub lower_dev: f64,
    pub it: f64,
}

#[derive(Debug, Serialize)]
pub struct IterationRow {
    pub index: usize,
    pub seed: u64,
    pub scrap: ScrapReport,
    pub analytic_scrap: f64,
    pub basis: ScrapBasis,
    pub action: Action<f64>,
    /// Deviations simulated in this round.
    pub deviations: Vec<DeviationRow>,
}

#[derive(Debug, Serialize)]
pub struct SynthesizeResult {
    pub converged: bool,
    pub target_scrap: f64,
    pub iterations: Vec<IterationRow>,
    pub final_chain: Chain,
}

impl SynthesizeResult {
    pub fn new(r: &SynthesisReport<f64>, target_scrap: f64) -> Self {
        let iterations = r
            .iterations
            .iter()
            .map(|it| IterationRow {
                index: it.index,
                seed: it.seed,
                scrap: it.scrap,
                analytic_scrap: it.analytic_scrap,
                basis: it.basis,
                action: it.action.clone(),
                deviations: it
                    .chain
                    .dimensions()
                    .iter()
                    .map(|d| DeviationRow {
                        name: d.name().to_string(),
                        upper_dev: d.upper_dev(),
                        lower_dev: d.lower_dev(),
                        it: d.it(),
                    })
                    .collect(),
            })
            .collect();
        Self {
            converged: r.converged,
            target_scrap,
            iterations,
            final_chain: r.final_chain.clone(),
        }
    }
}
