//! Command-line front end for `tolchain`.
//!
//! [`run`] loads a chain file, dispatches to the engines and returns the
//! rendered documents; the binary only parses flags and writes the results.

pub mod report;

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;
use tolchain::monte_carlo::mean_and_stdev;
use tolchain::{
    analytic_scrap, derive_distribution, histogram, histogram_csv, it_budget, parse_chain,
    propagate_analytic, sample_chain_with, samples_csv, scrap_rate, solve_unknown,
    statistical_interval, synthesize, verify_worst_case, worst_case, Action, Chain, ChainError,
    ConformityStatus, FunctionalCondition, Parallelism, SigmaRule, SimulationError, SolveError,
    SynthesisConfig, SynthesisError,
};

use crate::report::{
    AnalyzeResult, ConditionRow, ConditionSummary, ConfigEcho, DimensionRow, DimensionSummary,
    Envelope, InputRef, SampleMoments, SimulateResult, SolveResult, SynthesizeResult, VerifyResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONCONFORMING: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Worst-case interval and IT budget of the functional condition.
    Analyze,
    /// Worst-case conformity against the imposed condition (exit 1 when non-conforming).
    Verify,
    /// Widest deviations for one unknown dimension (needs --unknown).
    Solve,
    /// Monte Carlo simulation: moments, statistical intervals, scrap, histogram.
    Simulate,
    /// Scrap-driven tolerance adjustment loop (needs --target-scrap).
    Synthesize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Verify => "verify",
            Command::Solve => "solve",
            Command::Simulate => "simulate",
            Command::Synthesize => "synthesize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub chain_path: PathBuf,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub samples: usize,
    pub seed: u64,
    pub sigma_rule: SigmaRule<f64>,
    pub coverage_sigmas: f64,
    pub target_scrap: Option<f64>,
    pub unknown_name: Option<String>,
    pub bins: usize,
    pub samples_out: Option<PathBuf>,
    pub histogram_out: Option<PathBuf>,
    pub max_iterations: usize,
    pub adjustment_factor: f64,
    pub tolerance_band: f64,
    pub frozen: Vec<String>,
    pub parallelism: Parallelism,
}

impl RunConfig {
    pub fn new(command: Command, chain_path: impl Into<PathBuf>) -> Self {
        let synth = SynthesisConfig::new(0.5);
        Self {
            command,
            chain_path: chain_path.into(),
            output_path: None,
            format: Format::Json,
            samples: 100_000,
            seed: 1,
            sigma_rule: SigmaRule::It6,
            coverage_sigmas: 3.0,
            target_scrap: None,
            unknown_name: None,
            bins: 50,
            samples_out: None,
            histogram_out: None,
            max_iterations: synth.max_iterations,
            adjustment_factor: synth.adjustment_factor,
            tolerance_band: synth.tolerance_band,
            frozen: Vec::new(),
            parallelism: Parallelism::Parallel,
        }
    }

    fn echo(&self) -> ConfigEcho {
        let mut frozen = self.frozen.clone();
        frozen.sort();
        frozen.dedup();
        ConfigEcho {
            command: self.command.name(),
            chain: self.chain_path.display().to_string(),
            format: self.format.name(),
            samples: self.samples,
            seed: self.seed,
            sigma_rule: self.sigma_rule.to_string(),
            coverage_sigmas: self.coverage_sigmas,
            target_scrap: self.target_scrap,
            unknown: self.unknown_name.clone(),
            bins: self.bins,
            max_iterations: self.max_iterations,
            adjustment_factor: self.adjustment_factor,
            tolerance_band: self.tolerance_band,
            frozen,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Chain { path: String, source: ChainError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(SolveError::Infeasible { .. }) => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        }
    }
}

/// Rendered output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// Main document: report JSON, or the command's CSV table.
    pub document: String,
    /// Additional files requested through `--samples-out` / `--histogram-out`.
    pub artifacts: Vec<(PathBuf, String)>,
}

struct Loaded {
    chain: Chain,
    sha256: String,
    path: String,
}

fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let path = cfg.chain_path.display().to_string();
    let bytes = std::fs::read(&cfg.chain_path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Chain {
        path: path.clone(),
        source: ChainError::Syntax(e.to_string()),
    })?;
    let chain = parse_chain(&text).map_err(|source| CliError::Chain {
        path: path.clone(),
        source,
    })?;
    let sha256 = Sha256::digest(&bytes)
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
    Ok(Loaded {
        chain,
        sha256,
        path,
    })
}

fn to_json<R: Serialize>(cfg: &RunConfig, loaded: &Loaded, echo: &ConfigEcho, result: R) -> String {
    let envelope = Envelope {
        tool: "tolchain",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        input: InputRef {
            path: &loaded.path,
            sha256: loaded.sha256.clone(),
        },
        config: echo,
        chain: &loaded.chain,
        result,
    };
    let mut out = serde_json::to_string_pretty(&envelope).expect("reports always serialize");
    out.push('\n');
    out
}

/// Full-precision (shortest round-trip) number for small CSV tables.
fn num(x: f64) -> String {
    format!("{x}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if !(cfg.coverage_sigmas.is_finite() && cfg.coverage_sigmas > 0.0) {
        return Err(CliError::Usage(
            "--coverage must be a positive number".into(),
        ));
    }
    if cfg.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if cfg.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    match cfg.command {
        Command::Solve if cfg.unknown_name.is_none() => {
            Err(CliError::Usage("solve requires --unknown <name>".into()))
        }
        Command::Synthesize if cfg.target_scrap.is_none() => Err(CliError::Usage(
            "synthesize requires --target-scrap <fraction>".into(),
        )),
        _ => Ok(()),
    }
}

/// Executes one command. Files are read but never written here.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    validate(cfg)?;
    let loaded = load(cfg)?;
    let echo = cfg.echo();
    match cfg.command {
        Command::Analyze => analyze(cfg, &loaded, &echo),
        Command::Verify => verify(cfg, &loaded, &echo),
        Command::Solve => solve(cfg, &loaded, &echo),
        Command::Simulate => simulate(cfg, &loaded, &echo),
        Command::Synthesize => synthesize_cmd(cfg, &loaded, &echo),
    }
}

fn done(document: String) -> RunOutcome {
    RunOutcome {
        exit_code: EXIT_OK,
        document,
        artifacts: Vec::new(),
    }
}

fn analyze(cfg: &RunConfig, loaded: &Loaded, echo: &ConfigEcho) -> Result<RunOutcome, CliError> {
    let chain = &loaded.chain;
    let wc = worst_case(chain);
    let budget = it_budget(chain);
    let document = match cfg.format {
        Format::Json => to_json(
            cfg,
            loaded,
            echo,
            AnalyzeResult {
                worst_case: wc,
                it_budget: budget,
                dimensions: chain.dimensions().iter().map(DimensionRow::from).collect(),
            },
        ),
        Format::Csv => {
            let mut out = String::from("name,coefficient,min,max,it\n");
            for d in chain.dimensions() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    d.name(),
                    num(d.coefficient()),
                    num(d.min_limit()),
                    num(d.max_limit()),
                    num(d.it())
                );
            }
            let _ = writeln!(
                out,
                "{},,{},{},{}",
                chain.condition_name(),
                num(wc.min),
                num(wc.max),
                num(wc.it)
            );
            out
        }
    };
    Ok(done(document))
}

fn verify(cfg: &RunConfig, loaded: &Loaded, echo: &ConfigEcho) -> Result<RunOutcome, CliError> {
    let verdict = verify_worst_case(&loaded.chain);
    let exit_code = match verdict.status {
        ConformityStatus::Conforming | ConformityStatus::Unchecked => EXIT_OK,
        _ => EXIT_NONCONFORMING,
    };
    let document = match cfg.format {
        Format::Json => to_json(
            cfg,
            loaded,
            echo,
            VerifyResult {
                status: verdict.status,
                computed: verdict.computed.clone(),
                imposed: verdict.imposed.as_ref().map(ConditionRow::from),
            },
        ),
        Format::Csv => {
            let imposed = verdict.imposed.as_ref();
            format!(
                "status,min,max,it,imposed_min,imposed_max\n{:?},{},{},{},{},{}\n",
                verdict.status,
                num(verdict.computed.min),
                num(verdict.computed.max),
                num(verdict.computed.it),
                opt_num(imposed.and_then(|c| c.min())),
                opt_num(imposed.and_then(|c| c.max())),
            )
        }
    };
    Ok(RunOutcome {
        exit_code,
        document,
        artifacts: Vec::new(),
    })
}

fn solve(cfg: &RunConfig, loaded: &Loaded, echo: &ConfigEcho) -> Result<RunOutcome, CliError> {
    let unknown = cfg.unknown_name.as_deref().expect("validated");
    let solved = solve_unknown(&loaded.chain, unknown)?;
    let completed = loaded
        .chain
        .with_dimension(solved.clone())
        .expect("solved dimension comes from the chain");
    let verdict = verify_worst_case(&completed);
    let document = match cfg.format {
        Format::Json => to_json(
            cfg,
            loaded,
            echo,
            SolveResult {
                unknown: unknown.to_string(),
                dimension: DimensionRow::from(&solved),
                completed_chain: completed.clone(),
                worst_case: verdict.computed.clone(),
                status: verdict.status,
            },
        ),
        Format::Csv => format!(
            "name,nominal,upper_dev,lower_dev,it\n{},{},{},{},{}\n",
            solved.name(),
            num(solved.nominal()),
            num(solved.upper_dev()),
            num(solved.lower_dev()),
            num(solved.it())
        ),
    };
    Ok(done(document))
}

fn simulate(cfg: &RunConfig, loaded: &Loaded, echo: &ConfigEcho) -> Result<RunOutcome, CliError> {
    let chain = &loaded.chain;
    let rule = &cfg.sigma_rule;
    let batch = sample_chain_with(chain, rule, cfg.samples, cfg.seed, cfg.parallelism)?;
    let bins = histogram(&batch.fc_samples, cfg.bins)?;

    let mut artifacts = Vec::new();
    if let Some(path) = &cfg.samples_out {
        artifacts.push((path.clone(), samples_csv(&batch)));
    }
    if let Some(path) = &cfg.histogram_out {
        artifacts.push((path.clone(), histogram_csv(&bins)));
    }

    let document = match cfg.format {
        Format::Csv => samples_csv(&batch),
        Format::Json => {
            let mut dimensions = Vec::with_capacity(chain.dimensions().len());
            for (d, col) in chain.dimensions().iter().zip(&batch.per_dimension) {
                let (mean, stdev) = mean_and_stdev(&col.values)?;
                let limits =
                    FunctionalCondition::new(d.name(), Some(d.min_limit()), Some(d.max_limit()))
                        .expect("dimension limits are ordered");
                dimensions.push(DimensionSummary {
                    name: d.name().to_string(),
                    analytic: derive_distribution(d, rule)?,
                    sample: SampleMoments { mean, stdev },
                    statistical_interval: statistical_interval(&col.values, cfg.coverage_sigmas)?,
                    arithmetic_it: d.it(),
                    out_of_limits: scrap_rate(&col.values, &limits)?,
                });
            }
            let (mean, stdev) = mean_and_stdev(&batch.fc_samples)?;
            let bounded = chain.condition().filter(|c| c.has_bounds());
            let condition = ConditionSummary {
                name: batch.fc_name.clone(),
                analytic: propagate_analytic(chain, rule)?,
                sample: SampleMoments { mean, stdev },
                statistical_interval: statistical_interval(&batch.fc_samples, cfg.coverage_sigmas)?,
                worst_case: worst_case(chain),
                scrap: bounded
                    .map(|c| scrap_rate(&batch.fc_samples, c))
                    .transpose()?,
                analytic_scrap: bounded.map(|_| analytic_scrap(chain, rule)).transpose()?,
            };
            to_json(
                cfg,
                loaded,
                echo,
                SimulateResult {
                    n: batch.n,
                    seed: batch.seed,
                    sigma_rule: rule.to_string(),
                    coverage_sigmas: cfg.coverage_sigmas,
                    dimensions,
                    condition,
                    histogram: bins,
                },
            )
        }
    };
    Ok(RunOutcome {
        exit_code: EXIT_OK,
        document,
        artifacts,
    })
}

fn synthesize_cmd(
    cfg: &RunConfig,
    loaded: &Loaded,
    echo: &ConfigEcho,
) -> Result<RunOutcome, CliError> {
    let target = cfg.target_scrap.expect("validated");
    let synth = SynthesisConfig {
        target_scrap: target,
        n_per_iteration: cfg.samples,
        seed: cfg.seed,
        max_iterations: cfg.max_iterations,
        adjustment_factor: cfg.adjustment_factor,
        tolerance_band: cfg.tolerance_band,
        frozen: cfg.frozen.iter().cloned().collect(),
        parallelism: cfg.parallelism,
    };
    let report = synthesize(&loaded.chain, &cfg.sigma_rule, &synth)?;
    let document = match cfg.format {
        Format::Json => to_json(cfg, loaded, echo, SynthesizeResult::new(&report, target)),
        Format::Csv => {
            let mut out = String::from(
                "index,seed,scrap_rate,ci95_half_width,analytic_scrap,basis,action,dimension,it_before,it_after\n",
            );
            for it in &report.iterations {
                let (kind, dim, before, after) = match &it.action {
                    Action::Retain => ("retain", "", None, None),
                    Action::NoCandidate => ("no_candidate", "", None, None),
                    Action::Shrink {
                        dimension,
                        it_before,
                        it_after,
                    } => (
                        "shrink",
                        dimension.as_str(),
                        Some(*it_before),
                        Some(*it_after),
                    ),
                    Action::Widen {
                        dimension,
                        it_before,
                        it_after,
                    } => (
                        "widen",
                        dimension.as_str(),
                        Some(*it_before),
                        Some(*it_after),
                    ),
                };
                let basis = serde_json::to_value(it.basis).expect("basis serializes");
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    it.index,
                    it.seed,
                    num(it.scrap.scrap_rate),
                    num(it.scrap.ci95_half_width),
                    num(it.analytic_scrap),
                    basis.as_str().unwrap_or_default(),
                    kind,
                    dim,
                    opt_num(before),
                    opt_num(after)
                );
            }
            out
        }
    };
    Ok(done(document))
}
