use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use tolchain::{Parallelism, SigmaRule};
use tolchain_cli::{run, Command, Format, RunConfig, EXIT_INPUT};

/// Tolerance chain analysis, verification, simulation and synthesis.
#[derive(Debug, Parser)]
#[command(name = "tolchain", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Chain document (JSON).
    #[arg(long)]
    chain: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Monte Carlo sample count (per iteration for synthesize).
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// it6, it3, or explicit:name=sigma,...
    #[arg(long, default_value = "it6", value_parser = parse_rule)]
    sigma_rule: SigmaRule<f64>,
    /// Half-width of statistical intervals, in standard deviations.
    #[arg(long, default_value_t = 3.0)]
    coverage: f64,
    /// Target scrap fraction for synthesize.
    #[arg(long)]
    target_scrap: Option<f64>,
    /// Dimension to solve for.
    #[arg(long)]
    unknown: Option<String>,
    /// Histogram bin count.
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Worker threads; 0 picks automatically, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write the per-sample CSV (simulate).
    #[arg(long)]
    samples_out: Option<PathBuf>,
    /// Also write the histogram CSV (simulate).
    #[arg(long)]
    histogram_out: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    adjustment_factor: f64,
    /// Accepted relative distance from the target scrap.
    #[arg(long, default_value_t = 0.25)]
    tolerance_band: f64,
    /// Dimension the synthesis loop must not touch (repeatable).
    #[arg(long = "freeze")]
    frozen: Vec<String>,
}

fn parse_rule(s: &str) -> Result<SigmaRule<f64>, String> {
    s.parse()
        .map_err(|e: tolchain::SimulationError| e.to_string())
}

impl Args {
    fn config(&self) -> RunConfig {
        RunConfig {
            command: self.command,
            chain_path: self.chain.clone(),
            output_path: self.output.clone(),
            format: self.format,
            samples: self.samples,
            seed: self.seed,
            sigma_rule: self.sigma_rule.clone(),
            coverage_sigmas: self.coverage,
            target_scrap: self.target_scrap,
            unknown_name: self.unknown.clone(),
            bins: self.bins,
            samples_out: self.samples_out.clone(),
            histogram_out: self.histogram_out.clone(),
            max_iterations: self.max_iterations,
            adjustment_factor: self.adjustment_factor,
            tolerance_band: self.tolerance_band,
            frozen: self.frozen.clone(),
            parallelism: if self.threads == 1 {
                Parallelism::Sequential
            } else {
                Parallelism::Parallel
            },
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn execute(args: &Args) -> Result<i32, String> {
    let cfg = args.config();
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("tolchain: {e}");
            return Ok(e.exit_code());
        }
    };
    for (path, text) in &outcome.artifacts {
        write_file(path, text)?;
    }
    match &cfg.output_path {
        Some(path) => write_file(path, &outcome.document)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.document.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write stdout: {e}"))?;
        }
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = if args.threads > 1 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
        {
            Ok(pool) => pool.install(|| execute(&args)),
            Err(e) => Err(format!("cannot start thread pool: {e}")),
        }
    } else {
        execute(&args)
    };
    let code = result.unwrap_or_else(|msg| {
        eprintln!("tolchain: {msg}");
        EXIT_INPUT
    });
    ExitCode::from(code as u8)
}
