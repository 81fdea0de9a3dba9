use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pd_truncation::bounds::{
    bernstein_lower, classify_limit, marginal_distance_bounds, sandwich, sparse_marginal_bounds,
    truncation_distances, BernsteinParams, LimitFamily,
};
use pd_truncation::calibrate::{
    calibrate_bound, sigma_from_mc, wigner_threshold, BoundFamily, DEFAULT_TOL_C,
};
use pd_truncation::config::from_json_path;
use pd_truncation::estimators::estimate_c;
use pd_truncation::numerics::QuadratureSpec;
use pd_truncation::sweep::{figure_preset, run_sweep, write_outputs, SweepConfig};
use pd_truncation::{Error, PriorSpec, Result};

#[derive(Parser)]
#[command(
    name = "pdtrunc",
    version,
    about = "Truncation constants of separable priors on the positive-definite cone"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON request file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (JSON, or CSV for sweeps); stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate of c for a prior spec
    Estimate(Common),
    /// Sandwich or Bernstein bound
    Bound(Common),
    /// Distance bounds from c (or from a deficit bound b)
    Distances(Common),
    /// Solve for the slab scale
    Calibrate(Common),
    /// Large-k limit of c for an enumerated family
    Classify(Common),
    /// Run a sweep config; writes CSV plus manifest
    Sweep(Common),
    /// Run a figure preset; writes CSV plus manifest
    Figure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        preset: String,
    },
}

#[derive(Deserialize)]
#[serde(tag = "bound", rename_all = "kebab-case")]
enum BoundRequest {
    Sandwich {
        spec: PriorSpec,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
    Bernstein(BernsteinParams),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum DistanceRequest {
    Truncation {
        c: f64,
    },
    Marginal {
        c: f64,
        k: usize,
        #[serde(default)]
        iid: bool,
    },
    Sparse {
        b: f64,
        k: usize,
        eta: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
enum CalibrateRequest {
    MonteCarlo {
        spec: PriorSpec,
        target_c: f64,
        #[serde(default)]
        tol_c: Option<f64>,
    },
    Bound {
        target_c: f64,
        family: BoundFamily,
        #[serde(default)]
        tol: Option<f64>,
    },
    Wigner {
        mu: f64,
        k: usize,
        delta: f64,
        #[serde(default)]
        eta: Option<f64>,
    },
}

#[derive(Serialize)]
struct Threshold {
    sigma: f64,
}

fn require_config(c: &Common) -> Result<&Path> {
    c.config.as_deref().ok_or_else(|| Error::Config {
        path: "--config".into(),
        message: "required".into(),
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(std::io::stdout(), "{text}")?,
    }
    Ok(())
}

fn run_sweep_to(cfg: &SweepConfig, c: &Common) -> Result<()> {
    let mut cfg = cfg.clone();
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(n) = c.n {
        cfg.n = n;
    }
    let output = run_sweep(&cfg, c.workers)?;
    match &c.out {
        Some(path) => {
            let manifest = write_outputs(&output, path)?;
            eprintln!("wrote {} and {}", path.display(), manifest.display());
        }
        None => pd_truncation::sweep::write_csv(&output.rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate(c) => {
            let spec: PriorSpec = from_json_path(require_config(&c)?)?;
            let est = estimate_c(&spec, c.n.unwrap_or(10_000), c.seed.unwrap_or(0), c.workers)?;
            emit(&est, c.out.as_deref())
        }
        Command::Bound(c) => {
            let result = match from_json_path(require_config(&c)?)? {
                BoundRequest::Sandwich { spec, quadrature } => sandwich(&spec, &quadrature)?,
                BoundRequest::Bernstein(p) => bernstein_lower(&p)?,
            };
            emit(&result, c.out.as_deref())
        }
        Command::Distances(c) => {
            let result = match from_json_path(require_config(&c)?)? {
                DistanceRequest::Truncation { c } => truncation_distances(c)?,
                DistanceRequest::Marginal { c, k, iid } => marginal_distance_bounds(c, k, iid)?,
                DistanceRequest::Sparse { b, k, eta } => sparse_marginal_bounds(b, k, eta)?,
            };
            emit(&result, c.out.as_deref())
        }
        Command::Calibrate(c) => match from_json_path(require_config(&c)?)? {
            CalibrateRequest::MonteCarlo {
                spec,
                target_c,
                tol_c,
            } => {
                let r = sigma_from_mc(
                    &spec,
                    target_c,
                    c.n.unwrap_or(10_000),
                    tol_c.unwrap_or(DEFAULT_TOL_C),
                    c.seed.unwrap_or(0),
                )?;
                emit(&r, c.out.as_deref())
            }
            CalibrateRequest::Bound {
                target_c,
                family,
                tol,
            } => emit(
                &calibrate_bound(target_c, &family, tol.unwrap_or(1e-6))?,
                c.out.as_deref(),
            ),
            CalibrateRequest::Wigner { mu, k, delta, eta } => {
                let sigma = wigner_threshold(mu, k, delta, eta.unwrap_or(1.0))?;
                emit(&Threshold { sigma }, c.out.as_deref())
            }
        },
        Command::Classify(c) => {
            let family: LimitFamily = from_json_path(require_config(&c)?)?;
            emit(&classify_limit(&family), c.out.as_deref())
        }
        Command::Sweep(c) => {
            let cfg = SweepConfig::from_json_path(require_config(&c)?)?;
            run_sweep_to(&cfg, &c)
        }
        Command::Figure { common, preset } => run_sweep_to(&figure_preset(&preset)?, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
