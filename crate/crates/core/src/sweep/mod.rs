//! Parameter sweeps over the dimension `k`, with CSV rows and a JSON
//! manifest as output.
//!
//! A sweep fixes a diagonal law and a slab family and varies one schedule
//! (`δ`, `σ` or `η`) across series. At each `k` the slab scale is either
//! given directly by a `σ` schedule or derived from `δ` through
//! `σ = μ/((2 + δ)√(ηk))`, with `μ` the diagonal mean.

mod presets;

pub use presets::{figure_preset, PRESET_NAMES};

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bernstein_lower, classify_limit, marginal_distance_bounds, sandwich, BernsteinKind,
    BernsteinParams, BoundResult, DistanceBounds, LimitFamily, Schedule, Verdict,
};
use crate::calibrate::wigner_threshold;
use crate::error::{Error, Result};
use crate::estimators::{estimate_c, with_workers, Estimate};
use crate::model::{DiagonalLaw, PriorSpec, SlabLaw, SparsityLaw};
use crate::numerics::QuadratureSpec;

pub const CSV_HEADER: [&str; 13] = [
    "k",
    "delta",
    "sigma",
    "eta",
    "n",
    "c_hat",
    "se",
    "ci_low",
    "ci_high",
    "lower_bound",
    "upper_bound",
    "method",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreeParam {
    Delta,
    Sigma,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    McEstimate,
    Sandwich,
    Bernstein,
    Distances,
    Classify,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub k: Vec<usize>,
    pub diagonal: DiagonalLaw,
    /// Slab family; its scale parameter is overwritten at every point.
    pub slab: SlabLaw,
    pub free: FreeParam,
    /// One series per schedule of the free parameter.
    pub series: Vec<Schedule>,
    #[serde(default)]
    pub delta: Option<Schedule>,
    #[serde(default)]
    pub sigma: Option<Schedule>,
    /// Bernoulli inclusion probability; absent means dense.
    #[serde(default)]
    pub eta: Option<Schedule>,
    pub n: usize,
    pub seed: u64,
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

/// Per-point parameters after resolving the schedules.
#[derive(Clone, Debug, PartialEq)]
struct Point {
    k: usize,
    series: usize,
    delta: Option<f64>,
    sigma: f64,
    eta: Option<f64>,
}

impl SweepConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = crate::config::from_json_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_path(path: &Path) -> Result<Self> {
        let cfg: SweepConfig = crate::config::from_json_path(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn schedule(&self, which: FreeParam, series: usize) -> Option<Schedule> {
        if self.free == which {
            Some(self.series[series])
        } else {
            match which {
                FreeParam::Delta => self.delta,
                FreeParam::Sigma => self.sigma,
                FreeParam::Eta => self.eta,
            }
        }
    }

    fn resolve(&self, k: usize, series: usize) -> Result<Point> {
        let path = |f: FreeParam, name: &str| {
            if self.free == f {
                format!("series[{series}]")
            } else {
                name.to_string()
            }
        };
        let eta = self.schedule(FreeParam::Eta, series).map(|s| s.at(k));
        if let Some(e) = eta {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::config(
                    path(FreeParam::Eta, "eta"),
                    format!("eta({k}) = {e} is outside (0, 1]"),
                ));
            }
        }
        let delta = self.schedule(FreeParam::Delta, series).map(|s| s.at(k));
        let sigma = match (self.schedule(FreeParam::Sigma, series), delta) {
            (Some(s), _) => s.at(k),
            (None, Some(d)) => wigner_threshold(self.diagonal.mean(), k, d, eta.unwrap_or(1.0))
                .map_err(|e| Error::config(path(FreeParam::Delta, "delta"), e.to_string()))?,
            (None, None) => unreachable!("validated"),
        };
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::config(
                path(FreeParam::Sigma, "sigma"),
                format!("sigma({k}) = {sigma} is not a valid scale"),
            ));
        }
        Ok(Point {
            k,
            series,
            delta,
            sigma,
            eta,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.is_empty() {
            return Err(Error::config("k", "must be nonempty"));
        }
        for (i, w) in self.k.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::config(
                    format!("k[{}]", i + 1),
                    "must be strictly ascending",
                ));
            }
        }
        if self.k[0] < 2 {
            return Err(Error::config("k[0]", "dimensions must be >= 2"));
        }
        if self.n < 100 {
            return Err(Error::config(
                "n",
                format!("must be >= 100, got {}", self.n),
            ));
        }
        if self.series.is_empty() {
            return Err(Error::config("series", "must be nonempty"));
        }
        if self.outputs.is_empty() {
            return Err(Error::config("outputs", "must be nonempty"));
        }
        self.diagonal
            .validate()
            .map_err(|e| Error::config("diagonal", e.to_string()))?;
        self.slab
            .validate()
            .map_err(|e| Error::config("slab", e.to_string()))?;
        self.quadrature
            .validate()
            .map_err(|e| Error::config("quadrature", e.to_string()))?;
        let given = |f: FreeParam| match f {
            FreeParam::Delta => self.delta.is_some(),
            FreeParam::Sigma => self.sigma.is_some(),
            FreeParam::Eta => self.eta.is_some(),
        };
        let name = |f: FreeParam| match f {
            FreeParam::Delta => "delta",
            FreeParam::Sigma => "sigma",
            FreeParam::Eta => "eta",
        };
        if given(self.free) {
            return Err(Error::config(
                name(self.free),
                "must be absent when it is the free parameter",
            ));
        }
        let has_delta = self.free == FreeParam::Delta || self.delta.is_some();
        let has_sigma = self.free == FreeParam::Sigma || self.sigma.is_some();
        match (has_delta, has_sigma) {
            (true, true) => {
                return Err(Error::config(
                    "sigma",
                    "give either a sigma or a delta schedule, not both",
                ))
            }
            (false, false) => {
                return Err(Error::config(
                    "sigma",
                    "one of sigma or delta must determine the slab scale",
                ))
            }
            _ => {}
        }
        for &k in &self.k {
            for s in 0..self.series.len() {
                self.resolve(k, s)?;
            }
        }
        Ok(())
    }

    fn spec_at(&self, p: &Point) -> Result<PriorSpec> {
        let sparsity = match p.eta {
            Some(eta) => SparsityLaw::Bernoulli { eta },
            None => SparsityLaw::Dense,
        };
        PriorSpec::new(p.k, self.diagonal, self.slab.with_scale(p.sigma), sparsity)
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// Limit family of one series, when the sweep matches one.
    fn limit_family(&self, series: usize) -> Option<LimitFamily> {
        let delta = self.schedule(FreeParam::Delta, series);
        let sigma = self.schedule(FreeParam::Sigma, series);
        let eta = self.schedule(FreeParam::Eta, series);
        if !self.slab.is_gaussian() {
            return None;
        }
        match (self.diagonal, delta, sigma, eta) {
            (DiagonalLaw::Fixed { .. }, Some(delta), None, None) => {
                Some(LimitFamily::DenseFixed { delta })
            }
            (DiagonalLaw::Fixed { .. }, Some(delta), None, Some(eta)) => {
                Some(LimitFamily::SparseFixed { delta, eta })
            }
            (DiagonalLaw::Exponential { .. }, None, Some(sigma), None) => {
                Some(LimitFamily::DenseStochasticExp { sigma })
            }
            (DiagonalLaw::Gamma { shape, rate }, None, Some(sigma), None) if shape == rate => {
                Some(LimitFamily::DenseStochasticGamma {
                    alpha: shape,
                    sigma,
                })
            }
            _ => None,
        }
    }

    pub fn series_label(&self, series: usize) -> String {
        let name = match self.free {
            FreeParam::Delta => "delta",
            FreeParam::Sigma => "sigma",
            FreeParam::Eta => "eta",
        };
        format!("{name}={}", self.series[series])
    }
}

/// One CSV row; `None` fields are written empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub delta: Option<f64>,
    pub sigma: f64,
    pub eta: Option<f64>,
    pub n: usize,
    pub c_hat: Option<f64>,
    pub se: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub method: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesInfo {
    pub label: String,
    pub schedule: Schedule,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointInfo {
    pub row: usize,
    pub k: usize,
    pub series: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distances: Option<DistanceBounds>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub library: String,
    pub library_version: String,
    pub preset: Option<String>,
    pub config: SweepConfig,
    pub csv_columns: Vec<String>,
    /// Rows are ordered by `k`, then by series index.
    pub row_order: String,
    pub series_column: String,
    pub series: Vec<SeriesInfo>,
    pub points: Vec<PointInfo>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub manifest: Manifest,
}

fn run_point(cfg: &SweepConfig, p: &Point) -> Result<(SweepRow, Option<DistanceBounds>, String)> {
    let spec = cfg.spec_at(p)?;
    let mut tags = Vec::new();
    let mut notes = Vec::new();
    let est: Option<Estimate> = if cfg.wants(Output::McEstimate) {
        tags.push("mc".to_string());
        Some(estimate_c(&spec, cfg.n, cfg.seed, 0)?)
    } else {
        None
    };
    let mut bounds: Vec<BoundResult> = Vec::new();
    if cfg.wants(Output::Sandwich) {
        bounds.push(sandwich(&spec, &cfg.quadrature)?);
    }
    if cfg.wants(Output::Bernstein) {
        let kind = match (cfg.diagonal, cfg.slab.is_gaussian(), p.eta) {
            (_, _, Some(_)) => {
                notes.push(
                    "bernstein skipped: Bernoulli patterns have no almost-sure degree bound"
                        .to_string(),
                );
                None
            }
            (DiagonalLaw::Fixed { .. }, true, None) => Some(BernsteinKind::GaussFixed),
            (DiagonalLaw::Exponential { .. }, true, None) => Some(BernsteinKind::GaussExpdiag),
            _ => {
                notes.push("bernstein skipped: no bound for this diagonal/slab pair".to_string());
                None
            }
        };
        if let Some(kind) = kind {
            let params = BernsteinParams {
                kind,
                mu: cfg.diagonal.mean(),
                sigma: p.sigma,
                cap: None,
                degree: p.k - 1,
                k: p.k,
                t: None,
            };
            bounds.push(bernstein_lower(&params)?);
        }
    }
    let combined = BoundResult::intersect(&bounds);
    if let Some(b) = &combined {
        tags.push(b.method.clone());
        if !b.notes.is_empty() {
            notes.push(b.notes.clone());
        }
    }
    let distances = match (&est, cfg.wants(Output::Distances)) {
        (Some(e), true) if e.value > 0.0 => Some(marginal_distance_bounds(e.value, p.k, true)?),
        (_, true) => {
            notes.push("distances need a positive Monte Carlo estimate".to_string());
            None
        }
        _ => None,
    };
    let row = SweepRow {
        k: p.k,
        delta: p.delta,
        sigma: p.sigma,
        eta: p.eta,
        n: cfg.n,
        c_hat: est.as_ref().map(|e| e.value),
        se: est.as_ref().map(|e| e.se),
        ci_low: est.as_ref().map(|e| e.ci_low),
        ci_high: est.as_ref().map(|e| e.ci_high),
        lower_bound: combined.as_ref().map(|b| b.lower),
        upper_bound: combined.as_ref().map(|b| b.upper),
        method: tags.join(";"),
        seed: cfg.seed,
    };
    Ok((row, distances, notes.join("; ")))
}

/// Runs every `(k, series)` point. Points are evaluated concurrently on
/// `workers` threads (`0` = all cores) and returned in `(k, series)` order;
/// every point uses the config's master seed.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<SweepOutput> {
    cfg.validate()?;
    let points: Vec<Point> = cfg
        .k
        .iter()
        .flat_map(|&k| (0..cfg.series.len()).map(move |s| (k, s)))
        .map(|(k, s)| cfg.resolve(k, s))
        .collect::<Result<_>>()?;
    let results: Vec<Result<_>> = with_workers(workers, || {
        points.par_iter().map(|p| run_point(cfg, p)).collect()
    });
    let mut rows = Vec::with_capacity(points.len());
    let mut infos = Vec::with_capacity(points.len());
    for (i, (p, r)) in points.iter().zip(results).enumerate() {
        let (row, distances, notes) = r?;
        rows.push(row);
        infos.push(PointInfo {
            row: i,
            k: p.k,
            series: p.series,
            distances,
            notes,
        });
    }
    let series = (0..cfg.series.len())
        .map(|s| SeriesInfo {
            label: cfg.series_label(s),
            schedule: cfg.series[s],
            classification: if cfg.wants(Output::Classify) {
                cfg.limit_family(s).map(|f| classify_limit(&f))
            } else {
                None
            },
        })
        .collect();
    let manifest = Manifest {
        library: env!("CARGO_PKG_NAME").into(),
        library_version: env!("CARGO_PKG_VERSION").into(),
        preset: cfg.name.clone(),
        config: cfg.clone(),
        csv_columns: CSV_HEADER.iter().map(|s| s.to_string()).collect(),
        row_order: "k-major, then series index".into(),
        series_column: match cfg.free {
            FreeParam::Delta => "delta",
            FreeParam::Sigma => "sigma",
            FreeParam::Eta => "eta",
        }
        .into(),
        series,
        points: infos,
    };
    Ok(SweepOutput { rows, manifest })
}

/// CSV with the fixed header, LF line endings.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::config(
            "<csv header>",
            format!("unexpected columns {header:?}"),
        ));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Writes `<csv>` and the manifest next to it (`<csv stem>.manifest.json`).
/// Returns the manifest path.
pub fn write_outputs(output: &SweepOutput, csv_path: &Path) -> Result<std::path::PathBuf> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(
        &output.rows,
        std::io::BufWriter::new(std::fs::File::create(csv_path)?),
    )?;
    let manifest_path = csv_path.with_extension("manifest.json");
    let mut f = std::io::BufWriter::new(std::fs::File::create(&manifest_path)?);
    serde_json::to_writer_pretty(&mut f, &output.manifest)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(manifest_path)
}
