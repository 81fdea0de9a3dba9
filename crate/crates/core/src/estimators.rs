//! Reproducible Monte Carlo estimators.
//!
//! Replicate `i` of every estimator reads from `RngStream::new(seed, i)`,
//! so results do not depend on how replicates are scheduled across
//! threads. Binomial counts are merged as integers; floating-point
//! statistics are collected in replicate order and reduced with pairwise
//! summation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    coupled_scale, draw_matrix, draw_structure, is_pd, min_eig, pd_scale_limit, PriorSpec,
    SparsityLaw, StructureMatrix, SymMatrix,
};
use crate::numerics::{normal_quantile, pairwise_sum};
use crate::rng::{derive_seed, RngStream};

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Expected successes below which a plug-in normaliser is rejected.
pub const MIN_NORMALIZER_SUCCESSES: f64 = 10.0;

/// A Monte Carlo point estimate with its interval and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "EstimateJson", from = "EstimateJson")]
pub struct Estimate {
    pub value: f64,
    pub n: usize,
    /// Present for binomial estimates.
    pub successes: Option<u64>,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
    pub level: f64,
}

#[derive(Serialize, Deserialize)]
struct EstimateJson {
    value: f64,
    n: usize,
    successes: Option<u64>,
    se: f64,
    ci: [f64; 2],
    seed: u64,
    level: f64,
}

impl From<Estimate> for EstimateJson {
    fn from(e: Estimate) -> Self {
        EstimateJson {
            value: e.value,
            n: e.n,
            successes: e.successes,
            se: e.se,
            ci: [e.ci_low, e.ci_high],
            seed: e.master_seed,
            level: e.level,
        }
    }
}

impl From<EstimateJson> for Estimate {
    fn from(e: EstimateJson) -> Self {
        Estimate {
            value: e.value,
            n: e.n,
            successes: e.successes,
            se: e.se,
            ci_low: e.ci[0],
            ci_high: e.ci[1],
            master_seed: e.seed,
            level: e.level,
        }
    }
}

fn two_sided_z(level: f64) -> f64 {
    normal_quantile(0.5 + 0.5 * level)
}

impl Estimate {
    /// `successes / n` with a Wilson score interval.
    pub fn binomial(successes: u64, n: usize, master_seed: u64, level: f64) -> Self {
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z = two_sided_z(level);
        let z2 = z * z;
        let denom = 1.0 + z2 / nf;
        let center = (p + z2 / (2.0 * nf)) / denom;
        let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
        Estimate {
            value: p,
            n,
            successes: Some(successes),
            se: (p * (1.0 - p) / nf).sqrt(),
            ci_low: (center - half).max(0.0).min(p),
            ci_high: (center + half).min(1.0).max(p),
            master_seed,
            level,
        }
    }

    /// Normal-approximation interval `value ± z·se`.
    pub fn normal(value: f64, se: f64, n: usize, master_seed: u64, level: f64) -> Self {
        let z = two_sided_z(level);
        Estimate {
            value,
            n,
            successes: None,
            se,
            ci_low: value - z * se,
            ci_high: value + z * se,
            master_seed,
            level,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    fn check_normalizer(&self) -> Result<()> {
        if self.value * (self.n as f64) < MIN_NORMALIZER_SUCCESSES {
            Err(Error::DegenerateNormalizer {
                c_hat: self.value,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }
}

/// Runs `f` on a pool of `workers` threads; `0` uses the global pool.
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn require_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::domain(format!("need n >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// One replicate of `(Z, Θ)` under the spec.
pub fn draw_replicate(spec: &PriorSpec, stream: RngStream) -> SymMatrix {
    let mut rng = stream.rng();
    match &spec.sparsity {
        SparsityLaw::Dense => draw_matrix(spec, None, &mut rng),
        _ => {
            let z = draw_structure(spec, &mut rng);
            draw_matrix(spec, Some(&z), &mut rng)
        }
    }
}

fn count_pd(n: usize, seed: u64, draw: impl Fn(RngStream) -> SymMatrix + Sync) -> u64 {
    (0..n as u64)
        .into_par_iter()
        .filter(|&i| is_pd(&draw(RngStream::new(seed, i))))
        .count() as u64
}

/// `ĉ` for `c = P(Θ ≻ 0)`, marginalising over `Z`.
pub fn estimate_c(spec: &PriorSpec, n: usize, seed: u64, workers: usize) -> Result<Estimate> {
    spec.validate()?;
    require_n(n, 1)?;
    let successes = with_workers(workers, || count_pd(n, seed, |s| draw_replicate(spec, s)));
    Ok(Estimate::binomial(successes, n, seed, DEFAULT_LEVEL))
}

/// `ĉ_z` for `c_z = P(Θ ≻ 0 | Z = z)`. The spec's own sparsity law is ignored.
pub fn estimate_c_given_z(
    spec: &PriorSpec,
    z: &StructureMatrix,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    spec.validate()?;
    require_n(n, 1)?;
    if z.k() != spec.k {
        return Err(Error::domain(format!(
            "pattern has k = {}, spec has k = {}",
            z.k(),
            spec.k
        )));
    }
    let successes = with_workers(workers, || {
        count_pd(n, seed, |s| draw_matrix(spec, Some(z), &mut s.rng()))
    });
    Ok(Estimate::binomial(successes, n, seed, DEFAULT_LEVEL))
}

fn check_pair(spec: &PriorSpec, pair: (usize, usize), x: f64) -> Result<(usize, usize)> {
    let (i, j) = if pair.0 <= pair.1 {
        pair
    } else {
        (pair.1, pair.0)
    };
    if j >= spec.k {
        return Err(Error::domain(format!(
            "pair ({i},{j}) out of range for k = {}",
            spec.k
        )));
    }
    if i == j && !(x > 0.0) {
        return Err(Error::domain(format!(
            "diagonal entry must be clamped to x > 0, got {x}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::domain("clamp value must be finite"));
    }
    Ok((i, j))
}

fn cond_successes(spec: &PriorSpec, (i, j): (usize, usize), x: f64, n: usize, seed: u64) -> u64 {
    count_pd(n, seed, |s| {
        let mut m = draw_replicate(spec, s);
        m.set(i, j, x);
        m
    })
}

/// `ĉ_ij(x) = P(Θ ≻ 0 | θ_ij = x)`. Indices are 0-based.
pub fn estimate_c_cond(
    spec: &PriorSpec,
    pair: (usize, usize),
    x: f64,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    spec.validate()?;
    require_n(n, 1)?;
    let pair = check_pair(spec, pair, x)?;
    let successes = cond_successes(spec, pair, x, n, seed);
    Ok(Estimate::binomial(successes, n, seed, DEFAULT_LEVEL))
}

/// One draw of `θ_ij` from its untruncated marginal `π_ij`.
pub fn draw_marginal<R: Rng + ?Sized>(
    spec: &PriorSpec,
    (i, j): (usize, usize),
    rng: &mut R,
) -> f64 {
    if i == j {
        return spec.diagonal.sample(rng);
    }
    let in_slab = match &spec.sparsity {
        SparsityLaw::Dense => true,
        SparsityLaw::Bernoulli { eta } => rng.random::<f64>() < *eta,
        SparsityLaw::FixedPattern { pattern } => pattern.get(i, j),
    };
    if in_slab {
        spec.slab.sample(rng)
    } else {
        0.0
    }
}

/// Outer values `x_o` and inner estimates `ĉ_ij(x_o)` of a nested run.
fn nested_values(
    spec: &PriorSpec,
    pair: (usize, usize),
    xs: &[f64],
    inner: usize,
    seed: u64,
) -> Vec<f64> {
    xs.par_iter()
        .enumerate()
        .map(|(o, &x)| {
            let inner_seed = derive_seed(seed, o as u64);
            cond_successes(spec, pair, x, inner, inner_seed) as f64 / inner as f64
        })
        .collect()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Nested estimate of `E_{π_ij}[c_ij(θ_ij)]`: `outer` draws of `θ_ij`, each
/// followed by an `inner`-replicate estimate of `c_ij`. The standard error
/// is the between-outer spread, which already carries the inner noise.
pub fn estimate_c_tower(
    spec: &PriorSpec,
    pair: (usize, usize),
    outer: usize,
    inner: usize,
    seed: u64,
) -> Result<Estimate> {
    spec.validate()?;
    require_n(outer, 2)?;
    require_n(inner, 1)?;
    let pair = check_pair(spec, pair, 1.0)?;
    let xs: Vec<f64> = (0..outer as u64)
        .map(|o| draw_marginal(spec, pair, &mut RngStream::new(seed, o).rng()))
        .collect();
    let values = nested_values(spec, pair, &xs, inner, derive_seed(seed, u64::MAX));
    let (mean, se) = mean_and_se(&values);
    Ok(Estimate::normal(
        mean,
        se,
        outer * inner,
        seed,
        DEFAULT_LEVEL,
    ))
}

/// Per-replicate `λ_min` draws (`Z` marginalised when `z` is `None`).
pub fn min_eig_samples(
    spec: &PriorSpec,
    z: Option<&StructureMatrix>,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if let Some(z) = z {
        if z.k() != spec.k {
            return Err(Error::domain("pattern dimension does not match the spec"));
        }
    }
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = RngStream::new(seed, i);
            let m = match z {
                Some(z) => draw_matrix(spec, Some(z), &mut s.rng()),
                None => draw_replicate(spec, s),
            };
            min_eig(&m)
        })
        .collect())
}

/// Sample mean of `λ_min(Θ)` with `se = sd/√n`.
pub fn estimate_mean_min_eig(
    spec: &PriorSpec,
    z: Option<&StructureMatrix>,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    require_n(n, 2)?;
    let values = min_eig_samples(spec, z, n, seed)?;
    let (mean, se) = mean_and_se(&values);
    Ok(Estimate::normal(mean, se, n, seed, DEFAULT_LEVEL))
}

/// Controls for [`estimate_marginal_tv`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvOptions {
    /// Outer draws; default `⌈√n⌉`.
    pub outer: Option<usize>,
    /// Deterministic outer grid at the quantiles `(b + ½)/bins` of `π_ij`
    /// instead of random outer draws.
    pub grid_bins: Option<usize>,
    pub bootstrap: usize,
}

impl Default for TvOptions {
    fn default() -> Self {
        Self {
            outer: None,
            grid_bins: None,
            bootstrap: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalTv {
    /// `TV(π⁺_ij, π_ij)` with a bootstrap standard error.
    pub tv: Estimate,
    /// The plug-in `ĉ` in the denominator (mean of the inner estimates).
    pub c_hat: f64,
    /// Plug-in `E[(c_ij/c) log(c_ij/c)]`; bias uncharacterised.
    pub kl_experimental: f64,
    pub outer: usize,
    pub inner: usize,
}

fn tv_statistic(values: &[f64]) -> (f64, f64) {
    let c = pairwise_sum(values) / values.len() as f64;
    let dev: Vec<f64> = values.iter().map(|v| (v - c).abs()).collect();
    (pairwise_sum(&dev) / values.len() as f64 / (2.0 * c), c)
}

fn grid_points(spec: &PriorSpec, (i, j): (usize, usize), bins: usize) -> Result<Vec<f64>> {
    let quantile = |p: f64| -> Option<f64> {
        if i == j {
            spec.diagonal.quantile(p)
        } else if matches!(spec.sparsity, SparsityLaw::Dense) {
            spec.slab.quantile(p)
        } else {
            None
        }
    };
    (0..bins)
        .map(|b| {
            quantile((b as f64 + 0.5) / bins as f64)
                .ok_or_else(|| Error::Unsupported("grid mode needs a closed-form quantile of π_ij (dense Gaussian/Laplace slab, fixed/exponential diagonal)".into()))
        })
        .collect()
}

/// Nested Monte Carlo for `TV(π⁺_ij, π_ij) = ½ E_π |c_ij(θ)/c − 1|`.
///
/// `n` is the total draw budget, split `outer × inner`.
pub fn estimate_marginal_tv(
    spec: &PriorSpec,
    pair: (usize, usize),
    n: usize,
    seed: u64,
    opts: &TvOptions,
) -> Result<MarginalTv> {
    spec.validate()?;
    require_n(n, 100)?;
    let pair = check_pair(spec, pair, 1.0)?;
    let xs: Vec<f64> = match opts.grid_bins {
        Some(bins) => {
            require_n(bins, 2)?;
            grid_points(spec, pair, bins)?
        }
        None => {
            let outer = opts
                .outer
                .unwrap_or_else(|| (n as f64).sqrt().ceil() as usize)
                .max(2);
            (0..outer as u64)
                .map(|o| draw_marginal(spec, pair, &mut RngStream::new(seed, o).rng()))
                .collect()
        }
    };
    let outer = xs.len();
    let inner = (n / outer).max(1);
    let values = nested_values(spec, pair, &xs, inner, derive_seed(seed, u64::MAX));
    let (tv, c_hat) = tv_statistic(&values);
    let total = outer * inner;
    if c_hat * (total as f64) < MIN_NORMALIZER_SUCCESSES {
        return Err(Error::DegenerateNormalizer { c_hat, n: total });
    }
    let kl_terms: Vec<f64> = values
        .iter()
        .map(|&v| {
            let r = v / c_hat;
            if r > 0.0 {
                r * r.ln()
            } else {
                0.0
            }
        })
        .collect();
    let kl_experimental = pairwise_sum(&kl_terms) / outer as f64;

    let boot_seed = derive_seed(seed, 0xB007);
    let replicates: Vec<f64> = (0..opts.bootstrap as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(boot_seed, b).rng();
            let resample: Vec<f64> = (0..outer)
                .map(|_| values[rng.random_range(0..outer)])
                .collect();
            tv_statistic(&resample).0
        })
        .filter(|v| v.is_finite())
        .collect();
    let se = if replicates.len() >= 2 {
        mean_and_se(&replicates).1 * (replicates.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok(MarginalTv {
        tv: Estimate::normal(tv, se, total, seed, DEFAULT_LEVEL),
        c_hat,
        kl_experimental,
        outer,
        inner,
    })
}

/// `ĉ_z / ĉ_{z'}`, the factor separating `p⁺(z|Y)/p⁺(z'|Y)` from the
/// structure-prior-preserving alternative. Delta-method standard error.
pub fn structure_ratio(
    spec: &PriorSpec,
    z: &StructureMatrix,
    z_alt: &StructureMatrix,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    let num = estimate_c_given_z(spec, z, n, seed, 0)?;
    num.check_normalizer()?;
    if z == z_alt {
        return Ok(Estimate::normal(1.0, 0.0, n, seed, DEFAULT_LEVEL));
    }
    let den = estimate_c_given_z(spec, z_alt, n, derive_seed(seed, 1), 0)?;
    den.check_normalizer()?;
    let r = num.value / den.value;
    let se = r * ((num.se / num.value).powi(2) + (den.se / den.value).powi(2)).sqrt();
    let mut est = Estimate::normal(r, se, 2 * n, seed, DEFAULT_LEVEL);
    est.ci_low = est.ci_low.max(0.0);
    Ok(est)
}

fn reference_spec(spec: &PriorSpec) -> Result<PriorSpec> {
    if !spec.slab.is_scale_family() {
        return Err(Error::Unsupported(format!(
            "{:?} is not a scale family at fixed cap",
            spec.slab
        )));
    }
    Ok(spec.with_slab_scale(1.0))
}

/// PD counts at each slab scale in `sigmas`, all computed on one set of
/// `n` draws made at unit scale and rescaled with [`coupled_scale`].
pub fn coupled_pd_counts(
    spec: &PriorSpec,
    sigmas: &[f64],
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<u64>> {
    let reference = reference_spec(spec)?;
    if sigmas.iter().any(|&s| !(s >= 0.0)) {
        return Err(Error::domain("scales must be >= 0"));
    }
    let per_sample: Vec<Vec<bool>> = with_workers(workers, || {
        (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let m = draw_replicate(&reference, RngStream::new(seed, i));
                sigmas
                    .iter()
                    .map(|&s| is_pd(&coupled_scale(&m, 1.0, s).expect("validated scales")))
                    .collect()
            })
            .collect()
    });
    Ok((0..sigmas.len())
        .map(|c| per_sample.iter().filter(|row| row[c]).count() as u64)
        .collect())
}

/// For each replicate, the slab scale below which the coupled draw is PD
/// (`Θ(σ) = D + σ·A₁` with `A₁` drawn at unit scale).
pub fn pd_scale_limits(spec: &PriorSpec, n: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
    let reference = reference_spec(spec)?;
    Ok(with_workers(workers, || {
        (0..n as u64)
            .into_par_iter()
            .map(|i| pd_scale_limit(&draw_replicate(&reference, RngStream::new(seed, i))))
            .collect()
    }))
}
