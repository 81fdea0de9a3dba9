//! Choosing the slab scale `σ` for a target truncation constant.

use serde::{Deserialize, Serialize};

use crate::bounds::{bernstein_lower, dense_sandwich, BernsteinKind, BernsteinParams};
use crate::error::{Error, Result};
use crate::estimators::{coupled_pd_counts, pd_scale_limits, Estimate, DEFAULT_LEVEL};
use crate::model::{DiagonalLaw, PriorSpec};
use crate::numerics::QuadratureSpec;

/// `σ = μ / ((2 + δ)·√(ηk))`, the scale at which `μ/(σ√(ηk)) = 2 + δ`.
pub fn wigner_threshold(mu: f64, k: usize, delta: f64, eta: f64) -> Result<f64> {
    if !(delta > -2.0) {
        return Err(Error::domain(format!("need delta > -2, got {delta}")));
    }
    if !(mu > 0.0) || k < 2 || !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain(format!(
            "need mu > 0, k >= 2, eta in (0, 1]; got {mu}, {k}, {eta}"
        )));
    }
    Ok(mu / ((2.0 + delta) * (eta * k as f64).sqrt()))
}

/// Lower-bound families that can be inverted for `σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "kebab-case")]
pub enum BoundFamily {
    /// Diagonal-dominance lower bound with a Gaussian slab; `m` defaults to
    /// `k(k−1)/2`.
    SandwichLower {
        diagonal: DiagonalLaw,
        k: usize,
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
    Bernstein {
        kind: BernsteinKind,
        mu: f64,
        #[serde(default)]
        cap: Option<f64>,
        degree: usize,
        k: usize,
        #[serde(default)]
        t: Option<f64>,
    },
}

impl BoundFamily {
    /// `1 − lower(σ)`.
    pub fn deficit(&self, sigma: f64) -> Result<f64> {
        match self {
            BoundFamily::SandwichLower {
                diagonal,
                k,
                m,
                quadrature,
            } => {
                let m = m.unwrap_or(k * k.saturating_sub(1) / 2);
                Ok(dense_sandwich(diagonal, sigma, *k, m, quadrature)?.lower_deficit)
            }
            BoundFamily::Bernstein {
                kind,
                mu,
                cap,
                degree,
                k,
                t,
            } => {
                let p = BernsteinParams {
                    kind: *kind,
                    mu: *mu,
                    sigma,
                    cap: *cap,
                    degree: *degree,
                    k: *k,
                    t: *t,
                };
                Ok(bernstein_lower(&p)?.lower_deficit)
            }
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            BoundFamily::SandwichLower { .. } => "sandwich-lower",
            BoundFamily::Bernstein { .. } => "bernstein",
        }
    }
}

const MAX_BOUND_STEPS: usize = 2_000;

/// Solves `1 − lower(σ) = target_deficit` by bisection in `log σ`.
///
/// The target is passed as a deficit `1 − c*` so that targets within
/// 1e-16 of one are representable. Stops when the deficit is within
/// `tol · target_deficit` of the target.
pub fn sigma_from_bound(
    target_deficit: f64,
    family: &BoundFamily,
    tol: f64,
) -> Result<(f64, usize)> {
    if !(target_deficit > 0.0 && target_deficit < 1.0) {
        return Err(Error::domain(format!(
            "target deficit must lie in (0, 1), got {target_deficit}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be > 0"));
    }
    let floor = family.deficit(0.0)?;
    if floor >= target_deficit {
        return Err(Error::Unachievable(format!(
            "{} bound has deficit {floor:.6e} even as sigma -> 0, above the target {target_deficit:.6e}",
            family.tag()
        )));
    }
    let close = |d: f64| (d - target_deficit).abs() <= tol * target_deficit;
    let mut steps = 0;
    let mut hi = 1.0;
    let mut d_hi = family.deficit(hi)?;
    while d_hi < target_deficit {
        hi *= 2.0;
        d_hi = family.deficit(hi)?;
        steps += 1;
        if steps > MAX_BOUND_STEPS || !hi.is_finite() {
            return Err(Error::Unachievable(format!(
                "{} bound never falls to the target",
                family.tag()
            )));
        }
    }
    if close(d_hi) {
        return Ok((hi, steps));
    }
    let mut lo = hi / 2.0;
    loop {
        let d = family.deficit(lo)?;
        steps += 1;
        if close(d) {
            return Ok((lo, steps));
        }
        if d < target_deficit {
            break;
        }
        hi = lo;
        lo /= 2.0;
        if steps > MAX_BOUND_STEPS || lo == 0.0 {
            return Err(Error::BudgetExceeded(steps));
        }
    }
    while steps <= MAX_BOUND_STEPS {
        let mid = (lo * hi).sqrt();
        let d = family.deficit(mid)?;
        steps += 1;
        if close(d) || mid == lo || mid == hi {
            return Ok((mid, steps));
        }
        if d < target_deficit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::BudgetExceeded(steps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub sigma: f64,
    pub target_c: f64,
    /// Monte Carlo estimate at the returned `σ` (Monte Carlo calibration).
    pub achieved_estimate: Option<Estimate>,
    /// Bound value at the returned `σ` (bound inversion).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub achieved_bound: Option<f64>,
    pub iterations: usize,
    pub method: String,
}

/// [`sigma_from_bound`] packaged as a report.
pub fn calibrate_bound(target_c: f64, family: &BoundFamily, tol: f64) -> Result<CalibrationReport> {
    let (sigma, iterations) = sigma_from_bound(1.0 - target_c, family, tol)?;
    let deficit = family.deficit(sigma)?;
    Ok(CalibrationReport {
        sigma,
        target_c,
        achieved_estimate: None,
        achieved_bound: Some(1.0 - deficit),
        iterations,
        method: format!("bound:{}", family.tag()),
    })
}

pub const DEFAULT_TOL_C: f64 = 0.01;
pub const MAX_MC_ITERATIONS: usize = 60;

/// Monte Carlo calibration of the slab scale on one coupled sample set.
///
/// All `n` draws are made once at unit slab scale; a draw is PD at scale
/// `σ` exactly when `σ` is below its critical scale, so `ĉ(σ)` is a
/// deterministic nonincreasing step function and plain bisection applies.
/// The search stops when `|ĉ − target| ≤ tol_c` and the Wilson interval
/// contains the target. The reported estimate is recomputed by Cholesky
/// on the same draws.
pub fn sigma_from_mc(
    spec: &PriorSpec,
    target_c: f64,
    n: usize,
    tol_c: f64,
    seed: u64,
) -> Result<CalibrationReport> {
    spec.validate()?;
    if !(target_c > 0.0 && target_c <= 1.0) {
        return Err(Error::domain(format!(
            "target must lie in (0, 1], got {target_c}"
        )));
    }
    if !(tol_c > 0.0) || n == 0 {
        return Err(Error::domain("need tol_c > 0 and n >= 1"));
    }
    if 3.0 * (target_c * (1.0 - target_c) / n as f64).sqrt() >= tol_c {
        return Err(Error::domain(format!(
            "n = {n} cannot resolve target {target_c} to within {tol_c}"
        )));
    }
    let limits = pd_scale_limits(spec, n, seed, 0)?;
    let count = |sigma: f64| limits.iter().filter(|&&s| s > sigma).count() as u64;
    let nf = n as f64;
    let mut iterations = 0;
    let mut step = |sigma: f64| -> Result<u64> {
        iterations += 1;
        if iterations > MAX_MC_ITERATIONS {
            return Err(Error::BudgetExceeded(MAX_MC_ITERATIONS));
        }
        Ok(count(sigma))
    };

    let sigma = if target_c == 1.0 {
        let mut s = 1.0;
        while step(s)? < n as u64 {
            s /= 2.0;
        }
        s
    } else {
        let accept = |c: u64| {
            let e = Estimate::binomial(c, n, seed, DEFAULT_LEVEL);
            (e.value - target_c).abs() <= tol_c && e.contains(target_c)
        };
        let mut hi = 1.0;
        let mut c_hi = step(hi)?;
        while c_hi as f64 / nf > target_c && !accept(c_hi) {
            hi *= 2.0;
            c_hi = step(hi)?;
        }
        let mut lo = hi;
        let mut c_lo = c_hi;
        while c_lo as f64 / nf < target_c && !accept(c_lo) {
            hi = lo;
            lo /= 2.0;
            c_lo = step(lo)?;
        }
        if accept(c_hi) {
            hi
        } else if accept(c_lo) {
            lo
        } else {
            loop {
                let mid = (lo * hi).sqrt();
                let c = step(mid)?;
                if accept(c) {
                    break mid;
                }
                if c as f64 / nf > target_c {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    };
    let pd = coupled_pd_counts(spec, &[sigma], n, seed, 0)?[0];
    Ok(CalibrationReport {
        sigma,
        target_c,
        achieved_estimate: Some(Estimate::binomial(pd, n, seed, DEFAULT_LEVEL)),
        achieved_bound: None,
        iterations,
        method: "monte-carlo-coupled".into(),
    })
}
