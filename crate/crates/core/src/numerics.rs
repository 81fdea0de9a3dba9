//! Special functions and half-line quadrature.
//!
//! `erf`/`erfc` come from `libm` (fdlibm port, error within an ulp or two);
//! the inverse starts from `statrs::erfc_inv` and is polished with Newton
//! steps against `libm::erfc`. Everything else
//! in the crate goes through the wrappers here so the tail/complement
//! forms are used consistently: `P(|N| ≥ x)` is evaluated as `erfc(x/√2)`
//! rather than `1 - (2Φ(x) - 1)`, which keeps the `m · log(2Φ - 1)`
//! exponents of the product bounds accurate when `m` is in the tens of
//! thousands.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF `Φ(x)`. NaN in, NaN out.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `P(|N(0,1)| ≥ x)` for `x ≥ 0`, i.e. `2(1 - Φ(x))`, without cancellation.
pub fn normal_abs_tail(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    libm::erfc(x * FRAC_1_SQRT_2)
}

/// `log(2Φ(x) - 1)` for `x > 0`; `-∞` at `x ≤ 0`.
pub fn ln_normal_abs_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    (-normal_abs_tail(x)).ln_1p()
}

/// Inverse of [`normal_cdf`] on `(0, 1)`; `±∞` at the endpoints.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        // work on the smaller tail so the residual keeps relative accuracy
        let (tail, target) = if x <= 0.0 {
            (normal_cdf(x), p)
        } else {
            (normal_cdf(-x), 1.0 - p)
        };
        let step = (tail - target) / normal_pdf(x);
        if !step.is_finite() {
            break;
        }
        x += if x <= 0.0 { -step } else { step };
    }
    x
}

/// Pairwise (cascade) summation. Deterministic for a given slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    AdaptiveSimpson,
    GaussLegendreOnTransformedDomain,
}

/// How to evaluate `∫₀^∞ f`.
///
/// Both methods integrate over `t ∈ [0, 1)` after the substitution
/// `x = t / (1 - t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::AdaptiveSimpson,
            abs_tol: 1e-10,
            max_subdivisions: 200_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature abs_tol must be > 0"));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::domain("quadrature max_subdivisions must be >= 16"));
        }
        Ok(())
    }
}

const INITIAL_PANELS: usize = 16;

/// `∫₀^∞ f(x) dx` for a nonnegative, exponentially decaying integrand.
pub fn integrate_positive_halfline<F>(f: F, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    quad.validate()?;
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let x = t / s;
        let v = f(x) / (s * s);
        if v.is_finite() {
            v
        } else if x.is_infinite() {
            0.0
        } else {
            f64::NAN
        }
    };
    let value = match quad.method {
        QuadratureMethod::AdaptiveSimpson => adaptive_simpson(&g, 0.0, 1.0, quad)?,
        QuadratureMethod::GaussLegendreOnTransformedDomain => {
            adaptive_gauss_legendre(&g, 0.0, 1.0, quad)?
        }
    };
    if !value.is_finite() {
        return Err(Error::domain("integrand is not finite on the half-line"));
    }
    Ok(value)
}

struct SimpsonPanel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

fn adaptive_simpson(
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    for p in (0..INITIAL_PANELS).rev() {
        let a = lo + p as f64 * width;
        let b = if p + 1 == INITIAL_PANELS {
            hi
        } else {
            a + width
        };
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (g(a), g(m), g(b));
        stack.push(SimpsonPanel {
            a,
            b,
            fa,
            fm,
            fb,
            whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
            tol: quad.abs_tol / INITIAL_PANELS as f64,
        });
    }

    let mut total = Vec::new();
    let mut subdivisions = INITIAL_PANELS;
    let mut residual = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (g(lm), g(rm));
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        if delta.is_nan() {
            return Err(Error::domain("integrand returned NaN"));
        }
        let at_resolution = lm <= p.a || rm >= p.b;
        if delta.abs() <= 15.0 * p.tol || at_resolution {
            total.push(left + right + delta / 15.0);
            continue;
        }
        if subdivisions >= quad.max_subdivisions {
            residual += delta.abs() / 15.0;
            total.push(left + right + delta / 15.0);
            continue;
        }
        subdivisions += 1;
        let tol = 0.5 * p.tol;
        stack.push(SimpsonPanel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol,
        });
        stack.push(SimpsonPanel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol,
        });
    }
    if residual > quad.abs_tol {
        return Err(Error::NonConvergence {
            abs_tol: quad.abs_tol,
            max_subdivisions: quad.max_subdivisions,
            estimated_error: residual,
        });
    }
    Ok(pairwise_sum(&total))
}

const GL_POINTS: usize = 10;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
fn gauss_legendre_rule() -> &'static [(f64, f64); GL_POINTS] {
    static RULE: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = [(0.0, 0.0); GL_POINTS];
        for (i, node) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *node = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn gauss_legendre(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre_rule()
        .iter()
        .map(|&(x, w)| w * g(mid + half * x))
        .sum::<f64>()
        * half
}

fn adaptive_gauss_legendre(
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut stack: Vec<(f64, f64, f64, f64)> = (0..INITIAL_PANELS)
        .rev()
        .map(|p| {
            let a = lo + p as f64 * width;
            let b = if p + 1 == INITIAL_PANELS {
                hi
            } else {
                a + width
            };
            (
                a,
                b,
                gauss_legendre(g, a, b),
                quad.abs_tol / INITIAL_PANELS as f64,
            )
        })
        .collect();
    let mut total = Vec::new();
    let mut subdivisions = INITIAL_PANELS;
    let mut residual = 0.0;
    while let Some((a, b, whole, tol)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = gauss_legendre(g, a, m);
        let right = gauss_legendre(g, m, b);
        let delta = left + right - whole;
        if delta.is_nan() {
            return Err(Error::domain("integrand returned NaN"));
        }
        if delta.abs() <= tol || m <= a || m >= b {
            total.push(left + right);
            continue;
        }
        if subdivisions >= quad.max_subdivisions {
            residual += delta.abs();
            total.push(left + right);
            continue;
        }
        subdivisions += 1;
        stack.push((m, b, right, 0.5 * tol));
        stack.push((a, m, left, 0.5 * tol));
    }
    if residual > quad.abs_tol {
        return Err(Error::NonConvergence {
            abs_tol: quad.abs_tol,
            max_subdivisions: quad.max_subdivisions,
            estimated_error: residual,
        });
    }
    Ok(pairwise_sum(&total))
}
