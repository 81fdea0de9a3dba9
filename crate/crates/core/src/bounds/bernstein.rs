use serde::{Deserialize, Serialize};

use super::BoundResult;
use crate::error::{Error, Result};

/// Matrix-Bernstein lower bounds on `c_z` in terms of the maximum degree
/// `d` of the pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BernsteinKind {
    /// Fixed diagonal `μ`, Gaussian slab.
    GaussFixed,
    /// Fixed diagonal `μ`, zero-mean slab with variance `σ²` and `|θ_ij| ≤ a`.
    BoundedFixed,
    /// Exponential diagonal with mean `μ`, Gaussian slab.
    GaussExpdiag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    pub kind: BernsteinKind,
    pub mu: f64,
    pub sigma: f64,
    /// Almost-sure bound `a` on `|θ_ij|` (bounded-fixed only).
    #[serde(default)]
    pub cap: Option<f64>,
    /// Maximum degree `d ≥ 1`.
    pub degree: usize,
    pub k: usize,
    /// Free parameter of the exponential-diagonal bound. When absent the
    /// closed form at the standard choice of `t` is used.
    #[serde(default)]
    pub t: Option<f64>,
}

impl BernsteinParams {
    fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::domain(format!("mu must be > 0, got {}", self.mu)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if self.degree < 1 || self.k < 2 || self.degree >= self.k {
            return Err(Error::domain(format!(
                "need 1 <= d < k, got d = {}, k = {}",
                self.degree, self.k
            )));
        }
        match (self.kind, self.cap, self.t) {
            (BernsteinKind::BoundedFixed, None, _) => {
                Err(Error::domain("bounded-fixed requires the cap a"))
            }
            (BernsteinKind::BoundedFixed, Some(a), _) if !(a > 0.0) => {
                Err(Error::domain(format!("cap must be > 0, got {a}")))
            }
            (BernsteinKind::GaussExpdiag, _, Some(t)) if !(t > 0.0) => {
                Err(Error::domain(format!("t must be > 0, got {t}")))
            }
            _ => Ok(()),
        }
    }
}

/// Lower bound on `c_z` (upper side is the trivial 1).
///
/// * gauss-fixed: `c_z ≥ 1 − 2k·exp(−μ²/(2σ²d))`
/// * bounded-fixed: `c_z ≥ 1 − 2k·exp(−μ²/(2(σ²d + aμ/3)))`
/// * gauss-expdiag with `t`: `c_z ≥ e^{−kt/μ} − 2k·e^{−t²/(2σ²d)}`; without
///   `t`, with `r = σ√d/μ ≤ 2√2`:
///   `c_z ≥ 1 − √2·k·r·(√ln(2√2/r) + 1)`. For `r > 2√2` the result is
///   marked invalid.
pub fn bernstein_lower(p: &BernsteinParams) -> Result<BoundResult> {
    p.validate()?;
    let k = p.k as f64;
    let d = p.degree as f64;
    let var_d = p.sigma * p.sigma * d;
    match p.kind {
        BernsteinKind::GaussFixed => {
            let deficit = if var_d == 0.0 {
                0.0
            } else {
                2.0 * k * (-p.mu * p.mu / (2.0 * var_d)).exp()
            };
            Ok(BoundResult::from_deficit(deficit, "bernstein-gauss-fixed"))
        }
        BernsteinKind::BoundedFixed => {
            let a = p.cap.expect("validated");
            let deficit = 2.0 * k * (-p.mu * p.mu / (2.0 * (var_d + a * p.mu / 3.0))).exp();
            let mut out = BoundResult::from_deficit(deficit, "bernstein-bounded-fixed");
            if a > p.mu {
                out.notes = join(&out.notes, "cap a exceeds mu; the bound still holds but |θ_ij| < mu is necessary for PD anyway");
            }
            Ok(out)
        }
        BernsteinKind::GaussExpdiag => match p.t {
            Some(t) => {
                let tail = if var_d == 0.0 {
                    0.0
                } else {
                    2.0 * k * (-t * t / (2.0 * var_d)).exp()
                };
                let deficit = -(-k * t / p.mu).exp_m1() + tail;
                Ok(BoundResult::from_deficit(
                    deficit,
                    "bernstein-gauss-expdiag-t",
                ))
            }
            None => {
                let r = var_d.sqrt() / p.mu;
                let limit = 2.0 * std::f64::consts::SQRT_2;
                if r > limit {
                    return Ok(BoundResult {
                        lower: 0.0,
                        upper: 1.0,
                        lower_deficit: 1.0,
                        method: "bernstein-gauss-expdiag".into(),
                        valid: false,
                        notes: format!(
                            "hypothesis sigma*sqrt(d)/mu <= 2*sqrt(2) fails (ratio {r:.6})"
                        ),
                    });
                }
                let deficit = if r == 0.0 {
                    0.0
                } else {
                    std::f64::consts::SQRT_2 * k * r * ((limit / r).ln().sqrt() + 1.0)
                };
                Ok(BoundResult::from_deficit(
                    deficit,
                    "bernstein-gauss-expdiag",
                ))
            }
        },
    }
}

fn join(a: &str, b: &str) -> String {
    if a.is_empty() {
        b.to_string()
    } else {
        format!("{a}; {b}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(
        kind: BernsteinKind,
        mu: f64,
        sigma: f64,
        degree: usize,
        k: usize,
    ) -> BernsteinParams {
        BernsteinParams {
            kind,
            mu,
            sigma,
            cap: None,
            degree,
            k,
            t: None,
        }
    }

    #[test]
    fn gauss_fixed_tiny_deficit() {
        let b = bernstein_lower(&params(BernsteinKind::GaussFixed, 1.0, 0.05, 4, 100)).unwrap();
        // 200·e^{−50}, high-precision reference
        assert_relative_eq!(
            b.lower_deficit,
            3.857_499_695_927_835_6e-20,
            max_relative = 1e-12
        );
        assert_eq!(b.upper, 1.0);
        assert!(b.valid && b.notes.is_empty());
    }

    #[test]
    fn gauss_fixed_clamps() {
        let b = bernstein_lower(&params(BernsteinKind::GaussFixed, 1.0, 1e6, 4, 100)).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(b.method.contains("clamped") && b.notes.contains("clamped"));
    }

    #[test]
    fn expdiag_closed_form() {
        let b = bernstein_lower(&params(BernsteinKind::GaussExpdiag, 1.0, 0.001, 4, 10)).unwrap();
        assert_relative_eq!(b.lower, 0.895_535_264_751_524_8, max_relative = 1e-12);
        assert!(b.valid);
    }

    #[test]
    fn expdiag_hypothesis_failure_is_flagged() {
        let b = bernstein_lower(&params(BernsteinKind::GaussExpdiag, 1.0, 2.0, 4, 10)).unwrap();
        assert!(!b.valid);
        assert_eq!(b.lower, 0.0);
    }

    #[test]
    fn expdiag_closed_form_dominated_by_free_t_at_standard_choice() {
        // the closed form relaxes the general bound at t₁ = σ√(2d·ln(2√2μ/(σ√d)))
        let (mu, sigma, d) = (1.0f64, 0.001f64, 4usize);
        let r = sigma * (d as f64).sqrt() / mu;
        let t1 = sigma * (2.0 * d as f64 * (2.0 * std::f64::consts::SQRT_2 / r).ln()).sqrt();
        let closed =
            bernstein_lower(&params(BernsteinKind::GaussExpdiag, mu, sigma, d, 10)).unwrap();
        let general = bernstein_lower(&BernsteinParams {
            t: Some(t1),
            ..params(BernsteinKind::GaussExpdiag, mu, sigma, d, 10)
        })
        .unwrap();
        assert!(general.lower >= closed.lower);
    }

    #[test]
    fn bounded_cap_required() {
        let p = params(BernsteinKind::BoundedFixed, 1.0, 0.1, 2, 10);
        assert!(matches!(bernstein_lower(&p), Err(Error::Domain(_))));
        let b = bernstein_lower(&BernsteinParams {
            cap: Some(1.0),
            ..p
        })
        .unwrap();
        let expected = 1.0 - 20.0 * (-1.0f64 / (2.0 * (0.02 + 1.0 / 3.0))).exp();
        assert!((b.lower - expected.max(0.0)).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_degree_sigma_mu() {
        for kind in [BernsteinKind::GaussFixed, BernsteinKind::GaussExpdiag] {
            let base = |mu, sigma, d| {
                bernstein_lower(&params(kind, mu, sigma, d, 50))
                    .unwrap()
                    .lower
            };
            for d in 1..20 {
                assert!(base(1.0, 0.01, d + 1) <= base(1.0, 0.01, d));
            }
            for i in 1..50 {
                let s = i as f64 * 0.002;
                assert!(base(1.0, s + 0.002, 3) <= base(1.0, s, 3));
                let mu = 0.5 + i as f64 * 0.05;
                assert!(base(mu + 0.05, 0.02, 3) >= base(mu, 0.02, 3));
            }
        }
    }
}
