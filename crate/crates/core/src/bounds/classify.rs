use std::fmt;

use serde::{Deserialize, Serialize};

/// A parameter sequence indexed by the dimension `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Const(f64),
    /// `coef · k^exponent`
    Power {
        coef: f64,
        exponent: f64,
    },
}

impl Schedule {
    pub fn power(coef: f64, exponent: f64) -> Self {
        Schedule::Power { coef, exponent }
    }

    pub fn at(&self, k: usize) -> f64 {
        match *self {
            Schedule::Const(v) => v,
            Schedule::Power { coef, exponent } => coef * (k as f64).powf(exponent),
        }
    }

    /// `(coef, exponent)` with constants as exponent 0.
    fn parts(&self) -> (f64, f64) {
        match *self {
            Schedule::Const(v) => (v, 0.0),
            Schedule::Power { coef, exponent } => (coef, exponent),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Schedule::Const(v) => write!(f, "{v}"),
            Schedule::Power {
                coef: 1.0,
                exponent,
            } => write!(f, "k^{exponent}"),
            Schedule::Power { coef, exponent } => write!(f, "{coef}k^{exponent}"),
        }
    }
}

/// Asymptotic regime families with a stated limit rule. `delta` is the
/// offset in `μ/(σ√(ηk)) = 2 + δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LimitFamily {
    /// Fixed diagonal, dense Wigner-type off-diagonals.
    DenseFixed { delta: Schedule },
    /// Exponential diagonal with slab scale `σ(k)`.
    DenseStochasticExp { sigma: Schedule },
    /// Gamma(α, α) diagonal, `α > 1`, with slab scale `σ(k)`.
    DenseStochasticGamma { alpha: f64, sigma: Schedule },
    /// Fixed diagonal, Bernoulli(η(k)) pattern.
    SparseFixed { delta: Schedule, eta: Schedule },
    /// Fixed diagonal, Gaussian slab `σ(k)`, patterns with maximum degree
    /// at most `d̄(k)`. Classifies `TV(p⁺, p) → 0` (equivalently `c → 1`).
    SparseDegreeBounded {
        sigma: Schedule,
        max_degree: Schedule,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    LimitOne,
    LimitZero,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub limit: Limit,
    pub rule: String,
}

fn verdict(limit: Limit, rule: impl Into<String>) -> Verdict {
    Verdict {
        limit,
        rule: rule.into(),
    }
}

const BORDERLINE_EXP: f64 = -2.0 / 3.0;

fn delta_rule(delta: &Schedule, scope: &str) -> Verdict {
    let (coef, e) = delta.parts();
    if coef == 0.0 || e == 0.0 {
        return if coef > 0.0 {
            verdict(Limit::LimitOne, format!("{scope}: liminf μ/(σ√k) > 2"))
        } else if coef < 0.0 {
            verdict(Limit::LimitZero, format!("{scope}: limsup μ/(σ√k) < 2"))
        } else {
            verdict(
                Limit::Indeterminate,
                format!("{scope}: δ = 0 sits exactly on the threshold"),
            )
        };
    }
    if e > 0.0 {
        return if coef > 0.0 {
            verdict(
                Limit::LimitOne,
                format!("{scope}: δ → ∞, liminf μ/(σ√k) > 2"),
            )
        } else {
            verdict(
                Limit::Indeterminate,
                format!("{scope}: δ → −∞ leaves 2 + δ > 0"),
            )
        };
    }
    if coef > 0.0 && e > BORDERLINE_EXP {
        verdict(
            Limit::LimitOne,
            format!("{scope} borderline: k^(-2/3) = o(δ)"),
        )
    } else {
        verdict(
            Limit::Indeterminate,
            format!("{scope} borderline: δ → 0 without k^(-2/3) = o(δ)"),
        )
    }
}

/// Limit of `c` as `k → ∞` under one of the enumerated families, with the
/// rule that decided it. Only the listed rules are applied; anything
/// outside them is `Indeterminate`.
pub fn classify_limit(family: &LimitFamily) -> Verdict {
    match family {
        LimitFamily::DenseFixed { delta } => delta_rule(delta, "Wigner threshold"),
        LimitFamily::DenseStochasticExp { sigma } => {
            let (coef, e) = sigma.parts();
            if coef <= 0.0 {
                verdict(Limit::Indeterminate, "σ schedule must be positive")
            } else if e < -1.5 {
                verdict(
                    Limit::LimitOne,
                    "exponential diagonal: σ = o(k^(-3/2)), θ_min/(σ√k) → ∞",
                )
            } else if e > -0.5 {
                verdict(Limit::LimitZero, "exponential diagonal: k^(-1/2) log k = o(σ) (asserted rule, no displayed proof)")
            } else {
                verdict(
                    Limit::Indeterminate,
                    "exponential diagonal: σ between k^(-3/2) and k^(-1/2) log k",
                )
            }
        }
        LimitFamily::DenseStochasticGamma { alpha, sigma } => {
            let (coef, e) = sigma.parts();
            if !(*alpha > 1.0) || coef <= 0.0 {
                return verdict(
                    Limit::Indeterminate,
                    "gamma rule needs shape = rate = α > 1 and σ > 0",
                );
            }
            let edge = -0.5 - 1.0 / alpha;
            if e < edge {
                verdict(
                    Limit::LimitOne,
                    format!("gamma diagonal: σ = o(k^({edge}))"),
                )
            } else {
                verdict(
                    Limit::Indeterminate,
                    format!("gamma diagonal: σ not o(k^({edge})); no zero-limit rule stated"),
                )
            }
        }
        LimitFamily::SparseFixed { delta, eta } => {
            let (coef, e) = eta.parts();
            if !(coef > 0.0) || e > 0.0 || (e == 0.0 && coef > 1.0) {
                return verdict(Limit::Indeterminate, "η schedule must stay in (0, 1]");
            }
            if e <= -1.0 / 3.0 {
                return verdict(
                    Limit::Indeterminate,
                    "sparse Wigner: η-condition k^(-1/3) = o(η) fails",
                );
            }
            delta_rule(delta, "sparse Wigner threshold")
        }
        LimitFamily::SparseDegreeBounded { sigma, max_degree } => {
            let (sc, se) = sigma.parts();
            let (dc, de) = max_degree.parts();
            if sc <= 0.0 || dc <= 0.0 {
                return verdict(Limit::Indeterminate, "σ and d̄ schedules must be positive");
            }
            // μ²/(2σ²d̄) ∝ k^{−2·se − de}; polynomial growth beats log k
            if -2.0 * se - de > 0.0 {
                verdict(
                    Limit::LimitOne,
                    "degree-bounded sparse: μ²/(2σ²d̄) − log k → ∞, so TV(p⁺,p) and TV(π⁺,π) → 0",
                )
            } else {
                verdict(
                    Limit::Indeterminate,
                    "degree-bounded sparse: μ²/(2σ²d̄) − log k does not diverge",
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_threshold_rules() {
        let c = |d| classify_limit(&LimitFamily::DenseFixed { delta: d }).limit;
        assert_eq!(c(Schedule::Const(0.1)), Limit::LimitOne);
        assert_eq!(c(Schedule::Const(-0.05)), Limit::LimitZero);
        assert_eq!(c(Schedule::Const(0.0)), Limit::Indeterminate);
        assert_eq!(c(Schedule::power(1.0, -0.5)), Limit::LimitOne);
        assert_eq!(c(Schedule::power(1.0, -2.0 / 3.0)), Limit::Indeterminate);
        assert_eq!(c(Schedule::power(1.0, -1.0)), Limit::Indeterminate);
        assert_eq!(c(Schedule::power(1.0, -2.0)), Limit::Indeterminate);
    }

    #[test]
    fn stochastic_diagonal_rules() {
        let exp = |e| {
            classify_limit(&LimitFamily::DenseStochasticExp {
                sigma: Schedule::power(1.0, e),
            })
            .limit
        };
        assert_eq!(exp(-2.0), Limit::LimitOne);
        assert_eq!(exp(-1.5), Limit::Indeterminate);
        assert_eq!(exp(-1.0), Limit::Indeterminate);
        assert_eq!(exp(-0.25), Limit::LimitZero);
        let gamma = |e| {
            classify_limit(&LimitFamily::DenseStochasticGamma {
                alpha: 2.0,
                sigma: Schedule::power(1.0, e),
            })
            .limit
        };
        assert_eq!(gamma(-1.25), Limit::LimitOne);
        assert_eq!(gamma(-1.125), Limit::LimitOne);
        assert_eq!(gamma(-1.0), Limit::Indeterminate);
    }

    #[test]
    fn sparse_rules() {
        let v = classify_limit(&LimitFamily::SparseFixed {
            delta: Schedule::Const(0.1),
            eta: Schedule::power(0.5, -0.5),
        });
        assert_eq!(v.limit, Limit::Indeterminate);
        assert!(v.rule.contains("k^(-1/3)"));
        let v = classify_limit(&LimitFamily::SparseFixed {
            delta: Schedule::Const(0.1),
            eta: Schedule::power(0.5, -0.25),
        });
        assert_eq!(v.limit, Limit::LimitOne);
        let v = classify_limit(&LimitFamily::SparseFixed {
            delta: Schedule::Const(-0.1),
            eta: Schedule::power(0.5, -0.25),
        });
        assert_eq!(v.limit, Limit::LimitZero);
        let v = classify_limit(&LimitFamily::SparseDegreeBounded {
            sigma: Schedule::power(1.0, -0.5),
            max_degree: Schedule::power(1.0, 0.5),
        });
        assert_eq!(v.limit, Limit::LimitOne);
        let v = classify_limit(&LimitFamily::SparseDegreeBounded {
            sigma: Schedule::Const(0.1),
            max_degree: Schedule::Const(3.0),
        });
        assert_eq!(v.limit, Limit::Indeterminate);
    }

    #[test]
    fn schedule_json_and_labels() {
        let s: Schedule =
            serde_json::from_str(r#"{"power":{"coef":0.5,"exponent":-0.25}}"#).unwrap();
        assert_eq!(s.to_string(), "0.5k^-0.25");
        assert!((s.at(16) - 0.25).abs() < 1e-15);
        let c: Schedule = serde_json::from_str(r#"{"const":-0.1}"#).unwrap();
        assert_eq!(c.to_string(), "-0.1");
        let fam: LimitFamily =
            serde_json::from_str(r#"{"family":"dense-fixed","delta":{"const":0.1}}"#).unwrap();
        assert_eq!(classify_limit(&fam).limit, Limit::LimitOne);
    }
}
