//! Closed-form and quadrature bounds on the truncation constant, distance
//! bounds between truncated and untruncated priors, and asymptotic regime
//! classification.

mod bernstein;
mod classify;
mod distances;
mod sandwich;

pub use bernstein::{bernstein_lower, BernsteinKind, BernsteinParams};
pub use classify::{classify_limit, Limit, LimitFamily, Schedule, Verdict};
pub use distances::{
    marginal_distance_bounds, sparse_marginal_bounds, truncation_distances, DistanceBounds,
};
pub use sandwich::{dense_sandwich, sandwich};

use serde::{Deserialize, Serialize};

/// Two-sided bound on `c` (or `c_z`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lower: f64,
    pub upper: f64,
    /// `1 − lower`, computed without cancellation so that lower bounds
    /// within 1e-16 of one stay distinguishable.
    pub lower_deficit: f64,
    pub method: String,
    /// False when the hypothesis of the bound fails; `lower` is then 0.
    pub valid: bool,
    pub notes: String,
}

impl BoundResult {
    /// One-sided lower bound from its deficit, clamped at zero.
    pub(crate) fn from_deficit(deficit: f64, method: &str) -> Self {
        let deficit = deficit.max(0.0);
        let clamped = deficit > 1.0;
        BoundResult {
            lower: if clamped { 0.0 } else { 1.0 - deficit },
            upper: 1.0,
            lower_deficit: deficit.min(1.0),
            method: if clamped {
                format!("{method}(clamped)")
            } else {
                method.to_string()
            },
            valid: true,
            notes: if clamped {
                format!("raw lower bound 1 - {deficit:.6e} < 0 clamped to 0")
            } else {
                String::new()
            },
        }
    }

    /// Tightest combination of several bounds on the same quantity.
    pub fn intersect(results: &[BoundResult]) -> Option<BoundResult> {
        let usable: Vec<&BoundResult> = results.iter().filter(|r| r.valid).collect();
        let first = usable.first()?;
        let mut out = (*first).clone();
        for r in &usable[1..] {
            if r.lower > out.lower {
                out.lower = r.lower;
                out.lower_deficit = r.lower_deficit;
            }
            out.upper = out.upper.min(r.upper);
            out.method = format!("{}+{}", out.method, r.method);
            if !r.notes.is_empty() {
                out.notes = if out.notes.is_empty() {
                    r.notes.clone()
                } else {
                    format!("{}; {}", out.notes, r.notes)
                };
            }
        }
        Some(out)
    }
}
