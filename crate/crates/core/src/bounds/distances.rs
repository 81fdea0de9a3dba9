use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances between the truncated prior `p⁺` and the separable prior `p`.
/// All values are upper bounds except the joint ones produced by
/// [`truncation_distances`], which are exact.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tv_joint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kl_joint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tv_diag_marginal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kl_diag_marginal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tv_offdiag_marginal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kl_offdiag_marginal: Option<f64>,
    /// Average over the `k(k+1)/2` free entries (non-identical marginals).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tv_mean_marginal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kl_mean_marginal: Option<f64>,
    /// Bound on `|P_p(Z_ij = 1) − P_{p⁺}(Z_ij = 1)|`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inclusion_gap: Option<f64>,
}

/// Pinsker and Bretagnolle–Huber, whichever is smaller.
fn tv_from_kl(kl: f64) -> f64 {
    (0.5 * kl).sqrt().min((-(-kl).exp_m1()).sqrt())
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "truncation constant must lie in (0, 1], got {c}"
        )))
    }
}

/// Exact `TV(p⁺, p) = 1 − c` and `KL(p⁺ ‖ p) = −log c`.
pub fn truncation_distances(c: f64) -> Result<DistanceBounds> {
    check_c(c)?;
    Ok(DistanceBounds {
        tv_joint: Some(1.0 - c),
        kl_joint: Some(-c.ln()),
        ..Default::default()
    })
}

/// Marginal bounds implied by the joint KL `−log c`.
///
/// With `iid = true` the diagonal entries share one law and the
/// off-diagonals share another, so the joint KL splits evenly within each
/// group. Otherwise only the average over all `k(k+1)/2` marginals is
/// bounded.
pub fn marginal_distance_bounds(c: f64, k: usize, iid: bool) -> Result<DistanceBounds> {
    if k < 2 {
        return Err(Error::domain(format!("need k >= 2, got {k}")));
    }
    let mut out = truncation_distances(c)?;
    let kl = -c.ln();
    let kf = k as f64;
    if iid {
        let kl_diag = kl / kf;
        let kl_off = 2.0 * kl / (kf * (kf - 1.0));
        out.kl_diag_marginal = Some(kl_diag);
        out.tv_diag_marginal = Some(tv_from_kl(kl_diag));
        out.kl_offdiag_marginal = Some(kl_off);
        out.tv_offdiag_marginal = Some(tv_from_kl(kl_off));
    } else {
        let kl_mean = 2.0 * kl / (kf * (kf + 1.0));
        out.kl_mean_marginal = Some(kl_mean);
        out.tv_mean_marginal = Some(tv_from_kl(kl_mean));
    }
    Ok(out)
}

/// Distances implied by `c_z ≥ 1 − b` holding for every pattern in the
/// support of a Bernoulli(η) pattern prior.
pub fn sparse_marginal_bounds(b: f64, k: usize, eta: f64) -> Result<DistanceBounds> {
    if !(0.0..1.0).contains(&b) {
        return Err(Error::domain(format!(
            "deficit bound b must lie in [0, 1), got {b}"
        )));
    }
    if k < 2 {
        return Err(Error::domain(format!("need k >= 2, got {k}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    let kf = k as f64;
    let kl = -(-b).ln_1p();
    let kl_off = 2.0 * kl / (kf * (kf - 1.0));
    let tv_off = tv_from_kl(kl_off);
    Ok(DistanceBounds {
        tv_joint: Some(b),
        kl_joint: Some(kl),
        kl_offdiag_marginal: Some(kl_off),
        tv_offdiag_marginal: Some(tv_off),
        inclusion_gap: Some(tv_off),
        ..Default::default()
    })
}
