//! Joint and marginal distances between the truncated prior and the
//! separable prior it came from.
//!
//! cargo run --release --example distances

use pd_truncation::bounds::{
    bernstein_lower, marginal_distance_bounds, sparse_marginal_bounds, truncation_distances,
    BernsteinKind, BernsteinParams,
};

fn main() -> pd_truncation::Result<()> {
    for c in [0.99, 0.5, (-4.0f64).exp()] {
        let d = truncation_distances(c)?;
        println!(
            "c = {c:.5}: TV = {:.5}, KL = {:.5}",
            d.tv_joint.unwrap(),
            d.kl_joint.unwrap()
        );
    }

    let iid = marginal_distance_bounds(0.5, 10, true)?;
    println!(
        "iid marginals, c = 0.5, k = 10:\n{}",
        serde_json::to_string_pretty(&iid).unwrap()
    );
    let mean = marginal_distance_bounds(0.5, 10, false)?;
    println!(
        "non-identical marginals, mean bound: TV ≤ {:.5}",
        mean.tv_mean_marginal.unwrap()
    );

    // sparse prior: a uniform deficit bound over patterns from the degree bound d = k − 1
    let (k, eta, sigma) = (30, 0.2, 0.05);
    let b = bernstein_lower(&BernsteinParams {
        kind: BernsteinKind::GaussFixed,
        mu: 1.0,
        sigma,
        cap: None,
        degree: k - 1,
        k,
        t: None,
    })?;
    let s = sparse_marginal_bounds(b.lower_deficit, k, eta)?;
    println!(
        "sparse k={k} η={eta} σ={sigma}: b = {:.3e}, inclusion gap ≤ {:.3e}",
        b.lower_deficit,
        s.inclusion_gap.unwrap()
    );
    Ok(())
}
