//! Choosing the slab scale: the Wigner threshold, bound inversion, and
//! Monte Carlo bisection on coupled draws.
//!
//! cargo run --release --example calibrate

use pd_truncation::bounds::BernsteinKind;
use pd_truncation::calibrate::{calibrate_bound, sigma_from_mc, wigner_threshold, BoundFamily};
use pd_truncation::numerics::QuadratureSpec;
use pd_truncation::{DiagonalLaw, PriorSpec};

fn main() -> pd_truncation::Result<()> {
    let k = 50;
    for delta in [-0.1, 0.0, 0.1] {
        println!(
            "Wigner threshold k={k} δ={delta:+}: σ = {:.6}",
            wigner_threshold(1.0, k, delta, 1.0)?
        );
    }

    let sandwich = BoundFamily::SandwichLower {
        diagonal: DiagonalLaw::Fixed { mu: 1.0 },
        k,
        m: None,
        quadrature: QuadratureSpec::default(),
    };
    let bern = BoundFamily::Bernstein {
        kind: BernsteinKind::GaussFixed,
        mu: 1.0,
        cap: None,
        degree: k - 1,
        k,
        t: None,
    };
    for fam in [&sandwich, &bern] {
        let r = calibrate_bound(0.9, fam, 1e-8)?;
        println!(
            "{}: σ = {:.6} guarantees c ≥ {:.6} ({} steps)",
            r.method,
            r.sigma,
            r.achieved_bound.unwrap(),
            r.iterations
        );
    }

    let spec = PriorSpec::fixed_gaussian(k, 1.0, 1.0)?;
    let r = sigma_from_mc(&spec, 0.9, 10_000, 0.01, 81)?;
    let est = r.achieved_estimate.as_ref().unwrap();
    println!(
        "monte carlo: σ = {:.6}, ĉ = {:.4} [{:.4}, {:.4}] after {} steps",
        r.sigma, est.value, est.ci_low, est.ci_high, r.iterations
    );
    Ok(())
}
