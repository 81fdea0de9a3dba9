//! Sandwich and Bernstein bounds on the truncation constant, compared with
//! a Monte Carlo estimate.
//!
//! cargo run --release --example bounds

use pd_truncation::bounds::{
    bernstein_lower, sandwich, BernsteinKind, BernsteinParams, BoundResult,
};
use pd_truncation::estimators::estimate_c;
use pd_truncation::numerics::QuadratureSpec;
use pd_truncation::{DiagonalLaw, PriorSpec, SlabLaw, SparsityLaw};

fn main() -> pd_truncation::Result<()> {
    let quad = QuadratureSpec::default();
    println!(
        "{:>4} {:>12} {:>6} {:>10} {:>10} {:>8}  method",
        "k", "diagonal", "σ", "lower", "upper", "ĉ"
    );
    for k in [5, 20, 50] {
        for diag in [
            DiagonalLaw::Fixed { mu: 1.0 },
            DiagonalLaw::Exponential { rate: 1.0 },
        ] {
            for sigma in [0.02, 0.1] {
                let spec = PriorSpec::new(k, diag, SlabLaw::gaussian(sigma), SparsityLaw::Dense)?;
                let kind = if diag.is_fixed() {
                    BernsteinKind::GaussFixed
                } else {
                    BernsteinKind::GaussExpdiag
                };
                let bern = bernstein_lower(&BernsteinParams {
                    kind,
                    mu: 1.0,
                    sigma,
                    cap: None,
                    degree: k - 1,
                    k,
                    t: None,
                })?;
                let b = BoundResult::intersect(&[sandwich(&spec, &quad)?, bern])
                    .expect("sandwich is always valid");
                let est = estimate_c(&spec, 5000, 11, 0)?;
                let name = if diag.is_fixed() {
                    "Fixed(1)"
                } else {
                    "Exp(1)"
                };
                println!(
                    "{k:>4} {name:>12} {sigma:>6} {:>10.4e} {:>10.4e} {:>8.4}  {}",
                    b.lower, b.upper, est.value, b.method
                );
            }
        }
    }

    // the free-t form of the exponential-diagonal bound
    let p = BernsteinParams {
        kind: BernsteinKind::GaussExpdiag,
        mu: 1.0,
        sigma: 0.001,
        cap: None,
        degree: 4,
        k: 5,
        t: Some(0.02),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&bernstein_lower(&p)?).unwrap()
    );
    Ok(())
}
