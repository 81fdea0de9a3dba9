//! Monte Carlo estimate of the probability that a draw from a separable
//! prior is positive definite, with its Wilson interval.
//!
//! cargo run --release --example estimate_c

use pd_truncation::estimators::estimate_c;
use pd_truncation::numerics::normal_cdf;
use pd_truncation::{DiagonalLaw, PriorSpec, SlabLaw, SparsityLaw};

fn main() -> pd_truncation::Result<()> {
    // k = 2 has a closed form: PD iff |θ₁₂| < 1
    let spec = PriorSpec::fixed_gaussian(2, 1.0, 1.0)?;
    let est = estimate_c(&spec, 100_000, 1, 0)?;
    println!(
        "k=2: ĉ = {:.4} ± {:.4}, exact {:.4}",
        est.value,
        est.se,
        2.0 * normal_cdf(1.0) - 1.0
    );

    for k in [10, 50, 100] {
        let sigma = 1.0 / (2.1 * (k as f64).sqrt());
        let spec = PriorSpec::new(
            k,
            DiagonalLaw::Fixed { mu: 1.0 },
            SlabLaw::gaussian(sigma),
            SparsityLaw::Dense,
        )?;
        let est = estimate_c(&spec, 2000, 7, 0)?;
        println!(
            "k={k:3} σ={sigma:.4}: ĉ = {:.4}  95% CI [{:.4}, {:.4}]",
            est.value, est.ci_low, est.ci_high
        );
    }

    let sparse = PriorSpec::new(
        50,
        DiagonalLaw::Exponential { rate: 1.0 },
        SlabLaw::gaussian(0.02),
        SparsityLaw::Bernoulli { eta: 0.1 },
    )?;
    println!(
        "{}",
        serde_json::to_string_pretty(&estimate_c(&sparse, 5000, 3, 0)?).unwrap()
    );
    Ok(())
}
