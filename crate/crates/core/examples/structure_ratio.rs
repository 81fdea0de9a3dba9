//! Pattern-level constants c_z and the ratio ĉ_z/ĉ_z' that separates the
//! truncated posterior over patterns from the structure-prior-preserving
//! alternative.
//!
//! cargo run --release --example structure_ratio

use pd_truncation::estimators::{estimate_c_given_z, estimate_mean_min_eig, structure_ratio};
use pd_truncation::model::StructureMatrix;
use pd_truncation::{DiagonalLaw, PriorSpec, SlabLaw, SparsityLaw};

fn main() -> pd_truncation::Result<()> {
    let k = 8;
    let spec = PriorSpec::new(
        k,
        DiagonalLaw::Fixed { mu: 1.0 },
        SlabLaw::gaussian(0.35),
        SparsityLaw::Dense,
    )?;
    let patterns = [
        ("empty", StructureMatrix::empty(k)),
        ("path", StructureMatrix::path(k)),
        ("dense", StructureMatrix::dense(k)),
    ];
    for (name, z) in &patterns {
        let c = estimate_c_given_z(&spec, z, 20_000, 1, 0)?;
        let lam = estimate_mean_min_eig(&spec, Some(z), 5000, 2)?;
        println!(
            "{name:>6}: {} edges, ĉ_z = {:.4} ± {:.4}, E[λ_min] = {:.4}",
            z.edge_count(),
            c.value,
            c.se,
            lam.value
        );
    }
    let r = structure_ratio(&spec, &patterns[1].1, &patterns[2].1, 20_000, 3)?;
    println!("ĉ_path / ĉ_dense = {:.3} ± {:.3}", r.value, r.se);
    Ok(())
}
