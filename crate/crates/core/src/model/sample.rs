use rand::Rng;

use super::{PriorSpec, SparsityLaw, StructureMatrix, SymMatrix};
use crate::rng::RngStream;

/// Draws `Z` from the spec's sparsity law.
pub fn sample_structure(spec: &PriorSpec, stream: RngStream) -> StructureMatrix {
    draw_structure(spec, &mut stream.rng())
}

/// Draws `Θ | Z = z`.
pub fn sample_matrix(spec: &PriorSpec, z: &StructureMatrix, stream: RngStream) -> SymMatrix {
    assert_eq!(z.k(), spec.k, "pattern dimension must match the spec");
    draw_matrix(spec, Some(z), &mut stream.rng())
}

/// [`sample_structure`] on a caller-held generator.
pub fn draw_structure<R: Rng + ?Sized>(spec: &PriorSpec, rng: &mut R) -> StructureMatrix {
    let k = spec.k;
    match &spec.sparsity {
        SparsityLaw::Dense => StructureMatrix::dense(k),
        SparsityLaw::FixedPattern { pattern } => pattern.clone(),
        SparsityLaw::Bernoulli { eta } => {
            let mut z = StructureMatrix::empty(k);
            for i in 0..k {
                for j in (i + 1)..k {
                    if rng.random::<f64>() < *eta {
                        z.set(i, j, true);
                    }
                }
            }
            z
        }
    }
}

/// Diagonal first, then off-diagonals in row-major `i < j` order; entries
/// with `z_ij = 0` consume no randomness. `None` means every pair is in the
/// slab.
pub fn draw_matrix<R: Rng + ?Sized>(
    spec: &PriorSpec,
    z: Option<&StructureMatrix>,
    rng: &mut R,
) -> SymMatrix {
    let k = spec.k;
    let mut m = SymMatrix::zeros(k);
    for i in 0..k {
        m.set(i, i, spec.diagonal.sample(rng));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if z.is_none_or(|z| z.get(i, j)) {
                m.set(i, j, spec.slab.sample(rng));
            }
        }
    }
    m
}
