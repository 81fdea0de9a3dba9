//! Truncation of separable priors onto the positive-definite cone.
//!
//! A separable prior draws every entry of a symmetric `k × k` matrix `Θ`
//! independently (optionally through a spike-and-slab sparsity pattern `Z`)
//! and then conditions on `Θ ≻ 0`. The price of that conditioning is the
//! truncation constant `c = P(Θ ≻ 0)`. This crate
//!
//! - estimates `c`, `c_z = P(Θ ≻ 0 | Z = z)`, `c_ij(x)`, `E[λ_min]` and the
//!   marginal total-variation distortion by reproducible Monte Carlo
//!   ([`estimators`]),
//! - evaluates closed-form and quadrature bounds on those quantities and
//!   classifies their large-`k` limits ([`bounds`]),
//! - solves for the off-diagonal scale that hits a target `c`
//!   ([`calibrate`]),
//! - runs configuration-driven sweeps and the figure presets, writing CSV
//!   plus a JSON manifest ([`sweep`]).
//!
//! Runnable walkthroughs live in the crate's `examples/` directory; the
//! `pdtrunc` binary exposes the same surface from the command line.

// NaN must fail parameter checks, so `!(x > 0.0)` is the intended form.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod calibrate;
pub mod config;
pub mod error;
pub mod estimators;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
pub use estimators::Estimate;
pub use model::{DiagonalLaw, PriorSpec, SlabLaw, SparsityLaw, StructureMatrix, SymMatrix};
pub use rng::RngStream;
