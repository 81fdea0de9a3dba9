use super::BoundResult;
use crate::error::{Error, Result};
use crate::model::{DiagonalLaw, PriorSpec, SlabLaw, SparsityLaw};
use crate::numerics::{integrate_positive_halfline, QuadratureSpec};

type LnDensity<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// `log(1 − η·P(|θ_ij| ≥ x))`: one pair stays below `x`, either because
/// it is outside the slab (probability `1 − η`) or because the slab draw
/// is small.
fn ln_pair(slab: &SlabLaw, eta: f64, x: f64) -> f64 {
    (-eta * slab.abs_tail(x)).ln_1p()
}

struct Raw {
    lower: f64,
    deficit: f64,
    upper: f64,
}

/// Diagonal dominance from below (every `|θ_ij| < θ_min/(k−1)`) and the
/// pairwise necessary condition from above (every `|θ_ij| < θ_max`),
/// averaged over the law of `θ_min`/`θ_max`. Exponents are carried in log
/// space so `m` in the tens of thousands does not underflow.
fn product_bounds(
    diag: &DiagonalLaw,
    slab: &SlabLaw,
    eta: f64,
    k: usize,
    m: usize,
    quad: &QuadratureSpec,
) -> Result<Raw> {
    if m == 0 || eta == 0.0 || slab.scale() == 0.0 {
        // every off-diagonal is zero: Θ is a positive diagonal matrix
        return Ok(Raw {
            lower: 1.0,
            deficit: 0.0,
            upper: 1.0,
        });
    }
    let mf = m as f64;
    let shrink = (k - 1) as f64;
    let ln_lo = |x: f64| mf * ln_pair(slab, eta, x / shrink);
    let ln_hi = |x: f64| mf * ln_pair(slab, eta, x);
    if let DiagonalLaw::Fixed { mu } = *diag {
        let lo = ln_lo(mu);
        return Ok(Raw {
            lower: lo.exp(),
            deficit: -lo.exp_m1(),
            upper: ln_hi(mu).exp(),
        });
    }

    let ln_k = (k as f64).ln();
    let km1 = (k - 1) as f64;
    let (ln_fmin, ln_fmax): (LnDensity<'_>, LnDensity<'_>) = match *diag {
        DiagonalLaw::Exponential { rate } => (
            Box::new(move |x| ln_k + rate.ln() - k as f64 * rate * x),
            Box::new(move |x| ln_k + rate.ln() - rate * x + km1 * (-(-rate * x).exp_m1()).ln()),
        ),
        _ => (
            Box::new(move |x| ln_k + diag.pdf(x).unwrap_or(0.0).ln() + km1 * diag.sf(x).ln()),
            Box::new(move |x| ln_k + diag.pdf(x).unwrap_or(0.0).ln() + km1 * diag.cdf(x).ln()),
        ),
    };
    // a density pole at x = 0 (Gamma shape < 1) is integrable; the single
    // endpoint evaluation is dropped
    let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
    let lower = integrate_positive_halfline(|x| finite((ln_fmin(x) + ln_lo(x)).exp()), quad)?;
    let deficit =
        integrate_positive_halfline(|x| finite(ln_fmin(x).exp() * -ln_lo(x).exp_m1()), quad)?;
    let upper = integrate_positive_halfline(|x| finite((ln_fmax(x) + ln_hi(x)).exp()), quad)?;
    Ok(Raw {
        lower,
        deficit,
        upper,
    })
}

fn finish(raw: Raw, method: &str, notes: String) -> BoundResult {
    let lower = raw.lower.clamp(0.0, 1.0);
    BoundResult {
        lower,
        upper: raw.upper.clamp(lower, 1.0),
        lower_deficit: raw.deficit.clamp(0.0, 1.0),
        method: method.to_string(),
        valid: true,
        notes,
    }
}

fn check_common(diag: &DiagonalLaw, k: usize, m: usize, quad: &QuadratureSpec) -> Result<()> {
    diag.validate()?;
    quad.validate()?;
    if k < 2 {
        return Err(Error::domain(format!("need k >= 2, got {k}")));
    }
    let pairs = k * (k - 1) / 2;
    if m > pairs {
        return Err(Error::domain(format!("m = {m} exceeds k(k-1)/2 = {pairs}")));
    }
    Ok(())
}

/// Sandwich bounds on `c_z` for a Gaussian slab with scale `σ` and a
/// pattern with `m` nonzero pairs (`m = k(k−1)/2` for the dense prior).
pub fn dense_sandwich(
    diag: &DiagonalLaw,
    sigma: f64,
    k: usize,
    m: usize,
    quad: &QuadratureSpec,
) -> Result<BoundResult> {
    check_common(diag, k, m, quad)?;
    let slab = SlabLaw::gaussian(sigma);
    slab.validate()?;
    let raw = product_bounds(diag, &slab, 1.0, k, m, quad)?;
    let method = if diag.is_fixed() {
        "sandwich"
    } else {
        "sandwich-quadrature"
    };
    Ok(finish(raw, method, String::new()))
}

/// Sandwich bounds on `c` for a full spec.
///
/// A Bernoulli(η) pattern prior is integrated out exactly: each of the
/// `k(k−1)/2` pairs independently contributes `1 − η + η·P(|θ| < x)`. A
/// fixed pattern contributes one factor per edge. Non-Gaussian slabs use
/// their own `|θ|` distribution in each factor.
pub fn sandwich(spec: &PriorSpec, quad: &QuadratureSpec) -> Result<BoundResult> {
    spec.validate()?;
    let k = spec.k;
    let (m, eta) = match &spec.sparsity {
        SparsityLaw::Dense => (spec.pair_count(), 1.0),
        SparsityLaw::Bernoulli { eta } => (spec.pair_count(), *eta),
        SparsityLaw::FixedPattern { pattern } => (pattern.edge_count(), 1.0),
    };
    check_common(&spec.diagonal, k, m, quad)?;
    let raw = product_bounds(&spec.diagonal, &spec.slab, eta, k, m, quad)?;
    let notes = if spec.slab.is_gaussian() {
        String::new()
    } else {
        "product bounds evaluated with the slab's own |θ| tail".to_string()
    };
    let method = if spec.diagonal.is_fixed() {
        "sandwich"
    } else {
        "sandwich-quadrature"
    };
    Ok(finish(raw, method, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StructureMatrix;
    use crate::numerics::{normal_cdf, QuadratureMethod};
    use approx::assert_abs_diff_eq;

    fn quads() -> [QuadratureSpec; 2] {
        [
            QuadratureSpec::default(),
            QuadratureSpec {
                method: QuadratureMethod::GaussLegendreOnTransformedDomain,
                ..Default::default()
            },
        ]
    }

    #[test]
    fn two_by_two_bounds_coincide() {
        let b = dense_sandwich(
            &DiagonalLaw::Fixed { mu: 1.0 },
            1.0,
            2,
            1,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(b.lower, b.upper);
        assert_abs_diff_eq!(b.lower, 0.682_689_492_137_085_9, epsilon = 1e-15);
    }

    #[test]
    fn tiny_sigma_gives_one() {
        for (k, m) in [(3, 1), (10, 45), (200, 19_900)] {
            let b = dense_sandwich(
                &DiagonalLaw::Fixed { mu: 1.0 },
                1e-8,
                k,
                m,
                &QuadratureSpec::default(),
            )
            .unwrap();
            assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exponential_matches_reference_integrals() {
        // high-precision values of the two displayed integrals
        for quad in quads() {
            let b =
                dense_sandwich(&DiagonalLaw::Exponential { rate: 1.0 }, 0.1, 3, 3, &quad).unwrap();
            assert_abs_diff_eq!(b.lower, 0.477_947_878_749_928_5, epsilon = 1e-8);
            assert_abs_diff_eq!(b.upper, 0.997_153_528_831_995_4, epsilon = 1e-8);
            assert_abs_diff_eq!(
                b.lower_deficit,
                1.0 - 0.477_947_878_749_928_5,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn gamma_matches_reference_integrals() {
        let b = dense_sandwich(
            &DiagonalLaw::Gamma {
                shape: 2.0,
                rate: 2.0,
            },
            0.1,
            3,
            3,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(b.lower, 0.726_919_879_943_227_6, epsilon = 1e-8);
        assert_abs_diff_eq!(b.upper, 0.999_874_101_011_181_7, epsilon = 1e-8);
    }

    #[test]
    fn gamma_with_unit_shape_is_exponential() {
        let q = QuadratureSpec::default();
        let g = dense_sandwich(
            &DiagonalLaw::Gamma {
                shape: 1.0,
                rate: 1.5,
            },
            0.07,
            6,
            15,
            &q,
        )
        .unwrap();
        let e = dense_sandwich(&DiagonalLaw::Exponential { rate: 1.5 }, 0.07, 6, 15, &q).unwrap();
        assert_abs_diff_eq!(g.lower, e.lower, epsilon = 1e-9);
        assert_abs_diff_eq!(g.upper, e.upper, epsilon = 1e-9);
    }

    #[test]
    fn monotone_in_sigma_and_m() {
        let q = QuadratureSpec::default();
        for diag in [
            DiagonalLaw::Fixed { mu: 1.0 },
            DiagonalLaw::Exponential { rate: 1.0 },
        ] {
            let mut prev = dense_sandwich(&diag, 0.01, 8, 28, &q).unwrap();
            for s in [0.02, 0.05, 0.1, 0.3, 1.0] {
                let b = dense_sandwich(&diag, s, 8, 28, &q).unwrap();
                assert!(b.lower <= prev.lower + 1e-12 && b.upper <= prev.upper + 1e-12);
                prev = b;
            }
            let mut prev = dense_sandwich(&diag, 0.1, 8, 0, &q).unwrap();
            assert_eq!(prev.lower, 1.0);
            for m in [1, 5, 10, 28] {
                let b = dense_sandwich(&diag, 0.1, 8, m, &q).unwrap();
                assert!(b.lower <= prev.lower + 1e-12 && b.upper <= prev.upper + 1e-12);
                prev = b;
            }
        }
    }

    #[test]
    fn large_exponent_stays_in_log_space() {
        let b = dense_sandwich(
            &DiagonalLaw::Fixed { mu: 1.0 },
            0.002,
            200,
            19_900,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let expected_ln =
            19_900.0 * (-crate::numerics::normal_abs_tail(1.0 / (199.0 * 0.002))).ln_1p();
        assert!(b.lower > 0.0);
        assert_abs_diff_eq!(b.lower.ln(), expected_ln, epsilon = 1e-9);
    }

    #[test]
    fn bernoulli_pattern_prior_matches_enumeration() {
        // k = 3: sum over the 8 patterns of p(z)·g^{|z|}
        let eta: f64 = 0.3;
        let spec = PriorSpec::new(
            3,
            DiagonalLaw::Fixed { mu: 1.0 },
            SlabLaw::gaussian(0.8),
            SparsityLaw::Bernoulli { eta },
        )
        .unwrap();
        let b = sandwich(&spec, &QuadratureSpec::default()).unwrap();
        let g_lo = 2.0 * normal_cdf(0.5 / 0.8) - 1.0;
        let g_hi = 2.0 * normal_cdf(1.0 / 0.8) - 1.0;
        let enumerate = |g: f64| -> f64 {
            (0..8u32)
                .map(|mask| {
                    let j = mask.count_ones() as i32;
                    eta.powi(j) * (1.0 - eta).powi(3 - j) * g.powi(j)
                })
                .sum()
        };
        assert_abs_diff_eq!(b.lower, enumerate(g_lo), epsilon = 1e-14);
        assert_abs_diff_eq!(b.upper, enumerate(g_hi), epsilon = 1e-14);
    }

    #[test]
    fn fixed_pattern_uses_edge_count() {
        let pattern = StructureMatrix::path(6);
        let spec = PriorSpec::new(
            6,
            DiagonalLaw::Exponential { rate: 1.0 },
            SlabLaw::gaussian(0.2),
            SparsityLaw::FixedPattern { pattern },
        )
        .unwrap();
        let q = QuadratureSpec::default();
        let a = sandwich(&spec, &q).unwrap();
        let b = dense_sandwich(&DiagonalLaw::Exponential { rate: 1.0 }, 0.2, 6, 5, &q).unwrap();
        assert_abs_diff_eq!(a.lower, b.lower, epsilon = 1e-14);
        assert_abs_diff_eq!(a.upper, b.upper, epsilon = 1e-14);
    }

    #[test]
    fn non_gaussian_slab_is_noted() {
        let spec = PriorSpec::new(
            4,
            DiagonalLaw::Fixed { mu: 1.0 },
            SlabLaw::Laplace { scale: 0.1 },
            SparsityLaw::Dense,
        )
        .unwrap();
        let b = sandwich(&spec, &QuadratureSpec::default()).unwrap();
        assert!(!b.notes.is_empty());
        // Laplace: P(|θ| < x) = 1 − e^{−x/b}
        assert_abs_diff_eq!(b.upper, (1.0 - (-10.0f64).exp()).powi(6), epsilon = 1e-14);
    }

    #[test]
    fn rejects_too_many_pairs() {
        assert!(dense_sandwich(
            &DiagonalLaw::Fixed { mu: 1.0 },
            0.1,
            3,
            4,
            &QuadratureSpec::default()
        )
        .is_err());
    }
}
