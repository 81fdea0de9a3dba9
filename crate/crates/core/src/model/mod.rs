//! Prior specification, sampling, and the positive-definiteness primitives.

mod matrix;
mod sample;

pub use matrix::{
    coupled_scale, eigenvalues, is_pd, max_degree, min_eig, pd_scale_limit, StructureMatrix,
    SymMatrix,
};
pub use sample::{draw_matrix, draw_structure, sample_matrix, sample_structure};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::{beta::beta_reg, gamma as gammafn};

use crate::error::{Error, Result};
use crate::numerics::{normal_abs_tail, normal_pdf, normal_quantile};

/// Law of each diagonal entry `θ_ii`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum DiagonalLaw {
    Fixed { mu: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
}

impl DiagonalLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DiagonalLaw::Fixed { mu } => mu > 0.0 && mu.is_finite(),
            DiagonalLaw::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            DiagonalLaw::Gamma { shape, rate } => {
                shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "diagonal law parameters must be finite and > 0: {self:?}"
            )))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DiagonalLaw::Fixed { mu } => mu,
            DiagonalLaw::Exponential { rate } => 1.0 / rate,
            DiagonalLaw::Gamma { shape, rate } => shape / rate,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, DiagonalLaw::Fixed { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DiagonalLaw::Fixed { mu } => mu,
            DiagonalLaw::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            DiagonalLaw::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                .expect("validated gamma parameters")
                .sample(rng),
        }
    }

    /// Density on `(0, ∞)`; `None` for a point mass.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return Some(0.0);
        }
        match *self {
            DiagonalLaw::Fixed { .. } => None,
            DiagonalLaw::Exponential { rate } => Some(rate * (-rate * x).exp()),
            DiagonalLaw::Gamma { shape, rate } => {
                if x == 0.0 {
                    return Some(match shape {
                        s if s < 1.0 => f64::INFINITY,
                        1.0 => rate,
                        _ => 0.0,
                    });
                }
                let ln = shape * rate.ln() + (shape - 1.0) * x.ln()
                    - rate * x
                    - gammafn::ln_gamma(shape);
                Some(ln.exp())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            DiagonalLaw::Fixed { mu } => {
                if x >= mu {
                    1.0
                } else {
                    0.0
                }
            }
            DiagonalLaw::Exponential { rate } => -(-rate * x).exp_m1(),
            DiagonalLaw::Gamma { shape, rate } => gammafn::gamma_lr(shape, rate * x),
        }
    }

    /// `1 - cdf(x)` evaluated directly.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            DiagonalLaw::Fixed { mu } => {
                if x >= mu {
                    0.0
                } else {
                    1.0
                }
            }
            DiagonalLaw::Exponential { rate } => (-rate * x).exp(),
            DiagonalLaw::Gamma { shape, rate } => gammafn::gamma_ur(shape, rate * x),
        }
    }

    /// Closed-form quantile where one exists.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        match *self {
            DiagonalLaw::Fixed { mu } => Some(mu),
            DiagonalLaw::Exponential { rate } => Some(-(-p).ln_1p() / rate),
            DiagonalLaw::Gamma { .. } => None,
        }
    }
}

/// Zero-mean law of a nonzero off-diagonal entry.
///
/// Laplace and Student-t are drawn as Gaussian scale mixtures
/// (exponential and inverse-gamma mixing variances respectively).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum SlabLaw {
    Gaussian { sigma: f64 },
    Laplace { scale: f64 },
    StudentT { dof: f64, scale: f64 },
    TruncatedGaussian { sigma: f64, cap: f64 },
}

impl SlabLaw {
    pub fn gaussian(sigma: f64) -> Self {
        SlabLaw::Gaussian { sigma }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        let ok = match *self {
            SlabLaw::Gaussian { sigma } => nonneg(sigma),
            SlabLaw::Laplace { scale } => nonneg(scale),
            SlabLaw::StudentT { dof, scale } => dof > 2.0 && dof.is_finite() && nonneg(scale),
            SlabLaw::TruncatedGaussian { sigma, cap } => {
                nonneg(sigma) && cap > 0.0 && cap.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid slab parameters: {self:?}")))
        }
    }

    /// The free scale parameter (σ, b or s).
    pub fn scale(&self) -> f64 {
        match *self {
            SlabLaw::Gaussian { sigma } | SlabLaw::TruncatedGaussian { sigma, .. } => sigma,
            SlabLaw::Laplace { scale } | SlabLaw::StudentT { scale, .. } => scale,
        }
    }

    /// Same family with the scale parameter replaced. A truncated Gaussian
    /// keeps its cap.
    pub fn with_scale(&self, s: f64) -> Self {
        match *self {
            SlabLaw::Gaussian { .. } => SlabLaw::Gaussian { sigma: s },
            SlabLaw::Laplace { .. } => SlabLaw::Laplace { scale: s },
            SlabLaw::StudentT { dof, .. } => SlabLaw::StudentT { dof, scale: s },
            SlabLaw::TruncatedGaussian { cap, .. } => SlabLaw::TruncatedGaussian { sigma: s, cap },
        }
    }

    /// Whether `with_scale` generates a scale family (`θ = s · θ₀`).
    pub fn is_scale_family(&self) -> bool {
        !matches!(self, SlabLaw::TruncatedGaussian { .. })
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, SlabLaw::Gaussian { .. })
    }

    pub fn variance(&self) -> f64 {
        match *self {
            SlabLaw::Gaussian { sigma } => sigma * sigma,
            SlabLaw::Laplace { scale } => 2.0 * scale * scale,
            SlabLaw::StudentT { dof, scale } => scale * scale * dof / (dof - 2.0),
            SlabLaw::TruncatedGaussian { sigma, cap } => {
                if sigma == 0.0 {
                    return 0.0;
                }
                let alpha = cap / sigma;
                let mass = 1.0 - normal_abs_tail(alpha);
                sigma * sigma * (1.0 - 2.0 * alpha * normal_pdf(alpha) / mass)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        match *self {
            SlabLaw::Gaussian { sigma } => sigma * z,
            SlabLaw::Laplace { scale } => {
                let e: f64 = Exp1.sample(rng);
                (2.0 * e).sqrt() * scale * z
            }
            SlabLaw::StudentT { dof, scale } => {
                let chi2: f64 = Gamma::new(0.5 * dof, 2.0)
                    .expect("validated dof")
                    .sample(rng);
                scale * z * (dof / chi2).sqrt()
            }
            SlabLaw::TruncatedGaussian { sigma, cap } => {
                let mut x = sigma * z;
                while x.abs() > cap {
                    let z: f64 = StandardNormal.sample(rng);
                    x = sigma * z;
                }
                x
            }
        }
    }

    /// `P(|θ| ≥ x)` for `x ≥ 0`.
    pub fn abs_tail(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if self.scale() == 0.0 {
            return 0.0;
        }
        match *self {
            SlabLaw::Gaussian { sigma } => normal_abs_tail(x / sigma),
            SlabLaw::Laplace { scale } => (-x / scale).exp(),
            SlabLaw::StudentT { dof, scale } => {
                let t = x / scale;
                beta_reg(0.5 * dof, 0.5, dof / (dof + t * t))
            }
            SlabLaw::TruncatedGaussian { sigma, cap } => {
                if x >= cap {
                    return 0.0;
                }
                let outside = normal_abs_tail(cap / sigma);
                (normal_abs_tail(x / sigma) - outside) / (1.0 - outside)
            }
        }
    }

    /// `log P(|θ| < x)`.
    pub fn ln_abs_cdf(&self, x: f64) -> f64 {
        (-self.abs_tail(x)).ln_1p()
    }

    /// Closed-form quantile where one exists.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        match *self {
            SlabLaw::Gaussian { sigma } => Some(sigma * normal_quantile(p)),
            SlabLaw::Laplace { scale } => {
                let u = p - 0.5;
                Some(-scale * u.signum() * (-2.0 * u.abs()).ln_1p())
            }
            _ => None,
        }
    }
}

/// Prior on the sparsity pattern `Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum SparsityLaw {
    Dense,
    Bernoulli { eta: f64 },
    FixedPattern { pattern: StructureMatrix },
}

impl SparsityLaw {
    fn validate(&self, k: usize) -> Result<()> {
        match self {
            SparsityLaw::Dense => Ok(()),
            SparsityLaw::Bernoulli { eta } => {
                if (0.0..=1.0).contains(eta) {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "Bernoulli eta must lie in [0,1], got {eta}"
                    )))
                }
            }
            SparsityLaw::FixedPattern { pattern } => {
                if pattern.k() == k {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "pattern is {}x{}, spec has k = {k}",
                        pattern.k(),
                        pattern.k()
                    )))
                }
            }
        }
    }

    /// Marginal probability that a given off-diagonal is in the slab.
    pub fn inclusion_probability(&self) -> Option<f64> {
        match self {
            SparsityLaw::Dense => Some(1.0),
            SparsityLaw::Bernoulli { eta } => Some(*eta),
            SparsityLaw::FixedPattern { .. } => None,
        }
    }
}

/// A separable prior on symmetric `k × k` matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPriorSpec")]
pub struct PriorSpec {
    pub k: usize,
    pub diagonal: DiagonalLaw,
    pub slab: SlabLaw,
    pub sparsity: SparsityLaw,
}

#[derive(Deserialize)]
struct RawPriorSpec {
    k: usize,
    diagonal: DiagonalLaw,
    slab: SlabLaw,
    #[serde(default = "dense")]
    sparsity: SparsityLaw,
}

fn dense() -> SparsityLaw {
    SparsityLaw::Dense
}

impl TryFrom<RawPriorSpec> for PriorSpec {
    type Error = Error;

    fn try_from(raw: RawPriorSpec) -> Result<Self> {
        PriorSpec::new(raw.k, raw.diagonal, raw.slab, raw.sparsity)
    }
}

impl PriorSpec {
    pub fn new(
        k: usize,
        diagonal: DiagonalLaw,
        slab: SlabLaw,
        sparsity: SparsityLaw,
    ) -> Result<Self> {
        let spec = Self {
            k,
            diagonal,
            slab,
            sparsity,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Fixed diagonal `mu`, Gaussian slab, dense pattern.
    pub fn fixed_gaussian(k: usize, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(
            k,
            DiagonalLaw::Fixed { mu },
            SlabLaw::Gaussian { sigma },
            SparsityLaw::Dense,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::domain(format!("k must be >= 2, got {}", self.k)));
        }
        self.diagonal.validate()?;
        self.slab.validate()?;
        self.sparsity.validate(self.k)
    }

    pub fn with_slab_scale(&self, s: f64) -> Self {
        Self {
            slab: self.slab.with_scale(s),
            ..self.clone()
        }
    }

    pub fn with_sparsity(&self, sparsity: SparsityLaw) -> Result<Self> {
        Self::new(self.k, self.diagonal, self.slab, sparsity)
    }

    pub fn pair_count(&self) -> usize {
        self.k * (self.k - 1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_positive_halfline, QuadratureSpec};
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_densities_integrate_to_one() {
        let quad = QuadratureSpec::default();
        for law in [
            DiagonalLaw::Exponential { rate: 1.0 },
            DiagonalLaw::Exponential { rate: 0.2 },
            DiagonalLaw::Exponential { rate: 7.0 },
            DiagonalLaw::Gamma {
                shape: 2.0,
                rate: 2.0,
            },
            DiagonalLaw::Gamma {
                shape: 5.5,
                rate: 0.5,
            },
        ] {
            let v = integrate_positive_halfline(|x| law.pdf(x).unwrap(), &quad).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = quad.abs_tol);
        }
    }

    #[test]
    fn diagonal_cdf_sf_complement() {
        let law = DiagonalLaw::Gamma {
            shape: 2.0,
            rate: 2.0,
        };
        for &x in &[0.01, 0.5, 1.0, 3.0] {
            assert_abs_diff_eq!(law.cdf(x) + law.sf(x), 1.0, epsilon = 1e-14);
        }
        // Gamma(2, 2): F(x) = 1 - e^{-2x}(1 + 2x)
        assert_abs_diff_eq!(law.cdf(1.0), 1.0 - (-2.0f64).exp() * 3.0, epsilon = 1e-14);
    }

    #[test]
    fn slab_variances() {
        assert_eq!(SlabLaw::Gaussian { sigma: 0.3 }.variance(), 0.09);
        assert_eq!(SlabLaw::Laplace { scale: 0.5 }.variance(), 0.5);
        assert_abs_diff_eq!(
            SlabLaw::StudentT {
                dof: 5.0,
                scale: 2.0
            }
            .variance(),
            4.0 * 5.0 / 3.0
        );
        // a huge cap recovers the Gaussian variance
        assert_abs_diff_eq!(
            SlabLaw::TruncatedGaussian {
                sigma: 1.0,
                cap: 40.0
            }
            .variance(),
            1.0,
            epsilon = 1e-12
        );
        // cap = σ: 1 - 2φ(1)/(2Φ(1)-1)
        assert_abs_diff_eq!(
            SlabLaw::TruncatedGaussian {
                sigma: 1.0,
                cap: 1.0
            }
            .variance(),
            0.291_125_094_772_793_1,
            epsilon = 1e-9
        );
    }

    #[test]
    fn slab_sample_moments_match_variance() {
        let mut rng = RngStream::new(11, 0).rng();
        let n = 200_000;
        for slab in [
            SlabLaw::Gaussian { sigma: 0.7 },
            SlabLaw::Laplace { scale: 0.5 },
            SlabLaw::StudentT {
                dof: 6.0,
                scale: 1.0,
            },
            SlabLaw::TruncatedGaussian {
                sigma: 1.0,
                cap: 1.0,
            },
        ] {
            let xs: Vec<f64> = (0..n).map(|_| slab.sample(&mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let rel = (var / slab.variance() - 1.0).abs();
            assert!(mean.abs() < 0.02, "{slab:?} mean {mean}");
            assert!(rel < 0.05, "{slab:?} var {var} vs {}", slab.variance());
            if let SlabLaw::TruncatedGaussian { cap, .. } = slab {
                assert!(xs.iter().all(|x| x.abs() <= cap));
            }
            // empirical tail at one point
            let x0 = 0.8;
            let emp = xs.iter().filter(|x| x.abs() >= x0).count() as f64 / n as f64;
            assert!(
                (emp - slab.abs_tail(x0)).abs() < 0.01,
                "{slab:?} tail {emp} vs {}",
                slab.abs_tail(x0)
            );
        }
    }

    #[test]
    fn slab_quantiles_invert_tails() {
        let g = SlabLaw::Gaussian { sigma: 2.0 };
        let l = SlabLaw::Laplace { scale: 0.7 };
        for &p in &[0.6, 0.9, 0.99] {
            for slab in [g, l] {
                let x = slab.quantile(p).unwrap();
                assert_abs_diff_eq!(slab.abs_tail(x), 2.0 * (1.0 - p), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(PriorSpec::fixed_gaussian(1, 1.0, 0.1).is_err());
        assert!(PriorSpec::fixed_gaussian(2, 0.0, 0.1).is_err());
        assert!(PriorSpec::fixed_gaussian(2, 1.0, -0.1).is_err());
        assert!(PriorSpec::new(
            3,
            DiagonalLaw::Fixed { mu: 1.0 },
            SlabLaw::StudentT {
                dof: 2.0,
                scale: 1.0
            },
            SparsityLaw::Dense
        )
        .is_err());
        assert!(PriorSpec::new(
            3,
            DiagonalLaw::Fixed { mu: 1.0 },
            SlabLaw::gaussian(1.0),
            SparsityLaw::Bernoulli { eta: 1.5 }
        )
        .is_err());
        let z = StructureMatrix::empty(4);
        assert!(PriorSpec::new(
            3,
            DiagonalLaw::Fixed { mu: 1.0 },
            SlabLaw::gaussian(1.0),
            SparsityLaw::FixedPattern { pattern: z }
        )
        .is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec = PriorSpec::new(
            4,
            DiagonalLaw::Gamma {
                shape: 2.0,
                rate: 2.0,
            },
            SlabLaw::Laplace { scale: 0.1 },
            SparsityLaw::Bernoulli { eta: 0.3 },
        )
        .unwrap();
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "k": 4,
                "diagonal": {"type": "gamma", "params": {"shape": 2.0, "rate": 2.0}},
                "slab": {"type": "laplace", "params": {"scale": 0.1}},
                "sparsity": {"type": "bernoulli", "params": {"eta": 0.3}}
            })
        );
        let dense: PriorSpec = serde_json::from_str(
            r#"{"k": 3, "diagonal": {"type": "fixed", "params": {"mu": 1}},
                "slab": {"type": "gaussian", "params": {"sigma": 0.2}},
                "sparsity": {"type": "dense"}}"#,
        )
        .unwrap();
        assert_eq!(dense, PriorSpec::fixed_gaussian(3, 1.0, 0.2).unwrap());
        let bad = serde_json::from_str::<PriorSpec>(
            r#"{"k": 1, "diagonal": {"type": "fixed", "params": {"mu": 1}},
                "slab": {"type": "gaussian", "params": {"sigma": 0.2}}}"#,
        );
        assert!(bad.is_err());
    }
}
