use super::{FreeParam, Output, SweepConfig};
use crate::bounds::Schedule;
use crate::error::{Error, Result};
use crate::model::{DiagonalLaw, SlabLaw};
use crate::numerics::QuadratureSpec;

pub const PRESET_NAMES: [&str; 6] = [
    "fig1-left",
    "fig1-right",
    "fig2-left",
    "fig2-right",
    "fig3-left",
    "fig3-right",
];

const K_GRID: [usize; 9] = [2, 5, 10, 25, 50, 75, 100, 150, 200];
const N: usize = 2000;
const SEED: u64 = 20_240_601;
const DELTAS: [f64; 5] = [-0.1, -0.05, 0.0, 0.05, 0.1];

fn base(name: &str, diagonal: DiagonalLaw, free: FreeParam, series: Vec<Schedule>) -> SweepConfig {
    SweepConfig {
        name: Some(name.to_string()),
        k: K_GRID.to_vec(),
        diagonal,
        slab: SlabLaw::gaussian(1.0),
        free,
        series,
        delta: None,
        sigma: None,
        eta: None,
        n: N,
        seed: SEED,
        outputs: vec![
            Output::McEstimate,
            Output::Sandwich,
            Output::Distances,
            Output::Classify,
        ],
        quadrature: QuadratureSpec::default(),
    }
}

fn constant_deltas() -> Vec<Schedule> {
    DELTAS.iter().map(|&d| Schedule::Const(d)).collect()
}

fn sigma_powers() -> Vec<Schedule> {
    [-2.0, -1.5, -1.25, -1.125, -1.0]
        .iter()
        .map(|&e| Schedule::power(1.0, e))
        .collect()
}

/// Frozen sweep configurations for the six figure panels.
pub fn figure_preset(name: &str) -> Result<SweepConfig> {
    let unit = DiagonalLaw::Fixed { mu: 1.0 };
    let cfg = match name {
        "fig1-left" => base(name, unit, FreeParam::Delta, constant_deltas()),
        "fig1-right" => base(
            name,
            unit,
            FreeParam::Delta,
            [-0.5, -2.0 / 3.0, -1.0, -2.0]
                .iter()
                .map(|&e| Schedule::power(1.0, e))
                .collect(),
        ),
        "fig2-left" => base(
            name,
            DiagonalLaw::Exponential { rate: 1.0 },
            FreeParam::Sigma,
            sigma_powers(),
        ),
        "fig2-right" => base(
            name,
            DiagonalLaw::Gamma {
                shape: 2.0,
                rate: 2.0,
            },
            FreeParam::Sigma,
            sigma_powers(),
        ),
        "fig3-left" | "fig3-right" => {
            let exponent = if name == "fig3-left" { -0.25 } else { -0.5 };
            SweepConfig {
                eta: Some(Schedule::power(0.5, exponent)),
                ..base(name, unit, FreeParam::Delta, constant_deltas())
            }
        }
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESET_NAMES {
            let cfg = figure_preset(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.k, K_GRID);
            assert_eq!(cfg.n, 2000);
        }
        assert!(matches!(
            figure_preset("fig4"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn preset_parameterisations() {
        let f1 = figure_preset("fig1-left").unwrap();
        assert_eq!(f1.series, constant_deltas());
        assert_eq!(
            figure_preset("fig2-right").unwrap().diagonal,
            DiagonalLaw::Gamma {
                shape: 2.0,
                rate: 2.0
            }
        );
        let f3 = figure_preset("fig3-left").unwrap();
        assert_eq!(f3.eta, Some(Schedule::power(0.5, -0.25)));
        assert_eq!(figure_preset("fig1-right").unwrap().series.len(), 4);
    }
}
