//! Shared fixtures for the benchmark suite.

use strainflow_core::{AgeGrid, ModelGrid, ModelParams, RateFunction, StrainParams};

/// Beta scale making the continuous reproduction integral equal one for
/// unit mortality on `[0, 1)`.
pub const UNIT_R: f64 = 1.5819767068693265;

/// Two-strain model with the given reproduction-number targets.
pub fn two_strain(r0x: f64, r0y: f64, a_max: f64, da: f64) -> ModelGrid {
    let mu = || RateFunction::constant(1.0, 0.0, a_max).unwrap();
    ModelParams::new(
        1.0,
        1.0,
        vec![
            StrainParams::new(
                "x",
                mu(),
                RateFunction::constant(r0x * UNIT_R, 0.0, 1.0).unwrap(),
            )
            .unwrap(),
            StrainParams::new(
                "y",
                mu(),
                RateFunction::constant(r0y * UNIT_R, 0.0, 1.0).unwrap(),
            )
            .unwrap(),
        ],
    )
    .unwrap()
    .on_grid(&AgeGrid::new(a_max, da).unwrap())
    .unwrap()
}
