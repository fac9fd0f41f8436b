//! JSON run configuration: one self-contained document per run.
//!
//! Schema (all rates are `[a_lo, a_hi, value]` segment lists):
//!
//! ```json
//! {
//!   "lambda": 1.0,
//!   "mu_s": 1.0,
//!   "strains": [
//!     {"name": "x", "mu": [[0.0, 10.0, 1.0]], "beta": [[0.0, 1.0, 3.16]]},
//!     {"name": "y", "mu": [[0.0, 10.0, 1.0]], "beta": [[0.0, 1.0, 1.42]]}
//!   ],
//!   "grid": {"a_max": 10.0, "da": 0.01},
//!   "sim": {"t_max": 400.0, "dt_lock": true, "record_every": 100},
//!   "initial": {"preset": "generic", "m_x": 0.1, "m_y": 0.1}
//! }
//! ```
//!
//! `initial` is either a named preset or
//! `{"explicit": {"s0": ..., "densities": [[[a_lo, a_hi, value], ...], ...]}}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use strainflow_core::{
    AgeGrid, ModelGrid, ModelParams, RateFunction, SimConfig, State, StrainParams,
};

use crate::error::CliError;
use crate::initial;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub lambda: f64,
    pub mu_s: f64,
    pub strains: Vec<RawStrain>,
    pub grid: RawGrid,
    pub sim: RawSim,
    pub initial: InitialSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStrain {
    pub name: String,
    pub mu: Vec<[f64; 3]>,
    pub beta: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub a_max: f64,
    pub da: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSim {
    pub t_max: f64,
    /// Must be `true`: the step is locked to the grid cell width.
    pub dt_lock: bool,
    pub record_every: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Preset(PresetInitial),
    Explicit { explicit: ExplicitInitial },
}

/// Named initial conditions. Omitted values take the documented defaults
/// `s0 = 0.5·Λ/μ_S` and mass `0.1·Λ/μ_S`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum PresetInitial {
    /// Exactly zero x-density, π-shaped y-density.
    BoundaryX { s0: Option<f64>, m_y: Option<f64> },
    /// π-shaped x-density, exactly zero y-density.
    BoundaryY { s0: Option<f64>, m_x: Option<f64> },
    /// Both densities supported entirely beyond the strain's transmission
    /// ages: exactly zero force of infection, forever.
    BoundaryBoth {
        s0: Option<f64>,
        m_x: Option<f64>,
        m_y: Option<f64>,
    },
    /// Disease-free state nudged by `delta` in every component.
    PerturbedE0 { delta: f64 },
    /// π-shaped densities with the given masses.
    Generic {
        s0: Option<f64>,
        m_x: Option<f64>,
        m_y: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitInitial {
    pub s0: f64,
    /// One piecewise-constant density spec per strain.
    pub densities: Vec<Vec<[f64; 3]>>,
}

/// A fully validated run: parameters, discretized model, simulation settings
/// and the constructed initial state.
#[derive(Debug, Clone)]
pub struct BuiltConfig {
    pub raw: RawConfig,
    pub params: ModelParams,
    pub model: ModelGrid,
    pub sim: SimConfig,
    pub initial: State,
}

fn rate_from_segments(segs: &[[f64; 3]]) -> Result<RateFunction, strainflow_core::ModelError> {
    RateFunction::new(segs.iter().map(|s| (s[0], s[1], s[2])).collect())
}

pub fn build(raw: RawConfig) -> Result<BuiltConfig, CliError> {
    if !raw.sim.dt_lock {
        return Err(CliError::Model(strainflow_core::ModelError::Validation(
            "sim.dt_lock must be true: the time step is locked to grid.da".to_string(),
        )));
    }
    let mut strains = Vec::with_capacity(raw.strains.len());
    for s in &raw.strains {
        strains.push(StrainParams::new(
            s.name.clone(),
            rate_from_segments(&s.mu)?,
            rate_from_segments(&s.beta)?,
        )?);
    }
    let params = ModelParams::new(raw.lambda, raw.mu_s, strains)?;
    let grid = AgeGrid::new(raw.grid.a_max, raw.grid.da)?;
    let model = params.on_grid(&grid)?;
    let sim = SimConfig::new(raw.sim.t_max, raw.sim.record_every)?;
    let initial = initial::build_initial(&raw.initial, &model)?;
    Ok(BuiltConfig {
        raw,
        params,
        model,
        sim,
        initial,
    })
}

pub fn parse(text: &str, origin: &str) -> Result<RawConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::config(origin, e))
}

pub fn load(path: &Path) -> Result<BuiltConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(path.display().to_string(), e))?;
    build(parse(&text, &path.display().to_string())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "lambda": 1.0, "mu_s": 1.0,
        "strains": [
            {"name": "x", "mu": [[0.0, 8.0, 1.0]], "beta": [[0.0, 1.0, 3.0]]},
            {"name": "y", "mu": [[0.0, 8.0, 1.0]], "beta": [[0.0, 1.0, 1.4]]}
        ],
        "grid": {"a_max": 8.0, "da": 0.05},
        "sim": {"t_max": 50.0, "dt_lock": true, "record_every": 20},
        "initial": {"preset": "generic", "m_x": 0.1, "m_y": 0.1}
    }"#;

    #[test]
    fn parses_and_builds_example() {
        let built = build(parse(EXAMPLE, "inline").unwrap()).unwrap();
        assert_eq!(built.model.n_strains(), 2);
        assert!(built.model.strains[0].r0 > 1.0);
        assert_eq!(built.initial.s, 0.5);
        assert!(built.initial.mass(0, &built.model.grid) > 0.0);
    }

    #[test]
    fn rejects_unlocked_dt() {
        let cfg = EXAMPLE.replace("\"dt_lock\": true", "\"dt_lock\": false");
        assert!(build(parse(&cfg, "inline").unwrap()).is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_zero_beta() {
        let cfg = EXAMPLE.replace("\"lambda\": 1.0,", "\"lambda\": 1.0, \"bogus\": 3,");
        assert!(parse(&cfg, "inline").is_err());

        let cfg = EXAMPLE.replace("3.0", "0.0");
        assert!(build(parse(&cfg, "inline").unwrap()).is_err());
    }

    #[test]
    fn explicit_initial_roundtrip() {
        let cfg = EXAMPLE.replace(
            r#"{"preset": "generic", "m_x": 0.1, "m_y": 0.1}"#,
            r#"{"explicit": {"s0": 2.0, "densities": [[[0.0, 0.5, 0.4]], []]}}"#,
        );
        let built = build(parse(&cfg, "inline").unwrap()).unwrap();
        assert_eq!(built.initial.s, 2.0);
        // mass preserved exactly by cell averaging
        let got = built.initial.mass(0, &built.model.grid);
        assert!((got - 0.2).abs() < 1e-12, "mass {got}");
        assert!(built.initial.densities[1].iter().all(|v| *v == 0.0));
    }
}
