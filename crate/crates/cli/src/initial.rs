//! Initial-state construction from config specs.
//!
//! Presets produce states that lie in the intended membership classes
//! exactly: "boundary" densities either vanish identically or sit on cells
//! entirely beyond the strain's transmission ages, so their force of
//! infection is zero to the last bit, now and forever.

use strainflow_core::{ModelError, ModelGrid, RateFunction, State};

use crate::config::{ExplicitInitial, InitialSpec, PresetInitial};
use crate::error::CliError;

/// Default susceptible level as a fraction of `Λ/μ_S`.
pub const DEFAULT_S_FRACTION: f64 = 0.5;
/// Default strain mass as a fraction of `Λ/μ_S`.
pub const DEFAULT_MASS_FRACTION: f64 = 0.1;

/// Density proportional to the survival curve, normalized to `mass`.
pub fn pi_shaped(model: &ModelGrid, strain: usize, mass: f64) -> Vec<f64> {
    let sg = &model.strains[strain];
    let total = sg.survival_mass(&model.grid);
    sg.survival.iter().map(|p| mass * p / total).collect()
}

/// Uniform density of total `mass` on the cells past the strain's last
/// transmitting cell: infection-age too old to ever transmit. Placement is
/// decided by the discrete transmission averages themselves (not by edge
/// geometry), so the resulting force of infection is zero to the last bit
/// for every breakpoint/grid alignment.
pub fn tail_uniform(model: &ModelGrid, strain: usize, mass: f64) -> Result<Vec<f64>, CliError> {
    let grid = &model.grid;
    let beta = &model.strains[strain].beta;
    let first = beta
        .iter()
        .rposition(|b| *b > 0.0)
        .map(|last| last + 1)
        .unwrap_or(0);
    if first >= grid.n_cells() {
        return Err(CliError::Model(ModelError::Validation(format!(
            "no cells beyond the transmission support of strain {strain} (a_max = {})",
            grid.a_max()
        ))));
    }
    let count = grid.n_cells() - first;
    let mut d = vec![0.0; grid.n_cells()];
    let value = mass / (count as f64 * grid.da());
    for v in &mut d[first..] {
        *v = value;
    }
    Ok(d)
}

fn require_two_strains(model: &ModelGrid) -> Result<(), CliError> {
    if model.n_strains() != 2 {
        return Err(CliError::Model(ModelError::Validation(format!(
            "initial presets are defined for two strains, model has {}",
            model.n_strains()
        ))));
    }
    Ok(())
}

fn explicit_state(spec: &ExplicitInitial, model: &ModelGrid) -> Result<State, CliError> {
    if spec.densities.len() != model.n_strains() {
        return Err(CliError::Model(ModelError::ShapeMismatch(format!(
            "explicit initial has {} density specs for {} strains",
            spec.densities.len(),
            model.n_strains()
        ))));
    }
    if !(spec.s0.is_finite() && spec.s0 >= 0.0) {
        return Err(CliError::Model(ModelError::Validation(format!(
            "initial s0 must be finite and >= 0, got {}",
            spec.s0
        ))));
    }
    let mut densities = Vec::with_capacity(spec.densities.len());
    for segs in &spec.densities {
        let rate = RateFunction::new(segs.iter().map(|s| (s[0], s[1], s[2])).collect())?;
        densities.push(rate.cell_averages(&model.grid));
    }
    Ok(State::new(spec.s0, densities))
}

pub fn build_initial(spec: &InitialSpec, model: &ModelGrid) -> Result<State, CliError> {
    let s_default = DEFAULT_S_FRACTION * model.disease_free_s();
    let m_default = DEFAULT_MASS_FRACTION * model.disease_free_s();
    match spec {
        InitialSpec::Explicit { explicit } => explicit_state(explicit, model),
        InitialSpec::Preset(preset) => {
            require_two_strains(model)?;
            let state = match preset {
                PresetInitial::BoundaryX { s0, m_y } => State::new(
                    s0.unwrap_or(s_default),
                    vec![
                        vec![0.0; model.grid.n_cells()],
                        pi_shaped(model, 1, m_y.unwrap_or(m_default)),
                    ],
                ),
                PresetInitial::BoundaryY { s0, m_x } => State::new(
                    s0.unwrap_or(s_default),
                    vec![
                        pi_shaped(model, 0, m_x.unwrap_or(m_default)),
                        vec![0.0; model.grid.n_cells()],
                    ],
                ),
                PresetInitial::BoundaryBoth { s0, m_x, m_y } => State::new(
                    s0.unwrap_or(s_default),
                    vec![
                        tail_uniform(model, 0, m_x.unwrap_or(m_default))?,
                        tail_uniform(model, 1, m_y.unwrap_or(m_default))?,
                    ],
                ),
                PresetInitial::PerturbedE0 { delta } => {
                    if !(delta.is_finite() && *delta > 0.0) {
                        return Err(CliError::Model(ModelError::Validation(format!(
                            "perturbed_e0 requires delta > 0, got {delta}"
                        ))));
                    }
                    let s_star = model.disease_free_s();
                    State::new(
                        s_star * (1.0 + delta),
                        vec![
                            pi_shaped(model, 0, delta * s_star),
                            pi_shaped(model, 1, delta * s_star),
                        ],
                    )
                }
                PresetInitial::Generic { s0, m_x, m_y } => State::new(
                    s0.unwrap_or(s_default),
                    vec![
                        pi_shaped(model, 0, m_x.unwrap_or(m_default)),
                        pi_shaped(model, 1, m_y.unwrap_or(m_default)),
                    ],
                ),
            };
            state.validate(&model.grid)?;
            Ok(state)
        }
    }
}
