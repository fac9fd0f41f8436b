//! Time integration along characteristics.
//!
//! The step is an exact transcription of the semiflow: with the force of
//! infection frozen over one step, the susceptible ODE is solved exactly,
//! densities are transported one cell per step (`dt = da` locked, no
//! numerical diffusion) with the exact survival factor, and the renewal
//! boundary condition deposits the newborn cohort in cell 0 aged half a
//! cell. Positivity is unconditional by construction.

use crate::error::ModelError;
use crate::model::ModelGrid;
use crate::state::State;

/// Value above which any observable aborts the run. Solutions are bounded by
/// `max(total(0), Λ/μ0)`, far below this in any sane configuration, so
/// tripping the guard signals a scheme bug.
pub const BLOWUP_GUARD: f64 = 1e12;

/// Integration horizon and trajectory thinning. The time step itself is
/// locked to the grid cell width (characteristics alignment).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub t_max: f64,
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(t_max: f64, record_every: usize) -> Result<Self, ModelError> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(ModelError::validation(format!(
                "horizon must satisfy t_max > 0, got {t_max}"
            )));
        }
        if record_every < 1 {
            return Err(ModelError::validation(
                "record_every must be >= 1".to_string(),
            ));
        }
        Ok(SimConfig {
            t_max,
            record_every,
        })
    }
}

/// Derived quantities stored alongside each recorded state.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub s: f64,
    /// Per-strain mass `∫ x_k da`.
    pub masses: Vec<f64>,
    /// Per-strain force of infection `B_k = ∫ β_k x_k da`.
    pub foi: Vec<f64>,
}

/// Recorded trajectory: strictly increasing times spaced `record_every·dt`,
/// the matching states, and redundant observables (recomputable from the
/// states).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub record_every: usize,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub observables: Vec<Observables>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &State {
        self.states.last().expect("trajectory never empty")
    }
}

/// Force of infection of one strain: `B_k = Σ_i β_k(a_i) x_k(a_i) da`.
pub fn force_of_infection(state: &State, strain: usize, model: &ModelGrid) -> f64 {
    let da = model.grid.da();
    model.strains[strain]
        .beta
        .iter()
        .zip(&state.densities[strain])
        .map(|(b, x)| b * x * da)
        .sum()
}

fn observables_of(state: &State, model: &ModelGrid) -> Observables {
    Observables {
        s: state.s,
        masses: (0..model.n_strains())
            .map(|k| state.mass(k, &model.grid))
            .collect(),
        foi: (0..model.n_strains())
            .map(|k| force_of_infection(state, k, model))
            .collect(),
    }
}

/// Precomputed per-strain survival factors for one step. Transport from cell
/// `i` to `i+1` decays by `exp(-(μ_i+μ_{i+1})·dt/2)` (the mortality evaluated
/// at the midpoint of the traversed interval, i.e. the shared cell edge);
/// the newborn cohort decays by `exp(-μ_0·dt/2)` (half a cell of aging).
struct StepKernel {
    transport: Vec<Vec<f64>>,
    renewal: Vec<f64>,
}

impl StepKernel {
    fn new(model: &ModelGrid) -> Self {
        let dt = model.grid.da();
        let transport = model
            .strains
            .iter()
            .map(|sg| {
                sg.mu
                    .windows(2)
                    .map(|w| (-0.5 * (w[0] + w[1]) * dt).exp())
                    .collect()
            })
            .collect();
        let renewal = model
            .strains
            .iter()
            .map(|sg| (-0.5 * sg.mu[0] * dt).exp())
            .collect();
        StepKernel { transport, renewal }
    }

    fn step_into(&self, model: &ModelGrid, cur: &State, next: &mut State) {
        let dt = model.grid.da();
        let n = model.grid.n_cells();

        // force of infection frozen over the step
        let foi: Vec<f64> = (0..model.n_strains())
            .map(|k| force_of_infection(cur, k, model))
            .collect();
        let b_total: f64 = foi.iter().sum();

        // exact solve of S' = Λ - (μ_S + B) S
        let rate = model.mu_s + b_total;
        let target = model.lambda / rate;
        next.s = target + (cur.s - target) * (-rate * dt).exp();

        for (k, foi_k) in foi.iter().enumerate() {
            let (old, new) = (&cur.densities[k], &mut next.densities[k]);
            let factors = &self.transport[k];
            // transport; content of the last cell exits the domain
            for i in (1..n).rev() {
                new[i] = old[i - 1] * factors[i - 1];
            }
            // renewal boundary condition with the pre-step S and B
            new[0] = cur.s * foi_k * self.renewal[k];
        }
    }
}

/// One integration step of size `dt`, which must equal the grid cell width.
pub fn step(state: &State, model: &ModelGrid, dt: f64) -> Result<State, ModelError> {
    if (dt - model.grid.da()).abs() > 1e-12 * model.grid.da() {
        return Err(ModelError::validation(format!(
            "time step is locked to the grid cell width: dt = {dt}, da = {}",
            model.grid.da()
        )));
    }
    state.validate(&model.grid)?;
    let kernel = StepKernel::new(model);
    let mut next = state.clone();
    kernel.step_into(model, state, &mut next);
    Ok(next)
}

fn check_guard(obs: &Observables, t: f64) -> Result<(), ModelError> {
    let check = |name: &str, v: f64| -> Result<(), ModelError> {
        if !(v.abs() <= BLOWUP_GUARD) {
            return Err(ModelError::BlowUp {
                t,
                observable: name.to_string(),
                value: v,
            });
        }
        Ok(())
    };
    check("S", obs.s)?;
    for (k, m) in obs.masses.iter().enumerate() {
        check(&format!("mass[{k}]"), *m)?;
    }
    for (k, b) in obs.foi.iter().enumerate() {
        check(&format!("foi[{k}]"), *b)?;
    }
    Ok(())
}

/// Integrates from `z0` over `[0, t_max]`, recording every
/// `record_every`-th state (the initial state is always recorded).
/// Deterministic: identical inputs produce bit-identical trajectories.
pub fn simulate(z0: &State, model: &ModelGrid, cfg: &SimConfig) -> Result<Trajectory, ModelError> {
    z0.validate(&model.grid)?;
    let dt = model.grid.da();
    if cfg.t_max < dt {
        return Err(ModelError::validation(format!(
            "t_max = {} is below one step dt = {dt}",
            cfg.t_max
        )));
    }
    let n_steps = (cfg.t_max / dt).round().max(1.0) as u64;
    let kernel = StepKernel::new(model);

    let mut traj = Trajectory {
        dt,
        record_every: cfg.record_every,
        times: Vec::new(),
        states: Vec::new(),
        observables: Vec::new(),
    };
    let record =
        |j: u64, state: &State, traj: &mut Trajectory| -> Result<(), ModelError> {
            let obs = observables_of(state, model);
            check_guard(&obs, j as f64 * dt)?;
            traj.times.push(j as f64 * dt);
            traj.states.push(state.clone());
            traj.observables.push(obs);
            Ok(())
        };

    let mut cur = z0.clone();
    let mut next = z0.clone();
    record(0, &cur, &mut traj)?;
    for j in 1..=n_steps {
        kernel.step_into(model, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if j % cfg.record_every as u64 == 0 {
            record(j, &cur, &mut traj)?;
        }
    }
    Ok(traj)
}

/// Projection of a state near the tie-case family onto its parameter:
/// `α̂_x = 2 − mass_x·r_x/(μ_S(R0−1)·∫π_x da)` and symmetrically
/// `α̂_y = 1 + …`; the two estimates agree exactly on family members.
#[derive(Debug, Clone, Copy)]
pub struct AlphaProjection {
    /// Mean of the two per-strain estimates, clamped to `[1, 2]`.
    pub alpha: f64,
    /// `|α̂_x − α̂_y|`; small iff the state is consistent with the family.
    pub score: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
}

pub fn project_alpha(state: &State, model: &ModelGrid) -> Result<AlphaProjection, ModelError> {
    if model.n_strains() != 2 {
        return Err(ModelError::RegimeMismatch(
            "family projection is defined for exactly two strains".to_string(),
        ));
    }
    let (sx, sy) = (&model.strains[0], &model.strains[1]);
    if !(crate::equilibrium::r0_tied(sx.r0, sy.r0) && sx.r0 > 1.0) {
        return Err(ModelError::RegimeMismatch(format!(
            "family projection requires R0 values tied above one, got {} and {}",
            sx.r0, sy.r0
        )));
    }
    let scale_x = model.mu_s * (sx.r0 - 1.0) / sx.r * sx.survival_mass(&model.grid);
    let scale_y = model.mu_s * (sy.r0 - 1.0) / sy.r * sy.survival_mass(&model.grid);
    let alpha_x = 2.0 - state.mass(0, &model.grid) / scale_x;
    let alpha_y = 1.0 + state.mass(1, &model.grid) / scale_y;
    Ok(AlphaProjection {
        alpha: (0.5 * (alpha_x + alpha_y)).clamp(1.0, 2.0),
        score: (alpha_x - alpha_y).abs(),
        alpha_x,
        alpha_y,
    })
}
