//! Numerical core for a competitive infection-age structured SI model.
//!
//! The model couples a susceptible scalar `S(t)` with one infected density
//! `x_k(t, a)` per strain, structured by infection age `a`:
//!
//! ```text
//! S'(t)            = Λ − μ_S S(t) − S(t) Σ_k ∫ β_k(a) x_k(t,a) da
//! ∂_t x_k + ∂_a x_k = −μ_k(a) x_k(t,a)
//! x_k(t, 0)        = S(t) ∫ β_k(a) x_k(t,a) da
//! ```
//!
//! This crate provides:
//! - domain types ([`AgeGrid`], [`RateFunction`], [`ModelParams`], [`State`]),
//! - survival probabilities, per-strain reproduction numbers and all
//!   closed-form equilibria (including the one-parameter family that appears
//!   when two reproduction numbers tie above one),
//! - a positivity-preserving integrator that transports densities exactly
//!   along characteristics ([`simulate`]),
//! - Lyapunov functional evaluation and monotonicity auditing ([`lyapunov`]),
//! - real-axis root scans of the linearized characteristic equations
//!   ([`spectral`]).
//!
//! All types are immutable after construction and all operations are pure, so
//! everything here can be shared freely across threads.

pub mod equilibrium;
pub mod error;
pub mod grid;
pub mod lyapunov;
pub mod model;
pub mod rate;
pub mod sim;
pub mod spectral;
pub mod state;

pub use equilibrium::{
    equilibria, Equilibrium, EquilibriumKind, EquilibriumSet, FamilyDescriptor, R0_TIE_RTOL,
};
pub use error::ModelError;
pub use grid::AgeGrid;
pub use model::{compute_r, compute_r0, survival, ModelGrid, ModelParams, StrainGrid, StrainParams};
pub use rate::{RateFunction, Segment};
pub use sim::{
    force_of_infection, project_alpha, simulate, step, AlphaProjection, Observables, SimConfig,
    Trajectory,
};
pub use state::State;
