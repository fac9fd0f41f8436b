use thiserror::Error;

/// Errors produced by model construction, integration and analysis.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// A construction invariant was violated; the message names it.
    #[error("validation: {0}")]
    Validation(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("state contains NaN or infinite components")]
    NonFiniteState,

    /// The blow-up guard tripped. Solutions of the model are bounded, so this
    /// signals a scheme bug rather than genuine dynamics.
    #[error("blow-up guard: {observable} = {value:e} exceeds 1e12 at t = {t}")]
    BlowUp {
        t: f64,
        observable: String,
        value: f64,
    },

    #[error("g(x) = x - ln x - 1 requires x > 0, got {0}")]
    GDomain(f64),

    #[error("susceptible component must be positive, got {0}")]
    NonpositiveSusceptible(f64),

    #[error("strain {strain} has r = 0 (no transmission); weights undefined")]
    ZeroReproduction { strain: usize },

    /// The state is outside the functional's positivity domain. This is not a
    /// numerical failure: finite-time trajectories may legitimately graze zero
    /// before entering the domain where the endemic functional is defined.
    #[error("Lyapunov domain: strain {strain} density vanishes in cell {cell} where the equilibrium weight is positive")]
    LyapunovDomain { strain: usize, cell: usize },

    #[error("Laplace transform requires lambda > -mu0 = {min:e}, got {lambda:e}")]
    TransformDomain { lambda: f64, min: f64 },

    #[error("root bracketing failed: {0}")]
    BracketFailure(String),

    /// The requested quantity is only defined in a different parameter regime.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
}

impl ModelError {
    pub fn validation(msg: impl Into<String>) -> Self {
        ModelError::Validation(msg.into())
    }
}
