use crate::error::ModelError;
use crate::grid::AgeGrid;
use crate::rate::RateFunction;

/// Per-strain rates: age-dependent mortality `mu` and transmission `beta`.
///
/// `beta` must not vanish identically and its positive part must be a single
/// interval `[β̲, β̄)`; `mu` must keep the derived mortality floor positive,
/// which is checked once a grid is attached (see [`ModelParams::on_grid`]).
#[derive(Debug, Clone)]
pub struct StrainParams {
    pub name: String,
    pub mu: RateFunction,
    pub beta: RateFunction,
}

impl StrainParams {
    pub fn new(
        name: impl Into<String>,
        mu: RateFunction,
        beta: RateFunction,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if beta.is_identically_zero() {
            return Err(ModelError::validation(format!(
                "strain '{name}': transmission rate must not vanish identically"
            )));
        }
        if beta.support_interval().is_none() {
            return Err(ModelError::validation(format!(
                "strain '{name}': transmission support must be a single interval [lo, hi)"
            )));
        }
        Ok(StrainParams { name, mu, beta })
    }

    /// Upper endpoint β̄ of the transmission support.
    pub fn beta_upper(&self) -> f64 {
        self.beta.support_interval().expect("validated support").1
    }
}

/// Demographic constants plus the list of strains. `N = 2` is the fully
/// analyzed case; the integrator and equilibria handle any `N >= 1`.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub lambda: f64,
    pub mu_s: f64,
    pub strains: Vec<StrainParams>,
}

impl ModelParams {
    pub fn new(lambda: f64, mu_s: f64, strains: Vec<StrainParams>) -> Result<Self, ModelError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ModelError::validation(format!(
                "recruitment flux must satisfy lambda > 0, got {lambda}"
            )));
        }
        if !(mu_s.is_finite() && mu_s > 0.0) {
            return Err(ModelError::validation(format!(
                "susceptible mortality must satisfy mu_s > 0, got {mu_s}"
            )));
        }
        if strains.is_empty() {
            return Err(ModelError::validation(
                "model needs at least one strain".to_string(),
            ));
        }
        Ok(ModelParams {
            lambda,
            mu_s,
            strains,
        })
    }

    pub fn n_strains(&self) -> usize {
        self.strains.len()
    }

    /// Disease-free susceptible level `Λ/μ_S`.
    pub fn disease_free_s(&self) -> f64 {
        self.lambda / self.mu_s
    }

    /// Derived mortality floor: minimum of `μ_S` and every cell-averaged
    /// strain mortality on the grid.
    pub fn mu0_on(&self, grid: &AgeGrid) -> f64 {
        let mut mu0 = self.mu_s;
        for strain in &self.strains {
            for v in strain.mu.cell_averages(grid) {
                mu0 = mu0.min(v);
            }
        }
        mu0
    }

    /// Discretizes the model on `grid`, validating the grid/model coupling:
    /// the mortality floor must be positive and the truncation age must leave
    /// `5/mu0` of headroom past every transmission support (neglected tail
    /// mass below `e^{-5}` relative).
    pub fn on_grid(&self, grid: &AgeGrid) -> Result<ModelGrid, ModelError> {
        let mu0 = self.mu0_on(grid);
        if mu0 <= 0.0 {
            return Err(ModelError::validation(
                "mortality floor mu0 must be positive: every strain's mu must cover [0, a_max] with positive values".to_string(),
            ));
        }
        let mut strains = Vec::with_capacity(self.strains.len());
        for (k, sp) in self.strains.iter().enumerate() {
            let beta_upper = sp.beta_upper();
            let required = beta_upper + 5.0 / mu0;
            if grid.a_max() < required - 1e-12 {
                return Err(ModelError::validation(format!(
                    "strain '{}': a_max = {} must be >= beta_upper + 5/mu0 = {}",
                    sp.name,
                    grid.a_max(),
                    required
                )));
            }
            let mu = sp.mu.cell_averages(grid);
            let beta = sp.beta.cell_averages(grid);
            let pi = survival(&sp.mu, grid);
            let r = compute_r(&sp.beta, &pi, grid);
            if r <= 0.0 {
                return Err(ModelError::validation(format!(
                    "strain '{}': reproduction integral r must be positive, got {r}",
                    sp.name
                )));
            }
            strains.push(StrainGrid {
                name: sp.name.clone(),
                mu,
                beta,
                survival: pi,
                r,
                r0: self.lambda * r / self.mu_s,
                beta_support: sp.beta.support_interval().expect("validated support"),
                k,
            });
        }
        Ok(ModelGrid {
            lambda: self.lambda,
            mu_s: self.mu_s,
            grid: *grid,
            mu0,
            strains,
        })
    }
}

/// Survival probabilities `π(a_i) = exp(-∫_0^{a_i} μ)` evaluated with the
/// midpoint cumulative integral of the cell-averaged mortality:
/// `π(a_i) = exp(-Σ_{j<i} μ_j·da − μ_i·da/2)`.
pub fn survival(mu: &RateFunction, grid: &AgeGrid) -> Vec<f64> {
    let avgs = mu.cell_averages(grid);
    let da = grid.da();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.n_cells());
    for &m in &avgs {
        out.push((-(acc + 0.5 * m * da)).exp());
        acc += m * da;
    }
    out
}

/// Reproduction integral `r = ∫ β(a) π(a) da` by midpoint quadrature on the
/// cell-averaged transmission rate.
pub fn compute_r(beta: &RateFunction, pi: &[f64], grid: &AgeGrid) -> f64 {
    let avgs = beta.cell_averages(grid);
    debug_assert_eq!(pi.len(), avgs.len());
    let da = grid.da();
    avgs.iter().zip(pi).map(|(b, p)| b * p * da).sum()
}

/// Per-strain basic reproduction numbers `R0_k = Λ r_k / μ_S`.
pub fn compute_r0(params: &ModelParams, grid: &AgeGrid) -> Vec<f64> {
    params
        .strains
        .iter()
        .map(|sp| {
            let pi = survival(&sp.mu, grid);
            params.lambda * compute_r(&sp.beta, &pi, grid) / params.mu_s
        })
        .collect()
}

/// One strain discretized on the grid: cell-averaged rates, survival curve,
/// reproduction integral `r` and reproduction number `R0`.
#[derive(Debug, Clone)]
pub struct StrainGrid {
    pub name: String,
    /// Cell-averaged mortality.
    pub mu: Vec<f64>,
    /// Cell-averaged transmission rate.
    pub beta: Vec<f64>,
    /// Survival probability at cell centers.
    pub survival: Vec<f64>,
    pub r: f64,
    pub r0: f64,
    /// Transmission support `[β̲, β̄)` of the underlying rate.
    pub beta_support: (f64, f64),
    /// Index of this strain in the model.
    pub k: usize,
}

impl StrainGrid {
    /// Quadrature of the survival curve, `∫ π da`.
    pub fn survival_mass(&self, grid: &AgeGrid) -> f64 {
        self.survival.iter().sum::<f64>() * grid.da()
    }
}

/// A validated model/grid pair with all per-strain discrete data cached.
/// This is the workhorse handle taken by the integrator and the analyses.
#[derive(Debug, Clone)]
pub struct ModelGrid {
    pub lambda: f64,
    pub mu_s: f64,
    pub grid: AgeGrid,
    /// Derived mortality floor `min{μ_S, μ_k(a_i)}`.
    pub mu0: f64,
    pub strains: Vec<StrainGrid>,
}

impl ModelGrid {
    pub fn n_strains(&self) -> usize {
        self.strains.len()
    }

    pub fn disease_free_s(&self) -> f64 {
        self.lambda / self.mu_s
    }

    pub fn r0_values(&self) -> Vec<f64> {
        self.strains.iter().map(|s| s.r0).collect()
    }

    pub fn max_r0(&self) -> f64 {
        self.strains.iter().fold(f64::MIN, |m, s| m.max(s.r0))
    }
}
