//! Real-axis root analysis of the linearized characteristic equations.
//!
//! Exponential perturbations `e^{λt}` around an equilibrium reduce the
//! linearization to scalar equations built from the Laplace transform
//! `f(λ) = S̄ ∫ β(a) π(a) e^{-λa} da`, which is strictly decreasing in `λ`.
//! Around the disease-free state each strain contributes the factor
//! `f(λ) = 1` with `f(0) = R0`; around an endemic state the resident strain
//! contributes `f(λ)·(λ+μ_S)/(λ+μ_S R0) = 1` and every other strain an
//! invasion factor with `f(0) = r_other/r_resident`. Only real roots are
//! scanned; complex roots with nonnegative real part are excluded
//! analytically in the stable regimes.

use crate::equilibrium::r0_tied;
use crate::error::ModelError;
use crate::grid::AgeGrid;
use crate::model::ModelGrid;

/// Tolerance at which `f(0)` counts as exactly one (critical root at the
/// origin).
const CRITICAL_TOL: f64 = 1e-9;

/// Extra factor `(λ+μ_S)/(λ+μ_S R0)` applied to the transform for the
/// resident strain of an endemic equilibrium.
#[derive(Debug, Clone, Copy)]
pub struct ResidentPole {
    pub mu_s: f64,
    pub r0: f64,
}

/// One scalar root problem: find real `λ` with `value(λ) = 1`.
#[derive(Debug, Clone)]
pub struct CharacteristicProblem {
    pub label: String,
    /// Equilibrium susceptible level S̄.
    pub s_bar: f64,
    /// Cell-averaged transmission rate of the strain under test.
    pub beta: Vec<f64>,
    /// Survival curve of the strain under test.
    pub pi: Vec<f64>,
    pub grid: AgeGrid,
    /// Lower bound of the transform domain (scan stays above `-mu0`).
    pub mu0: f64,
    /// Present for the resident strain of an endemic equilibrium.
    pub resident_pole: Option<ResidentPole>,
}

impl CharacteristicProblem {
    pub fn from_parts(
        label: impl Into<String>,
        s_bar: f64,
        beta: Vec<f64>,
        pi: Vec<f64>,
        grid: AgeGrid,
        mu0: f64,
        resident_pole: Option<ResidentPole>,
    ) -> Result<Self, ModelError> {
        if beta.len() != grid.n_cells() || pi.len() != grid.n_cells() {
            return Err(ModelError::ShapeMismatch(format!(
                "transform arrays of lengths {} and {} on a {}-cell grid",
                beta.len(),
                pi.len(),
                grid.n_cells()
            )));
        }
        if !(s_bar > 0.0) {
            return Err(ModelError::validation(format!(
                "equilibrium susceptible level must be positive, got {s_bar}"
            )));
        }
        if !(mu0 > 0.0) {
            return Err(ModelError::validation(format!(
                "mortality floor must be positive, got {mu0}"
            )));
        }
        Ok(CharacteristicProblem {
            label: label.into(),
            s_bar,
            beta,
            pi,
            grid,
            mu0,
            resident_pole,
        })
    }

    /// Invasion factor of `strain` around the disease-free equilibrium;
    /// `f(0) = R0_strain`.
    pub fn about_disease_free(model: &ModelGrid, strain: usize) -> Self {
        let sg = &model.strains[strain];
        CharacteristicProblem {
            label: format!("E0/{}", sg.name),
            s_bar: model.disease_free_s(),
            beta: sg.beta.clone(),
            pi: sg.survival.clone(),
            grid: model.grid,
            mu0: model.mu0,
            resident_pole: None,
        }
    }

    /// Resident-strain factor around the endemic equilibrium of `strain`
    /// (requires `R0 > 1`).
    pub fn endemic_resident(model: &ModelGrid, strain: usize) -> Result<Self, ModelError> {
        let sg = &model.strains[strain];
        if sg.r0 <= 1.0 {
            return Err(ModelError::RegimeMismatch(format!(
                "strain '{}' has R0 = {} <= 1: no endemic equilibrium",
                sg.name, sg.r0
            )));
        }
        Ok(CharacteristicProblem {
            label: format!("E{}/{} (resident)", strain + 1, sg.name),
            s_bar: 1.0 / sg.r,
            beta: sg.beta.clone(),
            pi: sg.survival.clone(),
            grid: model.grid,
            mu0: model.mu0,
            resident_pole: Some(ResidentPole {
                mu_s: model.mu_s,
                r0: sg.r0,
            }),
        })
    }

    /// Invasion factor of `probe` against the endemic equilibrium of
    /// `resident`; `f(0) = r_probe/r_resident`.
    pub fn endemic_invasion(
        model: &ModelGrid,
        resident: usize,
        probe: usize,
    ) -> Result<Self, ModelError> {
        let res = &model.strains[resident];
        if res.r0 <= 1.0 {
            return Err(ModelError::RegimeMismatch(format!(
                "strain '{}' has R0 = {} <= 1: no endemic equilibrium",
                res.name, res.r0
            )));
        }
        let pg = &model.strains[probe];
        Ok(CharacteristicProblem {
            label: format!("E{}/{} (invasion)", resident + 1, pg.name),
            s_bar: 1.0 / res.r,
            beta: pg.beta.clone(),
            pi: pg.survival.clone(),
            grid: model.grid,
            mu0: model.mu0,
            resident_pole: None,
        })
    }
}

/// `f(λ) = S̄ Σ_i β(a_i) π(a_i) e^{-λ a_i} da`; strictly decreasing in `λ`,
/// defined for `λ > -mu0`.
pub fn laplace_transform(problem: &CharacteristicProblem, lambda: f64) -> Result<f64, ModelError> {
    if lambda <= -problem.mu0 {
        return Err(ModelError::TransformDomain {
            lambda,
            min: -problem.mu0,
        });
    }
    let da = problem.grid.da();
    Ok(problem.s_bar
        * problem
            .beta
            .iter()
            .zip(&problem.pi)
            .enumerate()
            .map(|(i, (b, p))| b * p * (-lambda * problem.grid.center(i)).exp() * da)
            .sum::<f64>())
}

/// The function whose unit level set is the characteristic equation: the
/// plain transform, or the resident form `f(λ)(λ+μ_S)/(λ+μ_S R0)`.
pub fn root_function(problem: &CharacteristicProblem, lambda: f64) -> Result<f64, ModelError> {
    let f = laplace_transform(problem, lambda)?;
    match problem.resident_pole {
        None => Ok(f),
        Some(p) => Ok(f * (lambda + p.mu_s) / (lambda + p.mu_s * p.r0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootVerdict {
    /// A positive real root exists.
    Unstable,
    /// Root exactly at the origin (within tolerance on `f(0)`).
    Critical,
    /// `f(0) < 1` and a negative real root was found in `(-mu0, 0)`.
    StableModeFound,
    /// `f(0) < 1` and no real root exists above `-mu0`.
    StableNoRealRoot,
}

impl RootVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(
            self,
            RootVerdict::StableModeFound | RootVerdict::StableNoRealRoot
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            RootVerdict::Unstable => "unstable",
            RootVerdict::Critical => "critical",
            RootVerdict::StableModeFound => "stable (mode found)",
            RootVerdict::StableNoRealRoot => "stable (no real root)",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootScan {
    pub lambda: Option<f64>,
    pub verdict: RootVerdict,
    /// `|value(λ*) − 1|` when a root was located.
    pub residual: Option<f64>,
}

fn bisect(
    problem: &CharacteristicProblem,
    mut above: f64,
    mut below: f64,
) -> Result<(f64, f64), ModelError> {
    // invariant: value(above) >= 1 >= value(below)
    let mut mid = 0.5 * (above + below);
    for _ in 0..200 {
        mid = 0.5 * (above + below);
        let v = root_function(problem, mid)?;
        if (v - 1.0).abs() < 1e-13 {
            return Ok((mid, (v - 1.0).abs()));
        }
        if v > 1.0 {
            above = mid;
        } else {
            below = mid;
        }
        if (above - below).abs() < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    let v = root_function(problem, mid)?;
    Ok((mid, (v - 1.0).abs()))
}

/// Locates the dominant real root of `value(λ) = 1`.
///
/// With `value(0) > 1` the (decreasing) function is bracketed by doubling and
/// bisected to a positive root: verdict unstable. With `value(0) < 1` the
/// scan covers `(-mu0(1-1e-6), 0]`: either a negative root exists (a stable
/// mode) or no real root lies above `-mu0`. `value(0) = 1` within `1e-9` is
/// critical.
pub fn dominant_real_root(problem: &CharacteristicProblem) -> Result<RootScan, ModelError> {
    let at0 = root_function(problem, 0.0)?;
    if (at0 - 1.0).abs() <= CRITICAL_TOL {
        return Ok(RootScan {
            lambda: Some(0.0),
            verdict: RootVerdict::Critical,
            residual: Some((at0 - 1.0).abs()),
        });
    }
    if at0 > 1.0 {
        let mut hi = problem.mu0.max(1.0);
        while root_function(problem, hi)? >= 1.0 {
            hi *= 2.0;
            if hi > 1e9 {
                return Err(ModelError::BracketFailure(format!(
                    "{}: no upper bracket below 1e9",
                    problem.label
                )));
            }
        }
        let (lambda, residual) = bisect(problem, 0.0, hi)?;
        return Ok(RootScan {
            lambda: Some(lambda),
            verdict: RootVerdict::Unstable,
            residual: Some(residual),
        });
    }
    // value(0) < 1: look for a stable mode in (-mu0, 0]
    let lo = -problem.mu0 * (1.0 - 1e-6);
    let at_lo = root_function(problem, lo)?;
    if at_lo >= 1.0 {
        let (lambda, residual) = bisect(problem, lo, 0.0)?;
        Ok(RootScan {
            lambda: Some(lambda),
            verdict: RootVerdict::StableModeFound,
            residual: Some(residual),
        })
    } else {
        Ok(RootScan {
            lambda: None,
            verdict: RootVerdict::StableNoRealRoot,
            residual: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    Unstable,
    Critical,
    /// Tie case: every member of the equilibrium family fails to be locally
    /// asymptotically stable (neighbouring members do not return), yet the
    /// family as a set is attractive.
    FamilyNotLas,
}

impl StabilityClass {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityClass::Stable => "L.A.S.",
            StabilityClass::Unstable => "unstable",
            StabilityClass::Critical => "critical",
            StabilityClass::FamilyNotLas => "family - not L.A.S.",
        }
    }
}

/// One factor's scan inside an equilibrium verdict; the factors are listed
/// separately rather than merged.
#[derive(Debug, Clone)]
pub struct FactorReport {
    pub label: String,
    pub scan: RootScan,
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub label: String,
    pub class: StabilityClass,
    pub factors: Vec<FactorReport>,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub entries: Vec<EquilibriumReport>,
}

fn aggregate(factors: &[FactorReport]) -> StabilityClass {
    if factors
        .iter()
        .any(|f| f.scan.verdict == RootVerdict::Unstable)
    {
        StabilityClass::Unstable
    } else if factors
        .iter()
        .any(|f| f.scan.verdict == RootVerdict::Critical)
    {
        StabilityClass::Critical
    } else {
        StabilityClass::Stable
    }
}

fn scan_factors(problems: Vec<CharacteristicProblem>) -> Result<Vec<FactorReport>, ModelError> {
    problems
        .into_iter()
        .map(|p| {
            let scan = dominant_real_root(&p)?;
            Ok(FactorReport {
                label: p.label,
                scan,
            })
        })
        .collect()
}

/// Local-stability verdicts for every equilibrium of a two-strain model:
/// `E0` is stable iff `max R0 < 1`; the endemic state of the strain with the
/// strictly larger `R0 > 1` is stable while the other one is invadable; a
/// tie above one yields the family verdict.
pub fn stability_report(model: &ModelGrid) -> Result<StabilityReport, ModelError> {
    if model.n_strains() != 2 {
        return Err(ModelError::validation(format!(
            "stability report is defined for exactly two strains, got {}",
            model.n_strains()
        )));
    }
    let mut entries = Vec::new();

    let e0_factors = scan_factors(vec![
        CharacteristicProblem::about_disease_free(model, 0),
        CharacteristicProblem::about_disease_free(model, 1),
    ])?;
    entries.push(EquilibriumReport {
        label: "E0".to_string(),
        class: aggregate(&e0_factors),
        factors: e0_factors,
    });

    let (r0x, r0y) = (model.strains[0].r0, model.strains[1].r0);
    if r0_tied(r0x, r0y) && r0x > 1.0 {
        let factors = scan_factors(vec![
            CharacteristicProblem::endemic_resident(model, 0)?,
            CharacteristicProblem::endemic_invasion(model, 0, 1)?,
            CharacteristicProblem::endemic_resident(model, 1)?,
            CharacteristicProblem::endemic_invasion(model, 1, 0)?,
        ])?;
        entries.push(EquilibriumReport {
            label: "{Ealpha, alpha in [1,2]}".to_string(),
            class: StabilityClass::FamilyNotLas,
            factors,
        });
    } else {
        for k in 0..2 {
            if model.strains[k].r0 > 1.0 {
                let factors = scan_factors(vec![
                    CharacteristicProblem::endemic_resident(model, k)?,
                    CharacteristicProblem::endemic_invasion(model, k, 1 - k)?,
                ])?;
                entries.push(EquilibriumReport {
                    label: format!("E{}", k + 1),
                    class: aggregate(&factors),
                    factors,
                });
            }
        }
    }
    Ok(StabilityReport { entries })
}
