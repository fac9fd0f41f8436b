//! Regime rows, initial-condition classes, and ω-limit classification.

use strainflow_core::{
    equilibria, AgeGrid, EquilibriumKind, ModelError, ModelGrid, State, Trajectory,
};

use crate::error::CliError;

/// Default discrete-L¹ convergence tolerance.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Default trailing window length (recorded points).
pub const TRAILING_WINDOW: usize = 10;

/// The six mutually exclusive parameter regimes of the two-strain model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeRow {
    /// `max{R0x, R0y} <= 1`
    SubThreshold,
    /// `R0x > 1 >= R0y`
    XOnly,
    /// `R0y > 1 >= R0x`
    YOnly,
    /// `R0x > R0y > 1`
    XDominant,
    /// `R0y > R0x > 1`
    YDominant,
    /// `R0x = R0y > 1` (relative tolerance 1e-9)
    Tie,
}

impl RegimeRow {
    pub fn label(&self) -> &'static str {
        match self {
            RegimeRow::SubThreshold => "R0max<=1",
            RegimeRow::XOnly => "R0x>1>=R0y",
            RegimeRow::YOnly => "R0y>1>=R0x",
            RegimeRow::XDominant => "R0x>R0y>1",
            RegimeRow::YDominant => "R0y>R0x>1",
            RegimeRow::Tie => "R0x=R0y>1",
        }
    }

    pub fn all() -> [RegimeRow; 6] {
        [
            RegimeRow::SubThreshold,
            RegimeRow::XOnly,
            RegimeRow::YOnly,
            RegimeRow::XDominant,
            RegimeRow::YDominant,
            RegimeRow::Tie,
        ]
    }
}

fn require_two_strains(model: &ModelGrid) -> Result<(), CliError> {
    if model.n_strains() != 2 {
        return Err(CliError::Model(ModelError::Validation(format!(
            "classification is defined for two strains, model has {}",
            model.n_strains()
        ))));
    }
    Ok(())
}

pub fn classify_regime(model: &ModelGrid) -> Result<RegimeRow, CliError> {
    require_two_strains(model)?;
    let (r0x, r0y) = (model.strains[0].r0, model.strains[1].r0);
    Ok(if strainflow_core::equilibrium::r0_tied(r0x, r0y) && r0x > 1.0 {
        RegimeRow::Tie
    } else if r0x.max(r0y) <= 1.0 {
        RegimeRow::SubThreshold
    } else if r0x > 1.0 && r0y <= 1.0 {
        RegimeRow::XOnly
    } else if r0y > 1.0 && r0x <= 1.0 {
        RegimeRow::YOnly
    } else if r0x > r0y {
        RegimeRow::XDominant
    } else {
        RegimeRow::YDominant
    })
}

/// Membership classes of the initial condition with respect to the sets
/// `S_x`, `S_y` (density mass at infectious ages).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcClass {
    /// `∂S_x ∩ ∂S_y`
    BoundaryBoth,
    /// `S_x ∩ ∂S_y`
    InteriorXBoundaryY,
    /// `∂S_x ∩ S_y`
    BoundaryXInteriorY,
    /// `S_x ∩ S_y`
    InteriorBoth,
}

impl IcClass {
    pub fn label(&self) -> &'static str {
        match self {
            IcClass::BoundaryBoth => "dSx&dSy",
            IcClass::InteriorXBoundaryY => "Sx&dSy",
            IcClass::BoundaryXInteriorY => "dSx&Sy",
            IcClass::InteriorBoth => "Sx&Sy",
        }
    }

    pub fn all() -> [IcClass; 4] {
        [
            IcClass::BoundaryBoth,
            IcClass::InteriorXBoundaryY,
            IcClass::BoundaryXInteriorY,
            IcClass::InteriorBoth,
        ]
    }
}

/// Quadrature of the stored density over `[0, β̄_k)`: exact zero test, since
/// densities are stored exactly.
fn infectious_age_mass(state: &State, strain: usize, model: &ModelGrid) -> f64 {
    let grid: &AgeGrid = &model.grid;
    let beta_upper = model.strains[strain].beta_support.1;
    let mut sum = 0.0;
    for (i, v) in state.densities[strain].iter().enumerate() {
        let overlap = (beta_upper.min(grid.upper_edge(i)) - grid.lower_edge(i)).max(0.0);
        if overlap > 0.0 {
            sum += v * overlap;
        }
    }
    sum
}

pub fn classify_ic(state: &State, model: &ModelGrid) -> Result<IcClass, CliError> {
    require_two_strains(model)?;
    let in_x = infectious_age_mass(state, 0, model) > 0.0;
    let in_y = infectious_age_mass(state, 1, model) > 0.0;
    Ok(match (in_x, in_y) {
        (false, false) => IcClass::BoundaryBoth,
        (true, false) => IcClass::InteriorXBoundaryY,
        (false, true) => IcClass::BoundaryXInteriorY,
        (true, true) => IcClass::InteriorBoth,
    })
}

/// Predicted ω-limit per regime row and initial-condition class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictedLimit {
    E0,
    E1,
    E2,
    Family,
}

impl PredictedLimit {
    pub fn label(&self) -> &'static str {
        match self {
            PredictedLimit::E0 => "E0",
            PredictedLimit::E1 => "E1",
            PredictedLimit::E2 => "E2",
            PredictedLimit::Family => "{Ealpha}",
        }
    }
}

/// The 6 x 4 convergence table.
pub fn predicted_limit(row: RegimeRow, ic: IcClass) -> PredictedLimit {
    use IcClass::*;
    use PredictedLimit::*;
    use RegimeRow::*;
    match (row, ic) {
        (_, BoundaryBoth) => E0,
        (SubThreshold, _) => E0,
        (XOnly, InteriorXBoundaryY) => E1,
        (XOnly, BoundaryXInteriorY) => E0,
        (XOnly, InteriorBoth) => E1,
        (YOnly, InteriorXBoundaryY) => E0,
        (YOnly, BoundaryXInteriorY) => E2,
        (YOnly, InteriorBoth) => E2,
        (XDominant, InteriorXBoundaryY) => E1,
        (XDominant, BoundaryXInteriorY) => E2,
        (XDominant, InteriorBoth) => E1,
        (YDominant, InteriorXBoundaryY) => E1,
        (YDominant, BoundaryXInteriorY) => E2,
        (YDominant, InteriorBoth) => E2,
        (Tie, InteriorXBoundaryY) => E1,
        (Tie, BoundaryXInteriorY) => E2,
        (Tie, InteriorBoth) => Family,
    }
}

fn observed_matches(predicted: PredictedLimit, observed: &EquilibriumKind) -> bool {
    match predicted {
        PredictedLimit::E0 => matches!(observed, EquilibriumKind::DiseaseFree),
        PredictedLimit::E1 => match observed {
            EquilibriumKind::Endemic { strain: 0 } => true,
            EquilibriumKind::FamilyMember { alpha, .. } => *alpha == 1.0,
            _ => false,
        },
        PredictedLimit::E2 => match observed {
            EquilibriumKind::Endemic { strain: 1 } => true,
            EquilibriumKind::FamilyMember { alpha, .. } => *alpha == 2.0,
            _ => false,
        },
        PredictedLimit::Family => matches!(observed, EquilibriumKind::FamilyMember { .. }),
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub regime: RegimeRow,
    pub ic: IcClass,
    pub predicted: PredictedLimit,
    /// Nearest candidate over the trailing window (a projected family member
    /// in the tie regime with interior initial condition).
    pub observed: EquilibriumKind,
    pub alpha: Option<f64>,
    pub alpha_score: Option<f64>,
    /// Max distance to the observed candidate over the trailing window.
    pub final_distance: f64,
    pub converged: bool,
    pub matches: bool,
    pub note: Option<String>,
}

/// Classifies the trajectory's ω-limit by its trailing window: the nearest
/// equilibrium within `tol` (sustained over `window` recorded points), or a
/// projected family member in the tie regime. Non-convergence is reported in
/// the result, not as an error.
pub fn classify_limit(
    traj: &Trajectory,
    model: &ModelGrid,
    tol: f64,
    window: usize,
) -> Result<ClassificationResult, CliError> {
    require_two_strains(model)?;
    if traj.len() < window || window == 0 {
        return Err(CliError::Model(ModelError::Validation(format!(
            "trajectory has {} recorded points, trailing window needs {window}",
            traj.len()
        ))));
    }
    let regime = classify_regime(model)?;
    let ic = classify_ic(&traj.states[0], model)?;
    let predicted = predicted_limit(regime, ic);
    let trailing = &traj.states[traj.len() - window..];

    let max_dist_to = |state: &State| -> Result<f64, CliError> {
        let mut worst: f64 = 0.0;
        for st in trailing {
            worst = worst.max(st.distance(state, &model.grid)?);
        }
        Ok(worst)
    };

    let set = equilibria(model);
    let mut observed = EquilibriumKind::DiseaseFree;
    let mut best = f64::INFINITY;
    for e in &set.equilibria {
        let d = max_dist_to(&e.state)?;
        if d < best {
            best = d;
            observed = e.kind;
        }
    }
    let mut alpha = None;
    let mut alpha_score = None;
    let mut converged = best < tol;

    if regime == RegimeRow::Tie && ic == IcClass::InteriorBoth {
        // project the final state onto the family and compare against the
        // projected member rather than a fixed sample
        let proj = strainflow_core::project_alpha(traj.last_state(), model)?;
        let member = strainflow_core::equilibrium::family_member(model, (0, 1), proj.alpha)?;
        let d = max_dist_to(&member.state)?;
        if d <= best {
            best = d;
            observed = member.kind;
        }
        alpha = Some(proj.alpha);
        alpha_score = Some(proj.score);
        converged = best < tol && proj.score < tol;
    } else if let EquilibriumKind::FamilyMember { alpha: a, .. } = observed {
        alpha = Some(a);
    }

    let matches = converged && observed_matches(predicted, &observed);
    let note = if regime == RegimeRow::YDominant && ic == IcClass::InteriorXBoundaryY {
        Some(
            "strain y absent from the initial condition: single-strain dynamics select E1 \
             although R0y > R0x"
                .to_string(),
        )
    } else {
        None
    };

    Ok(ClassificationResult {
        regime,
        ic,
        predicted,
        observed,
        alpha,
        alpha_score,
        final_distance: best,
        converged,
        matches,
        note,
    })
}
