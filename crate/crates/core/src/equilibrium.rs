//! Closed-form equilibria of the model on a grid.
//!
//! The system always admits the disease-free equilibrium
//! `E0 = (Λ/μ_S, 0, …, 0)`. Each strain with `R0_k > 1` contributes a
//! single-strain endemic equilibrium with `S* = 1/r_k` and
//! `x*_k(a) = μ_S (R0_k − 1)/r_k · π_k(a)`. When exactly two strains tie at
//! the maximal `R0 > 1` there is a continuum `E*_α, α ∈ [1, 2]`,
//! interpolating between the two endemic states.

use crate::error::ModelError;
use crate::model::ModelGrid;
use crate::state::State;

/// Relative tolerance used to declare two reproduction numbers tied. Ties are
/// a measure-zero analytic case: the user opts in by constructing exactly
/// equal parameters.
pub const R0_TIE_RTOL: f64 = 1e-9;

pub fn r0_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= R0_TIE_RTOL * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumKind {
    /// `E0`.
    DiseaseFree,
    /// Single-strain endemic equilibrium of `strain` (`E1` for strain 0,
    /// `E2` for strain 1).
    Endemic { strain: usize },
    /// Member `E*_α` of the tie-case family between `strains`; `α = 1` is
    /// the first strain's endemic state, `α = 2` the second's.
    FamilyMember { strains: (usize, usize), alpha: f64 },
}

impl EquilibriumKind {
    pub fn label(&self) -> String {
        match self {
            EquilibriumKind::DiseaseFree => "E0".to_string(),
            EquilibriumKind::Endemic { strain } => format!("E{}", strain + 1),
            EquilibriumKind::FamilyMember { alpha, .. } => format!("Ealpha({alpha})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub state: State,
    pub r_values: Vec<f64>,
    pub r0_values: Vec<f64>,
}

/// Descriptor of a tie-case continuum `{E*_α, α ∈ [1,2]}` between two
/// strains. For `N > 2` ties are reported pairwise; the higher-dimensional
/// parameterization is not expanded.
#[derive(Debug, Clone)]
pub struct FamilyDescriptor {
    pub strains: (usize, usize),
    pub r0: f64,
    pub sampled_alphas: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
    pub families: Vec<FamilyDescriptor>,
}

impl EquilibriumSet {
    pub fn find(&self, kind: &EquilibriumKind) -> Option<&Equilibrium> {
        self.equilibria.iter().find(|e| e.kind == *kind)
    }
}

fn with_values(model: &ModelGrid, kind: EquilibriumKind, state: State) -> Equilibrium {
    Equilibrium {
        kind,
        state,
        r_values: model.strains.iter().map(|s| s.r).collect(),
        r0_values: model.r0_values(),
    }
}

/// `E0 = (Λ/μ_S, 0, …)`.
pub fn disease_free(model: &ModelGrid) -> Equilibrium {
    let mut state = State::zeros(model.n_strains(), &model.grid);
    state.s = model.disease_free_s();
    with_values(model, EquilibriumKind::DiseaseFree, state)
}

/// Single-strain endemic equilibrium; requires `R0_k > 1`.
pub fn endemic(model: &ModelGrid, strain: usize) -> Result<Equilibrium, ModelError> {
    let sg = &model.strains[strain];
    if sg.r0 <= 1.0 {
        return Err(ModelError::RegimeMismatch(format!(
            "strain '{}' has R0 = {} <= 1: no endemic equilibrium",
            sg.name, sg.r0
        )));
    }
    let mut state = State::zeros(model.n_strains(), &model.grid);
    state.s = 1.0 / sg.r;
    let c = model.mu_s * (sg.r0 - 1.0) / sg.r;
    for (i, p) in sg.survival.iter().enumerate() {
        state.densities[strain][i] = c * p;
    }
    Ok(with_values(
        model,
        EquilibriumKind::Endemic { strain },
        state,
    ))
}

/// Family member `E*_α` for two strains tied above one: densities scale by
/// `(2 − α)` and `(α − 1)` on the respective endemic profiles.
pub fn family_member(
    model: &ModelGrid,
    strains: (usize, usize),
    alpha: f64,
) -> Result<Equilibrium, ModelError> {
    let (ka, kb) = strains;
    let (sa, sb) = (&model.strains[ka], &model.strains[kb]);
    if !(r0_tied(sa.r0, sb.r0) && sa.r0 > 1.0) {
        return Err(ModelError::RegimeMismatch(format!(
            "family requires R0 tied above one, got {} and {}",
            sa.r0, sb.r0
        )));
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(ModelError::validation(format!(
            "family parameter must lie in [1, 2], got {alpha}"
        )));
    }
    let mut state = State::zeros(model.n_strains(), &model.grid);
    state.s = 1.0 / sa.r;
    let ca = model.mu_s * (sa.r0 - 1.0) / sa.r * (2.0 - alpha);
    let cb = model.mu_s * (sb.r0 - 1.0) / sb.r * (alpha - 1.0);
    for (i, p) in sa.survival.iter().enumerate() {
        state.densities[ka][i] = ca * p;
    }
    for (i, p) in sb.survival.iter().enumerate() {
        state.densities[kb][i] = cb * p;
    }
    Ok(with_values(
        model,
        EquilibriumKind::FamilyMember { strains, alpha },
        state,
    ))
}

/// All equilibria of the discretized model.
///
/// For two strains this reproduces the five analytic cases exactly:
/// `{E0}`, `{E0, E1}`, `{E0, E2}`, `{E0, E1, E2}`, or `{E0, family}` with
/// the family sampled at `α ∈ {1, 1.5, 2}`. With more strains, every strain
/// with `R0 > 1` contributes its endemic equilibrium and ties at the top are
/// reported as pairwise family descriptors.
pub fn equilibria(model: &ModelGrid) -> EquilibriumSet {
    let mut set = EquilibriumSet {
        equilibria: vec![disease_free(model)],
        families: Vec::new(),
    };

    if model.n_strains() == 2 {
        let (r0x, r0y) = (model.strains[0].r0, model.strains[1].r0);
        if r0_tied(r0x, r0y) && r0x > 1.0 {
            for alpha in [1.0, 1.5, 2.0] {
                set.equilibria
                    .push(family_member(model, (0, 1), alpha).expect("tie regime checked"));
            }
            set.families.push(FamilyDescriptor {
                strains: (0, 1),
                r0: r0x,
                sampled_alphas: vec![1.0, 1.5, 2.0],
            });
            return set;
        }
    }

    for k in 0..model.n_strains() {
        if model.strains[k].r0 > 1.0 {
            set.equilibria
                .push(endemic(model, k).expect("R0 > 1 checked"));
        }
    }
    // pairwise tie descriptors for N > 2
    if model.n_strains() > 2 {
        for a in 0..model.n_strains() {
            for b in (a + 1)..model.n_strains() {
                let (ra, rb) = (model.strains[a].r0, model.strains[b].r0);
                if r0_tied(ra, rb) && ra > 1.0 {
                    set.families.push(FamilyDescriptor {
                        strains: (a, b),
                        r0: ra,
                        sampled_alphas: vec![1.0, 1.5, 2.0],
                    });
                }
            }
        }
    }
    set
}
