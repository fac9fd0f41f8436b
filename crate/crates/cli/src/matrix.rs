//! The regime × initial-condition convergence matrix.
//!
//! Each supplied config contributes one row (tagged by its derived regime),
//! crossed with the four column presets. Cells run as independent
//! simulations, in parallel when requested; results are merged in
//! config-index order, so output bytes do not depend on the job count.

use rayon::prelude::*;
use strainflow_core::simulate;

use crate::classify::{classify_limit, ClassificationResult, IcClass};
use crate::config::{self, InitialSpec, PresetInitial, RawConfig};
use crate::error::CliError;
use crate::initial::build_initial;

/// Column presets in table order `∂S_x∩∂S_y, S_x∩∂S_y, ∂S_x∩S_y, S_x∩S_y`.
pub fn column_presets() -> [(IcClass, PresetInitial); 4] {
    [
        (
            IcClass::BoundaryBoth,
            PresetInitial::BoundaryBoth {
                s0: None,
                m_x: None,
                m_y: None,
            },
        ),
        (
            IcClass::InteriorXBoundaryY,
            PresetInitial::BoundaryY { s0: None, m_x: None },
        ),
        (
            IcClass::BoundaryXInteriorY,
            PresetInitial::BoundaryX { s0: None, m_y: None },
        ),
        (
            IcClass::InteriorBoth,
            PresetInitial::Generic {
                s0: None,
                m_x: None,
                m_y: None,
            },
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct MatrixCell {
    pub config_name: String,
    pub result: ClassificationResult,
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub cells: Vec<MatrixCell>,
}

impl MatrixOutcome {
    pub fn mismatches(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.result.converged && !c.result.matches)
            .count()
    }

    pub fn unconverged(&self) -> usize {
        self.cells.iter().filter(|c| !c.result.converged).count()
    }

    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.result.matches)
    }
}

fn run_cell(
    name: &str,
    raw: &RawConfig,
    preset: PresetInitial,
    tol: f64,
    window: usize,
) -> Result<MatrixCell, CliError> {
    let mut raw = raw.clone();
    raw.initial = InitialSpec::Preset(preset);
    let built = config::build(raw)?;
    let z0 = build_initial(&built.raw.initial, &built.model)?;
    let traj = simulate(&z0, &built.model, &built.sim)?;
    let result = classify_limit(&traj, &built.model, tol, window)?;
    Ok(MatrixCell {
        config_name: name.to_string(),
        result,
    })
}

/// Runs every config × column preset. Fails fast on validation errors;
/// mismatches and non-convergence are recorded per cell.
pub fn run_matrix(
    configs: &[(String, RawConfig)],
    tol: f64,
    window: usize,
) -> Result<MatrixOutcome, CliError> {
    let tasks: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|ci| (0..4).map(move |pi| (ci, pi)))
        .collect();
    let cells: Vec<Result<MatrixCell, CliError>> = tasks
        .par_iter()
        .map(|&(ci, pi)| {
            let (name, raw) = &configs[ci];
            let preset = column_presets()[pi].1.clone();
            run_cell(name, raw, preset, tol, window)
        })
        .collect();
    let mut out = Vec::with_capacity(cells.len());
    for c in cells {
        out.push(c?);
    }
    Ok(MatrixOutcome { cells: out })
}
