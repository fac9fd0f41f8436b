//! One-dimensional parameter sweeps with per-point limit classification,
//! e.g. bifurcation scans across `R0 = 1`.

use rayon::prelude::*;
use serde_json::Value;
use strainflow_core::simulate;

use crate::classify::{classify_limit, ClassificationResult};
use crate::config::{self, RawConfig};
use crate::error::CliError;
use crate::initial::build_initial;

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub r0: Vec<f64>,
    pub result: ClassificationResult,
}

/// Sets the number at a dotted path ("lambda", "strains.0.beta.0.2", ...)
/// inside the JSON representation of the config.
pub fn patch_config(raw: &RawConfig, path: &str, value: f64) -> Result<RawConfig, CliError> {
    let mut tree = serde_json::to_value(raw).expect("config serializes");
    {
        let mut node: &mut Value = &mut tree;
        for seg in path.split('.') {
            node = match node {
                Value::Object(map) => map.get_mut(seg).ok_or_else(|| {
                    CliError::config(format!("--param {path}"), format!("no field '{seg}'"))
                })?,
                Value::Array(items) => {
                    let idx: usize = seg.parse().map_err(|_| {
                        CliError::config(
                            format!("--param {path}"),
                            format!("'{seg}' is not an array index"),
                        )
                    })?;
                    items.get_mut(idx).ok_or_else(|| {
                        CliError::config(
                            format!("--param {path}"),
                            format!("index {idx} out of bounds"),
                        )
                    })?
                }
                _ => {
                    return Err(CliError::config(
                        format!("--param {path}"),
                        format!("'{seg}' does not address an object or array"),
                    ))
                }
            };
        }
        if !node.is_number() {
            return Err(CliError::config(
                format!("--param {path}"),
                "path does not address a number",
            ));
        }
        *node = Value::from(value);
    }
    serde_json::from_value(tree).map_err(|e| CliError::config(format!("--param {path}"), e))
}

/// Evenly spaced sweep over `[lo, hi]` with `steps` points (inclusive).
pub fn run_sweep(
    raw: &RawConfig,
    path: &str,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
    window: usize,
) -> Result<Vec<SweepPoint>, CliError> {
    if steps < 1 {
        return Err(CliError::config("--range", "needs at least one step"));
    }
    let values: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let points: Vec<Result<SweepPoint, CliError>> = values
        .par_iter()
        .map(|&v| {
            let patched = patch_config(raw, path, v)?;
            let built = config::build(patched)?;
            let z0 = build_initial(&built.raw.initial, &built.model)?;
            let traj = simulate(&z0, &built.model, &built.sim)?;
            let result = classify_limit(&traj, &built.model, tol, window)?;
            Ok(SweepPoint {
                value: v,
                r0: built.model.r0_values(),
                result,
            })
        })
        .collect();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        out.push(p?);
    }
    Ok(out)
}
