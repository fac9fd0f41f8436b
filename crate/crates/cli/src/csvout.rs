//! CSV serialization (RFC-4180 style, '.' decimal, header row).
//!
//! Trajectory columns are fixed: `t, S`, then per strain mass and force of
//! infection, then the distance to each equilibrium, then any requested
//! Lyapunov values. Floats use Rust's shortest round-trip decimal form, so
//! identical runs produce byte-identical files.

use std::io::Write;

use strainflow_core::lyapunov::LyapunovTrace;
use strainflow_core::{EquilibriumSet, ModelGrid, Trajectory};

use crate::classify::PredictedLimit;
use crate::error::CliError;
use crate::matrix::{column_presets, MatrixOutcome};
use crate::sweep::SweepPoint;

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Quotes a field when it contains a separator, quote or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    traj: &Trajectory,
    model: &ModelGrid,
    eqs: &EquilibriumSet,
    lyap: Option<&LyapunovTrace>,
) -> Result<(), CliError> {
    let mut header = vec!["t".to_string(), "S".to_string()];
    for sg in &model.strains {
        header.push(format!("mass_{}", sg.name));
        header.push(format!("foi_{}", sg.name));
    }
    for e in &eqs.equilibria {
        header.push(format!("dist_{}", e.kind.label()));
    }
    if let Some(trace) = lyap {
        header.push(trace.functional.label());
    }
    writeln!(w, "{}", header.join(","))?;

    for (j, t) in traj.times.iter().enumerate() {
        let mut row = vec![fmt_f64(*t), fmt_f64(traj.observables[j].s)];
        for k in 0..model.n_strains() {
            row.push(fmt_f64(traj.observables[j].masses[k]));
            row.push(fmt_f64(traj.observables[j].foi[k]));
        }
        for e in &eqs.equilibria {
            row.push(fmt_f64(traj.states[j].distance(&e.state, &model.grid)?));
        }
        if let Some(trace) = lyap {
            row.push(fmt_opt(trace.values[j]));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_matrix_csv<W: Write>(mut w: W, outcome: &MatrixOutcome) -> Result<(), CliError> {
    writeln!(
        w,
        "config,regime,ic,predicted,observed,alpha,alpha_score,final_distance,converged,match,note"
    )?;
    for cell in &outcome.cells {
        let r = &cell.result;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&cell.config_name),
            csv_field(r.regime.label()),
            csv_field(r.ic.label()),
            csv_field(r.predicted.label()),
            csv_field(&r.observed.label()),
            fmt_opt(r.alpha),
            fmt_opt(r.alpha_score),
            fmt_f64(r.final_distance),
            r.converged,
            r.matches,
            csv_field(r.note.as_deref().unwrap_or(""))
        )?;
    }
    Ok(())
}

pub fn matrix_text(outcome: &MatrixOutcome) -> String {
    let mut out = String::new();
    let cols = column_presets();
    out.push_str(&format!("{:<18}", "regime \\ ic"));
    for (ic, _) in &cols {
        out.push_str(&format!("{:>16}", ic.label()));
    }
    out.push('\n');
    for chunk in outcome.cells.chunks(4) {
        out.push_str(&format!("{:<18}", chunk[0].result.regime.label()));
        for cell in chunk {
            let r = &cell.result;
            let mark = if r.matches {
                "ok"
            } else if r.converged {
                "MISMATCH"
            } else {
                "no-conv"
            };
            let shown = match (&r.predicted, r.alpha) {
                (PredictedLimit::Family, Some(a)) => format!("a={a:.3}"),
                _ => r.observed.label(),
            };
            out.push_str(&format!("{:>16}", format!("{shown} {mark}")));
        }
        out.push('\n');
    }
    out.push_str(&format!(
        "cells: {}, mismatches: {}, unconverged: {}\n",
        outcome.cells.len(),
        outcome.mismatches(),
        outcome.unconverged()
    ));
    out
}

pub fn write_sweep_csv<W: Write>(
    mut w: W,
    param: &str,
    model_names: &[String],
    points: &[SweepPoint],
) -> Result<(), CliError> {
    let mut header = vec!["param".to_string(), "value".to_string()];
    for n in model_names {
        header.push(format!("R0_{n}"));
    }
    header.extend(
        ["regime", "ic", "observed", "alpha", "final_distance", "converged"]
            .map(str::to_string),
    );
    writeln!(w, "{}", header.join(","))?;
    for p in points {
        let r = &p.result;
        let mut row = vec![param.to_string(), fmt_f64(p.value)];
        for v in &p.r0 {
            row.push(fmt_f64(*v));
        }
        row.push(csv_field(r.regime.label()));
        row.push(csv_field(r.ic.label()));
        row.push(csv_field(&r.observed.label()));
        row.push(fmt_opt(r.alpha));
        row.push(fmt_f64(r.final_distance));
        row.push(r.converged.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
