//! Human-readable tables for the equilibria and stability subcommands.

use strainflow_core::spectral::StabilityReport;
use strainflow_core::{EquilibriumSet, ModelGrid};

use crate::csvout::fmt_f64;

pub fn equilibria_text(model: &ModelGrid, eqs: &EquilibriumSet) -> String {
    let mut out = String::new();
    out.push_str("strain  r           R0\n");
    for sg in &model.strains {
        let (r, r0) = (format!("{:.6}", sg.r), format!("{:.6}", sg.r0));
        out.push_str(&format!("{:<7} {:<11} {}\n", sg.name, r, r0));
    }
    out.push('\n');
    out.push_str("equilibrium     S*           per-strain mass\n");
    for e in &eqs.equilibria {
        let masses: Vec<String> = (0..model.n_strains())
            .map(|k| format!("{:.6}", e.state.mass(k, &model.grid)))
            .collect();
        out.push_str(&format!(
            "{:<15} {:<12} {}\n",
            e.kind.label(),
            format!("{:.6}", e.state.s),
            masses.join("  ")
        ));
    }
    for f in &eqs.families {
        out.push_str(&format!(
            "family Ealpha on strains ({}, {}) at R0 = {}, sampled at alpha = {:?}\n",
            f.strains.0,
            f.strains.1,
            fmt_f64(f.r0),
            f.sampled_alphas
        ));
    }
    out
}

pub fn stability_text(report: &StabilityReport) -> String {
    let mut out = String::new();
    for entry in &report.entries {
        out.push_str(&format!("{}: {}\n", entry.label, entry.class.label()));
        for factor in &entry.factors {
            let root = factor
                .scan
                .lambda
                .map(fmt_f64)
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!(
                "  {:<24} {:<22} lambda* = {}\n",
                factor.label,
                factor.scan.verdict.label(),
                root
            ));
        }
    }
    out
}
