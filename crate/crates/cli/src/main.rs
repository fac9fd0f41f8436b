use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use strainflow_core::lyapunov::{audit_monotonicity, compute_weights, Functional};
use strainflow_core::spectral::stability_report;
use strainflow_core::{equilibria, simulate};

use strainflow_cli::classify::{CONVERGENCE_TOL, TRAILING_WINDOW};
use strainflow_cli::config::{self, RawConfig};
use strainflow_cli::{csvout, matrix, report, resolve_jobs, sweep, with_jobs, CliError};

#[derive(Parser)]
#[command(
    name = "strainflow",
    about = "Simulator and stability toolkit for competitive infection-age structured SI models",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one trajectory and emit it as CSV.
    Simulate {
        config: PathBuf,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the equilibrium table with reproduction numbers.
    Equilibria { config: PathBuf },
    /// Run a trajectory, evaluate a Lyapunov functional along it and audit
    /// monotonicity. Nonzero exit on violations in guaranteed regimes.
    Lyapunov {
        config: PathBuf,
        /// L0, Lx or Ly.
        #[arg(long)]
        functional: String,
        /// Output file for the trajectory + functional CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Violation tolerance (default 10·da).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the local-stability report from the characteristic equations.
    Spectral { config: PathBuf },
    /// Run every config in a directory against the four initial-condition
    /// presets and compare observed limits with the predicted table.
    Matrix {
        config_dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the table as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = CONVERGENCE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = TRAILING_WINDOW)]
        window: usize,
    },
    /// Sweep one numeric config entry and classify the limit at each point.
    Sweep {
        config: PathBuf,
        /// Dotted path into the config, e.g. "lambda" or "strains.0.beta.0.2".
        #[arg(long)]
        param: String,
        /// lo:hi:steps (inclusive, evenly spaced).
        #[arg(long)]
        range: String,
        #[arg(long)]
        jobs: Option<usize>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = CONVERGENCE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = TRAILING_WINDOW)]
        window: usize,
    },
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn parse_functional(name: &str) -> Result<Functional, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "l0" => Ok(Functional::L0),
        "lx" => Ok(Functional::Endemic(0)),
        "ly" => Ok(Functional::Endemic(1)),
        _ => Err(CliError::config(
            "--functional",
            format!("expected L0, Lx or Ly, got '{name}'"),
        )),
    }
}

fn parse_range(range: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = range.split(':').collect();
    let bad = || CliError::config("--range", format!("expected lo:hi:steps, got '{range}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    Ok((lo, hi, steps))
}

fn load_config_dir(dir: &Path) -> Result<Vec<(String, RawConfig)>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::config(dir.display().to_string(), e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::config(
            dir.display().to_string(),
            "no .json configs found",
        ));
    }
    let mut configs = Vec::with_capacity(paths.len());
    for p in paths {
        let text = std::fs::read_to_string(&p)
            .map_err(|e| CliError::config(p.display().to_string(), e))?;
        let raw = config::parse(&text, &p.display().to_string())?;
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string());
        configs.push((name, raw));
    }
    Ok(configs)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Simulate { config: path, out } => {
            let built = config::load(&path)?;
            let traj = simulate(&built.initial, &built.model, &built.sim)?;
            let eqs = equilibria(&built.model);
            let mut w = open_out(&out)?;
            csvout::write_trajectory_csv(&mut w, &traj, &built.model, &eqs, None)?;
            w.flush()?;
            Ok(())
        }
        Cmd::Equilibria { config: path } => {
            let built = config::load(&path)?;
            let eqs = equilibria(&built.model);
            print!("{}", report::equilibria_text(&built.model, &eqs));
            Ok(())
        }
        Cmd::Lyapunov {
            config: path,
            functional,
            out,
            tol,
        } => {
            let built = config::load(&path)?;
            let functional = parse_functional(&functional)?;
            let tol = tol.unwrap_or(10.0 * built.model.grid.da());
            let weights = compute_weights(&built.model)?;
            let traj = simulate(&built.initial, &built.model, &built.sim)?;
            let trace = audit_monotonicity(&traj, functional, tol, &built.model, &weights);
            let eqs = equilibria(&built.model);
            if let Some(path) = &out {
                let mut w = BufWriter::new(File::create(path)?);
                csvout::write_trajectory_csv(&mut w, &traj, &built.model, &eqs, Some(&trace))?;
                w.flush()?;
            }
            println!(
                "{} along {} recorded states: {} violations at tol {} ({}){}",
                trace.functional.label(),
                trace.times.len(),
                trace.violations.len(),
                tol,
                if trace.guaranteed {
                    "monotonicity guaranteed in this regime"
                } else {
                    "no guarantee in this regime"
                },
                match trace.domain_entry {
                    Some(0) => String::new(),
                    Some(e) => format!(", domain entered at t = {}", trace.times[e]),
                    None => ", never inside the functional's domain".to_string(),
                }
            );
            for v in &trace.violations {
                println!("  t = {}: increase by {:e}", v.time, v.delta);
            }
            if trace.guaranteed && !trace.violations.is_empty() {
                return Err(CliError::Mismatch(format!(
                    "{} increased {} time(s) in a regime with a monotonicity guarantee",
                    trace.functional.label(),
                    trace.violations.len()
                )));
            }
            Ok(())
        }
        Cmd::Spectral { config: path } => {
            let built = config::load(&path)?;
            let report_ = stability_report(&built.model)?;
            print!("{}", report::stability_text(&report_));
            Ok(())
        }
        Cmd::Matrix {
            config_dir,
            jobs,
            out,
            tol,
            window,
        } => {
            let configs = load_config_dir(&config_dir)?;
            let jobs = resolve_jobs(jobs)?;
            let outcome = with_jobs(jobs, || matrix::run_matrix(&configs, tol, window))??;
            print!("{}", csvout::matrix_text(&outcome));
            if let Some(path) = &out {
                let mut w = BufWriter::new(File::create(path)?);
                csvout::write_matrix_csv(&mut w, &outcome)?;
                w.flush()?;
            }
            if outcome.mismatches() > 0 {
                return Err(CliError::Mismatch(format!(
                    "{} cell(s) converged to a limit other than predicted",
                    outcome.mismatches()
                )));
            }
            if outcome.unconverged() > 0 {
                return Err(CliError::NonConvergence(format!(
                    "{} cell(s) did not converge within tol {tol}",
                    outcome.unconverged()
                )));
            }
            Ok(())
        }
        Cmd::Sweep {
            config: path,
            param,
            range,
            jobs,
            out,
            tol,
            window,
        } => {
            let built_raw = {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::config(path.display().to_string(), e))?;
                config::parse(&text, &path.display().to_string())?
            };
            let (lo, hi, steps) = parse_range(&range)?;
            let jobs = resolve_jobs(jobs)?;
            let points = with_jobs(jobs, || {
                sweep::run_sweep(&built_raw, &param, lo, hi, steps, tol, window)
            })??;
            let names: Vec<String> = built_raw.strains.iter().map(|s| s.name.clone()).collect();
            let mut w = open_out(&out)?;
            csvout::write_sweep_csv(&mut w, &param, &names, &points)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // a closed stdout (e.g. piping into `head`) is not a failure
        if let CliError::Io(io) = &e {
            if io.kind() == io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
