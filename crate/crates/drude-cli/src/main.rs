//! `drude`: scenario runner for the drude-spectral toolkit.
//!
//! Each subcommand reads a TOML scenario, runs one experiment and writes CSV
//! tables, a gnuplot script and a JSON summary into `<out>/<experiment>/`,
//! where `<out>` is `$DRUDE_OUT`, else the scenario's `output_dir`, else
//! `drude-out`. Exit status: 0 when every check passes, 1 when a numerical
//! check or computation fails, 2 when the scenario is invalid.

// Negated comparisons are deliberate: `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod artifacts;
mod config;
mod experiments;

use artifacts::RunInfo;
use clap::{Args, Parser, Subcommand};
use config::Experiment;
use drude_spectral::DrudeError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "drude", version, about = "Spectral and time-domain experiments for the vacuum/Drude interface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    config: PathBuf,
    /// Cap on worker threads; 1 is the reference for bit-exact output, 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Plasmonic dispersion near Ω_p and its asymptotic prefactors.
    Dispersion(RunArgs),
    /// Cross-section, finite-difference residual and interface jumps of one mode.
    Modes(RunArgs),
    /// Parseval and reconstruction defects of the generalized Fourier transform.
    Parseval(RunArgs),
    /// Spectral density sweep and band measures against Parseval band energies.
    Density(RunArgs),
    /// Hölder exponent of λ ↦ M_λG.
    Hoelder(RunArgs),
    /// Threshold scaling of the plasmonic pairings at Ω_p.
    Threshold(RunArgs),
    /// Limiting absorption: U_ω^± and the η-convergence table.
    Absorb(RunArgs),
    /// Spectral evolution from zero data under time-harmonic forcing.
    Evolve(RunArgs),
    /// Time-domain (Yee) oracle run.
    Oracle(RunArgs),
    /// Spectral evolution against the time-domain oracle.
    OracleCompare(RunArgs),
    /// Linear growth at Ω_p in the critical case.
    Resonance(RunArgs),
    /// Two-tone beats in the critical case.
    Beats(RunArgs),
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Self::Dispersion(a) => (Experiment::Dispersion, a),
            Self::Modes(a) => (Experiment::Modes, a),
            Self::Parseval(a) => (Experiment::Parseval, a),
            Self::Density(a) => (Experiment::Density, a),
            Self::Hoelder(a) => (Experiment::Hoelder, a),
            Self::Threshold(a) => (Experiment::Threshold, a),
            Self::Absorb(a) => (Experiment::Absorb, a),
            Self::Evolve(a) => (Experiment::Evolve, a),
            Self::Oracle(a) => (Experiment::Oracle, a),
            Self::OracleCompare(a) => (Experiment::OracleCompare, a),
            Self::Resonance(a) => (Experiment::Resonance, a),
            Self::Beats(a) => (Experiment::Beats, a),
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let (experiment, args) = Cli::parse().command.split();
    let out = std::env::var_os("DRUDE_OUT").filter(|v| !v.is_empty()).map(PathBuf::from);
    let resolved = match config::load(&args.config, experiment, out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("drude: invalid scenario: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match drude_spectral::par::with_workers(args.workers, || experiments::run(experiment, &resolved)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("drude {}: {e}", experiment.name());
            let code = if matches!(e, DrudeError::Config(_) | DrudeError::Cfl(_)) { EXIT_CONFIG } else { EXIT_FAIL };
            return ExitCode::from(code);
        }
    };
    let info = RunInfo { experiment: experiment.name().into(), config: resolved.source_name.clone(), workers: args.workers, medium: resolved.params };
    let dir = match artifacts::write_all(&report, &info, &resolved.output_dir) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("drude {}: cannot write artifacts: {e}", experiment.name());
            return ExitCode::from(EXIT_FAIL);
        }
    };
    for c in &report.checks {
        let bounds = match (c.min, c.max) {
            (Some(a), Some(b)) => format!("in [{a:e}, {b:e}]"),
            (Some(a), None) => format!(">= {a:e}"),
            (None, Some(b)) => format!("<= {b:e}"),
            (None, None) => String::new(),
        };
        println!("[{}] {} = {:e} ({bounds})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
    }
    println!("{} {}: artifacts in {}", experiment.name(), if report.pass() { "passed" } else { "FAILED" }, dir.display());
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
