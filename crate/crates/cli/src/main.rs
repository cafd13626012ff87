//! `lgtest`: runs the six-protocol Leggett-Garg program and reports the
//! correlators, adroitness bounds and verdict.
//!
//! Exit status: 0 on success, 1 when `--assert-violation` is given and the
//! verdict is not `violation_established`, 2 for invalid configuration or an
//! unwritable output path, 3 when an internal invariant fails.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use lg_core::analytics::{analyze, render_tables, ProgramReport, Verdict};
use lg_core::compiler::{compile, to_qasm};
use lg_core::oracle::{theta_sweep, ThetaSweep};
use lg_core::protocols::{build_protocol, run_plan, PlanResult, ProtocolId};

use config::{Format, Mode, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lgtest",
    version,
    about = "Clumsiness-aware Leggett-Garg test on a simulated five-qubit device"
)]
struct Cli {
    /// JSON config document; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measurement angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Shots per circuit execution.
    #[arg(long)]
    shots: Option<usize>,
    /// Repetitions of the whole program (at least 2).
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Depolarizing probability after single-qubit gates.
    #[arg(long)]
    p1: Option<f64>,
    /// Depolarizing probability after CNOTs.
    #[arg(long)]
    p2: Option<f64>,
    /// Readout flip probability.
    #[arg(long)]
    eps_ro: Option<f64>,
    /// Amplitude damping per timing cell.
    #[arg(long)]
    gamma: Option<f64>,
    /// Invasive Rx kick after the O2 measurement, in radians.
    #[arg(long, allow_hyphen_values = true)]
    kick: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the compiled circuit of one protocol (a-f) as OpenQASM and exit.
    #[arg(long, value_name = "ID", value_parser = parse_protocol)]
    export: Option<ProtocolId>,
    /// Print a CSV of the three oracle routes at N angles over [-π, π] and exit.
    #[arg(long, value_name = "N")]
    sweep: Option<usize>,
    /// Exit 1 unless the verdict is violation_established.
    #[arg(long)]
    assert_violation: bool,
}

fn parse_protocol(s: &str) -> Result<ProtocolId, String> {
    s.parse()
        .map_err(|_| format!("expected one of a, b, c, d, e, f, got `{s}`"))
}

enum Failure {
    Config(String),
    Internal(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Internal(m) => {
                eprintln!("internal error: {m}");
                ExitCode::from(3)
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = cli.$flag.clone() { cfg.$field = v; })*
        };
    }
    set!(theta => theta, shots => shots, reps => repetitions, seed => seed, mode => mode,
         p1 => p1, p2 => p2, eps_ro => eps_ro, gamma => gamma, format => format);
    if cli.kick.is_some() {
        cfg.kick = cli.kick;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    Ok(cfg)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn shots_csv(result: &PlanResult) -> String {
    let mut out = String::from("protocol,repetition,seed,outcome,count\n");
    for tables in result.tables.values() {
        for t in tables {
            for (k, n) in t.counts.iter() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{n}",
                    t.protocol,
                    t.repetition,
                    t.seed,
                    t.counts.outcome_string(k)
                );
            }
        }
    }
    out
}

/// Checks that must hold for any sampled program, whatever the noise.
fn check_invariants(report: &ProgramReport) -> Result<(), Failure> {
    if report.per_shot_minimum < 0 {
        return Err(Failure::Internal(format!(
            "per-shot LG combination reached {}",
            report.per_shot_minimum
        )));
    }
    let lg = &report.lg;
    let ad = &report.adroitness;
    for c in [
        lg.c_a,
        lg.c_12,
        lg.c_23,
        ad.c_b,
        ad.c_c,
        ad.c_d,
        ad.c_e,
        report.c_13_f,
    ] {
        if !(c.mean.abs() <= 1.0 && c.stderr.is_finite()) {
            return Err(Failure::Internal(format!(
                "correlator estimate out of range: {c:?}"
            )));
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let cfg = load_config(cli)?;
    let plan = cfg.plan();
    let out = cfg.out.as_deref();

    if let Some(n) = cli.sweep {
        let sweep = theta_sweep(&ThetaSweep::uniform_angles(n))
            .map_err(|e| Failure::Internal(e.to_string()))?;
        emit(&sweep.to_csv(), out)?;
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(id) = cli.export {
        let pc = build_protocol(id, plan.theta, plan.mode)
            .map_err(|e| Failure::Config(e.to_string()))?;
        emit(&to_qasm(&compile(&pc.circuit)), out)?;
        return Ok(ExitCode::SUCCESS);
    }

    plan.validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let result = run_plan(&plan).map_err(|e| Failure::Internal(e.to_string()))?;
    let report = analyze(&result).map_err(|e| Failure::Internal(e.to_string()))?;
    check_invariants(&report)?;

    let text = match cfg.format {
        Format::Table => render_tables(&report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => shots_csv(&result),
    };
    emit(&text, out)?;
    if out.is_some() && cfg.format != Format::Table {
        eprint!("{}", render_tables(&report));
    }

    if cli.assert_violation && report.lg.verdict != Verdict::ViolationEstablished {
        eprintln!("verdict: {}", report.lg.verdict);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => f.exit(),
    }
}
