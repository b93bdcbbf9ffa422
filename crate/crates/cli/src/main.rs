use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use igusa::report::{emit_json, emit_text, exit_code_for, run};
use igusa::{Command, RunConfig, SubdivisionKind, ZetaSelection, DEFAULT_BUDGET};

/// Igusa local zeta functions of non-degenerate polynomial mappings.
#[derive(Parser)]
#[command(name = "igusa", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute Z and/or Z0, poles, invariants and optionally the oracle comparison.
    Compute(Opts),
    /// Check strong, Saia and Khovanskii non-degeneracy.
    Check(Opts),
    /// Count solutions mod p^j and compare with the formula.
    Oracle(Opts),
    /// Report candidate and actual poles.
    Poles(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum ZetaArg {
    Global,
    Origin,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubdivisionArg {
    Simplicial,
    Simple,
}

#[derive(Args)]
struct Opts {
    /// Components separated by `;`, e.g. "x^3 - x*y; y".
    #[arg(long)]
    poly: String,
    /// Comma-separated variable names in exponent order.
    #[arg(long)]
    vars: String,
    /// Prime q, the residue field size.
    #[arg(long)]
    q: u64,
    #[arg(long, value_enum, default_value = "both")]
    zeta: ZetaArg,
    #[arg(long, value_enum, default_value = "simplicial")]
    subdivision: SubdivisionArg,
    /// Oracle depth J; 0 skips the oracle (the oracle subcommand defaults to 4).
    #[arg(long, value_name = "J", default_value_t = 0)]
    oracle: usize,
    /// List candidate poles from the rays of a unimodular subdivision too.
    #[arg(long)]
    extra_rays: bool,
    /// Evaluate the formula even if the non-degeneracy check fails.
    #[arg(long)]
    force: bool,
    /// Emit the JSON report, to stdout or to the given file.
    #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    json: Option<String>,
    /// Maximum number of points enumerated per face and by the oracle.
    #[arg(long, value_name = "POINTS", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

fn config(command: Command, o: &Opts) -> RunConfig {
    RunConfig {
        command,
        mapping: o.poly.clone(),
        vars: o.vars.clone(),
        q: o.q,
        zeta: match o.zeta {
            ZetaArg::Global => ZetaSelection::Global,
            ZetaArg::Origin => ZetaSelection::Origin,
            ZetaArg::Both => ZetaSelection::Both,
        },
        subdivision: match o.subdivision {
            SubdivisionArg::Simplicial => SubdivisionKind::Simplicial,
            SubdivisionArg::Simple => SubdivisionKind::Simple,
        },
        oracle_depth: o.oracle,
        include_extra_rays: o.extra_rays,
        force: o.force,
        budget: o.budget,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, opts) = match &cli.command {
        Cmd::Compute(o) => (Command::Compute, o),
        Cmd::Check(o) => (Command::Check, o),
        Cmd::Oracle(o) => (Command::Oracle, o),
        Cmd::Poles(o) => (Command::Poles, o),
    };
    let report = match run(&config(command, opts)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let written = match opts.json.as_deref() {
        Some("-") => writeln!(stdout, "{}", emit_json(&report)),
        Some(path) => match std::fs::write(path, emit_json(&report) + "\n") {
            Ok(()) => write!(stdout, "{}", emit_text(&report)),
            Err(e) => {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(1);
            }
        },
        None => write!(stdout, "{}", emit_text(&report)),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if report.exit_code == 2 {
        if let Some(v) = report.nondegeneracy.iter().find(|v| !v.holds) {
            eprintln!("mapping is degenerate: {v}");
        }
    }
    ExitCode::from(report.exit_code as u8)
}
