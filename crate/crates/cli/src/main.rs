use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use g13_cli::{
    bundle_report, divisor_class_report, enumerate_report, prove_report, regress_all, virtual_class_report, RunReport,
};
use g13_core::rational;
use g13_tropical::engine::{ProveOptions, TieBreak};
use g13_tropical::slopes::Tableau;

/// Exact computations for the genus-13 slope and Kodaira-dimension results.
#[derive(Parser, Debug)]
#[command(name = "genus13", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit wall-clock timing so that reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Omission {
    Largest,
    Smallest,
}

#[derive(clap::Args, Debug)]
struct EngineArgs {
    /// Scale factor B between consecutive edge lengths of the chain.
    #[arg(long, default_value = "10000")]
    scale_base: String,
    /// Which omission to take when several are valid.
    #[arg(long, value_enum, default_value = "largest")]
    tie_break: Omission,
    /// How many times to square B after a certification failure.
    #[arg(long, default_value_t = 2)]
    escalations: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and certify the independence for one tableau (JSON file).
    ProveSmrc {
        #[arg(long)]
        tableau: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run every tableau of a genus and summarize.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(11..=13))]
        genus: u8,
        /// Run all cases.
        #[arg(long, conflicts_with = "limit", required_unless_present = "limit")]
        all: bool,
        /// Run only the first N cases.
        #[arg(long)]
        limit: Option<usize>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Include the full per-case reports.
        #[arg(long)]
        cases: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// The virtual divisor class: b₁, b₀, a and its slope.
    ComputeVirtualClass,
    /// The bundle count, the h-power closed form, Bernoulli numbers and the Porteous count.
    CountBundles,
    /// Every divisor class derived from the virtual class.
    DivisorReport,
    /// All published anchors that run in seconds.
    RegressAll,
}

/// Input errors exit with 2, computation errors with 1.
enum Failure {
    Input(anyhow::Error),
    Compute(anyhow::Error),
}

fn options(e: &EngineArgs) -> Result<ProveOptions, Failure> {
    let scale_base = rational::parse(&e.scale_base).map_err(|err| Failure::Input(err.into()))?;
    if scale_base <= rational::int(1) {
        return Err(Failure::Input(anyhow::anyhow!("--scale-base must exceed 1")));
    }
    let tie_break = match e.tie_break {
        Omission::Largest => TieBreak::Largest,
        Omission::Smallest => TieBreak::Smallest,
    };
    Ok(ProveOptions { scale_base, escalations: e.escalations, tie_break })
}

fn read_tableau(path: &PathBuf) -> Result<Tableau, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Input)?;
    let t: Tableau = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Input)?;
    t.validate().map_err(|e| Failure::Input(e.into()))?;
    Ok(t)
}

fn run(cli: &Cli) -> Result<RunReport, Failure> {
    let compute = |r: Result<RunReport>| r.map_err(Failure::Compute);
    match &cli.command {
        Command::ProveSmrc { tableau, engine } => {
            let t = read_tableau(tableau)?;
            compute(prove_report(&t, &options(engine)?))
        }
        Command::Enumerate { genus, limit, jobs, cases, engine, .. } => {
            compute(enumerate_report(*genus as usize, *limit, &options(engine)?, *jobs, *cases))
        }
        Command::ComputeVirtualClass => compute(virtual_class_report()),
        Command::CountBundles => compute(bundle_report()),
        Command::DivisorReport => compute(divisor_class_report()),
        Command::RegressAll => compute(regress_all()),
    }
}

fn emit(cli: &Cli, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli) {
        Ok(mut report) => {
            if cli.no_timing {
                report.timing_ms = None;
            }
            for v in report.failures() {
                eprintln!("FAIL {}: expected {}, got {}", v.name, v.expected, v.actual);
            }
            let code = if report.passed() { 0 } else { 1 };
            (serde_json::to_value(&report).expect("report serializes"), code)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            (serde_json::json!({ "error": { "kind": "input", "message": format!("{e:#}") } }), 2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            (serde_json::json!({ "error": { "kind": "computation", "message": format!("{e:#}") } }), 1)
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
