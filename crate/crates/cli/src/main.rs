//! `ergo`: simulations, wall tools and the verification suite on the command line.

mod abel;
mod count;
mod error;
mod manifest;
mod simulate;
mod walls;

use clap::{Args, Parser, Subcommand};
use ergo_core::parallel::{with_threads, Exec};
use ergo_core::suite::{run_all, run_criterion, CriterionResult, SuiteConfig, CRITERIA};
use error::{CliError, CliResult};
use std::io::Write;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "ergo", version, about = "Alternating random walks, rough-disk billiards and rough-wall kernels")]
struct Cli {
    /// Worker threads; 0 uses every core. Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a chain and write its trajectory, histograms and manifest.
    #[command(subcommand)]
    Simulate(simulate::System),
    /// Estimate the space-averaged reflection kernel of a wall by ray tracing.
    DeriveKernel(walls::DeriveKernel),
    /// Compress a wall vertically by the factor of a disk with mass m and inertia J.
    Foreshorten(walls::Foreshorten),
    /// Insert a small concave nub at every period of a wall.
    AttachNubs(walls::AttachNubs),
    /// Evaluate the Abel transform of a function.
    Abel(abel::AbelArgs),
    /// Run the acceptance suite and print one JSON report per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// `all`, a criterion number, or one of: exact, abel, reversibility,
    /// microstructure, pushforward, ergodic, nonergodic, nubs, m1m2.
    #[arg(default_value = "all")]
    which: String,
    /// Random seed; falls back to the ERGO_SEED environment variable
    #[arg(long)]
    seed: Option<u64>,
    /// Run every estimator on one thread, in order.
    #[arg(long)]
    sequential: bool,
}

/// The seed from the flag, or from ERGO_SEED.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("ERGO_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("ERGO_SEED=`{v}` is not an unsigned integer"))),
        Err(_) => Err(CliError::Usage("a seed is required: pass --seed or set ERGO_SEED".into())),
    }
}

fn verify(a: VerifyArgs) -> CliResult<()> {
    let seed = resolve_seed(a.seed)?;
    let cfg = SuiteConfig { seed, exec: if a.sequential { Exec::Sequential } else { Exec::Parallel } };
    let results: Vec<CriterionResult> = if a.which == "all" {
        run_all(&cfg)?
    } else {
        let names: Vec<&str> = CRITERIA.iter().map(|c| c.1).collect();
        let r = run_criterion(&a.which, &cfg)
            .ok_or_else(|| CliError::Usage(format!("unknown criterion `{}`; expected all, 1-9 or {names:?}", a.which)))?;
        vec![r?]
    };
    let mut stdout = std::io::stdout().lock();
    let (mut failed, mut total) = (0, 0);
    for c in &results {
        for r in &c.reports {
            writeln!(stdout, "{}", r.json_line()).map_err(CliError::io("<stdout>"))?;
            total += 1;
            failed += usize::from(!r.pass);
        }
        eprintln!("{} C{} {}", if c.pass() { "PASS" } else { "FAIL" }, c.id, c.title);
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed, total });
    }
    Ok(())
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate(s) => simulate::run(s),
        Command::DeriveKernel(a) => walls::derive_kernel(a),
        Command::Foreshorten(a) => walls::run_foreshorten(a),
        Command::AttachNubs(a) => walls::run_attach_nubs(a),
        Command::Abel(a) => abel::run(a),
        Command::Verify(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim_end().to_owned());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match with_threads(cli.threads, || dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
