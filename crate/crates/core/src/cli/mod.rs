//! Command-line front end.
//!
//! Exit codes: 0 when every selected check holds (or the command succeeded),
//! 1 when a check fails, 2 on usage or configuration errors.

mod session;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use session::{
    builtin, export_dot, impossibility, load, predicate, render_source, simulate, start_state, verify, Check, Fixture,
    Loaded, Selector, SimulateOptions, VerifyOptions, BUILTINS, DEFAULT_N,
};

use crate::error::{Error, Result};
use crate::explorer::Policy;
use crate::kernel::STATE_CAP_ENV;
use crate::report::Report;
use crate::specs::StutterPolicy;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "stabiliq",
    version,
    about = "Exhaustive checker for ideal stabilization of chain protocols"
)]
pub struct Cli {
    /// Refuse universes larger than this many states.
    #[arg(long, global = true, value_name = "STATES")]
    pub state_cap: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run checks over the whole state universe.
    Verify(VerifyArgs),
    /// Run one computation under the central daemon.
    Simulate(SimulateArgs),
    /// Test whether merge closure rules out ideal stabilization.
    Impossibility(ImpossibilityArgs),
    /// Write the transition system as Graphviz DOT.
    ExportDot(ExportArgs),
    /// Print a protocol in the guarded-command language.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    /// Built-in protocol: cm, la, pif, abp or le. With --file, the built-in whose
    /// mapping and specifications apply to the parsed program.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Number of processes (default 4).
    #[arg(long)]
    pub n: Option<usize>,
    /// Process identifiers in chain order, e.g. 2,1,3,4.
    #[arg(long, value_delimiter = ',')]
    pub ids: Option<Vec<i64>>,
    /// Protocol source in the guarded-command language.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl ProtocolArgs {
    fn selector(&self) -> Result<Selector> {
        let source = match &self.file {
            Some(path) => Some((std::fs::read_to_string(path)?, path.display().to_string())),
            None => None,
        };
        Ok(Selector {
            protocol: self.protocol.clone(),
            n: self.n,
            ids: self.ids.clone(),
            source,
        })
    }

    fn load(&self) -> Result<Loaded> {
        load(&self.selector()?)
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Check to run; repeat for several.
    #[arg(long = "check", value_enum)]
    pub checks: Vec<Check>,
    /// Specification name (defaults to the strict one for stabilizing, the ideal one for ideal).
    #[arg(long)]
    pub spec: Option<String>,
    /// Invariant: `true`, a named invariant, or var=value pairs.
    #[arg(long)]
    pub predicate: Option<String>,
    /// forbid or allow stutter-divergent computations.
    #[arg(long)]
    pub stutter_policy: Option<StutterPolicy>,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Start state: random, all-idle, or a var=value literal.
    #[arg(long, default_value = "random")]
    pub from: String,
    /// round-robin or uniform-random.
    #[arg(long, default_value = "uniform-random")]
    pub policy: Policy,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImpossibilityArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Specification whose allowed states are tested (built-in bundles only).
    #[arg(long)]
    pub spec: Option<String>,
    /// Allowed specification states, one per line.
    #[arg(long, requires = "disallowed_file")]
    pub allowed_file: Option<PathBuf>,
    /// Disallowed specification states, one per line.
    #[arg(long, requires = "allowed_file")]
    pub disallowed_file: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Emit the component DAG instead of every state.
    #[arg(long)]
    pub condensed: bool,
    /// Fill states satisfying this predicate.
    #[arg(long)]
    pub predicate: Option<String>,
    /// Output path (standard output if absent).
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

fn write_json(path: Option<&Path>, report: &Report) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: &Report, json: Option<&Path>, verdict_exit: bool) -> Result<i32> {
    print!("{}", report.text());
    write_json(json, report)?;
    Ok(if verdict_exit && !report.holds {
        EXIT_FAILS
    } else {
        EXIT_HOLDS
    })
}

/// Executes a parsed command line and returns the exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    if let Some(cap) = cli.state_cap {
        std::env::set_var(STATE_CAP_ENV, cap.to_string());
    }
    match cli.command {
        Command::Verify(a) => {
            let loaded = a.protocol.load()?;
            let opts = VerifyOptions {
                checks: a.checks,
                spec: a.spec,
                predicate: a.predicate,
                stutter_policy: a.stutter_policy,
            };
            finish(&verify(&loaded, &opts)?, a.json.as_deref(), true)
        }
        Command::Simulate(a) => {
            let loaded = a.protocol.load()?;
            let opts = SimulateOptions {
                from: a.from,
                policy: a.policy,
                steps: a.steps,
                seed: a.seed,
            };
            finish(&simulate(&loaded, &opts)?, a.json.as_deref(), false)
        }
        Command::Impossibility(a) => {
            let report = match (&a.allowed_file, &a.disallowed_file) {
                (Some(ap), Some(dp)) => {
                    let (at, dt) = (std::fs::read_to_string(ap)?, std::fs::read_to_string(dp)?);
                    let (an, dn) = (ap.display().to_string(), dp.display().to_string());
                    impossibility(
                        &Fixture::Files {
                            allowed: (&at, &an),
                            disallowed: (&dt, &dn),
                        },
                        None,
                    )?
                }
                _ => {
                    if a.protocol.protocol.is_none() && a.protocol.file.is_none() {
                        return Err(Error::InvalidArgument(
                            "give --protocol or both --allowed-file and --disallowed-file".into(),
                        ));
                    }
                    let loaded = a.protocol.load()?;
                    impossibility(&Fixture::Loaded(&loaded), a.spec.as_deref())?
                }
            };
            finish(&report, a.json.as_deref(), false)
        }
        Command::ExportDot(a) => {
            let loaded = a.protocol.load()?;
            let dot = export_dot(&loaded, a.condensed, a.predicate.as_deref())?;
            emit(a.output.as_deref(), &dot)?;
            Ok(EXIT_HOLDS)
        }
        Command::Render(a) => {
            let loaded = a.protocol.load()?;
            emit(a.output.as_deref(), &render_source(&loaded)?)?;
            Ok(EXIT_HOLDS)
        }
    }
}

/// Parses `args` (including the program name) and runs the command, printing
/// errors to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
