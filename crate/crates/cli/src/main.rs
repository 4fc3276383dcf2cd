//! `diwt`: command-line front end for discrete index Whittaker transforms.

mod commands;
mod config;
mod failure;
mod manifest;
mod output;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diwt::quad::Precision;

use commands::{Command, Outcome};
use config::{JobConfig, Num};
use failure::Failure;
use manifest::{manifest_path, OutputDigest, RunManifest, TOOL_VERSION};
use output::{sha256_hex, write_atomic};

#[derive(Parser)]
#[command(name = "diwt", version, about = "Discrete index Whittaker transforms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// JSON job configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; a manifest is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress informational messages.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a special function: W, K, K0, D, erfc or J.
    Eval(EvalArgs),
    /// The forward series at the points of `x_grid`.
    Forward,
    /// Recover coefficients from a function by the inversion formula.
    Invert,
    /// The coefficient transform of a function.
    Coeff,
    /// Rebuild a function from coefficients by the synthesis series.
    Synthesize,
    /// Transform, invert and compare against the input.
    Roundtrip {
        /// 1: series and inversion; 2: coefficient transform and synthesis.
        #[arg(long)]
        theorem: Option<u8>,
    },
    /// Run identity and bound checks.
    Identity {
        /// Check ids, repeated or comma separated.
        #[arg(long = "check", value_delimiter = ',')]
        checks: Vec<String>,
        /// Run every check.
        #[arg(long)]
        all: bool,
        /// Random draws per check; without it the fixed parameter sets run.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Build or load kernel tables.
    #[command(subcommand)]
    KernelTable(TableCmd),
    /// Re-run a command from its manifest and verify the output digests.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct EvalArgs {
    function: String,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
}

#[derive(Subcommand)]
enum TableCmd {
    /// Tabulate a kernel; written to the cache directory unless --out is given.
    Build,
    /// Verify a table file and write it back out.
    Load { path: PathBuf },
}

fn main() {
    let cli = Cli::parse();
    let quiet = cli.global.quiet;
    let code = match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("diwt: {f}");
            f.exit_code()
        }
    };
    if code != 0 && !quiet {
        eprintln!("diwt: exit code {code}");
    }
    std::process::exit(code);
}

fn execute(cli: Cli) -> Result<i32, Failure> {
    let g = &cli.global;
    let mut config = match &g.config {
        Some(path) => JobConfig::load(path)?,
        None => JobConfig::default(),
    };
    if let Some(p) = g.precision {
        config.precision = Some(match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        });
    }
    if g.seed.is_some() {
        config.seed = g.seed;
    }
    let out = g.out.clone().or_else(|| config.output.take());
    let command = match cli.command {
        Cmd::Eval(args) => {
            config.function = Some(args.function);
            let set = |slot: &mut Option<Num>, v: Option<f64>| {
                if let Some(v) = v {
                    *slot = Some(Num(v));
                }
            };
            set(&mut config.mu, args.mu);
            set(&mut config.tau, args.tau);
            set(&mut config.nu, args.nu);
            if args.n.is_some() {
                config.n = args.n;
            }
            if !args.x.is_empty() {
                config.x_grid = Some(args.x.into_iter().map(Num).collect());
            }
            Command::Eval
        }
        Cmd::Forward => Command::Forward,
        Cmd::Invert => Command::Invert,
        Cmd::Coeff => Command::Coeff,
        Cmd::Synthesize => Command::Synthesize,
        Cmd::Roundtrip { theorem } => {
            if theorem.is_some() {
                config.theorem = theorem;
            }
            Command::Roundtrip
        }
        Cmd::Identity { checks, all, trials } => {
            if all {
                config.checks = Some(commands::all_checks());
            } else if !checks.is_empty() {
                config.checks = Some(checks);
            }
            if trials.is_some() {
                config.trials = trials;
            }
            Command::Identity
        }
        Cmd::KernelTable(TableCmd::Build) => Command::KernelTableBuild,
        Cmd::KernelTable(TableCmd::Load { path }) => return load_table(&path, &config, out.as_deref(), g.quiet),
        Cmd::Replay { manifest } => return replay(&manifest, out, g.quiet),
    };
    produce(command, config, out, g.quiet)
}

/// Runs a command, writes its output and manifest, and returns the exit code.
fn produce(command: Command, config: JobConfig, out: Option<PathBuf>, quiet: bool) -> Result<i32, Failure> {
    let start = Instant::now();
    let outcome = commands::run(command, &config)?;
    let wall = start.elapsed().as_secs_f64();
    let code = report(&outcome);
    match out.or(outcome.default_path.clone()) {
        Some(path) => {
            write_atomic(&path, &outcome.bytes)?;
            let manifest = RunManifest {
                command,
                quad: config.quad(),
                config,
                tool_version: TOOL_VERSION.to_string(),
                wall_time_seconds: wall,
                exit_code: code,
                outputs: vec![OutputDigest {
                    path: path.clone(),
                    sha256: sha256_hex(&outcome.bytes),
                }],
            };
            write_atomic(&manifest_path(&path), &output::json_bytes(&manifest))?;
            if !quiet {
                eprintln!("diwt: wrote {}", path.display());
            }
        }
        None => stdout(&outcome.bytes)?,
    }
    Ok(code)
}

fn report(outcome: &Outcome) -> i32 {
    match &outcome.failure {
        Some(f) => {
            eprintln!("diwt: {f}");
            f.exit_code()
        }
        None => 0,
    }
}

fn stdout(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Persistence(format!("cannot write to stdout: {e}")))
}

fn replay(path: &Path, out: Option<PathBuf>, quiet: bool) -> Result<i32, Failure> {
    let manifest = RunManifest::load(path)?;
    let recorded = manifest
        .outputs
        .first()
        .ok_or_else(|| Failure::Persistence("manifest lists no outputs".into()))?;
    let outcome = commands::run(manifest.command, &manifest.config)?;
    let target = out.unwrap_or_else(|| recorded.path.clone());
    write_atomic(&target, &outcome.bytes)?;
    let digest = sha256_hex(&outcome.bytes);
    if digest != recorded.sha256 {
        return Err(Failure::Persistence(format!(
            "replayed output {} has digest {digest}, manifest records {}",
            target.display(),
            recorded.sha256
        )));
    }
    if !quiet {
        eprintln!("diwt: reproduced {} (sha256 {digest})", target.display());
    }
    Ok(report(&outcome))
}

fn load_table(path: &Path, config: &JobConfig, out: Option<&Path>, quiet: bool) -> Result<i32, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Persistence(format!("cannot read {}: {e}", path.display())))?;
    let loaded = table::decode(&bytes)?;
    if loaded.version != TOOL_VERSION {
        return Err(Failure::Persistence(format!(
            "table written by version {}, this is {TOOL_VERSION}",
            loaded.version
        )));
    }
    if config.kernel.is_some() {
        let expected = commands::kernel_spec(config, &config.quad())?;
        if expected != loaded.spec {
            return Err(Failure::Persistence(format!(
                "table {} does not match the configured kernel",
                path.display()
            )));
        }
    }
    let encoded = table::encode(&loaded);
    match out {
        Some(target) => write_atomic(target, &encoded)?,
        None => stdout(&encoded)?,
    }
    if !quiet {
        eprintln!(
            "diwt: loaded {} entries ({} failed) from {}",
            loaded.entries.len(),
            loaded.failed(),
            path.display()
        );
    }
    Ok(0)
}
