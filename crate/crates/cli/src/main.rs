//! `mia-limits`: membership-inference security limits from the command
//! line. Every subcommand prints one JSON document on stdout containing a
//! `report` and a `manifest`; re-running the same invocation reproduces
//! the output byte-for-byte except for the manifest's wall-time field.
//!
//! Exit codes: 0 success, 2 validation error (with a machine-readable
//! error object on stdout), 1 internal error.

mod commands;
mod inputs;
mod render;

use clap::{Parser, Subcommand};
use render::{canonical, render, FloatStyle};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "mia-limits",
    version,
    about = "Statistical limits of membership inference attacks",
    disable_help_subcommand = true
)]
pub struct CliArgs {
    /// Round floats to 6 significant digits and indent the output.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Cap the worker-thread count for parallel kernels.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Central quantity and best attack accuracy for two joint laws given
    /// as JSON matrices.
    Divergence {
        /// Joint law of (parameters, fresh sample): file path or inline JSON.
        #[arg(long)]
        j0: String,
        /// Joint law of (parameters, training sample): file path or inline JSON.
        #[arg(long)]
        j1: String,
        #[arg(long, default_value_t = 0.5)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Worst-case security over all learning procedures for a discrete law.
    DiscreteSecurity {
        /// Distribution: `uniform:K`, a comma list, or a JSON file path.
        #[arg(long)]
        probs: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.5)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Diversity measures and the inequalities relating them.
    Diversity {
        #[arg(long)]
        probs: String,
        /// Also report the diversity extremes at this pinned max probability.
        #[arg(long)]
        max_prob: Option<f64>,
    },
    /// Samples needed to guarantee a target security level.
    SampleSize {
        #[arg(long)]
        probs: String,
        #[arg(long)]
        eps: f64,
    },
    /// Exact security of an explicit procedure by full enumeration.
    DeltaBruteforce {
        #[arg(long)]
        probs: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.5)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Procedure spec: inline JSON or a file path, e.g.
        /// '{"type":"injective"}'.
        #[arg(long)]
        proc: String,
    },
    /// Security lower bound for procedures built on empirical means.
    EmpmeanBound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// The full constant, supplied directly.
        #[arg(long)]
        c_lp: Option<f64>,
        /// CSV of summand samples (one vector per row) to estimate moments.
        #[arg(long)]
        samples: Option<String>,
        /// External normal-approximation constant used with --samples.
        #[arg(long)]
        c_d: Option<f64>,
    },
    /// Interpolating-regressor simulation with a loss-threshold attack.
    OverfitSim {
        /// JSON config: inline or a file path.
        #[arg(long)]
        config: String,
        /// Also write the fraction curves as CSV.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Security lower bound under a differentially private mechanism.
    DpBound {
        #[arg(long, default_value_t = 0.5)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// The nine tabulated diversity-bound cells.
    ReproduceTable1,
}

pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    fn new(code: &'static str, message: String, exit: i32) -> Self {
        Self {
            code,
            message,
            exit,
        }
    }

    pub fn invalid_input(message: String) -> Self {
        Self::new("invalid_input", message, 2)
    }

    pub fn malformed_json(message: String) -> Self {
        Self::new("malformed_json", message, 2)
    }

    pub fn io(message: String) -> Self {
        Self::new("io_error", message, 2)
    }
}

impl From<mia_core::Error> for CliError {
    fn from(err: mia_core::Error) -> Self {
        let code = match &err {
            mia_core::Error::EnumerationGuard { .. } | mia_core::Error::SubsetGuard(..) => {
                "guard_violation"
            }
            _ => "invalid_input",
        };
        Self::new(code, err.to_string(), 2)
    }
}

fn emit_error(code: &str, message: &str, pretty: bool) {
    let value = json!({"error": {"code": code, "message": message}});
    let style = if pretty {
        FloatStyle::Rounded
    } else {
        FloatStyle::Exact
    };
    println!("{}", render(&value, style, pretty));
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(2 * digest.len());
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn run(args: &CliArgs) -> Result<Value, CliError> {
    let started = Instant::now();
    let out = commands::run(args)?;
    let digest = sha256_hex(canonical(&out.report).as_bytes());
    let manifest = json!({
        "subcommand": subcommand_name(&args.command),
        "config": out.config,
        "seed": out.seed,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
        "output_digest": format!("sha256:{digest}"),
    });
    Ok(json!({"manifest": manifest, "report": out.report}))
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Divergence { .. } => "divergence",
        Command::DiscreteSecurity { .. } => "discrete-security",
        Command::Diversity { .. } => "diversity",
        Command::SampleSize { .. } => "sample-size",
        Command::DeltaBruteforce { .. } => "delta-bruteforce",
        Command::EmpmeanBound { .. } => "empmean-bound",
        Command::OverfitSim { .. } => "overfit-sim",
        Command::DpBound { .. } => "dp-bound",
        Command::ReproduceTable1 => "reproduce-table1",
    }
}

fn main() {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(err) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                std::process::exit(0);
            }
            emit_error("usage", &err.to_string(), false);
            std::process::exit(2);
        }
    };

    #[cfg(feature = "parallel")]
    if let Some(threads) = args.threads {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }

    let pretty = args.pretty;
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&args)));
    match outcome {
        Ok(Ok(value)) => {
            let style = if pretty {
                FloatStyle::Rounded
            } else {
                FloatStyle::Exact
            };
            println!("{}", render(&value, style, pretty));
        }
        Ok(Err(err)) => {
            emit_error(err.code, &err.message, pretty);
            std::process::exit(err.exit);
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unexpected internal failure".into());
            emit_error("internal", &message, pretty);
            std::process::exit(1);
        }
    }
}
