//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 invalid config,
//! 3 numerical divergence (results are still written).

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dklms::graph::HopMask;
use dklms::harness::config::parse_algorithms;
use dklms::harness::{emit_results, run_experiment, ExperimentConfig, Overrides, Setup};
use dklms::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "dklms", version, about = "Diffusion kernel LMS network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Masking {
    None,
    OneHopPowers,
    OneHopRecursive,
}

impl From<Masking> for HopMask {
    fn from(m: Masking) -> Self {
        match m {
            Masking::None => HopMask::None,
            Masking::OneHopPowers => HopMask::OneHopPowers,
            Masking::OneHopRecursive => HopMask::OneHopRecursive,
        }
    }
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    noise_variance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write `<name>.csv` and `<name>.manifest.toml`.
    Run {
        #[command(flatten)]
        common: ConfigArgs,
        /// Output directory (config key `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of dklms,noncoop_klms,linear_dlms,centralized_klms.
        #[arg(long)]
        algorithms: Option<String>,
        #[arg(long, value_enum)]
        hop_masking: Option<Masking>,
        /// Also compute regret against the kernel ridge comparator.
        #[arg(long)]
        regret: bool,
    },
    /// Write the generated observation streams as CSV.
    DumpStream {
        #[command(flatten)]
        common: ConfigArgs,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a built-in config.
    DefaultConfig {
        #[arg(default_value = "experiment1")]
        which: String,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn load(common: &ConfigArgs, extra: Overrides) -> Result<ExperimentConfig, Error> {
    let cfg = ExperimentConfig::load(&common.config).map_err(|e| match e {
        Error::Io { context, source } => Error::Config {
            field: "--config".into(),
            message: format!("{context}: {source}"),
        },
        other => other,
    })?;
    Overrides {
        seed: common.seed,
        trials: common.trials,
        steps: common.steps,
        noise_variance: common.noise_variance,
        ..extra
    }
    .apply(cfg)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run {
            common,
            out,
            algorithms,
            hop_masking,
            regret,
        } => {
            let algorithms = algorithms.as_deref().map(parse_algorithms).transpose()?;
            let cfg = load(
                &common,
                Overrides {
                    output_dir: out,
                    algorithms,
                    hop_masking: hop_masking.map(Into::into),
                    regret: regret.then_some(true),
                    ..Default::default()
                },
            )?;
            let outcome = run_experiment(&cfg)?;
            let files = emit_results(&outcome, &cfg.output_dir)?;
            for t in &outcome.traces {
                let mut line = format!("{:<17} steady-state MSE {:.6e}", t.algorithm.name(), t.steady_state_mse);
                if let Some(r) = &t.regret {
                    line.push_str(&format!("  regret slope {:.3}", r.slope));
                }
                if let Some(n) = t.diverged_at {
                    line.push_str(&format!("  DIVERGED at step {n}"));
                }
                println!("{line}");
            }
            println!("wrote {}", files.metrics.display());
            println!("wrote {}", files.manifest.display());
            if let Some(p) = files.regret {
                println!("wrote {}", p.display());
            }
            Ok(if outcome.diverged() { EXIT_DIVERGED } else { 0 })
        }
        Command::DumpStream { common, output } => {
            let cfg = load(&common, Overrides::default())?;
            let setup = Setup::new(&cfg)?;
            let mut sink: Box<dyn Write> = match &output {
                Some(p) => Box::new(io::BufWriter::new(
                    std::fs::File::create(p).map_err(|e| Error::Io {
                        context: format!("creating {}", p.display()),
                        source: e,
                    })?,
                )),
                None => Box::new(io::BufWriter::new(io::stdout().lock())),
            };
            for trial in 0..cfg.trials {
                setup
                    .stream(trial)?
                    .write_csv(&mut sink, trial, trial == 0)
                    .and_then(|_| sink.flush())
                    .map_err(|e| Error::Io {
                        context: "writing stream dump".into(),
                        source: e,
                    })?;
            }
            Ok(0)
        }
        Command::DefaultConfig { which } => {
            let cfg = match which.as_str() {
                "experiment1" => ExperimentConfig::experiment1(),
                "experiment2" => ExperimentConfig::experiment2(),
                other => {
                    return Err(Error::Config {
                        field: "which".into(),
                        message: format!("unknown built-in `{other}`"),
                    })
                }
            };
            print!("{}", cfg.to_toml_string());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
