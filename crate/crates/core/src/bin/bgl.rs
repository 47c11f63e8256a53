use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bgl::bench::BenchConfig;
use bgl::commands::{
    cmd_bench, cmd_denoise, cmd_gen, cmd_learn, exit_code, BenchArgs, DenoiseArgs, GenArgs,
    LearnArgs, LearnInput,
};
use bgl::learn::{InitMode, LearnConfig};
use bgl::pocs::{PocsConfig, RhoSchedule};
use bgl::spectral::DEFAULT_CUTOFF;
use bgl::synth::SynthSpec;

/// Balanced signed graph learning from data.
#[derive(Parser)]
#[command(name = "bgl", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a balanced ER graph and GMRF samples.
    Gen {
        #[command(flatten)]
        synth: SynthFlags,
        #[arg(long, default_value_t = 500)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn a balanced signed Laplacian from data or a covariance.
    Learn {
        /// Node-per-row data CSV.
        #[arg(long, conflicts_with = "covariance", required_unless_present = "covariance")]
        input: Option<PathBuf>,
        /// Covariance JSON {"n", "C"}.
        #[arg(long)]
        covariance: Option<PathBuf>,
        #[arg(long)]
        moving_average: Option<usize>,
        /// Normalize each row of the data to zero mean and unit variance.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        learn: LearnFlags,
        #[arg(long, value_parser = ["clime-greed"])]
        baseline: Option<String>,
        #[arg(long)]
        baseline_rho: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the synthetic benchmark for both estimators.
    Bench {
        #[command(flatten)]
        synth: SynthFlags,
        #[arg(long, default_value_t = 500)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[command(flatten)]
        learn: LearnFlags,
        #[arg(long)]
        baseline_rho: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record wall-clock runtimes (outputs are then not reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Low-pass filter signals on a learned balanced graph.
    Denoise {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signals: PathBuf,
        /// Clean reference for per-signal MSE.
        #[arg(long)]
        clean: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SynthFlags {
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    #[arg(long, default_value_t = 0.01)]
    weight_lo: f64,
    #[arg(long, default_value_t = 1.0)]
    weight_hi: f64,
    #[arg(long, default_value_t = 2.5)]
    selfloop_factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SynthFlags {
    fn spec(&self) -> SynthSpec {
        SynthSpec {
            n: self.n,
            p: self.p,
            weight_range: (self.weight_lo, self.weight_hi),
            selfloop_factor: self.selfloop_factor,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct LearnFlags {
    #[arg(long, default_value_t = RhoSchedule::default().rho_init)]
    rho_init: f64,
    #[arg(long, default_value_t = RhoSchedule::default().growth)]
    rho_growth: f64,
    #[arg(long, default_value_t = RhoSchedule::default().rho_max)]
    rho_max: f64,
    #[arg(long, default_value_t = PocsConfig::default().max_cycles)]
    max_cycles: usize,
    #[arg(long, default_value_t = PocsConfig::default().stagnation_tol)]
    stagnation_tol: f64,
    #[arg(long, default_value_t = PocsConfig::default().violation_tol)]
    violation_tol: f64,
    #[arg(long, default_value_t = LearnConfig::default().max_sweeps)]
    max_sweeps: usize,
    #[arg(long, default_value_t = LearnConfig::default().conv_tol)]
    conv_tol: f64,
    /// Seed of the greedy polarity initialization.
    #[arg(long = "learn-seed", default_value_t = 0)]
    learn_seed: u64,
    #[arg(long, default_value_t = InitMode::CovarianceGreedy)]
    init_mode: InitMode,
}

impl LearnFlags {
    fn config(&self) -> LearnConfig {
        LearnConfig {
            rho_schedule: RhoSchedule {
                rho_init: self.rho_init,
                growth: self.rho_growth,
                rho_max: self.rho_max,
            },
            pocs: PocsConfig {
                max_cycles: self.max_cycles,
                stagnation_tol: self.stagnation_tol,
                violation_tol: self.violation_tol,
            },
            max_sweeps: self.max_sweeps,
            conv_tol: self.conv_tol,
            seed: self.learn_seed,
            init_mode: self.init_mode,
        }
    }
}

fn run(cmd: Cmd) -> bgl::Result<()> {
    match cmd {
        Cmd::Gen { synth, k, out } => cmd_gen(&GenArgs {
            spec: synth.spec(),
            k,
            out,
        }),
        Cmd::Learn {
            input,
            covariance,
            moving_average,
            normalize,
            learn,
            baseline,
            baseline_rho,
            out,
        } => {
            let input = match (input, covariance) {
                (Some(path), _) => LearnInput::Data {
                    path,
                    moving_average,
                    normalize,
                },
                (None, Some(path)) => LearnInput::Covariance { path },
                (None, None) => unreachable!("clap requires one input"),
            };
            cmd_learn(&LearnArgs {
                input,
                config: learn.config(),
                clime_greed: baseline.is_some(),
                baseline_rho,
                out,
            })
        }
        Cmd::Bench {
            synth,
            k,
            trials,
            learn,
            baseline_rho,
            jobs,
            timing,
            out,
        } => cmd_bench(&BenchArgs {
            config: BenchConfig {
                synth: synth.spec(),
                k,
                trials,
                learn: learn.config(),
                baseline_rho,
                jobs,
                timing,
            },
            out,
        })
        .map(|_| ()),
        Cmd::Denoise {
            graph,
            signals,
            clean,
            cutoff,
            out,
        } => cmd_denoise(&DenoiseArgs {
            graph,
            signals,
            clean,
            cutoff,
            out,
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BGL_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
