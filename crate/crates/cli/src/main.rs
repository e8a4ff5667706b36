mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use causet_core::chainstats::BoundParams;
use causet_core::noldus::{BoundParse, DEFAULT_EXACT_MAX_SIZE};

use config::{Experiment, ExperimentConfig};
use error::{usage, CliError, CliResult};

/// Causal-set sprinkling, chain-height statistics and Noldus-distance experiments.
#[derive(Parser, Debug)]
#[command(name = "causet-lab", version, allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Master seed; every trial's stream is derived from it.
    #[arg(long, global = true, env = "CAUSET_SEED")]
    seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    plots: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sprinkle one Poisson sample into the interval <0, h e_0>.
    #[command(allow_negative_numbers = true)]
    Sample {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
    },
    /// Estimate c_d from mean chain heights over a λ grid.
    #[command(allow_negative_numbers = true)]
    EstimateC {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda_grid: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Largest expected number of points per trial.
        #[arg(long, default_value_t = 1e7)]
        max_points: f64,
    },
    /// Empirical tail of the height deviation against the concentration bound.
    #[command(allow_negative_numbers = true)]
    Tail {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda_grid: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,2.5,3")]
        mu: Vec<f64>,
        /// Deviation constant; fitted at the smallest λ when absent.
        #[arg(long)]
        k_d: Option<f64>,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        #[arg(long, default_value_t = 1e7)]
        max_points: f64,
    },
    /// Frequency of large Noldus-distance upper bounds against the theorem bound.
    #[command(allow_negative_numbers = true)]
    Converge {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Probe points per axis.
        #[arg(long, default_value_t = 20)]
        probe: usize,
        /// Normalization constant c_d (1 for d=1 and √2 for d=2 by default).
        #[arg(long)]
        c_d: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        k_d: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = BoundParse::A)]
        bound_parse: BoundParse,
        /// Samples up to this size use all sample pairs in the inclusion term.
        #[arg(long, default_value_t = 2000)]
        full_pair_limit: usize,
        #[arg(long, default_value_t = 1e7)]
        max_points: f64,
    },
    /// Exact Noldus distance between two finite causal spaces given as CSV matrices.
    Noldus {
        x1: PathBuf,
        x2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXACT_MAX_SIZE)]
        max_size: usize,
    },
    /// Check the ε-lattice construction and its bracket points.
    #[command(allow_negative_numbers = true)]
    LatticeCheck {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        probe: usize,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_lattice: usize,
        /// Lattice pairs examined by the gap check before it switches to strided sources.
        #[arg(long, default_value_t = 60_000_000)]
        pair_budget: u64,
    },
    /// Rerun a saved config.json.
    Replay { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    let config = build_config(cli)?;
    commands::dispatch(&config)
}

fn build_config(cli: Cli) -> CliResult<ExperimentConfig> {
    let g = cli.global;
    if let Command::Replay { config } = &cli.command {
        let text = std::fs::read_to_string(config).map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
        let mut c: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", config.display())))?;
        if let Some(out) = g.out {
            c.out = out;
        }
        if let Some(seed) = g.seed {
            c.master_seed = seed;
        }
        c.plots |= g.plots;
        validate(&c.experiment)?;
        return Ok(c);
    }
    let experiment = match cli.command {
        Command::Sample { dim, lambda, height } => Experiment::Sample { dim, lambda, height },
        Command::EstimateC {
            dim,
            lambda_grid,
            trials,
            max_points,
        } => Experiment::EstimateC {
            dim,
            lambdas: lambda_grid,
            trials,
            max_points,
        },
        Command::Tail {
            dim,
            lambda_grid,
            trials,
            mu,
            k_d,
            confidence,
            max_points,
        } => Experiment::Tail {
            dim,
            lambdas: lambda_grid,
            trials,
            mus: mu,
            k: k_d,
            confidence,
            max_points,
        },
        Command::Converge {
            dim,
            lambda_grid,
            eps,
            trials,
            probe,
            c_d,
            k_d,
            c1,
            c2,
            bound_parse,
            full_pair_limit,
            max_points,
        } => {
            let c_d = match (c_d, dim) {
                (Some(c), _) => c,
                (None, 1) => 1.0,
                (None, 2) => 2f64.sqrt(),
                (None, _) => return Err(usage(format!("--c-d is required for d={dim}"))),
            };
            Experiment::Converge {
                dim,
                lambdas: lambda_grid,
                eps,
                trials,
                probe,
                params: BoundParams::new(c_d, k_d, c1, c2)?,
                bound_parse,
                full_pair_limit,
                max_points,
            }
        }
        Command::Noldus { x1, x2, max_size } => Experiment::Noldus { x1, x2, max_size },
        Command::LatticeCheck {
            dim,
            eps,
            probe,
            height,
            max_lattice,
            pair_budget,
        } => Experiment::LatticeCheck {
            dim,
            eps,
            probe,
            height,
            max_lattice,
            pair_budget,
        },
        Command::Replay { .. } => unreachable!(),
    };
    validate(&experiment)?;
    Ok(ExperimentConfig {
        master_seed: g.seed.unwrap_or(1),
        out: g.out.unwrap_or_else(|| PathBuf::from("out")),
        plots: g.plots,
        experiment,
    })
}

/// Argument checks that need no computation; everything else is left to the
/// library calls.
fn validate(e: &Experiment) -> CliResult<()> {
    let positive = |name: &str, x: f64| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(usage(format!("{name} must be positive, got {x}")))
        }
    };
    let grid = |lambdas: &[f64]| -> CliResult<()> {
        if lambdas.is_empty() {
            return Err(usage("the λ grid is empty"));
        }
        for &l in lambdas {
            positive("λ", l)?;
        }
        if lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("the λ grid must be strictly ascending"));
        }
        Ok(())
    };
    let dim = |d: usize| if d >= 1 { Ok(()) } else { Err(usage("--dim must be at least 1")) };
    match e {
        Experiment::Sample { dim: d, lambda, height } => {
            dim(*d)?;
            positive("λ", *lambda)?;
            positive("height", *height)
        }
        Experiment::EstimateC { dim: d, lambdas, trials, .. } => {
            dim(*d)?;
            grid(lambdas)?;
            if *trials < 2 {
                return Err(usage(format!("--trials must be at least 2 (sd undefined), got {trials}")));
            }
            Ok(())
        }
        Experiment::Tail {
            dim: d,
            lambdas,
            trials,
            mus,
            confidence,
            k,
            ..
        } => {
            dim(*d)?;
            grid(lambdas)?;
            if *trials < 100 {
                return Err(usage(format!("tail experiments need at least 100 trials, got {trials}")));
            }
            if mus.is_empty() {
                return Err(usage("--mu is empty"));
            }
            if !(*confidence > 0.0 && *confidence < 1.0) {
                return Err(usage(format!("--confidence must lie in (0, 1), got {confidence}")));
            }
            if let Some(k) = k {
                positive("K_d", *k)?;
            }
            Ok(())
        }
        Experiment::Converge {
            dim: d,
            lambdas,
            eps,
            trials,
            probe,
            params,
            ..
        } => {
            dim(*d)?;
            grid(lambdas)?;
            if eps.is_empty() {
                return Err(usage("--eps is empty"));
            }
            for &x in eps {
                positive("ε", x)?;
            }
            if *trials == 0 {
                return Err(usage("--trials must be positive"));
            }
            if *probe < 20 {
                return Err(usage(format!("--probe must be at least 20, got {probe}")));
            }
            params.validate()?;
            Ok(())
        }
        Experiment::Noldus { .. } => Ok(()),
        Experiment::LatticeCheck {
            dim: d,
            eps,
            probe,
            height,
            ..
        } => {
            dim(*d)?;
            positive("height", *height)?;
            if eps.is_empty() {
                return Err(usage("--eps is empty"));
            }
            for &x in eps {
                positive("ε", x)?;
            }
            if *probe < 2 {
                return Err(usage("--probe must be at least 2"));
            }
            Ok(())
        }
    }
}
