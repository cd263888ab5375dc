mod commands;
mod config;
mod golden;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seqrep::cutoff::Cutoff;
use seqrep::params::ProtocolKind;

use commands::{Ctx, EXIT_INVALID, EXIT_RUNTIME};

/// Secret-key rates of a single sequential quantum repeater.
#[derive(Parser)]
#[command(name = "seqrep", version)]
struct Cli {
    /// Parameter file of `key = value` lines.
    #[arg(long, global = true, env = "SEQREP_CONFIG")]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set p_em=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo samples (validate: 1e6; Monte Carlo cut-off search: 20000).
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// CSV destination; a JSON run record is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate, cut-off and benchmark verdicts at one configuration.
    Rate {
        /// Fixed cut-off (`inf` for none); optimised when absent.
        #[arg(long)]
        n_star: Option<Cutoff>,
        /// `bb84` or `six_state`; the better one when absent.
        #[arg(long)]
        protocol: Option<ProtocolKind>,
        /// Alice-Bob distance in units of L0, repeater at the midpoint.
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Tables over distance, cut-off, position or two parameters
    #[command(subcommand)]
    Sweep(Sweep),
    /// The six repeaterless benchmarks.
    Benchmarks {
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Simulated channel uses against the analytic bounds.
    Validate {
        /// Extra point `p_A,p_B,n_star`. Repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Also check the optimal cut-off of the current configuration.
        #[arg(long)]
        from_config: bool,
        /// Skip the built-in grid.
        #[arg(long)]
        no_grid: bool,
    },
    /// Check the golden fixture files.
    Golden {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
    /// Print the effective parameters.
    Config,
}

#[derive(Subcommand)]
enum Sweep {
    /// Optimised rate against distance, repeater at the midpoint.
    Distance {
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 40.0)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long)]
        no_dark_counts: bool,
    },
    /// Rate against a fixed cut-off.
    Cutoff {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 100_000)]
        to: u64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Leave out the no-cut-off row.
        #[arg(long)]
        no_inf: bool,
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Rate against the repeater position, as fractions of the total length.
    Position {
        #[arg(long, default_value_t = 0.5)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Benchmark verdicts over two parameters.
    Contour {
        /// `field:lo:hi:n`
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 9.6)]
        distance: f64,
    },
}

fn distance_of(cmd: &Command) -> Option<f64> {
    match cmd {
        Command::Rate { distance, .. } | Command::Benchmarks { distance } => *distance,
        Command::Sweep(Sweep::Cutoff { distance, .. } | Sweep::Position { distance, .. }) => *distance,
        _ => None,
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Command::Golden { dir } = &cli.command {
        return golden::run(dir);
    }

    let mut overrides = cli.overrides.clone();
    let load = |ov: &[String]| config::effective_params(cli.config.as_deref(), ov);
    let mut params = match load(&overrides) {
        Ok(p) => p,
        Err(e) => {
            config::report(&e);
            return Ok(EXIT_INVALID);
        }
    };
    if let Some(d) = distance_of(&cli.command) {
        overrides.push(format!("L_total={}", d * params.l0));
        params = match load(&overrides) {
            Ok(p) => p,
            Err(e) => {
                config::report(&e);
                return Ok(EXIT_INVALID);
            }
        };
    }
    if let Command::Config = cli.command {
        print!("{}", params.to_config_string());
        return Ok(0);
    }
    if let Err(e) = config::check(&params) {
        config::report(&e);
        return Ok(EXIT_INVALID);
    }

    let ctx = Ctx {
        params,
        seed: cli.seed,
        samples: cli.samples,
        out: cli.out,
    };
    match cli.command {
        Command::Rate { n_star, protocol, .. } => commands::rate(&ctx, n_star, protocol),
        Command::Benchmarks { .. } => commands::benchmarks(&ctx),
        Command::Sweep(Sweep::Distance {
            from,
            to,
            step,
            no_dark_counts,
        }) => {
            let d = commands::linspace_step(from, to, step)?;
            commands::sweep_distance(&ctx, &d, !no_dark_counts)
        }
        Command::Sweep(Sweep::Cutoff {
            from, to, points, no_inf, ..
        }) => {
            let mut cutoffs: Vec<Cutoff> = commands::log_cutoffs(from, to, points)?
                .into_iter()
                .map(Cutoff::Finite)
                .collect();
            if !no_inf {
                cutoffs.push(Cutoff::Infinite);
            }
            commands::sweep_cutoff(&ctx, &cutoffs)
        }
        Command::Sweep(Sweep::Position { from, to, points, .. }) => {
            if points < 2 {
                anyhow::bail!("need at least two positions");
            }
            let f: Vec<f64> = (0..points)
                .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
                .collect();
            commands::sweep_position(&ctx, &f)
        }
        Command::Sweep(Sweep::Contour { x, y, distance }) => {
            let (x, y) = match (commands::parse_axis(&x), commands::parse_axis(&y)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_INVALID);
                }
            };
            commands::sweep_contour(&ctx, &x, &y, distance)
        }
        Command::Validate {
            points,
            from_config,
            no_grid,
        } => {
            let extra = points
                .iter()
                .map(|p| commands::parse_point(p))
                .collect::<anyhow::Result<Vec<_>>>();
            match extra {
                Ok(extra) => commands::validate(&ctx, &extra, !no_grid, from_config),
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_INVALID)
                }
            }
        }
        Command::Golden { .. } | Command::Config => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    };
    ExitCode::from(code as u8)
}
