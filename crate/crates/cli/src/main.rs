//! `multilat`: network generation, error sweeps, single-node cluster dumps,
//! error-model curves and RSSI-to-distance conversion.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 I/O, 4 topology
//! precondition, 5 trace parse error.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multilat::{FavourRule, Method, PairPolicy};

use crate::config::Config;
use crate::error::CliError;
use crate::output::OutputDir;

#[derive(Parser)]
#[command(name = "multilat", version, about = "Multilateration with intersection-point clustering")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Args)]
struct ClusterFlags {
    /// Comma-separated subset of m1,m2,m3.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Clear the cluster whenever any anchor pair fails to intersect
    /// (Methods 1 and 3).
    #[arg(long)]
    strict_pairs: bool,
    /// Favour-point rule: boundary or center.
    #[arg(long)]
    favour: Option<FavourRule>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random network and write topology.csv / topology.json.
    Generate,
    /// Run the error sweep and write results.csv.
    Sweep {
        #[command(flatten)]
        cluster: ClusterFlags,
        /// Also write plot_M<k>.csv with `e,total_error_pct_range`.
        #[arg(long)]
        plot_data: bool,
        /// Also write per-node results to nodes.csv.
        #[arg(long)]
        node_detail: bool,
    },
    /// Dump circles, intersection points and cluster for one node.
    LocalizeOne {
        #[command(flatten)]
        cluster: ClusterFlags,
        #[arg(long)]
        node: Option<usize>,
        /// Index into the sweep's error grid.
        #[arg(long)]
        e_index: Option<u32>,
    },
    /// Write (real, estimated) curves for the four error models.
    ErrorModels {
        #[arg(long)]
        e: Option<f64>,
        #[arg(long)]
        max_range: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Convert an RSSI trace to a distance curve.
    Rssi {
        /// Trace CSV with `station_id,location_id,true_distance,rssi`.
        #[arg(long, conflicts_with = "synthetic")]
        trace: Option<PathBuf>,
        /// Generate the trace from the shadowing model first.
        #[arg(long)]
        synthetic: bool,
        /// Shadowing standard deviation in dB.
        #[arg(long)]
        sigma: Option<f64>,
    },
}

impl ClusterFlags {
    fn apply(self, cfg: &mut Config) {
        if let Some(methods) = self.methods {
            cfg.sweep.methods = methods;
        }
        if self.strict_pairs {
            cfg.sweep.cluster.pairs = PairPolicy::RequireAll;
        }
        if let Some(favour) = self.favour {
            cfg.sweep.cluster.favour = favour;
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = config::load(cli.common.config.as_deref())?;
    if let Some(seed) = cli.common.seed {
        cfg.network.seed = seed;
        cfg.sweep.seed = seed;
        cfg.error_models.seed = seed;
        cfg.rssi.seed = seed;
    }
    let out = OutputDir::new(&cli.common.out, cli.common.force);

    match cli.command {
        Command::Generate => commands::generate(&cfg, &out),
        Command::Sweep { cluster, plot_data, node_detail } => {
            cluster.apply(&mut cfg);
            commands::sweep(&cfg, &out, plot_data, node_detail)
        }
        Command::LocalizeOne { cluster, node, e_index } => {
            cluster.apply(&mut cfg);
            if let Some(node) = node {
                cfg.localize.node = node;
            }
            if let Some(i) = e_index {
                cfg.localize.e_index = i;
            }
            commands::localize_one(&cfg, &out)
        }
        Command::ErrorModels { e, max_range, samples } => {
            let s = &mut cfg.error_models;
            s.e = e.unwrap_or(s.e);
            s.max_range = max_range.unwrap_or(s.max_range);
            s.samples = samples.unwrap_or(s.samples);
            commands::error_models(&cfg, &out)
        }
        Command::Rssi { trace, synthetic, sigma } => {
            if trace.is_some() {
                cfg.rssi.trace = trace;
            }
            if let Some(sigma) = sigma {
                cfg.rssi.shadowing.sigma = sigma;
            }
            commands::rssi(&cfg, &out, synthetic)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(error::code::VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}
