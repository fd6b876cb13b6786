//! `cvbdm`: compare the coefficients of variation of two populations with the
//! Bayesian discrepancy measure.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvbdm::ModelSpec;

use crate::config::{ConfigFile, OutputFormat, SamplerOverrides};

#[derive(Debug, Parser)]
#[command(name = "cvbdm", version, about)]
struct Cli {
    /// Worker threads for the samplers and replication studies.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SamplerFlags {
    #[arg(long)]
    seed: Option<u64>,

    /// CV draws per population (Normal model).
    #[arg(long)]
    draws: Option<usize>,

    /// Total MCMC iterations per chain.
    #[arg(long)]
    iterations: Option<usize>,

    #[arg(long)]
    burn_in: Option<usize>,

    #[arg(long)]
    thin: Option<usize>,
}

impl SamplerFlags {
    fn overrides(&self) -> SamplerOverrides {
        SamplerOverrides {
            n_iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            ..Default::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare two samples and report δ_H.
    Compare {
        /// Value CSV (`value` column, optional `count`) or summary TOML.
        data1: PathBuf,
        data2: PathBuf,

        #[arg(long, value_parser = parse_model)]
        model: Option<ModelSpec>,

        /// Run configuration TOML; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,

        #[command(flatten)]
        sampler: SamplerFlags,

        #[arg(long, value_enum)]
        format: Option<OutputFormat>,

        /// Report file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,

        /// Write each population's parameter chain as a trace CSV.
        #[arg(long)]
        emit_traces: bool,

        /// Directory for trace files; defaults to the report's directory.
        #[arg(long)]
        trace_dir: Option<PathBuf>,

        /// Leave the timestamp out so reports are reproducible byte for byte.
        #[arg(long)]
        no_timestamp: bool,
    },

    /// Run a replication study described by a grid TOML.
    Simulate {
        grid: PathBuf,

        /// Directory for `<grid>.csv` and `<grid>.json`; the CSV goes to
        /// standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,

        /// Use the grid's full replication and draw counts.
        #[arg(long)]
        full_scale: bool,

        #[arg(long)]
        seed: Option<u64>,
    },

    /// Recompute one of the bundled worked examples.
    Reproduce {
        /// anthropometric, hodgkin, mirna or covid.
        example: String,

        /// Directory holding the example data files.
        #[arg(long, env = "BDMCV_DATA_DIR")]
        data_dir: Option<PathBuf>,

        #[command(flatten)]
        sampler: SamplerFlags,

        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,

        #[arg(long, short)]
        output: Option<PathBuf>,
    },

    /// Recompute ESS, Geweke scores and autocorrelations of a trace CSV.
    Diagnose {
        trace: PathBuf,

        /// Largest autocorrelation lag.
        #[arg(long, default_value_t = 50)]
        max_lag: usize,

        /// `json` prints the summary, `csv` the autocorrelations.
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,

        #[arg(long, short)]
        output: Option<PathBuf>,

        /// Also write the autocorrelations to this CSV.
        #[arg(long)]
        acf_output: Option<PathBuf>,
    },
}

fn parse_model(s: &str) -> Result<ModelSpec, String> {
    s.parse().map_err(|e: cvbdm::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global() {
            log::warn!("worker pool: {e}");
        }
    }

    let outcome = match cli.command {
        Command::Compare {
            data1,
            data2,
            model,
            config,
            sampler,
            format,
            output,
            emit_traces,
            trace_dir,
            no_timestamp,
        } => {
            let flags = ConfigFile {
                model,
                seed: sampler.seed,
                n_cv_draws: sampler.draws,
                output_format: format,
                emit_traces: emit_traces.then_some(true),
                sampler: sampler.overrides(),
            };
            commands::compare(commands::CompareArgs {
                data: [data1, data2],
                config_file: config,
                flags,
                output,
                trace_dir,
                timestamp: !no_timestamp,
            })
        }
        Command::Simulate {
            grid,
            output,
            full_scale,
            seed,
        } => commands::simulate(&grid, output.as_deref(), full_scale, seed),
        Command::Reproduce {
            example,
            data_dir,
            sampler,
            format,
            output,
        } => commands::reproduce(
            &example,
            data_dir.as_deref(),
            sampler.seed,
            sampler.draws,
            sampler.overrides(),
            format,
            output.as_deref(),
        ),
        Command::Diagnose {
            trace,
            max_lag,
            format,
            output,
            acf_output,
        } => commands::diagnose(&trace, max_lag, format, output.as_deref(), acf_output.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
