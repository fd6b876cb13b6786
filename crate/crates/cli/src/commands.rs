use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cvbdm::mcmc::trace::{read_trace_csv, write_acf_csv, write_trace_csv};
use cvbdm::mcmc::{autocorrelation, geweke_z};
use cvbdm::{check_unimodality, effective_sample_size, paired_differences, Sample, SamplerConfig};
use cvbdm_sim::output::{write_cells_csv, write_example_csv, write_json, write_study_files, write_uniformity_csv};
use cvbdm_sim::reproduce::compare_pair;
use cvbdm_sim::{read_sample, reproduce_example, run_grid, ExampleName, ReproduceOptions, SimError, StudyGrid};
use serde::Serialize;

use crate::config::{ConfigFile, OutputFormat, SamplerOverrides};
use crate::error::{CliError, EXIT_CONVERGENCE};
use crate::report::{
    ChainDiagnostics, ComparisonReport, PopulationReport, Software, SCHEMA_VERSION, TRACE_FORMAT_VERSION,
};

type Outcome = Result<ExitCode, CliError>;

/// Standard output, or a file when `path` is given.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn finish(converged: bool) -> ExitCode {
    if converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: at least one chain failed the convergence gate");
        ExitCode::from(EXIT_CONVERGENCE)
    }
}

pub struct CompareArgs {
    pub data: [PathBuf; 2],
    pub config_file: Option<PathBuf>,
    pub flags: ConfigFile,
    pub output: Option<PathBuf>,
    pub trace_dir: Option<PathBuf>,
    pub timestamp: bool,
}

fn load(path: &Path, model: cvbdm::ModelSpec) -> Result<Sample, CliError> {
    let sample = read_sample(path).map_err(|e| match e {
        SimError::Malformed { .. } => CliError::Input(e.to_string()),
        other => CliError::Input(format!("{}: {other}", path.display())),
    })?;
    model
        .validate(&sample)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(sample)
}

pub fn compare(args: CompareArgs) -> Outcome {
    let file = match &args.config_file {
        Some(p) => ConfigFile::read(p)?,
        None => ConfigFile::default(),
    };
    let config = file.merged(args.flags).resolve()?;
    let samples = [load(&args.data[0], config.model)?, load(&args.data[1], config.model)?];
    let (result, draws) = compare_pair(config.model, &samples, &config.sampler, config.seed, 0)?;
    let unimodality = paired_differences(&draws[0].draws, &draws[1].draws)
        .and_then(|d| check_unimodality(&d))
        .ok();

    let trace_dir = args.trace_dir.clone().unwrap_or_else(|| {
        args.output
            .as_deref()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_default()
    });
    let mut populations = Vec::with_capacity(2);
    for (k, (sample, d)) in samples.iter().zip(&draws).enumerate() {
        let trace_path = if config.emit_traces {
            std::fs::create_dir_all(&trace_dir).ok();
            let path = trace_dir.join(format!("trace_population{}.csv", k + 1));
            let file = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            write_trace_csv(&d.params, BufWriter::new(file))?;
            Some(path.display().to_string())
        } else {
            None
        };
        populations.push(PopulationReport {
            source: args.data[k].display().to_string(),
            n: sample.n(),
            mean: sample.mean(),
            sd: sample.sd(),
            cv_estimate: sample.cv_estimate(),
            posterior_cv_mean: d.draws.mean(),
            cv_draws: d.draws.len(),
            rejected_draws: d.rejected,
            chain: d.chain.as_ref().map(ChainDiagnostics::from),
            trace_path,
        });
    }
    let converged = draws.iter().all(|d| d.chain.as_ref().is_none_or(|c| c.converged));
    let timestamp = args.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    let report = ComparisonReport {
        schema_version: SCHEMA_VERSION.into(),
        software: Software::current(),
        timestamp,
        config,
        result,
        populations,
        unimodality,
        converged,
    };

    let mut out = sink(args.output.as_deref())?;
    match report.config.output_format {
        OutputFormat::Json => write_json(&report, &mut out)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(ComparisonReport::csv_header()).map_err(SimError::from)?;
            w.write_record(report.csv_record()).map_err(SimError::from)?;
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(finish(converged))
}

pub fn simulate(grid_path: &Path, output: Option<&Path>, full_scale: bool, seed: Option<u64>) -> Outcome {
    let mut grid = StudyGrid::from_toml_file(grid_path)?;
    if full_scale {
        grid = grid.at_full_scale();
    }
    if let Some(s) = seed {
        grid.master_seed = s;
    }
    let result = run_grid(&grid)?;
    for chains in &result.chains {
        if !chains.all_mixing() {
            log::warn!(
                "{} of {} chains passed the convergence gate",
                chains.converged,
                chains.total
            );
        }
    }
    match output {
        Some(dir) => {
            let stem = grid_path
                .file_stem()
                .map_or_else(|| "study".to_string(), |s| s.to_string_lossy().into_owned());
            write_study_files(&result, dir, &stem)?;
        }
        None => {
            let mut out = sink(None)?;
            if result.cells.is_empty() {
                write_uniformity_csv(&result, &mut out)?;
            } else {
                write_cells_csv(&result, &mut out)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn reproduce(
    example: &str,
    data_dir: Option<&Path>,
    seed: Option<u64>,
    draws: Option<usize>,
    overrides: SamplerOverrides,
    format: OutputFormat,
    output: Option<&Path>,
) -> Outcome {
    let example: ExampleName = example.parse()?;
    let defaults = ReproduceOptions::default();
    let cv_draws = draws.unwrap_or(defaults.cv_draws);
    let model = example.model();
    let sampler = (!overrides.is_empty()).then(|| {
        let base = if model.uses_mcmc() {
            model.default_config()
        } else {
            SamplerConfig::direct(cv_draws)
        };
        overrides.apply(base)
    });
    let options = ReproduceOptions {
        seed: seed.unwrap_or(defaults.seed),
        cv_draws,
        sampler,
    };
    let rows = reproduce_example(example, data_dir, &options)?;
    let mut out = sink(output)?;
    match format {
        OutputFormat::Json => write_json(&rows, &mut out)?,
        OutputFormat::Csv => write_example_csv(&rows, &mut out)?,
    }
    out.flush()?;
    Ok(finish(rows.iter().flat_map(|r| &r.chains).all(|c| c.converged)))
}

#[derive(Debug, Serialize)]
struct CoordinateDiagnostics {
    name: String,
    ess: Option<f64>,
    /// ESS divided by the number of draws.
    ess_ratio: Option<f64>,
    geweke_z: Option<f64>,
    acf_lag1: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DiagnosticSummary {
    trace_format_version: &'static str,
    source: String,
    n_draws: usize,
    coordinates: Vec<CoordinateDiagnostics>,
}

pub fn diagnose(
    trace: &Path,
    max_lag: usize,
    format: OutputFormat,
    output: Option<&Path>,
    acf_output: Option<&Path>,
) -> Outcome {
    let file = File::open(trace).map_err(|e| CliError::Input(format!("{}: {e}", trace.display())))?;
    let draws = read_trace_csv(file).map_err(|e| CliError::Input(format!("{}: {e}", trace.display())))?;
    let n = draws.n_rows();
    let finite = |v: f64| v.is_finite().then_some(v);
    let coordinates = draws
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = draws.column(j);
            let ess = effective_sample_size(&col).ok();
            CoordinateDiagnostics {
                name: name.clone(),
                ess,
                ess_ratio: ess.map(|e| e / n as f64),
                geweke_z: finite(geweke_z(&col)),
                acf_lag1: autocorrelation(&col, 1).get(1).copied().and_then(finite),
            }
        })
        .collect();
    let summary = DiagnosticSummary {
        trace_format_version: TRACE_FORMAT_VERSION,
        source: trace.display().to_string(),
        n_draws: n,
        coordinates,
    };
    if let Some(p) = acf_output {
        let file = File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
        write_acf_csv(&draws, max_lag, BufWriter::new(file))?;
    }
    let mut out = sink(output)?;
    match format {
        OutputFormat::Json => write_json(&summary, &mut out)?,
        OutputFormat::Csv => write_acf_csv(&draws, max_lag, &mut out)?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
