//! The four worked examples.
//!
//! The anthropometric example runs from bundled summary statistics. The
//! others need the public datasets saved as local files in a data directory:
//!
//! | example | file(s) | columns |
//! |---|---|---|
//! | `hodgkin` | `hodgkin.csv` | `group,value` (active group first) |
//! | `mirna` | `mirna.csv` | `mirna,tissue,value` (tumour tissue first) |
//! | `covid` | `covid_india.csv`, `covid_hongkong.csv` | `value[,count]` |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cvbdm::{bdm_two_populations, cv_draws, rng, BdmResult, ChainReport, ModelSpec, Sample, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::input::{read_grouped_csv, read_values_csv};

/// Bundled anthropometric summaries.
pub const ANTHROPOMETRIC_CSV: &str = include_str!("../data/anthropometric.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    Anthropometric,
    Hodgkin,
    Mirna,
    Covid,
}

impl ExampleName {
    pub const ALL: [ExampleName; 4] = [
        ExampleName::Anthropometric,
        ExampleName::Hodgkin,
        ExampleName::Mirna,
        ExampleName::Covid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleName::Anthropometric => "anthropometric",
            ExampleName::Hodgkin => "hodgkin",
            ExampleName::Mirna => "mirna",
            ExampleName::Covid => "covid",
        }
    }

    pub fn model(self) -> ModelSpec {
        match self {
            ExampleName::Anthropometric => ModelSpec::Normal,
            ExampleName::Hodgkin => ModelSpec::InverseGaussian,
            ExampleName::Mirna => ModelSpec::SkewNormal,
            ExampleName::Covid => ModelSpec::NegativeBinomial,
        }
    }

    /// Files the example reads from the data directory.
    pub fn data_files(self) -> &'static [&'static str] {
        match self {
            ExampleName::Anthropometric => &[],
            ExampleName::Hodgkin => &["hodgkin.csv"],
            ExampleName::Mirna => &["mirna.csv"],
            ExampleName::Covid => &["covid_india.csv", "covid_hongkong.csv"],
        }
    }

    /// Where the raw data were published.
    pub fn source(self) -> &'static str {
        match self {
            ExampleName::Anthropometric => "bundled summary statistics",
            ExampleName::Hodgkin => {
                "Chhikara & Folks (1989), The Inverse Gaussian Distribution, plasma bradykininogen \
                 levels in active (n=17) and inactive (n=28) Hodgkin's disease"
            }
            ExampleName::Mirna => "NCBI GEO series GSE18392 (colon cancer miRNA expression)",
            ExampleName::Covid => {
                "offspring distributions from Laxminarayan et al. (2020, Science; India) and \
                 Adam et al. (2020, Nature Medicine; Hong Kong)"
            }
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleName {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                SimError::Precondition(format!(
                    "unknown example `{s}`; expected one of anthropometric, hodgkin, mirna, covid"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceOptions {
    pub seed: u64,
    /// CV draws per population for the Normal model.
    pub cv_draws: usize,
    /// Overrides the model's default sampler settings.
    pub sampler: Option<SamplerConfig>,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            cv_draws: 100_000,
            sampler: None,
        }
    }
}

impl ReproduceOptions {
    pub fn sampler_config(&self, model: ModelSpec) -> SamplerConfig {
        match (&self.sampler, model) {
            (Some(c), _) => c.clone(),
            (None, ModelSpec::Normal) => SamplerConfig::direct(self.cv_draws),
            (None, m) => m.default_config(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub label: String,
    pub n1: usize,
    pub n2: usize,
    /// Posterior mean CV of each population.
    pub cv1: f64,
    pub cv2: f64,
    pub result: BdmResult,
    pub published: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<ChainReport>,
}

/// One pair of samples to compare.
#[derive(Debug, Clone)]
pub struct ExampleInput {
    pub label: String,
    pub samples: [Sample; 2],
    pub published: Option<f64>,
}

fn field(rec: &csv::StringRecord, i: usize) -> Result<&str> {
    rec.get(i).ok_or_else(|| SimError::Malformed {
        path: PathBuf::from("anthropometric.csv"),
        message: format!("row {rec:?} has no column {i}"),
    })
}

fn num<T: FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let s = field(rec, i)?;
    s.parse().map_err(|_| SimError::Malformed {
        path: PathBuf::from("anthropometric.csv"),
        message: format!("`{s}` is not a number"),
    })
}

/// The ten bundled anthropometric comparisons (men first).
pub fn anthropometric_inputs() -> Result<Vec<ExampleInput>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(ANTHROPOMETRIC_CSV.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(ExampleInput {
            label: field(&rec, 0)?.to_string(),
            samples: [
                Sample::from_summary(num(&rec, 3)?, num(&rec, 1)?, num(&rec, 2)?)?,
                Sample::from_summary(num(&rec, 6)?, num(&rec, 4)?, num(&rec, 5)?)?,
            ],
            published: Some(num(&rec, 7)?),
        });
    }
    Ok(rows)
}

fn require(example: ExampleName, dir: Option<&Path>, file: &'static str) -> Result<PathBuf> {
    let path = dir.unwrap_or(Path::new(".")).join(file);
    if path.is_file() {
        Ok(path)
    } else {
        Err(SimError::DataUnavailable {
            example: example.name(),
            path,
            source_note: example.source(),
        })
    }
}

fn two_groups(path: &Path, groups: Vec<(Vec<String>, Vec<f64>)>) -> Result<[Sample; 2]> {
    let [(_, a), (_, b)]: [(Vec<String>, Vec<f64>); 2] =
        groups.try_into().map_err(|g: Vec<_>| SimError::Malformed {
            path: path.to_path_buf(),
            message: format!("expected exactly two groups, found {}", g.len()),
        })?;
    Ok([Sample::from_values(a)?, Sample::from_values(b)?])
}

/// Loads the comparisons of `example`; the anthropometric example ignores
/// `data_dir`.
pub fn example_inputs(example: ExampleName, data_dir: Option<&Path>) -> Result<Vec<ExampleInput>> {
    match example {
        ExampleName::Anthropometric => anthropometric_inputs(),
        ExampleName::Hodgkin => {
            let path = require(example, data_dir, "hodgkin.csv")?;
            let groups = read_grouped_csv(&path, &["group"])?;
            Ok(vec![ExampleInput {
                label: "bradykininogen".into(),
                samples: two_groups(&path, groups)?,
                published: Some(0.2532),
            }])
        }
        ExampleName::Mirna => {
            let path = require(example, data_dir, "mirna.csv")?;
            let groups = read_grouped_csv(&path, &["mirna", "tissue"])?;
            let mut names: Vec<String> = Vec::new();
            for (k, _) in &groups {
                if !names.contains(&k[0]) {
                    names.push(k[0].clone());
                }
            }
            names
                .into_iter()
                .map(|name| {
                    let g: Vec<_> = groups.iter().filter(|(k, _)| k[0] == name).cloned().collect();
                    let published = match name.to_ascii_lowercase().as_str() {
                        "mir-182" => Some(0.9997),
                        "mir-183" => Some(0.9964),
                        "mir-96" => Some(1.0),
                        _ => None,
                    };
                    Ok(ExampleInput {
                        samples: two_groups(&path, g)?,
                        label: name,
                        published,
                    })
                })
                .collect()
        }
        ExampleName::Covid => {
            let india = require(example, data_dir, "covid_india.csv")?;
            let hong_kong = require(example, data_dir, "covid_hongkong.csv")?;
            Ok(vec![ExampleInput {
                label: "India vs Hong Kong".into(),
                samples: [read_values_csv(&india)?, read_values_csv(&hong_kong)?],
                published: Some(0.00972),
            }])
        }
    }
}

/// Compares one pair of samples; population `k` of row `row` samples with
/// seed `derive_seed(seed, [row, k + 1])`, and both populations run in
/// parallel.
pub fn compare_pair(
    model: ModelSpec,
    samples: &[Sample; 2],
    config: &SamplerConfig,
    seed: u64,
    row: u64,
) -> Result<(BdmResult, [cvbdm::CvDraws; 2])> {
    let run = |k: usize| {
        let s = rng::derive_seed(seed, &[row, rng::POPULATION_STREAMS[k]]);
        cv_draws(model, &samples[k], config, s)
    };
    let (a, b) = rayon::join(|| run(0), || run(1));
    let (a, b) = (a?, b?);
    let result = bdm_two_populations(&a.draws, &b.draws)?;
    Ok((result, [a, b]))
}

/// Runs every comparison of `example`.
pub fn reproduce_example(
    example: ExampleName,
    data_dir: Option<&Path>,
    options: &ReproduceOptions,
) -> Result<Vec<ExampleRow>> {
    let model = example.model();
    let config = options.sampler_config(model);
    let inputs = example_inputs(example, data_dir)?;
    inputs
        .iter()
        .enumerate()
        .map(|(row, input)| {
            for s in &input.samples {
                model.validate(s)?;
            }
            let (result, [a, b]) = compare_pair(model, &input.samples, &config, options.seed, row as u64)?;
            Ok(ExampleRow {
                label: input.label.clone(),
                n1: input.samples[0].n(),
                n2: input.samples[1].n(),
                cv1: a.draws.mean(),
                cv2: b.draws.mean(),
                result,
                published: input.published,
                chains: a.chain.into_iter().chain(b.chain).collect(),
            })
        })
        .collect()
}
