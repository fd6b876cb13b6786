//! Replication studies of the CV discrepancy measure and reproduction of the
//! worked examples.

pub mod bootstrap;
pub mod error;
pub mod generate;
pub mod grid;
pub mod input;
pub mod output;
pub mod reproduce;
pub mod study;

pub use bootstrap::{bootstrap_cv_test, BootstrapOutcome};
pub use error::{Result, SimError};
pub use grid::{CellResult, ChainSummary, Reference, SizeSeries, StudyGrid, StudyKind, StudyResult, TrueParams};
pub use input::read_sample;
pub use reproduce::{reproduce_example, ExampleName, ExampleRow, ReproduceOptions};
pub use study::{
    run_bootstrap_study, run_consistency_study, run_fncr_study, run_grid, run_uniformity_check, UniformityResult,
};
