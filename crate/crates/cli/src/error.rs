use std::process::ExitCode;

use cvbdm_sim::SimError;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONVERGENCE: u8 = 3;
pub const EXIT_MISSING_DATA: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    MissingData(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(EXIT_INPUT),
            CliError::Output(_) => ExitCode::FAILURE,
            CliError::MissingData(_) => ExitCode::from(EXIT_MISSING_DATA),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::DataUnavailable { .. } => CliError::MissingData(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<cvbdm::Error> for CliError {
    fn from(e: cvbdm::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
