//! Error classification for exit codes: validation problems exit 1,
//! I/O problems exit 2.

use pathway_core::learner::LearnerError;
use pathway_core::policy::PolicyError;
use pathway_core::scenario::ScenarioError;
use pathway_core::simulator::SimulatorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(err: ScenarioError) -> Self {
        match err {
            ScenarioError::Read { .. } | ScenarioError::Write { .. } => {
                CliError::Io(err.to_string())
            }
            ScenarioError::Parse { .. } | ScenarioError::Invalid(_) => {
                CliError::Validation(err.to_string())
            }
        }
    }
}

impl From<LearnerError> for CliError {
    fn from(err: LearnerError) -> Self {
        match err {
            LearnerError::ModelRead { .. } | LearnerError::ModelWrite { .. } => {
                CliError::Io(err.to_string())
            }
            _ => CliError::Validation(err.to_string()),
        }
    }
}

impl From<SimulatorError> for CliError {
    fn from(err: SimulatorError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<PolicyError> for CliError {
    fn from(err: PolicyError) -> Self {
        match err {
            PolicyError::Learner(e) => e.into(),
            PolicyError::Simulator(e) => e.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
