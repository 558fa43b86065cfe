//! Command-line front end: config parsing, the staged experiment pipeline,
//! and the exit-code contract.

pub mod config;
pub mod pipeline;

use std::fmt;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent configuration (exit 2).
    Config(String),
    /// Anything that went wrong past config validation.
    Core(pullback::Error),
}

impl CliError {
    pub fn config(msg: String) -> Self {
        CliError::Config(msg)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Config(_) => None,
            CliError::Core(e) => Some(e),
        }
    }
}

impl From<pullback::Error> for CliError {
    fn from(e: pullback::Error) -> Self {
        CliError::Core(e)
    }
}

/// Exit-code contract: 2 config, 3 numerical instability, 4 non-convergence,
/// 5 failed verification.  Checks that ran but failed also exit 5, handled at
/// the call site since a completed run is not an error value.
pub fn exit_code_for(e: &CliError) -> i32 {
    use pullback::Error::*;
    match e {
        CliError::Config(_) => 2,
        CliError::Core(core) => match core {
            UnstableScheme(_) | NonFiniteState(_) => 3,
            LookbackNotConverged { .. }
            | NoAbsorbingRadius { .. }
            | NonConvergentTail { .. }
            | NonDecayingTail { .. } => 4,
            CoveringInduction { .. } | SemicontinuityViolated { .. } => 5,
            _ => 2,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(exit_code_for(&CliError::config("x".into())), 2);
        assert_eq!(
            exit_code_for(&CliError::Core(pullback::Error::UnstableScheme(2.0))),
            3
        );
        assert_eq!(
            exit_code_for(&CliError::Core(pullback::Error::NoAbsorbingRadius {
                largest: 4.0
            })),
            4
        );
        assert_eq!(
            exit_code_for(&CliError::Core(pullback::Error::CoveringInduction {
                level: 1,
                count: 9,
                cap: 4.0
            })),
            5
        );
        assert_eq!(
            exit_code_for(&CliError::Core(pullback::Error::ModeMismatch {
                left: 2,
                right: 3
            })),
            2
        );
    }
}
