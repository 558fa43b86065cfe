//! Crate-wide error type. Estimators report failure instead of guessing, so
//! most variants describe a diagnosis ("tail does not decay") rather than a
//! programming error.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("time order violated: t = {t} is before s = {s}")]
    TimeOrder { s: f64, t: f64 },

    #[error("scheme unstable: h * lip(f) = {0} >= 1")]
    UnstableScheme(f64),

    #[error("state became non-finite at t = {0}")]
    NonFiniteState(f64),

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("too few samples for a fit: got {got}, need {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("tail of |g - g_{side}| does not decay (fitted rate {rate})")]
    NonDecayingTail { side: &'static str, rate: f64 },

    #[error("hull tail near shift {shift} did not stabilize below {tol}")]
    NonConvergentTail { shift: f64, tol: f64 },

    #[error("no trial radius absorbs: largest trial {largest} still escapes")]
    NoAbsorbingRadius { largest: f64 },

    #[error("pullback snapshots at t = {t} did not stabilize within lookback {max_lookback} (last delta {last_delta})")]
    LookbackNotConverged {
        t: f64,
        max_lookback: f64,
        last_delta: f64,
    },

    #[error("attraction distances are not eventually decreasing (first rise at |t| = {at})")]
    SemicontinuityViolated { at: f64 },

    #[error("covering induction violated at level {level}: count {count} exceeds cap {cap}")]
    CoveringInduction { level: usize, count: usize, cap: f64 },

    #[error("covering lattice too fine: {cells:.3e} cells requested")]
    LatticeTooFine { cells: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
