use std::fmt;

use thiserror::Error;

/// Pipeline stage a failure originated in. Used to tag errors bubbling out of
/// composite operations such as [`crate::marchenko::invert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Validation,
    BuildF,
    Marchenko,
    Potential,
    Forward,
    Riemann,
    Extraction,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Validation => "validation",
            Stage::BuildF => "build_F",
            Stage::Marchenko => "marchenko",
            Stage::Potential => "potential",
            Stage::Forward => "forward",
            Stage::Riemann => "riemann",
            Stage::Extraction => "extraction",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("linear system is singular or ill-conditioned (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("no sign change in bracket [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },

    #[error("sample {index} is zero; argument undefined")]
    ZeroSample { index: usize },

    #[error("phase jump of {jump:.3} rad at sample {index} (grid too coarse)")]
    PhaseJump { index: usize, jump: f64 },

    #[error("bound state at kappa = {kappa} is not a simple zero (|f'| = {derivative:.3e})")]
    ZeroNotSimple { kappa: f64, derivative: f64 },

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("index {index} inconsistent with {bound_states} bound state(s)")]
    IndexMismatch { index: i64, bound_states: usize },

    #[error("stripping failure: {0}")]
    Stripping(String),

    #[error("Fourier result has imaginary residual {0:.3e}; input lacks conjugate symmetry")]
    ComplexResidual(f64),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn at(stage: Stage) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// Stage this error was tagged with, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
