use crate::eigen::SpectrumReport;
use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("antiderivative check failed at x = {x}: d/dx of antiderivative is {derivative}, W is {w}")]
    AntiderivativeMismatch { x: f64, derivative: f64, w: f64 },
    #[error("generator W is identically zero, so G vanishes everywhere")]
    ZeroGenerator,
    #[error("integral of W vanishes at x = {x} (|∫W| = {value:e}); Q and V are singular there")]
    GVanishes { x: f64, value: f64 },
    #[error("quadrature did not reach tolerance {tol:e} on [{from}, {to}]")]
    Quadrature { from: f64, to: f64, tol: f64 },
    #[error("pole of the effective potential at x = {x}")]
    Pole { x: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("operators live on different grids or have different sizes")]
    GridMismatch,
    #[error("unknown catalog model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` requires parameter `{param}`")]
    MissingParameter { model: String, param: String },
    #[error("eigenfunction is numerically zero on the grid (norm {norm:e})")]
    ZeroEigenfunction { norm: f64 },
    #[error("QR iteration did not converge; {} of {} eigenvalues found", .partial.eigenvalues.len(), .size)]
    NotConverged {
        size: usize,
        partial: Box<SpectrumReport>,
    },
    #[error("malformed matrix CSV at line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad expressions, unknown models, inconsistent specs.
    Spec,
    /// A well-formed model that cannot be evaluated somewhere it was asked to be.
    Domain,
    /// The eigensolver gave up.
    Solver,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_)
            | Error::AntiderivativeMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidGrid(_)
            | Error::GridMismatch
            | Error::UnknownModel(_)
            | Error::MissingParameter { .. }
            | Error::Csv { .. } => ErrorKind::Spec,
            Error::Eval(EvalError::UnboundParameter(_)) => ErrorKind::Spec,
            Error::Eval(_)
            | Error::ZeroGenerator
            | Error::GVanishes { .. }
            | Error::Quadrature { .. }
            | Error::Pole { .. }
            | Error::ZeroEigenfunction { .. } => ErrorKind::Domain,
            Error::NotConverged { .. } => ErrorKind::Solver,
            Error::Io(_) => ErrorKind::Io,
        }
    }
}
