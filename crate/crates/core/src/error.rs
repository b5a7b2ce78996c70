use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The problem instance violates a model invariant.
    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Eigenvalue outside the complex-root regime of the recurrence.
    #[error("lambda0 = {lambda0} is outside the complex-root regime [0, 4)")]
    Regime { lambda0: f64 },

    /// Double root of the characteristic polynomial; the sequence is constant.
    #[error("characteristic polynomial has a double root at 1 (lambda0 = 0); use the constant solution")]
    DegenerateRoots,

    #[error("inverse iteration for eigenvalue #{index} stalled after {sweeps} sweeps (residual {residual:e}, target {target:e})")]
    InverseIteration {
        index: usize,
        sweeps: usize,
        residual: f64,
        target: f64,
    },

    #[error("dense oracle limited to N <= {limit}, got N = {n}")]
    OracleSize { n: usize, limit: usize },

    #[error("Jacobi oracle did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    OracleConvergence { sweeps: usize, off_norm: f64 },

    /// A solve inside an experiment failed; `k` identifies the instance.
    #[error("solve failed at k = {k}: {source}")]
    AtInstance {
        k: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical solver (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::InverseIteration { .. } | Error::OracleConvergence { .. } => true,
            Error::AtInstance { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
