use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The result would overflow double precision.
    #[error("overflow in {op}: {detail}")]
    Overflow { op: &'static str, detail: String },

    /// A physical or configuration parameter failed validation.
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    /// A density matrix violates the X-state invariants.
    #[error("invalid X-state: {0}")]
    InvalidState(String),

    /// The coupling is too strong for the leading-order joint state.
    #[error("perturbative validity violated: p_a + p_b = {sum} >= 1")]
    Perturbative { sum: f64 },

    /// A numerical procedure failed to converge to the requested tolerance.
    #[error("convergence failure in {op}: {detail}")]
    Convergence { op: &'static str, detail: String },

    /// A search bracket does not satisfy the method's precondition.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// An error raised while evaluating one point of a parameter grid.
    #[error("at {variable} = {value}: {source}")]
    GridPoint {
        variable: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter { name, detail: detail.into() }
    }

    /// True for errors caused by a numerical procedure rather than by the inputs.
    pub fn is_convergence(&self) -> bool {
        match self {
            Error::Convergence { .. } => true,
            Error::GridPoint { source, .. } => source.is_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
