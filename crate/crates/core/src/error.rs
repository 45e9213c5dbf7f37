use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {what} = {value} ({constraint})")]
    Domain {
        what: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A beta risk model cannot have the requested familial relative risk
    /// because E[P^2] <= E[P] for any risk P in [0, 1].
    #[error("infeasible: FRR {frr} must stay below 1/mean risk = {bound} (E[P^2] <= E[P])")]
    InfeasibleFrr { frr: f64, bound: f64 },

    #[error(
        "no (IRR, q) solution for FRR1 = {frr1}, FRR2 = {frr2}; best residual {best_residual:.3e}"
    )]
    NoSolution {
        frr1: f64,
        frr2: f64,
        best_residual: f64,
    },

    #[error("ambiguous (IRR, q) solution: {roots:?}")]
    Ambiguous { roots: Vec<(f64, f64)> },

    #[error("FRR {frr} is unattainable at q = {q}; supremum is {supremum}")]
    Unattainable { frr: f64, q: f64, supremum: f64 },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: u64,
        column: String,
        message: String,
    },

    #[error("invalid record {name:?}: {message}")]
    Validation { name: String, message: String },

    #[error("record {name:?}: {source}")]
    Record {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown format {0:?} (expected table, csv or json)")]
    UnknownFormat(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            constraint,
        }
    }

    /// True for errors meaning "the inputs are valid numbers but no model
    /// reproduces them".
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::InfeasibleFrr { .. }
            | Error::NoSolution { .. }
            | Error::Ambiguous { .. }
            | Error::Unattainable { .. } => true,
            Error::Record { source, .. } => source.is_infeasible(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
