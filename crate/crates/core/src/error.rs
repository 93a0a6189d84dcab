use thiserror::Error;

/// Every failure the engine can report.
///
/// Variants split into input problems (bad PD text, out-of-domain vectors,
/// contracts the caller violated) and internal invariant violations, which
/// signal a bug in the engine itself. [`Error::is_internal`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("MalformedPD: {0}")]
    MalformedPd(String),

    #[error("InconsistentArcs: arc {label} appears {count} time(s), expected exactly 2")]
    InconsistentArcs { label: i64, count: usize },

    #[error("UnknownCrossingId: crossing {0} does not exist")]
    UnknownCrossingId(usize),

    #[error("UnorientedDiagram: {0}")]
    UnorientedDiagram(String),

    #[error("OrientationDependentWrithe: components {first} and {second} have inter-component sign sum {sum}")]
    OrientationDependentWrithe { first: usize, second: usize, sum: i64 },

    #[error("NotAPseudoDiagram: resolution {vertex} could not be verified as an unlink ({crossings} retained crossing(s) left after simplification)")]
    NotAPseudoDiagram { vertex: String, crossings: usize },

    #[error("OutOfDomain: {0}")]
    OutOfDomain(String),

    #[error("NotADifferential: d^2 has nonzero entry {value} at ({row}, {col})")]
    NotADifferential { row: usize, col: usize, value: String },

    #[error("SignInconsistency: d^2 != 0 at ({row}, {col}); edge signs are wrong")]
    SignInconsistency { row: usize, col: usize },

    #[error("NotFiltered: entry ({row}, {col}) lowers the filtration degree by {drop}")]
    NotFiltered { row: usize, col: usize, drop: i64 },

    #[error("OrderViolation: {0}")]
    OrderViolation(String),

    #[error("OddSelfIntersection: self-intersection number {0} is odd")]
    OddSelfIntersection(i64),

    #[error("MultiComponent: diagram has {0} components, a knot is required")]
    MultiComponent(usize),

    #[error("InfeasibleParity: total rank {total} and target {target} differ by an odd amount")]
    InfeasibleParity { total: usize, target: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error signals an engine bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_) | Error::SignInconsistency { .. })
    }

    /// The variant name, used as a stable tag in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MalformedPd(_) => "MalformedPD",
            Error::InconsistentArcs { .. } => "InconsistentArcs",
            Error::UnknownCrossingId(_) => "UnknownCrossingId",
            Error::UnorientedDiagram(_) => "UnorientedDiagram",
            Error::OrientationDependentWrithe { .. } => "OrientationDependentWrithe",
            Error::NotAPseudoDiagram { .. } => "NotAPseudoDiagram",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::NotADifferential { .. } => "NotADifferential",
            Error::SignInconsistency { .. } => "SignInconsistency",
            Error::NotFiltered { .. } => "NotFiltered",
            Error::OrderViolation(_) => "OrderViolation",
            Error::OddSelfIntersection(_) => "OddSelfIntersection",
            Error::MultiComponent(_) => "MultiComponent",
            Error::InfeasibleParity { .. } => "InfeasibleParity",
            Error::Internal(_) => "Internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
