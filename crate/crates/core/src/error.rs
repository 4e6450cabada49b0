use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {expected}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("series did not reach the requested tolerance within {max_terms} terms")]
    SeriesNotConverged { max_terms: usize },
    #[error("checkpoint list is empty")]
    EmptyCheckpoints,
    #[error("checkpoint list needs at least two entries, strictly ascending and >= 1")]
    BadCheckpoints,
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("window holds {window} indices per axis but {needed} are required")]
    WindowTooSmall { window: usize, needed: usize },
    #[error("dilated targets overlap; disjointness precondition violated")]
    OverlappingTargets,
    #[error("dilation does not match the target kind: {0}")]
    DilationMismatch(&'static str),
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("intervals of a target must be disjoint")]
    IntersectingIntervals,
    #[error("left and right limits coincide ({0}); the point is not a jump")]
    DegenerateJump(f64),
    #[error("profile is not strictly monotone on the verification grid")]
    NonMonotoneProfile,
    #[error("node index {k} out of range 1..={n}")]
    NodeIndexOutOfRange { k: usize, n: usize },
    #[error("duplicate jump abscissa {0}")]
    DuplicateJump(f64),
    #[error("invalid point specification: {0}")]
    InvalidPoint(String),
    #[error("evaluation point does not lie on the jump set")]
    PointNotOnJumpSet,
    #[error("region lies closer than {min_distance} to the jump set")]
    RegionTouchesJump { min_distance: f64 },
    #[error("direct double sum disagrees with the product form by {0:e}")]
    CrossCheckMismatch(f64),
    #[error("window {window} exceeds the budget of {budget} for this operator")]
    BudgetExceeded { window: usize, budget: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
