use thiserror::Error;

use crate::instance::ValidationReport;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("unknown player {0:?}")]
    UnknownPlayer(String),
    #[error("no edge between {0:?} and {1:?}")]
    UnknownEdge(String, String),
    #[error("edge set is not a b-matching")]
    NotBMatching,
    #[error("payoffs are not compatible with the matching: {0}")]
    Incompatible(String),
    #[error("solution is not stable ({0} blocking pairs)")]
    NotStable(usize),
    #[error("matching is not of maximum weight (weight {found}, optimum {optimum})")]
    NotMaximum { found: String, optimum: String },
    #[error("instance is not bipartite")]
    NotBipartite,
    #[error("seller/buyer sides are ambiguous: {0}")]
    AmbiguousSides(String),
    #[error("dual solution is infeasible on {0} edges")]
    DualInfeasible(usize),
    #[error("duality gap is nonzero: primal {primal}, dual {dual}")]
    DualityGap { primal: String, dual: String },
    #[error("complementary slackness fails: {0}")]
    Slackness(String),
    #[error("capacity {found} of player {player:?} exceeds the supported bound {bound}")]
    CapacityTooLarge { player: String, found: u32, bound: u32 },
    #[error("{what} size {found} exceeds the configured bound {bound}")]
    BoundExceeded { what: &'static str, found: usize, bound: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("allocation is not in the core: coalition of {} players has deficit {}", .0.coalition.len(), .0.deficit)]
    NotInCore(Box<crate::core_game::CoreViolation>),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
