use thiserror::Error;

use crate::group::{GroupElement, GroupId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elements of different groups ({left} vs {right}) cannot be combined or compared")]
    GroupMismatch { left: GroupId, right: GroupId },

    #[error("index {index} out of range for a set of size {size}")]
    OutOfRange { index: usize, size: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("group element is not unique; {} candidates: {candidates:?}", candidates.len())]
    Ambiguous { candidates: Vec<GroupElement> },

    #[error("no group element relates the two models")]
    Unrelated,

    #[error("section '{section}' is undefined on this orbit: {reason}")]
    SectionUndefined { section: String, reason: String },

    #[error("branches {first} and {second} lie on the same orbit")]
    SameOrbit { first: usize, second: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("empty superposition")]
    Empty,

    #[error("selector is undefined on the orbit of branch {branch}")]
    SelectorUndefined { branch: usize },

    #[error("branch {branch} does not lie on section '{section}'")]
    NotOnSection { branch: usize, section: String },

    #[error("basis dimension {dimension} exceeds the limit {limit}")]
    DimensionOverflow { dimension: u128, limit: usize },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("field set '{0}' is missing")]
    MissingField(String),

    #[error("observable '{0}' is missing")]
    MissingObservable(String),

    #[error("worldline '{0}' is missing")]
    MissingWorldline(String),

    #[error("field set '{field}' is degenerate: points {groups:?} share values")]
    DegenerateFrame { field: String, groups: Vec<Vec<usize>> },

    #[error("field value sets differ; unmatched tuples {unmatched:?}")]
    ValueSetMismatch { unmatched: Vec<[i64; 4]> },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("worldline crossings differ across branches: {first} vs {second}")]
    CrossingCountMismatch { first: usize, second: usize },

    #[error("value {0:?} lies outside the reference-field image")]
    OutsideImage([i64; 4]),

    #[error("points ({p}, {q}) are not localised under the comparison map")]
    NotLocalised { p: usize, q: usize },
}
