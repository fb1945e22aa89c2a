use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(#[from] ValidationError),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{variable}` has no state `{state}`")]
    UnknownState { variable: String, state: String },

    #[error("parameter reference out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot co-vary `{node}` row {row}: entry {state} equals 1")]
    DegenerateRow { node: String, row: usize, state: usize },

    #[error("{count} evidence profiles exceed the cap of {cap}")]
    ProfileCap { count: u128, cap: u128 },

    #[error("joint state space of {size} assignments exceeds the enumeration limit of {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("parameter value {x0} lies on the boundary of [0, 1]; the analysis assumes 0 < x0 < 1")]
    BoundaryParameter { x0: f64 },

    #[error("probability of the evidence is zero")]
    ZeroEvidence,

    #[error("sensitivity function is undefined at x = {x}")]
    Undefined { x: f64 },

    #[error("sensitivity function is linear")]
    NotHyperbolic,

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Structural problems found while loading a network document. Each variant
/// names the offending node and, where relevant, the row.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("variable `{variable}` has duplicate state `{state}`")]
    DuplicateState { variable: String, state: String },

    #[error("variable `{0}` needs at least two states")]
    TooFewStates(String),

    #[error("node `{node}` lists unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },

    #[error("node `{node}` lists parent `{parent}` more than once")]
    DuplicateParent { node: String, parent: String },

    #[error("`{0}` appears in parents or cpt but is not a declared variable")]
    UndeclaredNode(String),

    #[error("parent relation has a cycle through `{0}`")]
    Cycle(String),

    #[error("node `{0}` has no cpt")]
    MissingCpt(String),

    #[error("node `{node}` has {found} cpt rows, expected {expected}")]
    RowCount {
        node: String,
        expected: usize,
        found: usize,
    },

    #[error("node `{node}` row {row} has {found} entries, expected {expected}")]
    RowLength {
        node: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("node `{node}` row {row} entry {state} is {value}, outside [0, 1]")]
    EntryRange {
        node: String,
        row: usize,
        state: usize,
        value: f64,
    },

    #[error("node `{node}` row {row} sums to {sum}")]
    RowSum { node: String, row: usize, sum: f64 },
}
