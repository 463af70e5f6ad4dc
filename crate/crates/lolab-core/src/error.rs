use thiserror::Error;

/// Everything that can go wrong when building or querying the objects in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity {0} is outside 1..=24")]
    ArityOutOfRange(usize),
    #[error("mask {bits:#x} does not fit in width {width}")]
    MaskOutOfRange { bits: u64, width: usize },
    #[error("variable {var} is outside [1, {arity}]")]
    VariableOutOfRange { var: usize, arity: usize },
    #[error("table needs {expected} entries, got {found}")]
    TableLength { expected: usize, found: usize },
    #[error("value {value} at mask {mask:#x} is not below {levels}")]
    ValueOutOfRange { mask: usize, value: u8, levels: u8 },
    #[error("target size {0} is outside 2..=16")]
    LevelsOutOfRange(usize),
    #[error("table has {table} values but the target relation has domain {target}")]
    DomainMismatch { table: u8, target: u8 },
    #[error("relation is not invariant under coordinate permutations")]
    NotSymmetric,
    #[error("at least two colours are needed, got {0}")]
    TooFewColours(usize),
    #[error("operation needs a table over {{0,1,2}}, got {0} values")]
    NotTernary(u8),
    #[error("set {mask:#x} already has value {value}")]
    SameValue { mask: usize, value: u8 },
    #[error("set {0:#x} is a 2-set")]
    TwoSet(usize),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("minor map image {image} is outside [1, {target}]")]
    MapOutOfRange { image: usize, target: usize },
    #[error("chain link {0} is not the minor of its predecessor")]
    BrokenChain(usize),
    #[error("chains need at least one table")]
    EmptyChain,
    #[error("vertex {vertex} is outside [1, {count}]")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("colour {colour} at vertex {vertex} is not below {levels}")]
    ColourOutOfRange { vertex: usize, colour: u8, levels: u8 },
    #[error("assignment has {found} colours for {expected} vertices")]
    AssignmentLength { expected: usize, found: usize },
    #[error("planting needs at least three vertices, got {0}")]
    InsufficientVertices(usize),
    #[error("integer solution does not satisfy row {0}")]
    NotASolution(usize),
    #[error("no 2-element 1-set contains the dictating variable {0}")]
    MissingPartner(usize),
    #[error("expected a single dictating variable, found {0}")]
    DictatorNotUnique(usize),
    #[error("table is not a polymorphism")]
    NotAPolymorphism,
}

pub type Result<T> = core::result::Result<T, Error>;
