use thiserror::Error;

/// Errors raised by graph construction and the operations built on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RibbonError {
    #[error("dart count {0} is odd")]
    OddDartCount(usize),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sigma0 is not a permutation of the darts")]
    NotAPermutation,
    #[error("dart {dart} is a fixed point of sigma0 but tails are not allowed")]
    ForbiddenFixedPoint { dart: usize },
    #[error("label {label} collides with another marking")]
    MarkingCollision { label: String },
    #[error("vertex containing dart {dart} has valence below three")]
    ValenceTooLow { dart: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge subset is empty")]
    EmptySubset,
    #[error("edge subset contains every edge")]
    FullSubset,
    #[error("edge subset is not a forest")]
    NotAForest,
    #[error("edge {0} is a loop")]
    LoopEdge(usize),
    #[error("contracting the last edge of the last visible component")]
    LastEdgeOfLastComponent,
    #[error("dart {0} is not a tail tip")]
    NotATail(usize),
    #[error("graph has no tail")]
    NoTail,
    #[error("graph has more than one tail")]
    MultipleTails,
    #[error("label {0} does not mark a vertex")]
    LabelNotOnVertex(String),
    #[error("label {0} does not mark a hole")]
    LabelNotOnHole(String),
    #[error("label {0} does not mark a univalent vertex")]
    NotUnivalent(String),
    #[error("hole {0} is not bounded by a single loop side")]
    NotAMonogon(String),
    #[error("marking {0} would be lost")]
    MarkingLost(String),
    #[error("2g - 2 + n must be positive (g = {genus}, n = {holes})")]
    UnstableParameters { genus: u32, holes: usize },
    #[error("valence profile does not satisfy the Witten identity")]
    ProfileMismatch,
    #[error("no such hole: {0}")]
    NoSuchHole(String),
    #[error("no such edge: {0}")]
    NoSuchEdge(usize),
    #[error("no such dart: {0}")]
    NoSuchDart(usize),
    #[error("restricted dimension {0} is odd")]
    DimensionParity(usize),
    #[error("cell has an even-valence vertex")]
    EvenValence,
    #[error("restricted form is degenerate")]
    Degenerate,
    #[error("degree {got} is not the top degree {expected}")]
    WrongDegree { expected: usize, got: usize },
    #[error("perimeters must be strictly positive")]
    NonPositivePerimeter,
    #[error("edge lengths must be strictly positive")]
    NonPositiveLength,
    #[error("path is not cyclically reduced")]
    NotReduced,
    #[error("path is not closed")]
    NotClosed,
    #[error("invalid rational literal: {0}")]
    BadRational(String),
    #[error("invalid enriched graph: {0}")]
    InvalidEnriched(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, RibbonError>;
