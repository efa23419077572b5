use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes. The CLI and the C ABI map these to exit/status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Precondition,
    Numeric,
    Budget,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Precondition => 3,
            ErrorClass::Numeric => 4,
            ErrorClass::Budget => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Config => "config",
            ErrorClass::Precondition => "precondition",
            ErrorClass::Numeric => "numeric",
            ErrorClass::Budget => "budget",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    LoopEdge(usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge ({0}, {1}) has zero multiplicity")]
    ZeroMultiplicity(usize, usize),
    #[error("edge ({0}, {1}) is not in the graph (or not with that multiplicity)")]
    EdgeNotInGraph(usize, usize),
    #[error("graph has {0} vertices, above the exhaustive limit {1}")]
    TooLargeForExactCheck(usize, usize),
    #[error("endpoints coincide at vertex {0}")]
    SameVertex(usize),
    #[error("graph is disconnected")]
    GraphDisconnected,
    #[error("graph has parallel edges")]
    NotSimple,
    #[error("invalid vertices: {0}")]
    InvalidVertices(String),
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("included edges contain a cycle")]
    IncludeHasCycle,
    #[error("conditioning disconnects the graph")]
    ConditioningDisconnects,
    #[error("graph has {trees} spanning trees (or {n} vertices), above the enumeration cap")]
    TooManyTrees { trees: f64, n: usize },
    #[error("block measures sum to {0}, not 1")]
    MeasuresDontSumToOne(f64),
    #[error("kernel is not symmetric at ({0}, {1})")]
    AsymmetricKernel(usize, usize),
    #[error("entry {value} at ({i}, {j}) out of range")]
    EntryOutOfRange { i: usize, j: usize, value: f64 },
    #[error("{0} blocks exceeds the exact cut-norm limit")]
    TooManyBlocks(usize),
    #[error("graphon is degenerate (some block has zero degree)")]
    DegenerateGraphon,
    #[error("pattern needs {0:e} block assignments, above the cap")]
    PatternTooLarge(f64),
    #[error("part index {0} out of range")]
    PartIndexOutOfRange(usize),
    #[error("embedding enumeration exceeded the budget of {0} partial extensions")]
    EmbeddingBudgetExceeded(u64),
    #[error("partition has {labels} labels but graph has {n} vertices")]
    PartitionMismatch { labels: usize, n: usize },
    #[error("parameter {name} = {value} out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("invalid degree {0}")]
    InvalidDegree(usize),
    #[error("invalid rooted tree: {0}")]
    InvalidTree(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse(_) | Config(_) | Io(_) | Json(_) => ErrorClass::Config,
            Numerical(_) => ErrorClass::Numeric,
            TooLargeForExactCheck(..)
            | TooManyTrees { .. }
            | TooManyBlocks(_)
            | PatternTooLarge(_)
            | EmbeddingBudgetExceeded(_) => ErrorClass::Budget,
            _ => ErrorClass::Precondition,
        }
    }

    /// Variant name, used as the machine-readable detail tag.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            LoopEdge(_) => "LoopEdge",
            VertexOutOfRange { .. } => "VertexOutOfRange",
            ZeroMultiplicity(..) => "ZeroMultiplicity",
            EdgeNotInGraph(..) => "EdgeNotInGraph",
            TooLargeForExactCheck(..) => "TooLargeForExactCheck",
            SameVertex(_) => "SameVertex",
            GraphDisconnected => "GraphDisconnected",
            NotSimple => "NotSimple",
            InvalidVertices(_) => "InvalidVertices",
            ZeroSamples => "ZeroSamples",
            IncludeHasCycle => "IncludeHasCycle",
            ConditioningDisconnects => "ConditioningDisconnects",
            TooManyTrees { .. } => "TooManyTrees",
            MeasuresDontSumToOne(_) => "MeasuresDontSumToOne",
            AsymmetricKernel(..) => "AsymmetricKernel",
            EntryOutOfRange { .. } => "EntryOutOfRange",
            TooManyBlocks(_) => "TooManyBlocks",
            DegenerateGraphon => "DegenerateGraphon",
            PatternTooLarge(_) => "PatternTooLarge",
            PartIndexOutOfRange(_) => "PartIndexOutOfRange",
            EmbeddingBudgetExceeded(_) => "EmbeddingBudgetExceeded",
            PartitionMismatch { .. } => "PartitionMismatch",
            ParameterOutOfRange { .. } => "ParameterOutOfRange",
            InvalidDegree(_) => "InvalidDegree",
            InvalidTree(_) => "InvalidTree",
            Precondition(_) => "Precondition",
            Numerical(_) => "Numerical",
            Parse(_) => "Parse",
            Config(_) => "ConfigParse",
            Io(_) => "Io",
            Json(_) => "Json",
        }
    }
}
