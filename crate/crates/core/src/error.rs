use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {0}-{1} is not present in the graph")]
    EdgeNotPresent(usize, usize),
    #[error("edges share vertex {0}; not a matching")]
    NotAMatching(usize),
    #[error("no simple {d}-regular graph on {n} vertices")]
    InfeasibleDegreeSequence { n: usize, d: usize },
    #[error("random regular generation gave up after {0} restarts")]
    GenerationTimeout(usize),
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("graph has {n} vertices; exact subset sweep is limited to {limit}")]
    TooLargeForExactSweep { n: usize, limit: usize },
    #[error("bipartition sides have sizes {0} and {1}")]
    UnbalancedBipartition(usize, usize),
    #[error("edge {0}-{1} lies inside one side of the bipartition")]
    NotBipartite(usize, usize),
    #[error("graph has {n} vertices; perfect matching counting is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("{count} perfect matchings exceed the enumeration cap of {cap}")]
    TooManyMatchings { count: String, cap: u64 },
    #[error("edge set is not a sub-matching of the graph")]
    NotASubMatching,
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("matching is not a perfect matching of the graph")]
    NotAPerfectMatching,
    #[error("graph is not regular")]
    NotRegular,
    #[error("stratum M_{0} is empty")]
    EmptyStratum(usize),
    #[error("vertex {0} has out-degree 0")]
    SinkVertex(usize),
    #[error("matrix has a zero entry at ({0}, {1})")]
    ZeroEntry(usize, usize),
    #[error("path enumeration exceeded its budget of {0} extension steps")]
    BudgetExceeded(u64),
    #[error("exact computation infeasible: {0}")]
    ExactInfeasible(String),
    #[error("dimension {n} exceeds the exact matrix limit of {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors raised because an instance exceeds a configured size cap.
    pub fn is_size_limit(&self) -> bool {
        matches!(
            self,
            Error::TooLargeForExactSweep { .. }
                | Error::TooLarge { .. }
                | Error::TooManyMatchings { .. }
                | Error::BudgetExceeded(_)
                | Error::ExactInfeasible(_)
                | Error::DimensionTooLarge { .. }
                | Error::GenerationTimeout(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
