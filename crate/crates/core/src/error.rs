use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is empty after preprocessing")]
    EmptyGraph,

    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("sample contains no observed edges")]
    NoEdges,

    #[error("group {0} has no edge endpoints")]
    NoEndpoints(crate::graph::Group),

    #[error("homophily undefined for group proportion {0}")]
    UndefinedHomophily(f64),

    #[error("sample records carry no noisy labels")]
    MissingNoisyLabels,

    #[error("true class {0} absent from labeled set")]
    AbsentClass(crate::graph::Group),

    #[error("NRMSE undefined for a true value of zero")]
    ZeroTruth,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable code used in result files.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Parse { .. } => "parse",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::EmptyGraph => "empty_graph",
            Error::SingularMatrix { .. } => "singular",
            Error::EmptySample => "empty_sample",
            Error::NoEdges => "no_edges",
            Error::NoEndpoints(_) => "no_endpoints",
            Error::UndefinedHomophily(_) => "undefined_homophily",
            Error::MissingNoisyLabels => "missing_noisy_labels",
            Error::AbsentClass(_) => "absent_class",
            Error::ZeroTruth => "zero_truth",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
