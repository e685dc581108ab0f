use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A graph or dataset violates a structural invariant.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// A run or generator configuration is unusable.
    #[error("config error: {0}")]
    Config(String),

    /// Two values that must agree (manifests, dimensions) do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The loss became NaN or infinite.
    #[error("non-finite loss {value} at graph {graph_index}")]
    Numeric { graph_index: usize, value: f64 },

    /// A round of a federated run failed.
    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn in_round(self, round: usize) -> Self {
        match self {
            e @ Error::Round { .. } => e,
            other => Error::Round {
                round,
                source: alloc::boxed::Box::new(other),
            },
        }
    }
}
