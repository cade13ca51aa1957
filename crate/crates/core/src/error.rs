use thiserror::Error;

use crate::network::flow::FlowCheck;

/// Errors raised while building networks or checking flows against them.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("invalid participant id {0:?}: ids must be non-empty, contain no commas or whitespace, and not start with '#'")]
    InvalidId(String),

    #[error("unknown participant {0:?}")]
    UnknownParticipant(String),

    #[error("self-loop obligation {0} -> {0} is not allowed")]
    SelfLoop(String),

    #[error("duplicate obligation {from} -> {to}; merge parallel obligations before ingestion")]
    DuplicateObligation { from: String, to: String },

    #[error("obligation {from} -> {to} has zero amount; ingested amounts must be positive")]
    ZeroAmount { from: String, to: String },

    #[error("flow references arc index {index}, but the network has {arcs} arcs")]
    DanglingArc { index: usize, arcs: usize },

    #[error("flow is not a feasible circulation: {0}")]
    Infeasible(FlowCheck),
}
