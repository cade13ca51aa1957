use serde::Serialize;

use crate::error::NetworkError;
use crate::network::flow::{is_feasible, FlowAssignment};
use crate::network::{Amount, Network};

/// Cost of one unit of flow on an obligation arc. Volume maximisation is
/// minimum-cost circulation with this cost everywhere.
pub const ARC_COST: i64 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualArc {
    /// Index of the obligation this arc was derived from.
    pub origin: usize,
    pub direction: Direction,
    pub tail: usize,
    pub head: usize,
    pub residual: Amount,
    pub cost: i64,
}

/// Forward arcs for unsaturated obligations, then reverse arcs for those
/// carrying flow, each group in obligation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualGraph {
    pub node_count: usize,
    pub arcs: Vec<ResidualArc>,
}

pub fn build_residual(net: &Network, flow: &FlowAssignment) -> Result<ResidualGraph, NetworkError> {
    let check = is_feasible(net, flow)?;
    if !check.is_ok() {
        return Err(NetworkError::Infeasible(check));
    }
    Ok(build_unchecked(net, flow))
}

pub(crate) fn build_unchecked(net: &Network, flow: &FlowAssignment) -> ResidualGraph {
    let obligations = net.obligations();
    let forwards = obligations.iter().enumerate().filter_map(|(i, o)| {
        let x = flow.get(i);
        (x < o.amount).then_some(ResidualArc {
            origin: i,
            direction: Direction::Forward,
            tail: o.from,
            head: o.to,
            residual: o.amount - x,
            cost: ARC_COST,
        })
    });
    let reverses = obligations.iter().enumerate().filter_map(|(i, o)| {
        let x = flow.get(i);
        (x > 0).then_some(ResidualArc {
            origin: i,
            direction: Direction::Reverse,
            tail: o.to,
            head: o.from,
            residual: x,
            cost: -ARC_COST,
        })
    });
    ResidualGraph {
        node_count: net.participant_count(),
        arcs: forwards.chain(reverses).collect(),
    }
}
