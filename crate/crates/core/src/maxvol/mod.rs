//! Maximum-volume conservative compression.
//!
//! Maximising `sum_a x(a)` over feasible circulations is a minimum-cost
//! circulation problem with cost -1 on every arc. Starting from `x = 0`, the
//! loop repeatedly finds a minimum mean cycle in the residual graph and pushes
//! as much flow around it as the residuals allow. When the minimum mean is no
//! longer negative, no negative-cost residual cycle exists and `x` is optimal.

pub mod karp;
pub mod residual;

use thiserror::Error;

use crate::error::NetworkError;
use crate::graph::{self, Adjacency};
use crate::network::flow::{apply_compression, decompose_circulation, FlowAssignment};
use crate::network::{Amount, Network};
use crate::report::{AlgorithmInfo, CancellationRow, CompressionReport, TraceEntry};
use crate::Rational;

pub use karp::{karp_min_mean_cycle, CostArc, KarpError, KarpTable, MeanCycle};
pub use residual::{build_residual, Direction, ResidualArc, ResidualGraph, ARC_COST};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MaxVolError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Karp(#[from] KarpError),
    #[error("cycle is not a closed walk of residual arcs")]
    NotACycle,
    #[error("residual arc on {origin} ({direction:?}) records {recorded} but the current residual is {current}")]
    StaleCycle {
        origin: usize,
        direction: Direction,
        recorded: Amount,
        current: Amount,
    },
}

/// A residual cycle with its exact mean cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualCycle {
    pub mean: Rational,
    pub arcs: Vec<ResidualArc>,
}

impl ResidualCycle {
    pub fn cost(&self) -> i64 {
        self.arcs.iter().map(|a| a.cost).sum()
    }
}

/// Global minimum mean cycle: Karp on every strongly connected component of
/// the residual graph, smallest mean wins, ties go to the component with the
/// smallest node.
pub fn min_mean_over_residual(res: &ResidualGraph) -> Result<Option<ResidualCycle>, KarpError> {
    let n = res.node_count;
    let adj = Adjacency::new(n, res.arcs.iter().map(|a| (a.tail, a.head)));
    let components = graph::strongly_connected(&adj);

    let mut component_of = vec![0usize; n];
    let mut local = vec![0usize; n];
    for (c, members) in components.iter().enumerate() {
        for (i, &v) in members.iter().enumerate() {
            component_of[v] = c;
            local[v] = i;
        }
    }
    let mut arcs_of: Vec<Vec<usize>> = vec![Vec::new(); components.len()];
    for (i, a) in res.arcs.iter().enumerate() {
        let c = component_of[a.tail];
        if component_of[a.head] == c {
            arcs_of[c].push(i);
        }
    }

    let mut best: Option<ResidualCycle> = None;
    for (c, members) in components.iter().enumerate() {
        if members.len() < 2 || arcs_of[c].is_empty() {
            continue;
        }
        let local_arcs: Vec<CostArc> = arcs_of[c]
            .iter()
            .map(|&i| {
                let a = &res.arcs[i];
                CostArc {
                    tail: local[a.tail],
                    head: local[a.head],
                    cost: a.cost,
                }
            })
            .collect();
        let Some(found) = karp::min_mean_cycle_in_component(members.len(), &local_arcs)? else {
            continue;
        };
        if best.as_ref().map_or(true, |b| found.mean < b.mean) {
            best = Some(ResidualCycle {
                mean: found.mean,
                arcs: found.arcs.iter().map(|&i| res.arcs[arcs_of[c][i]]).collect(),
            });
        }
    }
    Ok(best)
}

fn current_residual(net: &Network, flow: &FlowAssignment, arc: &ResidualArc) -> Amount {
    let x = flow.get(arc.origin);
    match arc.direction {
        Direction::Forward => net.obligation(arc.origin).amount.saturating_sub(x),
        Direction::Reverse => x,
    }
}

/// Pushes the bottleneck amount around `cycle` and returns it.
///
/// Forward arcs gain flow on their obligation, reverse arcs give it back.
pub fn cancel_cycle(
    net: &Network,
    flow: &mut FlowAssignment,
    cycle: &[ResidualArc],
) -> Result<Amount, MaxVolError> {
    if cycle.is_empty() {
        return Err(MaxVolError::NotACycle);
    }
    for (i, a) in cycle.iter().enumerate() {
        let next = &cycle[(i + 1) % cycle.len()];
        if a.head != next.tail || a.origin >= net.arc_count() {
            return Err(MaxVolError::NotACycle);
        }
        let o = net.obligation(a.origin);
        let oriented = match a.direction {
            Direction::Forward => (o.from, o.to),
            Direction::Reverse => (o.to, o.from),
        };
        if oriented != (a.tail, a.head) {
            return Err(MaxVolError::NotACycle);
        }
        let current = current_residual(net, flow, a);
        if current != a.residual || current == 0 {
            return Err(MaxVolError::StaleCycle {
                origin: a.origin,
                direction: a.direction,
                recorded: a.residual,
                current,
            });
        }
    }
    let tau = cycle.iter().map(|a| a.residual).min().unwrap_or(0);
    for a in cycle {
        let x = flow.get(a.origin);
        match a.direction {
            Direction::Forward => flow.set(a.origin, x + tau),
            Direction::Reverse => flow.set(a.origin, x - tau),
        }
    }
    Ok(tau)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cancellation {
    pub mean: Rational,
    pub tau: Amount,
    pub cycle: Vec<ResidualArc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxVolume {
    pub flow: FlowAssignment,
    pub iterations: usize,
    /// Minimum residual cycle mean at termination; `None` when the final
    /// residual graph is acyclic.
    pub final_mean: Option<Rational>,
    pub cancellations: Vec<Cancellation>,
    /// Upper bound on cancellations, `4 n m^2 ceil(ln n) + 1`.
    pub iteration_cap: u128,
    /// Set when the cap was hit, which signals a bug rather than a hard input.
    pub aborted: bool,
}

impl MaxVolume {
    pub fn volume(&self) -> u128 {
        self.flow.volume()
    }
}

pub fn iteration_cap(nodes: usize, arcs: usize) -> u128 {
    let ln = if nodes > 1 { (nodes as f64).ln().ceil() as u128 } else { 0 };
    4 * nodes as u128 * (arcs as u128).pow(2) * ln + 1
}

/// Maximum-volume feasible circulation by minimum-mean cycle canceling.
pub fn max_volume_circulation(net: &Network) -> Result<MaxVolume, MaxVolError> {
    let cap = iteration_cap(net.participant_count(), net.arc_count());
    let mut flow = FlowAssignment::zeros(net.arc_count());
    let mut cancellations = Vec::new();
    loop {
        let res = residual::build_unchecked(net, &flow);
        let found = min_mean_over_residual(&res)?;
        let negative = found.as_ref().map_or(false, |c| c.mean < Rational::from_integer(0));
        if !negative || cancellations.len() as u128 >= cap {
            return Ok(MaxVolume {
                iterations: cancellations.len(),
                final_mean: found.map(|c| c.mean),
                aborted: negative,
                flow,
                cancellations,
                iteration_cap: cap,
            });
        }
        let cycle = found.expect("negative implies a cycle");
        let tau = cancel_cycle(net, &mut flow, &cycle.arcs)?;
        cancellations.push(Cancellation {
            mean: cycle.mean,
            tau,
            cycle: cycle.arcs,
        });
    }
}

/// Runs the optimiser, applies the result and assembles the report.
pub fn compress_max_volume(net: &Network) -> Result<(Network, CompressionReport), MaxVolError> {
    let outcome = max_volume_circulation(net)?;
    let after = apply_compression(net, &outcome.flow)?;
    let cycles = decompose_circulation(net, &outcome.flow)?;
    let mut report = CompressionReport::new(AlgorithmInfo::Maxvol, net, &after, &outcome.flow, &cycles);
    report.iterations = outcome.iterations;
    report.aborted = outcome.aborted;
    report.final_mean = outcome.final_mean.map(Into::into);
    report.trace = outcome
        .cancellations
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let forward = c.cycle.iter().filter(|a| a.direction == Direction::Forward).count();
            let mut cycle: Vec<_> = c.cycle.iter().map(|a| net.participant(a.tail).clone()).collect();
            if let Some(first) = c.cycle.first() {
                cycle.push(net.participant(first.tail).clone());
            }
            TraceEntry::Cancellation(CancellationRow {
                iteration: i,
                mean: c.mean.into(),
                tau: c.tau,
                cycle,
                forward,
                reverse: c.cycle.len() - forward,
            })
        })
        .collect();
    Ok((after, report))
}
