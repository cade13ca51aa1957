//! Preference-driven cycle clearing.
//!
//! Every live participant points at its highest-ranked live obligation. The
//! resulting graph has out-degree (or in-degree) at most one, so its cycles are
//! vertex-disjoint and can all be cleared at once by their bottleneck. Arcs
//! that reach their clearing threshold are finished and dropped, participants
//! left with only incoming or only outgoing obligations are pruned, and the
//! round repeats until nobody is left.
//!
//! Only dealers take part, and only obligations that appear in some
//! preference list are considered.

mod profile;
mod threshold;

use std::collections::HashSet;

use thiserror::Error;

use crate::error::NetworkError;
use crate::network::flow::{apply_compression, decompose_circulation, FlowAssignment};
use crate::network::{Amount, Network};
use crate::report::{AlgorithmInfo, ClearingRow, CompressionReport, CycleRow, TraceEntry};
use crate::CycleFlow;

pub use profile::{Orientation, PreferenceProfile};
pub use threshold::{Threshold, Thresholds};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ClearingError {
    #[error("invalid preferences: {0}")]
    Preference(String),
    #[error("epsilon must be a fraction in (0, 1], got {0}")]
    Epsilon(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("clearing invariant violated: {0}")]
    Invariant(String),
}

/// Mutable state of one clearing run over a fixed network and profile.
#[derive(Debug, Clone)]
pub struct ClearingState<'a> {
    net: &'a Network,
    profile: &'a PreferenceProfile,
    incident: Vec<Vec<usize>>,
    flow: Vec<Amount>,
    live_node: Vec<bool>,
    live_arc: Vec<bool>,
    live_in: Vec<usize>,
    live_out: Vec<usize>,
    /// First possibly-live position in each preference list.
    cursor: Vec<usize>,
}

impl<'a> ClearingState<'a> {
    /// Dealers are live; listed arcs between live participants are live.
    pub fn new(net: &'a Network, profile: &'a PreferenceProfile) -> Result<Self, ClearingError> {
        if profile.participant_count() != net.participant_count() {
            return Err(ClearingError::Preference(format!(
                "profile covers {} participants, network has {}",
                profile.participant_count(),
                net.participant_count()
            )));
        }
        let n = net.participant_count();
        let (inc, out) = net.degree_counts();
        let live_node: Vec<bool> = (0..n).map(|v| inc[v] > 0 && out[v] > 0).collect();
        let mut live_arc = vec![false; net.arc_count()];
        for (_, arcs) in profile.iter() {
            for &a in arcs {
                let o = net.obligation(a);
                live_arc[a] = o.amount > 0 && live_node[o.from] && live_node[o.to];
            }
        }
        let mut incident = vec![Vec::new(); n];
        let (mut live_in, mut live_out) = (vec![0; n], vec![0; n]);
        for (a, o) in net.obligations().iter().enumerate() {
            incident[o.from].push(a);
            incident[o.to].push(a);
            if live_arc[a] {
                live_out[o.from] += 1;
                live_in[o.to] += 1;
            }
        }
        Ok(ClearingState {
            net,
            profile,
            incident,
            flow: vec![0; net.arc_count()],
            live_node,
            live_arc,
            live_in,
            live_out,
            cursor: vec![0; n],
        })
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn mode(&self) -> Orientation {
        self.profile.mode()
    }

    pub fn flow(&self) -> FlowAssignment {
        FlowAssignment::from_values(self.flow.clone())
    }

    pub fn cleared(&self, arc: usize) -> Amount {
        self.flow[arc]
    }

    pub fn residual(&self, arc: usize) -> Amount {
        self.net.obligation(arc).amount - self.flow[arc]
    }

    pub fn is_live_node(&self, v: usize) -> bool {
        self.live_node[v]
    }

    pub fn is_live_arc(&self, arc: usize) -> bool {
        self.live_arc[arc]
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.live_node.len()).filter(|&v| self.live_node[v])
    }

    pub fn has_live_nodes(&self) -> bool {
        self.live_node.iter().any(|&l| l)
    }

    /// Highest-ranked live arc of a live participant.
    pub fn top_arc(&self, v: usize) -> Option<usize> {
        if !self.live_node[v] {
            return None;
        }
        self.profile.list(v)[self.cursor[v]..]
            .iter()
            .copied()
            .find(|&a| self.live_arc[a])
    }

    fn kill_arc(&mut self, arc: usize) {
        if std::mem::replace(&mut self.live_arc[arc], false) {
            let o = self.net.obligation(arc);
            self.live_out[o.from] -= 1;
            self.live_in[o.to] -= 1;
        }
    }

    fn advance_cursors(&mut self) {
        for v in 0..self.cursor.len() {
            let list = self.profile.list(v);
            while self.cursor[v] < list.len() && !self.live_arc[list[self.cursor[v]]] {
                self.cursor[v] += 1;
            }
        }
    }

    fn prunable(&self, v: usize) -> bool {
        self.live_node[v]
            && (self.live_in[v] == 0 || self.live_out[v] == 0 || self.top_arc(v).is_none())
    }
}

/// The most-preferred-neighbours graph: one arc per participant with a
/// non-empty live list, in participant order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalGraph {
    pub mode: Orientation,
    pub arcs: Vec<usize>,
}

pub fn most_preferred_neighbours_graph(state: &ClearingState<'_>) -> FunctionalGraph {
    FunctionalGraph {
        mode: state.mode(),
        arcs: state.live_nodes().filter_map(|v| state.top_arc(v)).collect(),
    }
}

/// All cycles of a functional graph, each as arcs in traversal order starting
/// at its smallest participant; cycles sorted by that participant.
pub fn find_functional_cycles(
    net: &Network,
    graph: &FunctionalGraph,
) -> Result<Vec<Vec<usize>>, ClearingError> {
    let n = net.participant_count();
    // out mode walks successors from each tail, in mode walks predecessors
    // from each head
    let mut step: Vec<Option<(usize, usize)>> = vec![None; n];
    for &a in &graph.arcs {
        let o = net.obligation(a);
        let (owner, next) = match graph.mode {
            Orientation::Out => (o.from, o.to),
            Orientation::In => (o.to, o.from),
        };
        if step[owner].replace((next, a)).is_some() {
            return Err(ClearingError::Invariant(format!(
                "participant {} has two arcs in the functional graph",
                net.participant(owner)
            )));
        }
    }

    const NEW: u8 = 0;
    const ON_PATH: u8 = 1;
    const DONE: u8 = 2;
    let mut mark = vec![NEW; n];
    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for start in 0..n {
        if mark[start] != NEW || step[start].is_none() {
            continue;
        }
        path.clear();
        let mut v = start;
        loop {
            mark[v] = ON_PATH;
            path.push(v);
            match step[v] {
                Some((next, _)) if mark[next] == NEW => v = next,
                Some((next, _)) if mark[next] == ON_PATH => {
                    let at = path.iter().position(|&w| w == next).expect("on path");
                    let arcs: Vec<usize> = path[at..]
                        .iter()
                        .map(|&w| step[w].expect("path node has an arc").1)
                        .collect();
                    cycles.push(forward_order(net, arcs));
                    break;
                }
                _ => break,
            }
        }
        for &w in &path {
            mark[w] = DONE;
        }
    }
    cycles.sort_by_key(|c| net.obligation(c[0]).from);
    Ok(cycles)
}

/// Reorders the arcs of a directed cycle to follow arc direction, starting
/// with the arc leaving the smallest participant.
fn forward_order(net: &Network, arcs: Vec<usize>) -> Vec<usize> {
    let leaving = |v: usize| {
        *arcs
            .iter()
            .find(|&&a| net.obligation(a).from == v)
            .expect("cycle arcs have distinct tails")
    };
    let start = arcs
        .iter()
        .map(|&a| net.obligation(a).from)
        .min()
        .expect("non-empty cycle");
    let mut ordered = Vec::with_capacity(arcs.len());
    let mut v = start;
    for _ in 0..arcs.len() {
        let a = leaving(v);
        ordered.push(a);
        v = net.obligation(a).to;
    }
    ordered
}

/// A cycle cleared by its bottleneck `tau`, with the arcs it finished.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClearedCycle {
    pub arcs: Vec<usize>,
    pub tau: Amount,
    pub finished: Vec<usize>,
}

/// Clears each cycle by its minimum residual and finishes every cycle arc whose
/// cleared amount reached its threshold.
pub fn clear_cycles(
    state: &mut ClearingState<'_>,
    cycles: &[Vec<usize>],
    thresholds: &Thresholds,
) -> Result<Vec<ClearedCycle>, ClearingError> {
    let mut used = HashSet::new();
    for cycle in cycles {
        for &a in cycle {
            if !used.insert(a) {
                return Err(ClearingError::Invariant(format!(
                    "arc {} appears in two cycles",
                    state.net.arc_label(a)
                )));
            }
            if !state.live_arc[a] || state.residual(a) == 0 {
                return Err(ClearingError::Invariant(format!(
                    "arc {} is not live with positive residual",
                    state.net.arc_label(a)
                )));
            }
        }
    }
    let mut cleared = Vec::with_capacity(cycles.len());
    for cycle in cycles {
        let tau = cycle.iter().map(|&a| state.residual(a)).min().unwrap_or(0);
        let mut finished = Vec::new();
        for &a in cycle {
            state.flow[a] += tau;
            let amount = state.net.obligation(a).amount;
            if thresholds.for_arc(a).is_reached(state.flow[a], amount) {
                state.kill_arc(a);
                finished.push(a);
            }
        }
        if finished.is_empty() {
            return Err(ClearingError::Invariant(
                "a cleared cycle finished no arc".into(),
            ));
        }
        cleared.push(ClearedCycle {
            arcs: cycle.clone(),
            tau,
            finished,
        });
    }
    state.advance_cursors();
    Ok(cleared)
}

/// Removes, until none qualifies, every live participant whose live arcs are
/// all incoming, all outgoing, or absent, or whose live list is empty. Returns
/// the removed participants in ascending order.
pub fn node_removal_fixpoint(state: &mut ClearingState<'_>) -> Vec<usize> {
    let mut removed = Vec::new();
    let mut pending: Vec<usize> = state.live_nodes().collect();
    let mut queued = vec![false; state.live_node.len()];
    for &v in &pending {
        queued[v] = true;
    }
    while let Some(v) = pending.pop() {
        queued[v] = false;
        if !state.prunable(v) {
            continue;
        }
        state.live_node[v] = false;
        removed.push(v);
        for i in 0..state.incident[v].len() {
            let a = state.incident[v][i];
            if !state.live_arc[a] {
                continue;
            }
            state.kill_arc(a);
            let o = state.net.obligation(a);
            let other = if o.from == v { o.to } else { o.from };
            if state.live_node[other] && !queued[other] {
                queued[other] = true;
                pending.push(other);
            }
        }
    }
    state.advance_cursors();
    removed.sort_unstable();
    removed
}

/// One clearing round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub index: usize,
    pub functional_graph: Vec<usize>,
    pub cycles: Vec<ClearedCycle>,
    pub removed: Vec<usize>,
}

impl IterationTrace {
    pub fn finished(&self) -> impl Iterator<Item = usize> + '_ {
        self.cycles.iter().flat_map(|c| c.finished.iter().copied())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClearingTrace {
    /// Pruned before the first round.
    pub initially_removed: Vec<usize>,
    pub iterations: Vec<IterationTrace>,
    /// A round found no cycle and pruned nothing.
    pub stuck: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferentialOutcome {
    pub flow: FlowAssignment,
    pub trace: ClearingTrace,
}

pub fn preferential_compress(
    net: &Network,
    prefs: &PreferenceProfile,
    thresholds: impl Into<Thresholds>,
) -> Result<PreferentialOutcome, ClearingError> {
    let thresholds = thresholds.into();
    if let Some(&arc) = thresholds.per_arc.keys().find(|&&a| a >= net.arc_count()) {
        return Err(ClearingError::Epsilon(format!(
            "threshold given for unknown arc index {arc}"
        )));
    }
    let mut state = ClearingState::new(net, prefs)?;
    let mut trace = ClearingTrace {
        initially_removed: node_removal_fixpoint(&mut state),
        ..ClearingTrace::default()
    };
    while state.has_live_nodes() {
        let index = trace.iterations.len();
        if index >= net.arc_count() {
            return Err(ClearingError::Invariant(format!(
                "more than {} rounds",
                net.arc_count()
            )));
        }
        let graph = most_preferred_neighbours_graph(&state);
        let cycles = find_functional_cycles(net, &graph)?;
        let cleared = clear_cycles(&mut state, &cycles, &thresholds)?;
        let removed = node_removal_fixpoint(&mut state);
        let stalled = cleared.is_empty() && removed.is_empty();
        trace.iterations.push(IterationTrace {
            index,
            functional_graph: graph.arcs,
            cycles: cleared,
            removed,
        });
        if stalled {
            trace.stuck = true;
            break;
        }
    }
    Ok(PreferentialOutcome {
        flow: state.flow(),
        trace,
    })
}

/// Runs preferential clearing, applies it and assembles the report.
pub fn compress_preferential(
    net: &Network,
    prefs: &PreferenceProfile,
    thresholds: impl Into<Thresholds>,
) -> Result<(Network, CompressionReport), ClearingError> {
    let thresholds = thresholds.into();
    let outcome = preferential_compress(net, prefs, thresholds.clone())?;
    let after = apply_compression(net, &outcome.flow)?;
    let cycles = decompose_circulation(net, &outcome.flow)?;
    let algorithm = AlgorithmInfo::Preferential {
        mode: prefs.mode(),
        epsilon: crate::Rational::new(thresholds.default.num() as i64, thresholds.default.den() as i64)
            .into(),
        per_arc_thresholds: thresholds.per_arc.len(),
    };
    let mut report = CompressionReport::new(algorithm, net, &after, &outcome.flow, &cycles);
    let ids = |nodes: &[usize]| nodes.iter().map(|&v| net.participant(v).clone()).collect();
    report.iterations = outcome.trace.iterations.len();
    report.stuck = outcome.trace.stuck;
    report.initially_removed = ids(&outcome.trace.initially_removed);
    report.trace = outcome
        .trace
        .iterations
        .iter()
        .map(|it| {
            TraceEntry::Clearing(ClearingRow {
                iteration: it.index,
                functional_graph: it.functional_graph.iter().map(|&a| net.arc_label(a)).collect(),
                cycles: it
                    .cycles
                    .iter()
                    .map(|c| {
                        CycleRow::from_cycle(
                            net,
                            &CycleFlow {
                                arcs: c.arcs.clone(),
                                amount: c.tau,
                            },
                        )
                    })
                    .collect(),
                finished: it.finished().map(|a| net.arc_label(a)).collect(),
                removed: ids(&it.removed),
            })
        })
        .collect();
    Ok((after, report))
}
