//! Karp's minimum mean cycle algorithm with exact rational means.
//!
//! `d_k(v)` is the minimum cost of a walk with exactly `k` arcs ending at `v`
//! (any start). The minimum cycle mean of a strongly connected graph with `n`
//! nodes is `min_v max_{0<=k<n} (d_n(v) - d_k(v)) / (n - k)`, and a cycle
//! attaining it lies on the walk realising `d_n(v)` for the minimising `v`.

use thiserror::Error;

use crate::graph::{self, Adjacency};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostArc {
    pub tail: usize,
    pub head: usize,
    pub cost: i64,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum KarpError {
    #[error("graph is not strongly connected ({components} components)")]
    NotStronglyConnected { components: usize },
    #[error("arc {arc} references node outside 0..{nodes}")]
    NodeOutOfRange { arc: usize, nodes: usize },
    #[error("no cycle with the minimum mean was found on the critical walk")]
    NoCycleOnWalk,
}

/// +infinity in the table.
const FAR: i64 = i64::MAX;
const NO_ARC: u32 = u32::MAX;

/// `d_k(v)` for `0 <= k <= n` with the arc that set each finite entry.
#[derive(Debug, Clone)]
pub struct KarpTable {
    nodes: usize,
    dist: Vec<i64>,
    pred: Vec<u32>,
}

impl KarpTable {
    pub fn compute(node_count: usize, arcs: &[CostArc]) -> Self {
        let n = node_count;
        let tails: Vec<u32> = arcs.iter().map(|a| a.tail as u32).collect();
        let heads: Vec<u32> = arcs.iter().map(|a| a.head as u32).collect();
        let costs: Vec<i64> = arcs.iter().map(|a| a.cost).collect();
        let mut dist = vec![FAR; (n + 1) * n];
        let mut pred = vec![NO_ARC; (n + 1) * n];
        dist[..n].fill(0);
        for k in 0..n {
            let (done, rest) = dist.split_at_mut((k + 1) * n);
            let prev = &done[k * n..];
            let next = &mut rest[..n];
            let pred_next = &mut pred[(k + 1) * n..(k + 2) * n];
            for i in 0..arcs.len() {
                let du = prev[tails[i] as usize];
                if du >= FAR {
                    continue;
                }
                let candidate = du + costs[i];
                let h = heads[i] as usize;
                // strict: the first arc in input order wins ties
                if candidate < next[h] {
                    next[h] = candidate;
                    pred_next[h] = i as u32;
                }
            }
        }
        KarpTable { nodes: n, dist, pred }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// `None` is +infinity (no walk of that length ends at `v`).
    pub fn distance(&self, k: usize, v: usize) -> Option<i64> {
        let d = self.dist[k * self.nodes + v];
        (d != FAR).then_some(d)
    }

    /// Index of the last arc of a minimum `k`-arc walk into `v`, for `k >= 1`.
    pub fn predecessor(&self, k: usize, v: usize) -> Option<usize> {
        self.distance(k, v)?;
        let p = self.pred[k * self.nodes + v];
        (p != NO_ARC).then_some(p as usize)
    }

    /// Karp's min-max value and the smallest vertex attaining it.
    fn minimum_mean(&self) -> Option<(Rational, usize)> {
        let n = self.nodes;
        let mut best: Option<(i64, i64, usize)> = None;
        for v in 0..n {
            let Some(dn) = self.distance(n, v) else {
                continue;
            };
            // d_0(v) = 0 is always finite, so the max ranges over >= 1 term
            let mut worst: Option<(i64, i64)> = None;
            for k in 0..n {
                let Some(dk) = self.distance(k, v) else {
                    continue;
                };
                let (num, den) = (dn - dk, (n - k) as i64);
                if worst.map_or(true, |(wn, wd)| num * wd > wn * den) {
                    worst = Some((num, den));
                }
            }
            let (num, den) = worst.expect("d_0 is finite");
            if best.map_or(true, |(bn, bd, _)| num * bd < bn * den) {
                best = Some((num, den, v));
            }
        }
        best.map(|(num, den, v)| (Rational::new(num, den), v))
    }
}

/// A simple cycle, as indices into the arc slice it was found in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    pub mean: Rational,
    pub arcs: Vec<usize>,
}

/// Minimum mean cycle of a strongly connected graph.
///
/// Returns `Ok(None)` for graphs without arcs (a single node).
pub fn karp_min_mean_cycle(
    node_count: usize,
    arcs: &[CostArc],
) -> Result<Option<MeanCycle>, KarpError> {
    if let Some(arc) = arcs
        .iter()
        .position(|a| a.tail >= node_count || a.head >= node_count)
    {
        return Err(KarpError::NodeOutOfRange {
            arc,
            nodes: node_count,
        });
    }
    if node_count == 0 {
        return Ok(None);
    }
    let adj = Adjacency::new(node_count, arcs.iter().map(|a| (a.tail, a.head)));
    let components = graph::strongly_connected(&adj).len();
    if components != 1 {
        return Err(KarpError::NotStronglyConnected { components });
    }
    min_mean_cycle_in_component(node_count, arcs)
}

/// Karp on a graph already known to be strongly connected.
pub(crate) fn min_mean_cycle_in_component(
    node_count: usize,
    arcs: &[CostArc],
) -> Result<Option<MeanCycle>, KarpError> {
    if arcs.is_empty() {
        return Ok(None);
    }
    let table = KarpTable::compute(node_count, arcs);
    let Some((mean, vertex)) = table.minimum_mean() else {
        return Ok(None);
    };

    // The walk realising d_n(vertex), in forward order.
    let mut walk = Vec::with_capacity(node_count);
    let mut v = vertex;
    for k in (1..=node_count).rev() {
        let arc = table
            .predecessor(k, v)
            .expect("finite distance has a predecessor");
        walk.push(arc);
        v = arcs[arc].tail;
    }
    walk.reverse();

    // Peel cycles off the walk in order of closure; return the first whose
    // mean matches exactly.
    let mut position = vec![usize::MAX; node_count];
    let mut nodes = vec![arcs[walk[0]].tail];
    let mut path: Vec<usize> = Vec::new();
    position[nodes[0]] = 0;
    for &arc in &walk {
        let head = arcs[arc].head;
        let at = position[head];
        if at == usize::MAX {
            position[head] = nodes.len();
            nodes.push(head);
            path.push(arc);
            continue;
        }
        let mut cycle = path[at..].to_vec();
        cycle.push(arc);
        let cost: i64 = cycle.iter().map(|&a| arcs[a].cost).sum();
        if Rational::new(cost, cycle.len() as i64) == mean {
            return Ok(Some(MeanCycle { mean, arcs: cycle }));
        }
        for &w in &nodes[at + 1..] {
            position[w] = usize::MAX;
        }
        nodes.truncate(at + 1);
        path.truncate(at);
    }
    Err(KarpError::NoCycleOnWalk)
}
