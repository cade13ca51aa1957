//! Arc flows: circulation checks, cycle decomposition and compression.

use std::fmt;

use serde::Serialize;

use super::{Amount, Network, ParticipantId};
use crate::error::NetworkError;

/// Cleared units per arc index. Indices past the end read as zero.
#[derive(Debug, Clone, Default)]
pub struct FlowAssignment {
    values: Vec<Amount>,
}

impl PartialEq for FlowAssignment {
    fn eq(&self, other: &Self) -> bool {
        let len = self.values.len().max(other.values.len());
        (0..len).all(|i| self.get(i) == other.get(i))
    }
}

impl Eq for FlowAssignment {}

impl FlowAssignment {
    pub fn zeros(arcs: usize) -> Self {
        FlowAssignment {
            values: vec![0; arcs],
        }
    }

    pub fn from_values(values: Vec<Amount>) -> Self {
        FlowAssignment { values }
    }

    /// Sparse construction; repeated indices accumulate.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Amount)>) -> Self {
        let mut flow = FlowAssignment::default();
        for (arc, value) in entries {
            flow.add(arc, value);
        }
        flow
    }

    pub fn get(&self, arc: usize) -> Amount {
        self.values.get(arc).copied().unwrap_or(0)
    }

    pub fn set(&mut self, arc: usize, value: Amount) {
        if arc >= self.values.len() {
            if value == 0 {
                return;
            }
            self.values.resize(arc + 1, 0);
        }
        self.values[arc] = value;
    }

    pub fn add(&mut self, arc: usize, value: Amount) {
        let current = self.get(arc);
        self.set(arc, current + value);
    }

    /// Sum of flow over all arcs.
    pub fn volume(&self) -> u128 {
        self.values.iter().map(|&v| v as u128).sum()
    }

    /// `(arc, value)` for every arc carrying positive flow, in arc order.
    pub fn positive(&self) -> impl Iterator<Item = (usize, Amount)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(i, &v)| (i, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Dense values padded (or truncated) to `arcs` entries.
    pub fn to_dense(&self, arcs: usize) -> Vec<Amount> {
        (0..arcs).map(|i| self.get(i)).collect()
    }

    fn check_refs(&self, net: &Network) -> Result<(), NetworkError> {
        match self.positive().find(|&(i, _)| i >= net.arc_count()) {
            Some((index, _)) => Err(NetworkError::DanglingArc {
                index,
                arcs: net.arc_count(),
            }),
            None => Ok(()),
        }
    }
}

/// Inflow minus outflow at a participant under some flow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Imbalance {
    pub participant: ParticipantId,
    pub imbalance: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityViolation {
    pub arc: usize,
    pub from: ParticipantId,
    pub to: ParticipantId,
    pub flow: Amount,
    pub amount: Amount,
}

/// Outcome of a circulation or feasibility check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FlowCheck {
    pub imbalances: Vec<Imbalance>,
    pub violations: Vec<CapacityViolation>,
}

impl FlowCheck {
    pub fn is_ok(&self) -> bool {
        self.imbalances.is_empty() && self.violations.is_empty()
    }

    fn into_result(self) -> Result<(), NetworkError> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(NetworkError::Infeasible(self))
        }
    }
}

impl fmt::Display for FlowCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let mut parts = Vec::new();
        for i in &self.imbalances {
            parts.push(format!("imbalance {:+} at {}", i.imbalance, i.participant));
        }
        for v in &self.violations {
            parts.push(format!(
                "flow {} exceeds amount {} on {}->{}",
                v.flow, v.amount, v.from, v.to
            ));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Checks flow conservation only.
pub fn is_circulation(net: &Network, flow: &FlowAssignment) -> Result<FlowCheck, NetworkError> {
    flow.check_refs(net)?;
    let mut balance = vec![0i128; net.participant_count()];
    for (arc, value) in flow.positive() {
        let o = net.obligation(arc);
        balance[o.from] -= value as i128;
        balance[o.to] += value as i128;
    }
    let imbalances = balance
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != 0)
        .map(|(i, &b)| Imbalance {
            participant: net.participant(i).clone(),
            imbalance: b as i64,
        })
        .collect();
    Ok(FlowCheck {
        imbalances,
        violations: Vec::new(),
    })
}

/// Conservation plus `0 <= flow <= amount` on every arc.
pub fn is_feasible(net: &Network, flow: &FlowAssignment) -> Result<FlowCheck, NetworkError> {
    let mut check = is_circulation(net, flow)?;
    check.violations = flow
        .positive()
        .filter_map(|(arc, value)| {
            let o = net.obligation(arc);
            (value > o.amount).then(|| CapacityViolation {
                arc,
                from: net.participant(o.from).clone(),
                to: net.participant(o.to).clone(),
                flow: value,
                amount: o.amount,
            })
        })
        .collect();
    Ok(check)
}

/// A directed cycle (arc indices in traversal order) carrying `amount` units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleFlow {
    pub arcs: Vec<usize>,
    pub amount: Amount,
}

impl CycleFlow {
    /// Participants visited, starting and ending at the same one.
    pub fn participants<'n>(&self, net: &'n Network) -> Vec<&'n ParticipantId> {
        let mut out: Vec<&ParticipantId> = self
            .arcs
            .iter()
            .map(|&a| net.participant(net.obligation(a).from))
            .collect();
        if let Some(&first) = self.arcs.first() {
            out.push(net.participant(net.obligation(first).from));
        }
        out
    }
}

/// Splits a feasible circulation into directed cycles.
///
/// Repeatedly walks from the smallest participant with positive remaining
/// outflow, always taking its first positive arc, until a participant
/// repeats; the closed part of the walk is extracted with its bottleneck.
/// Each extraction zeroes at least one arc.
pub fn decompose_circulation(
    net: &Network,
    flow: &FlowAssignment,
) -> Result<Vec<CycleFlow>, NetworkError> {
    is_feasible(net, flow)?.into_result()?;

    let n = net.participant_count();
    let mut remaining = flow.to_dense(net.arc_count());
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (arc, _) in flow.positive() {
        outgoing[net.obligation(arc).from].push(arc);
    }
    // Per-node cursor into `outgoing`; arcs that hit zero never come back.
    let mut cursor = vec![0usize; n];
    let first_arc = |v: usize, remaining: &[Amount], cursor: &mut [usize]| -> Option<usize> {
        while cursor[v] < outgoing[v].len() {
            let arc = outgoing[v][cursor[v]];
            if remaining[arc] > 0 {
                return Some(arc);
            }
            cursor[v] += 1;
        }
        None
    };

    let mut cycles = Vec::new();
    let mut position = vec![usize::MAX; n];
    let mut start = 0;
    while start < n {
        if first_arc(start, &remaining, &mut cursor).is_none() {
            start += 1;
            continue;
        }
        let mut walk_nodes = vec![start];
        let mut walk_arcs: Vec<usize> = Vec::new();
        position[start] = 0;
        let mut v = start;
        let cycle_from = loop {
            let arc = first_arc(v, &remaining, &mut cursor)
                .expect("conservation guarantees an outgoing arc with positive flow");
            walk_arcs.push(arc);
            v = net.obligation(arc).to;
            if position[v] != usize::MAX {
                break position[v];
            }
            position[v] = walk_nodes.len();
            walk_nodes.push(v);
        };
        for &w in &walk_nodes {
            position[w] = usize::MAX;
        }
        let arcs = walk_arcs.split_off(cycle_from);
        let amount = arcs.iter().map(|&a| remaining[a]).min().unwrap_or(0);
        for &a in &arcs {
            remaining[a] -= amount;
        }
        cycles.push(CycleFlow { arcs, amount });
    }
    Ok(cycles)
}

/// Subtracts a feasible circulation from the obligation amounts.
///
/// Arcs that reach zero stay in the returned network so indices line up with
/// the input.
pub fn apply_compression(net: &Network, flow: &FlowAssignment) -> Result<Network, NetworkError> {
    is_feasible(net, flow)?.into_result()?;
    Ok(net.with_amounts(
        net.obligations()
            .iter()
            .enumerate()
            .map(|(i, o)| o.amount - flow.get(i)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{net_position, positions};

    fn t3() -> Network {
        Network::from_obligations([("A", "B", 5), ("B", "C", 3), ("C", "A", 7)]).unwrap()
    }

    fn uniform(net: &Network, v: Amount) -> FlowAssignment {
        FlowAssignment::from_values(vec![v; net.arc_count()])
    }

    #[test]
    fn circulation_examples() {
        let net = t3();
        assert!(is_circulation(&net, &uniform(&net, 3)).unwrap().is_ok());
        assert!(is_circulation(&net, &FlowAssignment::default()).unwrap().is_ok());

        let ab = net.find_arc("A", "B").unwrap().unwrap();
        let check = is_circulation(&net, &FlowAssignment::from_entries([(ab, 3)])).unwrap();
        let got: Vec<(String, i64)> = check
            .imbalances
            .iter()
            .map(|i| (i.participant.to_string(), i.imbalance))
            .collect();
        assert_eq!(got, vec![("A".into(), -3), ("B".into(), 3)]);
    }

    #[test]
    fn dangling_reference() {
        let net = t3();
        let err = is_circulation(&net, &FlowAssignment::from_entries([(7, 1)])).unwrap_err();
        assert_eq!(err, NetworkError::DanglingArc { index: 7, arcs: 3 });
        // zero entries past the end are harmless
        assert!(is_feasible(&net, &FlowAssignment::from_values(vec![0; 9])).unwrap().is_ok());
    }

    #[test]
    fn feasibility_examples() {
        let net = t3();
        assert!(is_feasible(&net, &uniform(&net, 3)).unwrap().is_ok());
        let check = is_feasible(&net, &uniform(&net, 4)).unwrap();
        assert!(check.imbalances.is_empty());
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].from.as_str(), "B");
        assert_eq!(check.violations[0].to.as_str(), "C");
    }

    #[test]
    fn decomposition_examples() {
        let net = t3();
        let cycles = decompose_circulation(&net, &uniform(&net, 3)).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].amount, 3);
        let path: Vec<&str> = cycles[0].participants(&net).iter().map(|p| p.as_str()).collect();
        assert_eq!(path, ["A", "B", "C", "A"]);

        assert!(decompose_circulation(&net, &FlowAssignment::default()).unwrap().is_empty());

        let net = Network::from_obligations([("A", "B", 2), ("B", "A", 2), ("B", "C", 1), ("C", "A", 1)])
            .unwrap();
        let arc = |f, t| net.find_arc(f, t).unwrap().unwrap();
        let flow = FlowAssignment::from_entries([
            (arc("A", "B"), 2),
            (arc("B", "A"), 1),
            (arc("B", "C"), 1),
            (arc("C", "A"), 1),
        ]);
        let cycles = decompose_circulation(&net, &flow).unwrap();
        let shown: Vec<(Vec<&str>, Amount)> = cycles
            .iter()
            .map(|c| (c.participants(&net).iter().map(|p| p.as_str()).collect(), c.amount))
            .collect();
        assert_eq!(
            shown,
            vec![(vec!["A", "B", "A"], 1), (vec!["A", "B", "C", "A"], 1)]
        );
    }

    #[test]
    fn decomposition_rejects_bad_flow() {
        let net = t3();
        assert!(matches!(
            decompose_circulation(&net, &FlowAssignment::from_entries([(0, 1)])),
            Err(NetworkError::Infeasible(_))
        ));
        assert!(matches!(
            decompose_circulation(&net, &uniform(&net, 4)),
            Err(NetworkError::Infeasible(_))
        ));
    }

    #[test]
    fn compression_examples() {
        let net = t3();
        let after = apply_compression(&net, &uniform(&net, 3)).unwrap();
        let amounts: Vec<Amount> = after.obligations().iter().map(|o| o.amount).collect();
        assert_eq!(amounts, vec![2, 0, 4]);
        for p in ["A", "B", "C"] {
            assert_eq!(net_position(&net, p).unwrap(), net_position(&after, p).unwrap());
        }

        assert_eq!(apply_compression(&net, &FlowAssignment::default()).unwrap(), net);

        let pair = Network::from_obligations([("A", "B", 2), ("B", "A", 2)]).unwrap();
        let flat = apply_compression(&pair, &uniform(&pair, 2)).unwrap();
        assert!(flat.obligations().iter().all(|o| o.amount == 0));
        assert!(positions(&flat).iter().all(|p| p.net == 0));

        assert!(apply_compression(&net, &uniform(&net, 4)).is_err());
    }
}
