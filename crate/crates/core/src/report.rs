//! Compression reports. Field order is the serialized order.

use serde::Serialize;

use crate::network::flow::{CycleFlow, FlowAssignment};
use crate::network::{positions, Network, ParticipantId};
use crate::preferential::Orientation;
use crate::Rational;

/// Exact rational serialized as `{"num": .., "den": ..}`, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for Fraction {
    fn from(r: Rational) -> Self {
        Fraction {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl From<Fraction> for Rational {
    fn from(f: Fraction) -> Self {
        Rational::new(f.num, f.den)
    }
}

impl Fraction {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum AlgorithmInfo {
    Maxvol,
    Preferential {
        mode: Orientation,
        epsilon: Fraction,
        per_arc_thresholds: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorInfo {
    pub rng: String,
    pub seed: u64,
    pub nodes: usize,
    pub arcs_requested: usize,
    pub arcs_actual: usize,
    pub connecting_arcs: usize,
    pub max_capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticipantRow {
    pub id: ParticipantId,
    pub gross_before: u64,
    pub net_before: i64,
    pub excess_before: u64,
    pub gross_after: u64,
    pub net_after: i64,
    pub excess_after: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub gross_before: u64,
    pub gross_after: u64,
    pub excess_before: u64,
    pub excess_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleRow {
    pub participants: Vec<ParticipantId>,
    pub amount: u64,
}

impl CycleRow {
    pub(crate) fn from_cycle(net: &Network, cycle: &CycleFlow) -> Self {
        CycleRow {
            participants: cycle.participants(net).into_iter().cloned().collect(),
            amount: cycle.amount,
        }
    }
}

/// One min-mean cancellation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CancellationRow {
    pub iteration: usize,
    pub mean: Fraction,
    pub tau: u64,
    pub cycle: Vec<ParticipantId>,
    pub forward: usize,
    pub reverse: usize,
}

/// One round of preferential clearing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClearingRow {
    pub iteration: usize,
    pub functional_graph: Vec<String>,
    pub cycles: Vec<CycleRow>,
    pub finished: Vec<String>,
    pub removed: Vec<ParticipantId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TraceEntry {
    Cancellation(CancellationRow),
    Clearing(ClearingRow),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompressionReport {
    pub format: u32,
    pub algorithm: AlgorithmInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
    pub participants: Vec<ParticipantRow>,
    pub totals: Totals,
    pub volume: u64,
    pub fraction_cleared: Fraction,
    pub cycles: Vec<CycleRow>,
    pub iterations: usize,
    pub stuck: bool,
    pub aborted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_mean: Option<Fraction>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub initially_removed: Vec<ParticipantId>,
    pub trace: Vec<TraceEntry>,
}

impl CompressionReport {
    /// Accounting part of a report; algorithm-specific fields start empty.
    pub fn new(
        algorithm: AlgorithmInfo,
        before: &Network,
        after: &Network,
        flow: &FlowAssignment,
        cycles: &[CycleFlow],
    ) -> Self {
        let pb = positions(before);
        let pa = positions(after);
        let participants: Vec<ParticipantRow> = pb
            .iter()
            .zip(&pa)
            .map(|(b, a)| ParticipantRow {
                id: b.participant.clone(),
                gross_before: b.gross,
                net_before: b.net,
                excess_before: b.excess,
                gross_after: a.gross,
                net_after: a.net,
                excess_after: a.excess,
            })
            .collect();
        let totals = Totals {
            gross_before: pb.iter().map(|p| p.gross).sum(),
            gross_after: pa.iter().map(|p| p.gross).sum(),
            excess_before: pb.iter().map(|p| p.excess).sum(),
            excess_after: pa.iter().map(|p| p.excess).sum(),
        };
        CompressionReport {
            format: 1,
            algorithm,
            generator: None,
            participants,
            totals,
            volume: flow.volume() as u64,
            fraction_cleared: fraction_cleared(totals.excess_before, totals.excess_after).into(),
            cycles: cycles.iter().map(|c| CycleRow::from_cycle(before, c)).collect(),
            iterations: 0,
            stuck: false,
            aborted: false,
            final_mean: None,
            initially_removed: Vec::new(),
            trace: Vec::new(),
        }
    }
}

/// `(before - after) / before`, or 0 when nothing was eligible.
pub fn fraction_cleared(excess_before: u64, excess_after: u64) -> Rational {
    if excess_before == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(
            excess_before as i64 - excess_after as i64,
            excess_before as i64,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_edge_cases() {
        assert_eq!(fraction_cleared(0, 0), Rational::from_integer(0));
        assert_eq!(fraction_cleared(22, 4), Rational::new(9, 11));
        assert_eq!(Fraction::from(Rational::new(6, 4)), Fraction { num: 3, den: 2 });
    }

    #[test]
    fn accounting_without_flow() {
        let net = Network::from_obligations([("A", "B", 1), ("B", "C", 1)]).unwrap();
        let r = CompressionReport::new(AlgorithmInfo::Maxvol, &net, &net, &FlowAssignment::default(), &[]);
        assert_eq!(r.totals.excess_before, 2);
        assert_eq!(r.fraction_cleared, Fraction { num: 0, den: 1 });
        assert_eq!(r.volume, 0);
    }
}
