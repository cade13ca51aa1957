//! The obligation-network data model and position accounting.
//!
//! An obligation `from -> to` with `amount` means `from` owes `to`. The net
//! position of a participant is what it is owed minus what it owes.

pub mod flow;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::NetworkError;
use crate::graph::{self, Adjacency};

/// Notional amount in integer base units.
pub type Amount = u64;

/// Opaque participant identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ParticipantId(String);

impl ParticipantId {
    pub fn new(id: impl Into<String>) -> Result<Self, NetworkError> {
        let id = id.into();
        let valid = !id.is_empty()
            && !id.starts_with('#')
            && !id.chars().any(|c| c == ',' || c.is_whitespace() || c.is_control());
        if valid {
            Ok(ParticipantId(id))
        } else {
            Err(NetworkError::InvalidId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ParticipantId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A directed obligation between two participants, by participant index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Obligation {
    pub from: usize,
    pub to: usize,
    pub amount: Amount,
}

/// Participants (sorted by id) and obligations (sorted by `(from, to)` id).
///
/// Both orders are canonical, so participant and arc indices are stable for a
/// given set of inputs regardless of the order they were supplied in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    participants: Vec<ParticipantId>,
    obligations: Vec<Obligation>,
    arc_index: HashMap<(usize, usize), usize>,
}

#[derive(Debug, Default, Clone)]
pub struct NetworkBuilder {
    participants: Vec<String>,
    obligations: Vec<(String, String, Amount)>,
}

impl NetworkBuilder {
    /// Registers a participant; useful for isolated participants.
    pub fn participant(mut self, id: impl Into<String>) -> Self {
        self.participants.push(id.into());
        self
    }

    pub fn obligation(mut self, from: impl Into<String>, to: impl Into<String>, amount: Amount) -> Self {
        self.obligations.push((from.into(), to.into(), amount));
        self
    }

    pub fn build(self) -> Result<Network, NetworkError> {
        let mut ids = BTreeSet::new();
        for id in self.participants {
            ids.insert(ParticipantId::new(id)?);
        }
        let mut raw = Vec::with_capacity(self.obligations.len());
        for (from, to, amount) in self.obligations {
            let from = ParticipantId::new(from)?;
            let to = ParticipantId::new(to)?;
            if from == to {
                return Err(NetworkError::SelfLoop(from.0));
            }
            if amount == 0 {
                return Err(NetworkError::ZeroAmount { from: from.0, to: to.0 });
            }
            ids.insert(from.clone());
            ids.insert(to.clone());
            raw.push((from, to, amount));
        }
        let participants: Vec<ParticipantId> = ids.into_iter().collect();
        let index: HashMap<ParticipantId, usize> = participants
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut obligations: Vec<Obligation> = raw
            .into_iter()
            .map(|(from, to, amount)| Obligation {
                from: index[&from],
                to: index[&to],
                amount,
            })
            .collect();
        obligations.sort_by_key(|o| (o.from, o.to));
        for pair in obligations.windows(2) {
            if (pair[0].from, pair[0].to) == (pair[1].from, pair[1].to) {
                return Err(NetworkError::DuplicateObligation {
                    from: participants[pair[0].from].0.clone(),
                    to: participants[pair[0].to].0.clone(),
                });
            }
        }
        Ok(Network::assemble(participants, obligations))
    }
}

impl Network {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    /// Builds a network from `(from, to, amount)` triples.
    pub fn from_obligations<I, S>(obligations: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = (S, S, Amount)>,
        S: Into<String>,
    {
        obligations
            .into_iter()
            .fold(Network::builder(), |b, (from, to, amount)| b.obligation(from, to, amount))
            .build()
    }

    fn assemble(participants: Vec<ParticipantId>, obligations: Vec<Obligation>) -> Self {
        let arc_index = obligations
            .iter()
            .enumerate()
            .map(|(i, o)| ((o.from, o.to), i))
            .collect();
        Network {
            participants,
            obligations,
            arc_index,
        }
    }

    /// Same participants and arcs with new amounts (zero allowed).
    pub(crate) fn with_amounts(&self, amounts: impl Iterator<Item = Amount>) -> Network {
        let mut out = self.clone();
        for (o, amount) in out.obligations.iter_mut().zip(amounts) {
            o.amount = amount;
        }
        out
    }

    /// Every arc scaled by `factor`.
    pub fn scaled(&self, factor: Amount) -> Network {
        self.with_amounts(self.obligations.iter().map(|o| o.amount * factor))
    }

    pub fn participants(&self) -> &[ParticipantId] {
        &self.participants
    }

    pub fn participant(&self, index: usize) -> &ParticipantId {
        &self.participants[index]
    }

    pub fn participant_count(&self) -> usize {
        self.participants.len()
    }

    pub fn index_of(&self, id: &str) -> Result<usize, NetworkError> {
        self.participants
            .binary_search_by(|p| p.as_str().cmp(id))
            .map_err(|_| NetworkError::UnknownParticipant(id.to_string()))
    }

    pub fn obligations(&self) -> &[Obligation] {
        &self.obligations
    }

    pub fn obligation(&self, arc: usize) -> &Obligation {
        &self.obligations[arc]
    }

    pub fn arc_count(&self) -> usize {
        self.obligations.len()
    }

    /// Index of the arc `from -> to`, if present.
    pub fn arc_between(&self, from: usize, to: usize) -> Option<usize> {
        self.arc_index.get(&(from, to)).copied()
    }

    pub fn find_arc(&self, from: &str, to: &str) -> Result<Option<usize>, NetworkError> {
        Ok(self.arc_between(self.index_of(from)?, self.index_of(to)?))
    }

    /// `"from->to"` label for an arc.
    pub fn arc_label(&self, arc: usize) -> String {
        let o = &self.obligations[arc];
        format!("{}->{}", self.participants[o.from], self.participants[o.to])
    }

    pub fn total_gross(&self) -> u128 {
        self.obligations.iter().map(|o| 2 * o.amount as u128).sum()
    }

    pub(crate) fn positive_adjacency(&self) -> Adjacency {
        Adjacency::new(
            self.participants.len(),
            self.obligations
                .iter()
                .filter(|o| o.amount > 0)
                .map(|o| (o.from, o.to)),
        )
    }

    /// Positive-amount arcs entering and leaving each participant.
    pub(crate) fn degree_counts(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.participants.len();
        let (mut inc, mut out) = (vec![0; n], vec![0; n]);
        for o in self.obligations.iter().filter(|o| o.amount > 0) {
            out[o.from] += 1;
            inc[o.to] += 1;
        }
        (inc, out)
    }
}

/// Gross, net and excess position of one participant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionSummary {
    pub participant: ParticipantId,
    pub gross: Amount,
    pub net: i64,
    pub excess: Amount,
}

/// Dealers both owe and are owed; everyone else is a customer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Customer,
    Dealer,
}

pub fn gross_position(net: &Network, participant: &str) -> Result<Amount, NetworkError> {
    let p = net.index_of(participant)?;
    Ok(net
        .obligations
        .iter()
        .filter(|o| o.from == p || o.to == p)
        .map(|o| o.amount)
        .sum())
}

/// Receivables minus payables.
pub fn net_position(net: &Network, participant: &str) -> Result<i64, NetworkError> {
    let p = net.index_of(participant)?;
    Ok(net.obligations.iter().fold(0i64, |acc, o| {
        if o.to == p {
            acc + o.amount as i64
        } else if o.from == p {
            acc - o.amount as i64
        } else {
            acc
        }
    }))
}

pub fn participant_excess(net: &Network, participant: &str) -> Result<Amount, NetworkError> {
    let gross = gross_position(net, participant)?;
    let netp = net_position(net, participant)?;
    Ok(gross - netp.unsigned_abs())
}

/// Positions of all participants in participant order, in one pass.
pub fn positions(net: &Network) -> Vec<PositionSummary> {
    let n = net.participant_count();
    let mut gross = vec![0 as Amount; n];
    let mut netp = vec![0i64; n];
    for o in net.obligations() {
        gross[o.from] += o.amount;
        gross[o.to] += o.amount;
        netp[o.from] -= o.amount as i64;
        netp[o.to] += o.amount as i64;
    }
    net.participants()
        .iter()
        .enumerate()
        .map(|(i, p)| PositionSummary {
            participant: p.clone(),
            gross: gross[i],
            net: netp[i],
            excess: gross[i] - netp[i].unsigned_abs(),
        })
        .collect()
}

pub fn total_excess(net: &Network) -> Amount {
    positions(net).iter().map(|p| p.excess).sum()
}

pub fn classify_participants(net: &Network) -> BTreeMap<ParticipantId, Role> {
    let (inc, out) = net.degree_counts();
    net.participants()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let role = if inc[i] > 0 && out[i] > 0 {
                Role::Dealer
            } else {
                Role::Customer
            };
            (p.clone(), role)
        })
        .collect()
}

/// Whether positive-amount arcs contain a directed cycle. Linear time.
pub fn contains_directed_cycle(net: &Network) -> bool {
    graph::has_directed_cycle(&net.positive_adjacency())
}

/// Strongly connected components over positive-amount arcs, sorted by
/// smallest member id, members sorted by id.
pub fn strongly_connected_components(net: &Network) -> Vec<Vec<ParticipantId>> {
    graph::strongly_connected(&net.positive_adjacency())
        .into_iter()
        .map(|c| c.into_iter().map(|i| net.participant(i).clone()).collect())
        .collect()
}
