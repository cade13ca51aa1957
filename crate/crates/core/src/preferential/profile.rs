use std::collections::HashSet;

use serde::Serialize;

use super::ClearingError;
use crate::network::Network;

/// Which side of an obligation owns the ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Debtors rank the obligations they would like to clear.
    #[default]
    Out,
    /// Creditors rank the obligations owed to them.
    In,
}

/// Ranked incident arcs per participant, highest priority first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    mode: Orientation,
    lists: Vec<Vec<usize>>,
}

impl PreferenceProfile {
    /// A profile where nobody ranks anything.
    pub fn empty(net: &Network, mode: Orientation) -> Self {
        PreferenceProfile {
            mode,
            lists: vec![Vec::new(); net.participant_count()],
        }
    }

    /// Validates `(participant index, ranked arc indices)` pairs against `net`.
    pub fn new(
        net: &Network,
        mode: Orientation,
        lists: impl IntoIterator<Item = (usize, Vec<usize>)>,
    ) -> Result<Self, ClearingError> {
        let mut profile = PreferenceProfile::empty(net, mode);
        for (owner, arcs) in lists {
            if owner >= net.participant_count() {
                return Err(ClearingError::Preference(format!(
                    "participant index {owner} out of range"
                )));
            }
            let owner_id = net.participant(owner);
            if !profile.lists[owner].is_empty() {
                return Err(ClearingError::Preference(format!(
                    "participant {owner_id} has two preference lists"
                )));
            }
            let mut seen = HashSet::new();
            for &arc in &arcs {
                if arc >= net.arc_count() {
                    return Err(ClearingError::Preference(format!(
                        "participant {owner_id} lists unknown arc index {arc}"
                    )));
                }
                let o = net.obligation(arc);
                let incident = match mode {
                    Orientation::Out => o.from == owner,
                    Orientation::In => o.to == owner,
                };
                if !incident {
                    return Err(ClearingError::Preference(format!(
                        "participant {owner_id} lists {} which is not one of its {} arcs",
                        net.arc_label(arc),
                        match mode {
                            Orientation::Out => "outgoing",
                            Orientation::In => "incoming",
                        }
                    )));
                }
                if !seen.insert(arc) {
                    return Err(ClearingError::Preference(format!(
                        "participant {owner_id} lists {} twice",
                        net.arc_label(arc)
                    )));
                }
            }
            profile.lists[owner] = arcs;
        }
        Ok(profile)
    }

    /// Lists given by participant id and ranked counterparty ids.
    pub fn from_counterparties<'a, I, L>(
        net: &Network,
        mode: Orientation,
        lists: I,
    ) -> Result<Self, ClearingError>
    where
        I: IntoIterator<Item = (&'a str, L)>,
        L: IntoIterator<Item = &'a str>,
    {
        let mut resolved = Vec::new();
        for (owner, counterparties) in lists {
            let o = net.index_of(owner)?;
            let mut arcs = Vec::new();
            for cp in counterparties {
                let c = net.index_of(cp)?;
                let (from, to) = match mode {
                    Orientation::Out => (o, c),
                    Orientation::In => (c, o),
                };
                let arc = net.arc_between(from, to).ok_or_else(|| {
                    ClearingError::Preference(format!(
                        "no obligation {}->{} for {owner}'s preference",
                        net.participant(from),
                        net.participant(to)
                    ))
                })?;
                arcs.push(arc);
            }
            resolved.push((o, arcs));
        }
        PreferenceProfile::new(net, mode, resolved)
    }

    pub fn mode(&self) -> Orientation {
        self.mode
    }

    /// Ranked arcs of a participant.
    pub fn list(&self, participant: usize) -> &[usize] {
        self.lists.get(participant).map_or(&[], Vec::as_slice)
    }

    pub fn participant_count(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.iter().all(Vec::is_empty)
    }

    /// `(participant, arcs)` for participants with a non-empty list.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.lists
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(i, l)| (i, l.as_slice()))
    }
}
