//! Seeded generation of strongly connected obligation networks.
//!
//! Construction, for `n` nodes and a target of `m` arcs:
//!
//! 1. every node gets one out-arc to a uniformly chosen other node;
//! 2. while more than one strongly connected component remains, two distinct
//!    components are picked uniformly (components ordered by smallest node)
//!    and one new arc is added in each direction between uniformly chosen
//!    members, skipping a direction whose member pairs are all taken; the
//!    number of arcs added here is `k`;
//! 3. `max(0, m - n - k)` further arcs are added uniformly among absent
//!    ordered pairs.
//!
//! Amounts are uniform in `1..=max_capacity`, drawn in canonical arc order.
//! The random source is ChaCha8 seeded with the configured seed, so output is
//! a pure function of the configuration.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{self, Adjacency};
use crate::network::{Amount, Network};
use crate::preferential::{Orientation, PreferenceProfile};
use crate::report::GeneratorInfo;

/// Name of the generator recorded in reports.
pub const RNG_NAME: &str = "ChaCha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub nodes: usize,
    pub arcs: usize,
    pub max_capacity: Amount,
    pub seed: u64,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("arc target {arcs} is below the node count {nodes}")]
    TooFewArcs { nodes: usize, arcs: usize },
    #[error("{nodes} nodes cannot hold {arcs} distinct arcs (max {max})")]
    TooManyArcs { nodes: usize, arcs: usize, max: usize },
    #[error("max capacity must be at least 1")]
    ZeroCapacity,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.nodes < 2 {
            return Err(GenError::TooFewNodes(self.nodes));
        }
        if self.arcs < self.nodes {
            return Err(GenError::TooFewArcs {
                nodes: self.nodes,
                arcs: self.arcs,
            });
        }
        let max = self.nodes * (self.nodes - 1);
        if self.arcs > max {
            return Err(GenError::TooManyArcs {
                nodes: self.nodes,
                arcs: self.arcs,
                max,
            });
        }
        if self.max_capacity == 0 {
            return Err(GenError::ZeroCapacity);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedNetwork {
    pub network: Network,
    /// Arcs added while merging components (`k`).
    pub connecting_arcs: usize,
}

impl GeneratedNetwork {
    pub fn info(&self, cfg: &GenConfig) -> GeneratorInfo {
        GeneratorInfo {
            rng: RNG_NAME.to_string(),
            seed: cfg.seed,
            nodes: cfg.nodes,
            arcs_requested: cfg.arcs,
            arcs_actual: self.network.arc_count(),
            connecting_arcs: self.connecting_arcs,
            max_capacity: cfg.max_capacity,
        }
    }
}

/// Zero-padded so that id order matches node order.
pub fn node_id(i: usize, nodes: usize) -> String {
    let width = nodes.saturating_sub(1).to_string().len();
    format!("n{i:0width$}")
}

struct ArcSet {
    nodes: usize,
    present: HashSet<(usize, usize)>,
    arcs: Vec<(usize, usize)>,
}

impl ArcSet {
    fn insert(&mut self, arc: (usize, usize)) -> bool {
        if self.present.insert(arc) {
            self.arcs.push(arc);
            true
        } else {
            false
        }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        graph::strongly_connected(&Adjacency::new(self.nodes, self.arcs.iter().copied()))
    }

    /// Uniform absent pair from `sources x targets`, if any.
    fn absent_between(&self, rng: &mut ChaCha8Rng, sources: &[usize], targets: &[usize]) -> Option<(usize, usize)> {
        for _ in 0..32 {
            let pair = (*sources.choose(rng)?, *targets.choose(rng)?);
            if !self.present.contains(&pair) {
                return Some(pair);
            }
        }
        let absent: Vec<(usize, usize)> = sources
            .iter()
            .flat_map(|&u| targets.iter().map(move |&v| (u, v)))
            .filter(|p| !self.present.contains(p))
            .collect();
        absent.choose(rng).copied()
    }
}

pub fn generate_network(cfg: &GenConfig) -> Result<GeneratedNetwork, GenError> {
    cfg.validate()?;
    let n = cfg.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut set = ArcSet {
        nodes: n,
        present: HashSet::new(),
        arcs: Vec::with_capacity(cfg.arcs),
    };

    for v in 0..n {
        let mut w = rng.gen_range(0..n - 1);
        if w >= v {
            w += 1;
        }
        set.insert((v, w));
    }

    let mut connecting = 0;
    loop {
        let components = set.components();
        let c = components.len();
        if c == 1 {
            break;
        }
        let i = rng.gen_range(0..c);
        let mut j = rng.gen_range(0..c - 1);
        if j >= i {
            j += 1;
        }
        let (x, y) = (&components[i], &components[j]);
        for (sources, targets) in [(x, y), (y, x)] {
            if let Some(pair) = set.absent_between(&mut rng, sources, targets) {
                set.insert(pair);
                connecting += 1;
            }
        }
    }

    let remaining = cfg.arcs.saturating_sub(n + connecting);
    let absent_total = n * (n - 1) - set.arcs.len();
    if remaining * 2 > absent_total {
        let absent: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .filter(|p| !set.present.contains(p))
            .collect();
        for i in rand::seq::index::sample(&mut rng, absent.len(), remaining).into_vec() {
            set.insert(absent[i]);
        }
    } else {
        let mut added = 0;
        while added < remaining {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            if set.insert((u, v)) {
                added += 1;
            }
        }
    }

    let mut arcs = set.arcs;
    arcs.sort_unstable();
    let mut builder = Network::builder();
    for (u, v) in arcs {
        let amount = rng.gen_range(1..=cfg.max_capacity);
        builder = builder.obligation(node_id(u, n), node_id(v, n), amount);
    }
    let network = builder.build().expect("generated arcs are simple and positive");
    Ok(GeneratedNetwork {
        network,
        connecting_arcs: connecting,
    })
}

/// Out-mode profile: each participant ranks its outgoing obligations in a
/// uniformly random order.
pub fn generate_preferences(net: &Network, seed: u64) -> PreferenceProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); net.participant_count()];
    for (a, o) in net.obligations().iter().enumerate() {
        if o.amount > 0 {
            lists[o.from].push(a);
        }
    }
    for list in &mut lists {
        list.shuffle(&mut rng);
    }
    PreferenceProfile::new(net, Orientation::Out, lists.into_iter().enumerate())
        .expect("out-arcs of each participant form a valid list")
}
