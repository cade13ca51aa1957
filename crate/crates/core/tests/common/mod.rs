//! Reference oracles and instance generators shared by the integration tests.
//! None of these reuse the library's algorithms.

#![allow(dead_code)]

use netcompress::maxvol::CostArc;
use netcompress::{FlowAssignment, Network, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node_name(i: usize) -> String {
    format!("p{i:02}")
}

/// Network from index triples; self-loops and repeated pairs are skipped.
pub fn network(triples: &[(usize, usize, u64)]) -> Network {
    let mut seen = std::collections::HashSet::new();
    let kept: Vec<(String, String, u64)> = triples
        .iter()
        .filter(|&&(u, v, a)| u != v && a > 0 && seen.insert((u, v)))
        .map(|&(u, v, a)| (node_name(u), node_name(v), a))
        .collect();
    Network::from_obligations(kept).expect("filtered triples are valid")
}

/// `m` distinct random arcs on `n` nodes with amounts in `1..=cap`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, m: usize, cap: u64) -> Network {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let m = m.min(pairs.len());
    let chosen = rand::seq::index::sample(rng, pairs.len(), m);
    let triples: Vec<(usize, usize, u64)> = chosen
        .iter()
        .map(|i| (pairs[i].0, pairs[i].1, rng.gen_range(1..=cap)))
        .collect();
    network(&triples)
}

/// Random feasible circulation: a sum of random simple cycles, on a network
/// whose amounts are the cycle totals plus random slack.
pub fn random_circulation(rng: &mut ChaCha8Rng, n: usize, cycles: usize, cap: u64) -> (Network, Vec<u64>) {
    let mut load: std::collections::BTreeMap<(usize, usize), u64> = Default::default();
    for _ in 0..cycles {
        let len = rng.gen_range(2..=n);
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(rng);
        nodes.truncate(len);
        let amount = rng.gen_range(1..=cap);
        for i in 0..len {
            *load.entry((nodes[i], nodes[(i + 1) % len])).or_default() += amount;
        }
    }
    let triples: Vec<(usize, usize, u64)> = load
        .iter()
        .map(|(&(u, v), &x)| (u, v, x + rng.gen_range(0..=cap)))
        .collect();
    let net = network(&triples);
    let flow = net
        .obligations()
        .iter()
        .map(|o| {
            let u = index_of_name(net.participant(o.from).as_str());
            let v = index_of_name(net.participant(o.to).as_str());
            load[&(u, v)]
        })
        .collect();
    (net, flow)
}

fn index_of_name(id: &str) -> usize {
    id[1..].parse().expect("generated name")
}

/// Largest volume over all integer feasible circulations.
///
/// Circulations are determined by their values on the arcs outside an
/// undirected spanning forest, so only those are enumerated; the forest arcs
/// follow by peeling leaves.
pub fn brute_max_volume(net: &Network) -> u64 {
    let n = net.participant_count();
    let arcs: Vec<(usize, usize, u64)> = net.obligations().iter().map(|o| (o.from, o.to, o.amount)).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut tree = Vec::new();
    let mut free = Vec::new();
    for (i, &(u, v, _)) in arcs.iter().enumerate() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            free.push(i);
        } else {
            parent[ru] = rv;
            tree.push(i);
        }
    }

    // elimination order: (tree arc, leaf endpoint)
    let mut degree = vec![0usize; n];
    for &t in &tree {
        degree[arcs[t].0] += 1;
        degree[arcs[t].1] += 1;
    }
    let mut remaining: Vec<usize> = tree.clone();
    let mut order = Vec::new();
    while !remaining.is_empty() {
        let pos = remaining
            .iter()
            .position(|&t| degree[arcs[t].0] == 1 || degree[arcs[t].1] == 1)
            .expect("a forest always has a leaf");
        let t = remaining.remove(pos);
        let leaf = if degree[arcs[t].0] == 1 { arcs[t].0 } else { arcs[t].1 };
        degree[arcs[t].0] -= 1;
        degree[arcs[t].1] -= 1;
        order.push((t, leaf));
    }

    let mut best = 0u64;
    let mut values = vec![0u64; free.len()];
    loop {
        let mut balance = vec![0i64; n];
        let mut volume: i64 = 0;
        for (k, &f) in free.iter().enumerate() {
            let x = values[k] as i64;
            balance[arcs[f].0] -= x;
            balance[arcs[f].1] += x;
            volume += x;
        }
        let mut ok = true;
        for &(t, leaf) in &order {
            let (u, v, cap) = arcs[t];
            // the tree arc must cancel the leaf's imbalance
            let x = if leaf == v { -balance[v] } else { balance[u] };
            if x < 0 || x > cap as i64 {
                ok = false;
                break;
            }
            balance[u] -= x;
            balance[v] += x;
            volume += x;
        }
        if ok && balance.iter().all(|&b| b == 0) {
            best = best.max(volume as u64);
        }
        // next assignment, odometer style
        let mut k = 0;
        loop {
            if k == free.len() {
                return best;
            }
            if values[k] < arcs[free[k]].2 {
                values[k] += 1;
                break;
            }
            values[k] = 0;
            k += 1;
        }
    }
}

/// Minimum of cost/length over all simple cycles, by exhaustive search.
pub fn brute_min_mean(n: usize, arcs: &[CostArc]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for start in 0..n {
        // cycles whose smallest node is `start`
        let mut on_path = vec![false; n];
        fn walk(
            start: usize,
            v: usize,
            cost: i64,
            len: i64,
            arcs: &[CostArc],
            on_path: &mut Vec<bool>,
            best: &mut Option<Rational>,
        ) {
            on_path[v] = true;
            for a in arcs.iter().filter(|a| a.tail == v) {
                if a.head == start {
                    let mean = Rational::new(cost + a.cost, len + 1);
                    if best.map_or(true, |b| mean < b) {
                        *best = Some(mean);
                    }
                } else if a.head > start && !on_path[a.head] {
                    walk(start, a.head, cost + a.cost, len + 1, arcs, on_path, best);
                }
            }
            on_path[v] = false;
        }
        walk(start, start, 0, 0, arcs, &mut on_path, &mut best);
    }
    best
}

/// Residual arcs `(tail, head, cost)` of `flow`, built from scratch.
pub fn residual_arcs(net: &Network, flow: &FlowAssignment) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for (i, o) in net.obligations().iter().enumerate() {
        let x = flow.get(i);
        if x < o.amount {
            out.push((o.from, o.to, -1));
        }
        if x > 0 {
            out.push((o.to, o.from, 1));
        }
    }
    out
}

/// Bellman-Ford from a virtual source joined to every node.
pub fn has_negative_cycle(n: usize, arcs: &[(usize, usize, i64)]) -> bool {
    let mut dist = vec![0i64; n];
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, c) in arcs {
            if dist[u] + c < dist[v] {
                dist[v] = dist[u] + c;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
    }
    arcs.iter().any(|&(u, v, c)| dist[u] + c < dist[v])
}

/// Strongly connected random cost graph: a Hamiltonian cycle plus extra
/// arcs, parallel arcs allowed.
pub fn random_cost_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, costs: std::ops::RangeInclusive<i64>) -> Vec<CostArc> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs: Vec<CostArc> = (0..n)
        .map(|i| CostArc {
            tail: order[i],
            head: order[(i + 1) % n],
            cost: rng.gen_range(costs.clone()),
        })
        .collect();
    for _ in 0..extra {
        let tail = rng.gen_range(0..n);
        let head = rng.gen_range(0..n);
        if tail != head {
            arcs.push(CostArc {
                tail,
                head,
                cost: rng.gen_range(costs.clone()),
            });
        }
    }
    arcs.shuffle(rng);
    arcs
}

/// Every participant's net position, in index order.
pub fn nets(net: &Network) -> Vec<i64> {
    netcompress::positions(net).iter().map(|p| p.net).collect()
}

/// Small arbitrary networks for property tests.
pub fn arb_network(max_n: usize, max_m: usize, max_amount: u64) -> impl Strategy<Value = Network> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, 1..=max_amount), 0..=max_m).prop_map(|t| network(&t))
    })
}

/// Flow implied by a compressed network.
pub fn flow_between(before: &Network, after: &Network) -> FlowAssignment {
    FlowAssignment::from_values(
        before
            .obligations()
            .iter()
            .zip(after.obligations())
            .map(|(b, a)| b.amount - a.amount)
            .collect(),
    )
}
