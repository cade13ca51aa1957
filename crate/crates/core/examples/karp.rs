//! Minimum mean cycle of a small cost graph.

use netcompress::maxvol::{karp_min_mean_cycle, CostArc};

fn main() {
    let arcs: Vec<CostArc> = [(0, 1, 1), (1, 2, -1), (2, 0, -1), (1, 0, 2), (2, 3, -3), (3, 2, 2)]
        .into_iter()
        .map(|(tail, head, cost)| CostArc { tail, head, cost })
        .collect();

    match karp_min_mean_cycle(4, &arcs).expect("strongly connected") {
        Some(cycle) => {
            let nodes: Vec<usize> = cycle.arcs.iter().map(|&a| arcs[a].tail).collect();
            println!("mean {} through {:?}", cycle.mean, nodes);
        }
        None => println!("no cycle"),
    }
}
