//! Random networks, both algorithms, and the fraction of excess cleared.

use netcompress::netgen::{generate_network, GenConfig};
use netcompress::preferential::Threshold;
use netcompress::sim::{instance_seed, run_simulation, Algorithm};
use netcompress::strongly_connected_components;

fn main() {
    let cfg = GenConfig { nodes: 8, arcs: 20, max_capacity: 10, seed: 7 };
    let g = generate_network(&cfg).expect("valid config");
    println!(
        "generated {} arcs ({} connecting), {} component",
        g.network.arc_count(),
        g.connecting_arcs,
        strongly_connected_components(&g.network).len()
    );

    let batch: Vec<GenConfig> = (0..20)
        .map(|i| GenConfig { nodes: 12, arcs: 36, max_capacity: 20, seed: instance_seed(1, i) })
        .collect();
    let algorithms = [
        Algorithm::MaxVolume,
        Algorithm::Preferential(Threshold::ONE),
        Algorithm::Preferential(Threshold::new(1, 2).expect("in range")),
    ];
    let summary = run_simulation(&batch, &algorithms).expect("simulation");
    for a in &summary.aggregates {
        println!(
            "{:<10} mean {:.3}  min {:.3}  max {:.3}",
            a.algorithm.to_string(),
            a.mean_fraction,
            a.min_fraction.to_f64(),
            a.max_fraction.to_f64()
        );
    }
}
