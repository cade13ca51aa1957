//! Preference-driven clearing, with the round-by-round trace.

use netcompress::preferential::{preferential_compress, Orientation, PreferenceProfile, Threshold};
use netcompress::Network;

fn main() {
    let net = Network::from_obligations([
        ("1", "2", 4),
        ("2", "3", 2),
        ("3", "1", 5),
        ("3", "4", 3),
        ("4", "3", 3),
    ])
    .expect("valid network");
    let prefs = PreferenceProfile::from_counterparties(
        &net,
        Orientation::Out,
        [("1", vec!["2"]), ("2", vec!["3"]), ("3", vec!["4", "1"]), ("4", vec!["3"])],
    )
    .expect("valid profile");

    let outcome = preferential_compress(&net, &prefs, Threshold::ONE).expect("clearing");
    for round in &outcome.trace.iterations {
        println!("round {}", round.index);
        for c in &round.cycles {
            let arcs: Vec<String> = c.arcs.iter().map(|&a| net.arc_label(a)).collect();
            println!("  cleared {} along {}", c.tau, arcs.join(" "));
        }
        let removed: Vec<&str> = round.removed.iter().map(|&v| net.participant(v).as_str()).collect();
        println!("  removed {removed:?}");
    }
    for (a, x) in outcome.flow.positive() {
        println!("{} {}", net.arc_label(a), x);
    }
    println!("volume {}", outcome.flow.volume());
}
