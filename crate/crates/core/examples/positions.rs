//! Gross, net and excess positions of a small network.

use netcompress::{classify_participants, contains_directed_cycle, positions, total_excess, Network};

fn main() {
    let net = Network::from_obligations([("A", "B", 5), ("B", "C", 3), ("C", "A", 7)])
        .expect("valid network");

    let roles = classify_participants(&net);
    for p in positions(&net) {
        println!(
            "{:<3} gross {:>3}  net {:>3}  excess {:>3}  {:?}",
            p.participant.as_str(),
            p.gross,
            p.net,
            p.excess,
            roles[&p.participant]
        );
    }
    println!("total excess {}", total_excess(&net));
    println!("has cycle {}", contains_directed_cycle(&net));
}
