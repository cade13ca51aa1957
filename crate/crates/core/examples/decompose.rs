//! Feasibility check and cycle decomposition of a circulation.

use netcompress::{decompose_circulation, is_feasible, FlowAssignment, Network};

fn main() {
    let net = Network::from_obligations([("A", "B", 2), ("B", "A", 1), ("B", "C", 1), ("C", "A", 1)])
        .expect("valid network");
    let flow = FlowAssignment::from_values(vec![2, 1, 1, 1]);

    let check = is_feasible(&net, &flow).expect("flow fits the network");
    println!("feasible: {check}");

    for cycle in decompose_circulation(&net, &flow).expect("feasible circulation") {
        let path: Vec<&str> = cycle.participants(&net).iter().map(|p| p.as_str()).collect();
        println!("{} x {}", cycle.amount, path.join(" -> "));
    }
}
