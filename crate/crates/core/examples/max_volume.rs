//! Maximum-volume compression by minimum-mean cycle canceling.

use netcompress::maxvol::compress_max_volume;
use netcompress::Network;

fn main() {
    let net = Network::from_obligations([
        ("A", "B", 5),
        ("B", "C", 3),
        ("C", "A", 7),
        ("C", "B", 2),
        ("B", "A", 1),
    ])
    .expect("valid network");

    let (after, report) = compress_max_volume(&net).expect("compression");
    for (i, o) in after.obligations().iter().enumerate() {
        println!("{:<6} {} -> {}", after.arc_label(i), net.obligation(i).amount, o.amount);
    }
    println!(
        "volume {}, excess {} -> {}, cleared {}/{} in {} cancellations",
        report.volume,
        report.totals.excess_before,
        report.totals.excess_after,
        report.fraction_cleared.num,
        report.fraction_cleared.den,
        report.iterations
    );
}
