//! Conservative portfolio compression for networks of bilateral obligations.
//!
//! A [`Network`] holds participants and directed obligations (`from` owes
//! `to`). Compression subtracts a feasible circulation from the obligation
//! amounts, which leaves every participant's net position untouched while
//! reducing gross exposure. Two ways of picking that circulation are provided:
//!
//! * [`maxvol`]: the maximum-volume circulation, found by canceling
//!   minimum-mean cycles (Karp) in the residual graph until no negative-cost
//!   cycle remains.
//! * [`preferential`]: a clearing procedure driven by each participant's
//!   ranked list of obligations, which repeatedly clears the cycles of the
//!   most-preferred-neighbours graph.
//!
//! [`netgen`] and [`sim`] generate seeded strongly connected networks and run
//! batch comparisons; [`io`] owns the CSV/JSON/TOML file formats and [`cli`]
//! the command-line front end.

pub mod cli;
pub mod error;
mod graph;
pub mod io;
pub mod maxvol;
pub mod netgen;
pub mod network;
pub mod preferential;
pub mod report;
pub mod sim;

pub use error::NetworkError;
pub use network::flow::{
    apply_compression, decompose_circulation, is_circulation, is_feasible, CapacityViolation,
    CycleFlow, FlowAssignment, FlowCheck, Imbalance,
};
pub use network::{
    classify_participants, contains_directed_cycle, gross_position, net_position,
    participant_excess, positions, strongly_connected_components, total_excess, Amount, Network,
    NetworkBuilder, Obligation, ParticipantId, PositionSummary, Role,
};
pub use report::{CompressionReport, Fraction};

/// Exact rational used for means and thresholds.
pub type Rational = num_rational::Ratio<i64>;
