//! Batch simulation: generate, compress with each algorithm, check the
//! accounting, collect the fraction of excess cleared.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maxvol::compress_max_volume;
use crate::netgen::{generate_network, generate_preferences, GenConfig, GenError, RNG_NAME};
use crate::network::flow::{is_feasible, FlowAssignment};
use crate::network::{positions, Network};
use crate::preferential::{compress_preferential, Threshold};
use crate::report::{CompressionReport, Fraction};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    MaxVolume,
    Preferential(Threshold),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::MaxVolume => f.write_str("maxvol"),
            Algorithm::Preferential(eps) => write!(f, "pref:{eps}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// `maxvol`, `pref` (epsilon 1) or `pref:NUM/DEN`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "maxvol" => Ok(Algorithm::MaxVolume),
            "pref" => Ok(Algorithm::Preferential(Threshold::ONE)),
            other => match other.strip_prefix("pref:") {
                Some(eps) => eps
                    .parse()
                    .map(Algorithm::Preferential)
                    .map_err(|e| e.to_string()),
                None => Err(format!("unknown algorithm `{other}`")),
            },
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// SplitMix64 finaliser, used to derive per-instance seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of instance `index` in a batch seeded with `batch_seed`.
pub fn instance_seed(batch_seed: u64, index: u64) -> u64 {
    splitmix64(batch_seed ^ splitmix64(index))
}

/// Seed for the preference profile of an instance generated from `seed`.
pub fn preference_seed(seed: u64) -> u64 {
    splitmix64(seed ^ 0x7072_6566_7365_6564)
}

/// One group of identically sized instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceGroup {
    pub nodes: usize,
    pub arcs: usize,
    pub max_capacity: u64,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

/// Declarative batch description, read from TOML by [`crate::io`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    #[serde(default, rename = "group")]
    pub groups: Vec<InstanceGroup>,
}

impl SimConfig {
    /// Instances in group order; seeds follow the running instance index.
    pub fn batch(&self) -> Vec<GenConfig> {
        let mut out = Vec::new();
        for g in &self.groups {
            for _ in 0..g.count {
                out.push(GenConfig {
                    nodes: g.nodes,
                    arcs: g.arcs,
                    max_capacity: g.max_capacity,
                    seed: instance_seed(self.seed, out.len() as u64),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRow {
    pub seed: u64,
    pub nodes: usize,
    pub arcs: usize,
    pub algorithm: Algorithm,
    pub volume: u64,
    pub fraction_cleared: Fraction,
    pub iterations: usize,
    pub stuck: bool,
    pub aborted: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub algorithm: Algorithm,
    pub instances: usize,
    pub mean_fraction: f64,
    pub min_fraction: Fraction,
    pub max_fraction: Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub format: u32,
    pub rng: String,
    pub instances: Vec<InstanceRow>,
    pub aggregates: Vec<Aggregate>,
}

impl SimSummary {
    /// Copy with timings zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> SimSummary {
        let mut s = self.clone();
        for row in &mut s.instances {
            row.wall_ms = 0.0;
        }
        s
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("seed {seed}: {source}")]
    Generate { seed: u64, source: GenError },
    #[error("seed {seed}, {algorithm}: {message}")]
    Instance {
        seed: u64,
        algorithm: String,
        message: String,
    },
}

/// Accounting checks every compression must pass.
pub fn check_compression(
    before: &Network,
    after: &Network,
    flow: &FlowAssignment,
    report: &CompressionReport,
) -> Result<(), String> {
    let check = is_feasible(before, flow).map_err(|e| e.to_string())?;
    if !check.is_ok() {
        return Err(format!("flow is not a feasible circulation: {check}"));
    }
    for (b, a) in positions(before).iter().zip(positions(after)) {
        if b.net != a.net {
            return Err(format!(
                "net position of {} changed from {} to {}",
                b.participant, b.net, a.net
            ));
        }
    }
    let volume = flow.volume();
    if before.total_gross() != after.total_gross() + 2 * volume {
        return Err(format!(
            "gross fell by {}, expected twice the volume {volume}",
            before.total_gross() - after.total_gross()
        ));
    }
    let fraction = Rational::from(report.fraction_cleared);
    if fraction < Rational::from_integer(0) || fraction > Rational::from_integer(1) {
        return Err(format!("fraction cleared {fraction} outside [0, 1]"));
    }
    Ok(())
}

fn flow_of(before: &Network, after: &Network) -> FlowAssignment {
    FlowAssignment::from_values(
        before
            .obligations()
            .iter()
            .zip(after.obligations())
            .map(|(b, a)| b.amount - a.amount)
            .collect(),
    )
}

fn run_one(net: &Network, seed: u64, algorithm: Algorithm) -> Result<CompressionReport, String> {
    let (after, report) = match algorithm {
        Algorithm::MaxVolume => compress_max_volume(net).map_err(|e| e.to_string())?,
        Algorithm::Preferential(eps) => {
            let prefs = generate_preferences(net, preference_seed(seed));
            compress_preferential(net, &prefs, eps).map_err(|e| e.to_string())?
        }
    };
    check_compression(net, &after, &flow_of(net, &after), &report)?;
    Ok(report)
}

pub fn run_simulation(batch: &[GenConfig], algorithms: &[Algorithm]) -> Result<SimSummary, SimError> {
    let mut instances = Vec::new();
    for cfg in batch {
        let generated = generate_network(cfg).map_err(|source| SimError::Generate {
            seed: cfg.seed,
            source,
        })?;
        let net = &generated.network;
        let mut maxvol_volume = None;
        let mut pref_volumes = Vec::new();
        for &algorithm in algorithms {
            let fail = |message: String| SimError::Instance {
                seed: cfg.seed,
                algorithm: algorithm.to_string(),
                message,
            };
            let start = Instant::now();
            let report = run_one(net, cfg.seed, algorithm).map_err(fail)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            match algorithm {
                Algorithm::MaxVolume => maxvol_volume = Some(report.volume),
                Algorithm::Preferential(_) => pref_volumes.push((algorithm, report.volume)),
            }
            instances.push(InstanceRow {
                seed: cfg.seed,
                nodes: net.participant_count(),
                arcs: net.arc_count(),
                algorithm,
                volume: report.volume,
                fraction_cleared: report.fraction_cleared,
                iterations: report.iterations,
                stuck: report.stuck,
                aborted: report.aborted,
                wall_ms,
            });
        }
        if let Some(best) = maxvol_volume {
            if let Some(&(algorithm, v)) = pref_volumes.iter().find(|(_, v)| *v > best) {
                return Err(SimError::Instance {
                    seed: cfg.seed,
                    algorithm: algorithm.to_string(),
                    message: format!("cleared {v}, more than the maximum volume {best}"),
                });
            }
        }
    }
    let aggregates = aggregate(&instances, algorithms);
    Ok(SimSummary {
        format: 1,
        rng: RNG_NAME.to_string(),
        instances,
        aggregates,
    })
}

fn aggregate(rows: &[InstanceRow], algorithms: &[Algorithm]) -> Vec<Aggregate> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for &algorithm in algorithms {
        if seen.contains(&algorithm) {
            continue;
        }
        seen.push(algorithm);
        let fractions: Vec<Rational> = rows
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| Rational::from(r.fraction_cleared))
            .collect();
        if fractions.is_empty() {
            continue;
        }
        let mean = fractions
            .iter()
            .map(|&f| Fraction::from(f).to_f64())
            .sum::<f64>()
            / fractions.len() as f64;
        out.push(Aggregate {
            algorithm,
            instances: fractions.len(),
            mean_fraction: mean,
            min_fraction: (*fractions.iter().min().expect("non-empty")).into(),
            max_fraction: (*fractions.iter().max().expect("non-empty")).into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(nodes: usize, arcs: usize, seed: u64) -> GenConfig {
        GenConfig {
            nodes,
            arcs,
            max_capacity: 10,
            seed,
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for s in ["maxvol", "pref:1/1", "pref:3/4"] {
            assert_eq!(s.parse::<Algorithm>().unwrap().to_string(), s);
        }
        assert_eq!("pref".parse::<Algorithm>().unwrap(), Algorithm::Preferential(Threshold::ONE));
        assert!("pref:2/1".parse::<Algorithm>().is_err());
        assert!("greedy".parse::<Algorithm>().is_err());
    }

    #[test]
    fn empty_batch() {
        let s = run_simulation(&[], &[Algorithm::MaxVolume]).unwrap();
        assert!(s.instances.is_empty());
        assert!(s.aggregates.is_empty());
    }

    #[test]
    fn maxvol_clears_something() {
        let s = run_simulation(&[cfg(6, 12, 5)], &[Algorithm::MaxVolume]).unwrap();
        let f = Rational::from(s.instances[0].fraction_cleared);
        assert!(f > Rational::from_integer(0) && f <= Rational::from_integer(1));
    }

    #[test]
    fn dominance_and_reproducibility() {
        let batch: Vec<GenConfig> = (0..5).map(|i| cfg(8, 20, instance_seed(3, i))).collect();
        let algs = [Algorithm::MaxVolume, Algorithm::Preferential(Threshold::new(1, 2).unwrap())];
        let a = run_simulation(&batch, &algs).unwrap();
        let b = run_simulation(&batch, &algs).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
        for pair in a.instances.chunks(2) {
            assert!(pair[0].volume >= pair[1].volume);
        }
        assert_eq!(a.aggregates.len(), 2);
        assert!(a.aggregates.iter().all(|g| g.instances == 5));
    }

    #[test]
    fn config_expansion() {
        let c = SimConfig {
            seed: 9,
            algorithms: vec![Algorithm::MaxVolume],
            groups: vec![
                InstanceGroup { nodes: 4, arcs: 6, max_capacity: 3, count: 2 },
                InstanceGroup { nodes: 5, arcs: 9, max_capacity: 3, count: 1 },
            ],
        };
        let batch = c.batch();
        assert_eq!(batch.len(), 3);
        assert_eq!(batch[2].nodes, 5);
        assert_eq!(batch[2].seed, instance_seed(9, 2));
        assert_ne!(batch[0].seed, batch[1].seed);
    }

    #[test]
    fn generator_errors_carry_the_seed() {
        let err = run_simulation(&[cfg(3, 2, 77)], &[Algorithm::MaxVolume]).unwrap_err();
        assert!(matches!(err, SimError::Generate { seed: 77, .. }));
    }
}
