//! Text formats: network, preference and flow CSV files, JSON reports and the
//! TOML simulation config.
//!
//! All CSV files may start with `#format=1`. Lines starting with `#` and
//! blank lines are ignored. The first remaining line is the header.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::error::NetworkError;
use crate::network::flow::FlowAssignment;
use crate::network::{Amount, Network, ParticipantId};
use crate::preferential::{ClearingError, Orientation, PreferenceProfile};
use crate::report::{CompressionReport, GeneratorInfo};
use crate::sim::{SimConfig, SimSummary};

pub const FORMAT_VERSION: u32 = 1;
pub const NETWORK_HEADER: [&str; 3] = ["from", "to", "amount"];
pub const PREFERENCES_HEADER: [&str; 3] = ["participant", "rank", "counterparty"];
pub const FLOW_HEADER: [&str; 3] = ["from", "to", "flow"];

#[derive(Error, Debug)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: u64, message: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Preferences(#[from] ClearingError),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// `#key=value` comment lines.
fn directives(text: &str) -> Result<BTreeMap<String, (u64, String)>, IoError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let Some(body) = raw.trim().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = body.split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            continue;
        }
        if out.insert(key.to_string(), (line, value.to_string())).is_some() {
            return Err(IoError::Parse {
                line,
                message: format!("directive `{key}` given twice"),
            });
        }
    }
    if let Some((line, v)) = out.get("format") {
        if v.parse::<u32>().ok() != Some(FORMAT_VERSION) {
            return Err(IoError::Parse {
                line: *line,
                message: format!("unsupported format `{v}`, expected {FORMAT_VERSION}"),
            });
        }
    }
    Ok(out)
}

/// Header-checked records with their line numbers. `None` when the input has
/// no header at all.
fn records(text: &str, header: [&str; 3]) -> Result<Option<Vec<(u64, [String; 3])>>, IoError> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_record(trimmed, line)?;
        if !seen_header {
            if !fields.iter().map(String::as_str).eq(header) {
                return Err(IoError::Parse {
                    line,
                    message: format!("expected header `{}`", header.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: [String; 3] = fields.try_into().map_err(|f: Vec<String>| IoError::Parse {
            line,
            message: format!("expected 3 fields, found {}", f.len()),
        })?;
        out.push((line, fields));
    }
    Ok(seen_header.then_some(out))
}

/// One CSV record on a single line, fields trimmed.
fn split_record(text: &str, line: u64) -> Result<Vec<String>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut record = csv::StringRecord::new();
    reader
        .read_record(&mut record)
        .map_err(|e| IoError::Parse {
            line,
            message: e.to_string(),
        })?;
    Ok(record.iter().map(str::to_string).collect())
}

fn invalid(line: u64, message: impl Into<String>) -> IoError {
    IoError::Invalid {
        line,
        message: message.into(),
    }
}

/// Positive integer amount, with a rescaling hint for fractional input.
fn parse_quantity(field: &str, what: &str, line: u64, allow_zero: bool) -> Result<Amount, IoError> {
    if let Ok(v) = field.parse::<Amount>() {
        if v == 0 && !allow_zero {
            return Err(invalid(line, format!("{what} must be positive")));
        }
        return Ok(v);
    }
    if field.parse::<i128>().is_ok() {
        return Err(invalid(line, format!("{what} `{field}` is negative or too large")));
    }
    let looks_fractional = field.contains('/') || field.parse::<f64>().map_or(false, f64::is_finite);
    if looks_fractional {
        return Err(invalid(
            line,
            format!(
                "{what} `{field}` is not an integer; multiply every amount by the least common \
                 multiple of the denominators so that all values are integers"
            ),
        ));
    }
    Err(IoError::Parse {
        line,
        message: format!("{what} `{field}` is not a number"),
    })
}

fn participant(field: &str, line: u64) -> Result<ParticipantId, IoError> {
    ParticipantId::new(field).map_err(|e| invalid(line, e.to_string()))
}

pub fn parse_network(text: &str) -> Result<Network, IoError> {
    directives(text)?;
    let rows = records(text, NETWORK_HEADER)?.ok_or_else(|| IoError::Parse {
        line: 1,
        message: format!("missing header `{}`", NETWORK_HEADER.join(",")),
    })?;
    let mut seen: HashMap<(String, String), u64> = HashMap::new();
    let mut builder = Network::builder();
    for (line, [from, to, amount]) in rows {
        let from = participant(&from, line)?;
        let to = participant(&to, line)?;
        if from == to {
            return Err(invalid(line, format!("self-loop on `{from}`")));
        }
        let amount = parse_quantity(&amount, "amount", line, false)?;
        let key = (from.as_str().to_string(), to.as_str().to_string());
        if let Some(first) = seen.insert(key, line) {
            return Err(invalid(
                line,
                format!("duplicate obligation {from}->{to} (first on line {first})"),
            ));
        }
        builder = builder.obligation(from.as_str(), to.as_str(), amount);
    }
    Ok(builder.build()?)
}

fn csv_text<I, R>(comments: &[String], header: [&str; 3], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut out = Vec::new();
    for c in comments {
        out.extend_from_slice(c.as_bytes());
        out.push(b'\n');
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("ids are valid UTF-8")
}

/// Zero-amount obligations are dropped.
pub fn write_network(net: &Network) -> String {
    csv_text(
        &[format!("#format={FORMAT_VERSION}")],
        NETWORK_HEADER,
        net.obligations().iter().filter(|o| o.amount > 0).map(|o| {
            [
                net.participant(o.from).to_string(),
                net.participant(o.to).to_string(),
                o.amount.to_string(),
            ]
        }),
    )
}

/// Like [`write_network`], with the generator settings as `#key=value`
/// lines so that reports on the file can name the source.
pub fn write_generated_network(net: &Network, info: &GeneratorInfo) -> String {
    let text = write_network(net);
    let body = text.split_once('\n').map_or("", |(_, rest)| rest);
    let mut out = format!("#format={FORMAT_VERSION}\n");
    for (key, value) in [
        ("rng", info.rng.clone()),
        ("seed", info.seed.to_string()),
        ("nodes", info.nodes.to_string()),
        ("arcs_requested", info.arcs_requested.to_string()),
        ("arcs_actual", info.arcs_actual.to_string()),
        ("connecting_arcs", info.connecting_arcs.to_string()),
        ("max_capacity", info.max_capacity.to_string()),
    ] {
        out.push_str(&format!("#{key}={value}\n"));
    }
    out.push_str(body);
    out
}

/// Generator settings from a network file, `None` when it has no `#rng` line.
pub fn parse_generator_info(text: &str) -> Result<Option<GeneratorInfo>, IoError> {
    let dirs = directives(text)?;
    let Some((rng_line, rng)) = dirs.get("rng") else {
        return Ok(None);
    };
    let number = |key: &str| -> Result<u64, IoError> {
        let (line, v) = dirs.get(key).ok_or_else(|| IoError::Parse {
            line: *rng_line,
            message: format!("`#rng` given without `#{key}`"),
        })?;
        v.parse().map_err(|_| IoError::Parse {
            line: *line,
            message: format!("`#{key}` must be a non-negative integer, found `{v}`"),
        })
    };
    Ok(Some(GeneratorInfo {
        rng: rng.clone(),
        seed: number("seed")?,
        nodes: number("nodes")? as usize,
        arcs_requested: number("arcs_requested")? as usize,
        arcs_actual: number("arcs_actual")? as usize,
        connecting_arcs: number("connecting_arcs")? as usize,
        max_capacity: number("max_capacity")?,
    }))
}

/// Out-mode rows name the arc `participant -> counterparty`; `#mode=in`
/// flips it to `counterparty -> participant`. An empty input is an empty
/// out-mode profile.
pub fn parse_preferences(text: &str, net: &Network) -> Result<PreferenceProfile, IoError> {
    let dirs = directives(text)?;
    let mode = match dirs.get("mode") {
        None => Orientation::Out,
        Some((_, v)) if v == "out" => Orientation::Out,
        Some((_, v)) if v == "in" => Orientation::In,
        Some((line, v)) => {
            return Err(IoError::Parse {
                line: *line,
                message: format!("mode must be `in` or `out`, got `{v}`"),
            })
        }
    };
    let Some(rows) = records(text, PREFERENCES_HEADER)? else {
        return Ok(PreferenceProfile::empty(net, mode));
    };

    // participant -> (rank, arc, line)
    let mut lists: BTreeMap<usize, Vec<(u64, usize, u64)>> = BTreeMap::new();
    for (line, [who, rank, other]) in rows {
        let rank: u64 = rank.parse().map_err(|_| IoError::Parse {
            line,
            message: format!("rank `{rank}` is not a positive integer"),
        })?;
        if rank == 0 {
            return Err(invalid(line, "ranks start at 1"));
        }
        let (from, to) = match mode {
            Orientation::Out => (who.as_str(), other.as_str()),
            Orientation::In => (other.as_str(), who.as_str()),
        };
        let arc = net
            .find_arc(from, to)
            .ok()
            .flatten()
            .ok_or_else(|| invalid(line, format!("unknown obligation {from}->{to}")))?;
        let p = net.index_of(&who).expect("arc exists so the participant does");
        let list = lists.entry(p).or_default();
        if let Some(&(_, _, first)) = list.iter().find(|&&(_, a, _)| a == arc) {
            return Err(invalid(
                line,
                format!("obligation {from}->{to} listed twice by {who} (first on line {first})"),
            ));
        }
        if let Some(&(_, _, first)) = list.iter().find(|&&(r, _, _)| r == rank) {
            return Err(invalid(
                line,
                format!("rank {rank} used twice by {who} (first on line {first})"),
            ));
        }
        list.push((rank, arc, line));
    }
    let mut ordered = Vec::with_capacity(lists.len());
    for (p, mut list) in lists {
        list.sort_unstable();
        for (expected, &(rank, _, line)) in (1u64..).zip(&list) {
            if rank != expected {
                return Err(invalid(
                    line,
                    format!(
                        "ranks of {} must run 1..{} without gaps, found {rank} where {expected} was expected",
                        net.participant(p),
                        list.len()
                    ),
                ));
            }
        }
        ordered.push((p, list.into_iter().map(|(_, arc, _)| arc).collect::<Vec<_>>()));
    }
    Ok(PreferenceProfile::new(net, mode, ordered)?)
}

pub fn write_preferences(net: &Network, profile: &PreferenceProfile) -> String {
    let mut comments = vec![format!("#format={FORMAT_VERSION}")];
    if profile.mode() == Orientation::In {
        comments.push("#mode=in".to_string());
    }
    let rows = profile.iter().flat_map(|(p, list)| {
        list.iter().enumerate().map(move |(i, &arc)| {
            let o = net.obligation(arc);
            let other = if o.from == p { o.to } else { o.from };
            [
                net.participant(p).to_string(),
                (i + 1).to_string(),
                net.participant(other).to_string(),
            ]
        })
    });
    csv_text(&comments, PREFERENCES_HEADER, rows)
}

/// Omitted arcs carry zero flow. An empty input is the zero assignment.
pub fn parse_flow(text: &str, net: &Network) -> Result<FlowAssignment, IoError> {
    directives(text)?;
    let Some(rows) = records(text, FLOW_HEADER)? else {
        return Ok(FlowAssignment::zeros(net.arc_count()));
    };
    let mut flow = FlowAssignment::zeros(net.arc_count());
    let mut seen: HashMap<usize, u64> = HashMap::new();
    for (line, [from, to, value]) in rows {
        let arc = net
            .find_arc(&from, &to)
            .ok()
            .flatten()
            .ok_or_else(|| invalid(line, format!("unknown obligation {from}->{to}")))?;
        if let Some(first) = seen.insert(arc, line) {
            return Err(invalid(
                line,
                format!("flow on {from}->{to} given twice (first on line {first})"),
            ));
        }
        flow.set(arc, parse_quantity(&value, "flow", line, true)?);
    }
    Ok(flow)
}

/// Only positive entries are written.
pub fn write_flow(net: &Network, flow: &FlowAssignment) -> String {
    csv_text(
        &[format!("#format={FORMAT_VERSION}")],
        FLOW_HEADER,
        flow.positive().filter(|&(a, _)| a < net.arc_count()).map(|(a, x)| {
            let o = net.obligation(a);
            [
                net.participant(o.from).to_string(),
                net.participant(o.to).to_string(),
                x.to_string(),
            ]
        }),
    )
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_report(report: &CompressionReport) -> String {
    pretty_json(report)
}

pub fn write_summary_json(summary: &SimSummary) -> String {
    pretty_json(summary)
}

pub const SUMMARY_CSV_HEADER: [&str; 11] = [
    "seed",
    "nodes",
    "arcs",
    "algorithm",
    "volume",
    "fraction_num",
    "fraction_den",
    "iterations",
    "stuck",
    "aborted",
    "wall_ms",
];

/// One row per instance and algorithm.
pub fn write_summary_csv(summary: &SimSummary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_CSV_HEADER).expect("in-memory write");
    for r in &summary.instances {
        w.write_record([
            r.seed.to_string(),
            r.nodes.to_string(),
            r.arcs.to_string(),
            r.algorithm.to_string(),
            r.volume.to_string(),
            r.fraction_cleared.num.to_string(),
            r.fraction_cleared.den.to_string(),
            r.iterations.to_string(),
            r.stuck.to_string(),
            r.aborted.to_string(),
            format!("{:.3}", r.wall_ms),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

pub fn parse_sim_config(text: &str) -> Result<SimConfig, IoError> {
    toml::from_str(text).map_err(|e| IoError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxvol::max_volume_circulation;

    const T3: &str = "from,to,amount\nA,B,5\nB,C,3\nC,A,7";

    fn line_of(err: IoError) -> u64 {
        match err {
            IoError::Parse { line, .. } | IoError::Invalid { line, .. } => line,
            other => panic!("no line number: {other}"),
        }
    }

    #[test]
    fn generator_directives_round_trip() {
        use crate::netgen::{generate_network, GenConfig};
        let cfg = GenConfig { nodes: 5, arcs: 9, max_capacity: 7, seed: 11 };
        let g = generate_network(&cfg).unwrap();
        let text = write_generated_network(&g.network, &g.info(&cfg));
        assert_eq!(parse_network(&text).unwrap(), g.network);
        assert_eq!(parse_generator_info(&text).unwrap(), Some(g.info(&cfg)));
        assert_eq!(parse_generator_info(T3).unwrap(), None);
        let broken = text.replace("#seed=11", "#seed=x");
        assert_eq!(line_of(parse_generator_info(&broken).unwrap_err()), 3);
    }

    #[test]
    fn network_examples() {
        let net = parse_network(T3).unwrap();
        assert_eq!(net, Network::from_obligations([("A", "B", 5), ("B", "C", 3), ("C", "A", 7)]).unwrap());

        let err = parse_network("from,to,amount\nA,A,5").unwrap_err();
        assert!(err.to_string().contains("self-loop"));
        assert_eq!(line_of(err), 2);

        let err = parse_network("from,to,amount\nA,B,1.5").unwrap_err();
        assert!(err.to_string().contains("least common multiple"), "{err}");
        assert_eq!(line_of(err), 2);
    }

    #[test]
    fn network_line_numbers_skip_comments() {
        let text = "#format=1\n\nfrom,to,amount\n# note\nA,B,1\n\nB,A,x\n";
        assert_eq!(line_of(parse_network(text).unwrap_err()), 7);
        let dup = "from,to,amount\nA,B,1\nB,A,1\nA,B,2\n";
        let err = parse_network(dup).unwrap_err();
        assert!(matches!(err, IoError::Invalid { line: 4, .. }), "{err}");
        assert_eq!(line_of(parse_network("from,to,amount\nA,B\n").unwrap_err()), 2);
        assert!(parse_network("a,b,c\nA,B,1").is_err());
        assert!(parse_network("").is_err());
        assert!(parse_network("#format=2\nfrom,to,amount\nA,B,1").is_err());
        assert!(parse_network("from,to,amount\nA,B,0").is_err());
        assert!(parse_network("from,to,amount\nA,B,-3").is_err());
    }

    #[test]
    fn network_round_trip_drops_zero_arcs() {
        let net = parse_network(T3).unwrap();
        assert_eq!(parse_network(&write_network(&net)).unwrap(), net);
        let compressed = net.with_amounts([2, 0, 4].into_iter());
        let back = parse_network(&write_network(&compressed)).unwrap();
        assert_eq!(back.arc_count(), 2);
    }

    fn p4() -> Network {
        parse_network("from,to,amount\n1,2,4\n2,3,2\n3,1,5\n3,4,3\n4,3,3").unwrap()
    }

    #[test]
    fn preference_examples() {
        let net = p4();
        let p = parse_preferences("participant,rank,counterparty\n3,1,4\n3,2,1", &net).unwrap();
        let three = net.index_of("3").unwrap();
        let labels: Vec<String> = p.list(three).iter().map(|&a| net.arc_label(a)).collect();
        assert_eq!(labels, ["3->4", "3->1"]);

        let empty = parse_preferences("", &net).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.mode(), Orientation::Out);

        let err = parse_preferences("participant,rank,counterparty\n3,1,4\n3,3,1", &net).unwrap_err();
        assert!(err.to_string().contains("without gaps"), "{err}");
        assert_eq!(line_of(err), 3);
    }

    #[test]
    fn preference_errors_and_modes() {
        let net = p4();
        let h = "participant,rank,counterparty\n";
        assert_eq!(line_of(parse_preferences(&format!("{h}1,1,3"), &net).unwrap_err()), 2);
        assert_eq!(line_of(parse_preferences(&format!("{h}3,1,4\n3,2,4"), &net).unwrap_err()), 3);
        assert_eq!(line_of(parse_preferences(&format!("{h}3,1,4\n3,1,1"), &net).unwrap_err()), 3);
        assert!(parse_preferences(&format!("#mode=sideways\n{h}"), &net).is_err());

        let p = parse_preferences(&format!("#mode=in\n{h}3,1,4\n3,2,2"), &net).unwrap();
        assert_eq!(p.mode(), Orientation::In);
        let three = net.index_of("3").unwrap();
        let labels: Vec<String> = p.list(three).iter().map(|&a| net.arc_label(a)).collect();
        assert_eq!(labels, ["4->3", "2->3"]);
        assert_eq!(parse_preferences(&write_preferences(&net, &p), &net).unwrap(), p);
    }

    #[test]
    fn flow_examples() {
        let net = parse_network(T3).unwrap();
        let flow = max_volume_circulation(&net).unwrap().flow;
        let text = write_flow(&net, &flow);
        assert_eq!(text.lines().filter(|l| l.ends_with(",3")).count(), 3);
        assert_eq!(parse_flow(&text, &net).unwrap(), flow);

        assert!(parse_flow("", &net).unwrap().is_zero());
        assert!(parse_flow("from,to,flow\n", &net).unwrap().is_zero());
        let err = parse_flow("from,to,flow\nD,A,1", &net).unwrap_err();
        assert!(err.to_string().contains("unknown obligation"));
        assert!(parse_flow("from,to,flow\nA,B,-1", &net).is_err());
        assert!(parse_flow("from,to,flow\nA,B,0.5", &net).is_err());
        assert!(parse_flow("from,to,flow\nA,B,1\nA,B,1", &net).is_err());
        assert_eq!(parse_flow("from,to,flow\nA,B,0", &net).unwrap(), FlowAssignment::default());
    }

    #[test]
    fn sim_config() {
        let cfg = parse_sim_config(
            "seed = 5\nalgorithms = [\"maxvol\", \"pref:3/4\"]\n\n[[group]]\nnodes = 6\narcs = 10\nmax_capacity = 4\ncount = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.batch().len(), 3);
        assert!(parse_sim_config("seed = 5\nalgorithms = [\"fast\"]").is_err());
        assert!(parse_sim_config("seed = 5\nalgorithms = []\nbogus = 1").is_err());
    }
}
