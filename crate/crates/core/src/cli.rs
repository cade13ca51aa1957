//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed or a run got stuck or hit its
//! iteration cap, 2 bad usage, unreadable files or malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::io::{self, IoError};
use crate::maxvol::{compress_max_volume, MaxVolError};
use crate::netgen::{generate_network, generate_preferences, GenConfig};
use crate::network::flow::{decompose_circulation, is_feasible, FlowAssignment};
use crate::network::{classify_participants, contains_directed_cycle, positions, strongly_connected_components, Network, Role};
use crate::preferential::{compress_preferential, ClearingError, Threshold};
use crate::report::CompressionReport;
use crate::sim::{preference_seed, run_simulation, SimError};

#[derive(Parser, Debug)]
#[command(name = "netcompress", version, about = "Conservative compression of obligation networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Positions, excess, component count and cycle check.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Checks that a flow is a feasible circulation.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        flow: PathBuf,
    },
    /// Compresses a network.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// Preference file, required for `pref`.
        #[arg(long)]
        prefs: Option<PathBuf>,
        /// Clearing threshold as NUM/DEN, `pref` only.
        #[arg(long)]
        epsilon: Option<String>,
        /// Compressed network.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        flow_out: Option<PathBuf>,
        /// JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Splits a feasible circulation into cycles.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        flow: PathBuf,
    },
    /// Generates a strongly connected random network.
    Generate {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long)]
        max_capacity: u64,
        #[arg(long)]
        seed: u64,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write a random out-mode preference file.
        #[arg(long)]
        prefs_out: Option<PathBuf>,
    },
    /// Runs a batch described by a TOML file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// JSON summary, defaults to standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Per-instance CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AlgorithmArg {
    Maxvol,
    Pref,
}

enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Usage(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<MaxVolError> for Failure {
    fn from(e: MaxVolError) -> Self {
        Failure::Check(e.to_string())
    }
}

impl From<ClearingError> for Failure {
    fn from(e: ClearingError) -> Self {
        match e {
            ClearingError::Invariant(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Generate { .. } => Failure::Usage(e.to_string()),
            SimError::Instance { .. } => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Stats { input } => stats(&input, out),
        Command::Validate { input, flow } => validate(&input, &flow, out, err),
        Command::Compress {
            input,
            algorithm,
            prefs,
            epsilon,
            output,
            flow_out,
            report,
        } => compress(
            &input,
            algorithm,
            prefs.as_deref(),
            epsilon.as_deref(),
            Outputs {
                network: output.as_deref(),
                flow: flow_out.as_deref(),
                report: report.as_deref(),
            },
            out,
        ),
        Command::Decompose { input, flow } => decompose(&input, &flow, out, err),
        Command::Generate {
            nodes,
            arcs,
            max_capacity,
            seed,
            output,
            prefs_out,
        } => generate(
            GenConfig {
                nodes,
                arcs,
                max_capacity,
                seed,
            },
            output.as_deref(),
            prefs_out.as_deref(),
            out,
            err,
        ),
        Command::Simulate { config, report, csv } => simulate(&config, report.as_deref(), csv.as_deref(), out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    Ok(io::parse_network(&io::read_file(path)?)?)
}

fn load_flow(path: &Path, net: &Network) -> Result<FlowAssignment, Failure> {
    Ok(io::parse_flow(&io::read_file(path)?, net)?)
}

fn stats(input: &Path, out: &mut dyn Write) -> Outcome {
    let net = load_network(input)?;
    let rows = positions(&net);
    let roles = classify_participants(&net);
    let mut text = String::new();
    text.push_str(&format!("participants {}\n", net.participant_count()));
    text.push_str(&format!("obligations {}\n", net.arc_count()));
    text.push_str(&format!("gross {}\n", rows.iter().map(|r| r.gross).sum::<u64>()));
    text.push_str(&format!("excess {}\n", rows.iter().map(|r| r.excess).sum::<u64>()));
    text.push_str(&format!("components {}\n", strongly_connected_components(&net).len()));
    text.push_str(&format!("has_cycle {}\n", contains_directed_cycle(&net)));
    text.push_str("\nparticipant,role,gross,net,excess\n");
    for r in &rows {
        let role = match roles[&r.participant] {
            Role::Dealer => "dealer",
            Role::Customer => "customer",
        };
        text.push_str(&format!("{},{role},{},{},{}\n", r.participant, r.gross, r.net, r.excess));
    }
    emit(out, &text)
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

/// Feasibility problems go to `err`, one per line.
fn check_feasible(net: &Network, flow: &FlowAssignment, err: &mut dyn Write) -> Outcome {
    let check = is_feasible(net, flow).map_err(|e| Failure::Usage(e.to_string()))?;
    if check.is_ok() {
        return Ok(());
    }
    for i in &check.imbalances {
        let _ = writeln!(err, "imbalance {} at {}", i.imbalance, i.participant);
    }
    for v in &check.violations {
        let _ = writeln!(err, "flow {} exceeds amount {} on {}->{}", v.flow, v.amount, v.from, v.to);
    }
    Err(Failure::Check("flow is not a feasible circulation".into()))
}

fn validate(input: &Path, flow: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let net = load_network(input)?;
    let flow = load_flow(flow, &net)?;
    check_feasible(&net, &flow, err)?;
    emit(out, &format!("ok: feasible circulation of volume {}\n", flow.volume()))
}

struct Outputs<'a> {
    network: Option<&'a Path>,
    flow: Option<&'a Path>,
    report: Option<&'a Path>,
}

fn compress(
    input: &Path,
    algorithm: AlgorithmArg,
    prefs: Option<&Path>,
    epsilon: Option<&str>,
    outputs: Outputs<'_>,
    out: &mut dyn Write,
) -> Outcome {
    let text = io::read_file(input)?;
    let before = io::parse_network(&text)?;
    let (after, mut report) = match algorithm {
        AlgorithmArg::Maxvol if prefs.is_some() || epsilon.is_some() => {
            return Err(Failure::Usage("--prefs and --epsilon apply to `pref` only".into()));
        }
        AlgorithmArg::Maxvol => compress_max_volume(&before)?,
        AlgorithmArg::Pref => {
            let Some(prefs) = prefs else {
                return Err(Failure::Usage("`pref` needs --prefs".into()));
            };
            let eps: Threshold = epsilon.unwrap_or("1").parse()?;
            let profile = io::parse_preferences(&io::read_file(prefs)?, &before)?;
            compress_preferential(&before, &profile, eps)?
        }
    };
    report.generator = io::parse_generator_info(&text)?;
    let flow = FlowAssignment::from_values(
        before
            .obligations()
            .iter()
            .zip(after.obligations())
            .map(|(b, a)| b.amount - a.amount)
            .collect(),
    );
    if let Some(path) = outputs.network {
        io::write_file(path, &io::write_network(&after))?;
    }
    if let Some(path) = outputs.flow {
        io::write_file(path, &io::write_flow(&before, &flow))?;
    }
    if let Some(path) = outputs.report {
        io::write_file(path, &io::write_report(&report))?;
    }
    emit(out, &summary_line(&report))?;
    if report.stuck {
        return Err(Failure::Check("clearing got stuck".into()));
    }
    if report.aborted {
        return Err(Failure::Check("iteration cap reached before optimality".into()));
    }
    Ok(())
}

fn summary_line(r: &CompressionReport) -> String {
    format!(
        "volume {} excess {} -> {} fraction cleared {}/{} iterations {}\n",
        r.volume, r.totals.excess_before, r.totals.excess_after, r.fraction_cleared.num, r.fraction_cleared.den, r.iterations
    )
}

fn decompose(input: &Path, flow: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let net = load_network(input)?;
    let flow = load_flow(flow, &net)?;
    check_feasible(&net, &flow, err)?;
    let cycles = decompose_circulation(&net, &flow).map_err(|e| Failure::Check(e.to_string()))?;
    let mut text = String::new();
    for c in &cycles {
        let path: Vec<&str> = c.participants(&net).iter().map(|p| p.as_str()).collect();
        text.push_str(&format!("{} {}\n", c.amount, path.join("->")));
    }
    emit(out, &text)
}

fn generate(
    cfg: GenConfig,
    output: Option<&Path>,
    prefs_out: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let g = generate_network(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = io::write_generated_network(&g.network, &g.info(&cfg));
    match output {
        Some(path) => io::write_file(path, &text)?,
        None => emit(out, &text)?,
    }
    if let Some(path) = prefs_out {
        let profile = generate_preferences(&g.network, preference_seed(cfg.seed));
        io::write_file(path, &io::write_preferences(&g.network, &profile))?;
    }
    let _ = writeln!(
        err,
        "{} nodes, {} arcs ({} connecting), seed {}",
        g.network.participant_count(),
        g.network.arc_count(),
        g.connecting_arcs,
        cfg.seed
    );
    Ok(())
}

fn simulate(config: &Path, report: Option<&Path>, csv: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let cfg = io::parse_sim_config(&io::read_file(config)?)?;
    let summary = run_simulation(&cfg.batch(), &cfg.algorithms)?;
    let json = io::write_summary_json(&summary);
    if let Some(path) = csv {
        io::write_file(path, &io::write_summary_csv(&summary))?;
    }
    match report {
        Some(path) => {
            io::write_file(path, &json)?;
            let mut text = String::new();
            for a in &summary.aggregates {
                text.push_str(&format!(
                    "{} instances {} mean {:.4} min {}/{} max {}/{}\n",
                    a.algorithm,
                    a.instances,
                    a.mean_fraction,
                    a.min_fraction.num,
                    a.min_fraction.den,
                    a.max_fraction.num,
                    a.max_fraction.den
                ));
            }
            emit(out, &text)
        }
        None => emit(out, &json),
    }
}
