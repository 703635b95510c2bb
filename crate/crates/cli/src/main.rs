//! `escrowdkg` command-line driver.
//!
//! Every line on standard output is a JSON document. Exit codes: 0 success,
//! 1 protocol failure outcome, 2 usage or configuration error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use escrowdkg::dispute::{cost_report, CostWeights, DisputeCase};
use escrowdkg::economics::{split_sweep, full_report, parse_ratio, EconParams, Money};
use escrowdkg::sim::{seed_sweep, sweep, to_csv, ApplicationConfig};
use escrowdkg::{Backend, FramingReward, GroupTag, Outcome, Protocol, Scenario, UNIT};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "escrowdkg", version, about = "Escrow-backed DKG simulator, dispute arbiter, beacon and economics")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Flags override fields read from `--file`.
#[derive(Args, Default)]
struct Common {
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    t: Option<u32>,
    /// Deposit Δ in currency units (`10000`, `12.5`, `25/2`).
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Blocks per phase.
    #[arg(long, global = true)]
    epoch: Option<u64>,
    /// Group order for the mock backend.
    #[arg(long, global = true)]
    q: Option<u64>,
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, global = true, env = "SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// Also write the primary artifact (transcript, report or CSV) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Beacon rounds in the application stage.
    #[arg(long, global = true)]
    rounds: Option<u64>,
    #[arg(long, global = true, value_enum)]
    framing_reward: Option<RewardArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Mock,
    Pairing,
}

#[derive(Clone, Copy, ValueEnum)]
enum RewardArg {
    Full,
    Half,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum ProtocolArg {
    EscrowDkg,
    EthDkg,
    PedDkg,
}

#[derive(Subcommand)]
enum Command {
    /// Run one DKG and stream its transcript.
    DkgRun {
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
    },
    /// Run a DKG followed by beacon rounds; one line per round.
    Beacon {
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
    },
    /// Replay a bisection dispute from a case file, or print the cost table.
    DisputeReplay {
        /// Comma-separated degrees for a cost table instead of a replay.
        #[arg(long, value_delimiter = ',')]
        cost_table: Vec<u64>,
        /// Use unit weights instead of the EVM-like ones.
        #[arg(long)]
        unit_weights: bool,
    },
    /// Collusion and robustness report for economic parameters.
    EconAnalyze {
        #[arg(long = "R")]
        r: Option<String>,
        /// Participant share of R.
        #[arg(long)]
        alpha: Option<String>,
        /// Colluding sides `a,b` for a payoff matrix.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        split: Option<Vec<u64>>,
        /// Largest investment any single entity can make.
        #[arg(long)]
        max_investment: Option<String>,
        /// Also emit every split with a + b = t + 1.
        #[arg(long)]
        sweep: bool,
    },
    /// Run a scenario file through the full lifecycle.
    Scenario,
    /// Run a scenario (or array of scenarios) over many seeds in parallel.
    Sweep {
        /// Seeds `seed..seed+count` per scenario.
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Protocol,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            // help and version go to stdout as JSON
            if code == 0 {
                println!("{}", json!({ "help": e.to_string() }));
            } else {
                eprint!("{e}");
            }
            return ExitCode::from(code);
        }
    };
    let mut out = io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Protocol) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> CmdResult {
    let c = &cli.common;
    match &cli.command {
        Command::DkgRun { protocol } => {
            let mut sc = scenario(c, *protocol)?;
            if c.rounds.is_none() {
                sc.application = None;
            }
            run_and_stream(&sc, c, out)
        }
        Command::Beacon { protocol } => {
            let mut sc = scenario(c, *protocol)?;
            let rounds = c.rounds.or(sc.application.as_ref().map(|a| a.rounds)).unwrap_or(5);
            sc.application = Some(ApplicationConfig { rounds, ..sc.application.unwrap_or(ApplicationConfig::rounds(0)) });
            let run = escrowdkg::run_scenario(&sc).map_err(|e| anyhow!(e))?;
            let mut lines = Vec::new();
            for e in run.transcript.find("beacon_round") {
                lines.push(json!({
                    "round": e.detail["round"],
                    "height": e.height,
                    "value": e.detail["rs"],
                    "leader": e.detail["leader"],
                    "signers": e.detail["signers"],
                }));
            }
            lines.push(json!({ "summary": run.summary }));
            emit_lines(out, c.out.as_deref(), &lines)?;
            exit_for(run.summary.outcome)
        }
        Command::DisputeReplay { cost_table, unit_weights } => {
            let weights = if *unit_weights { CostWeights::default() } else { CostWeights::evm_like() };
            if !cost_table.is_empty() {
                let rows = cost_report(cost_table, &weights);
                let lines: Vec<_> = rows.iter().map(|r| serde_json::to_value(r).expect("row")).collect();
                return emit_lines(out, c.out.as_deref(), &lines);
            }
            let path = c.file.as_deref().ok_or_else(|| anyhow!("dispute-replay needs --file or --cost-table"))?;
            let mut case: DisputeCase = read_json(path)?;
            if let Some(t) = c.t {
                case.t = t as usize;
            }
            if let Some(seed) = c.seed {
                case.seed = seed;
            }
            let suite = suite(c.backend.map(backend).unwrap_or(Backend::Mock), c.q.unwrap_or(101))?;
            let (outcome, naive) = case.run(&suite, GroupTag::G1);
            let mut lines: Vec<serde_json::Value> =
                outcome.turns.iter().map(|t| serde_json::to_value(t).expect("turn")).collect();
            lines.push(json!({
                "verdict": outcome.verdict,
                "rounds": outcome.state.round,
                "prover_costs": outcome.state.prover_costs,
                "challenger_costs": outcome.state.challenger_costs,
                "weighted": outcome.state.total_costs().weighted(&weights),
                "naive": { "justified": naive.justified, "costs": naive.costs, "weighted": naive.costs.weighted(&weights) },
                "agrees_with_naive": outcome.verdict.justified == naive.justified,
            }));
            emit_lines(out, c.out.as_deref(), &lines)
        }
        Command::EconAnalyze { r, alpha, split, max_investment, sweep } => {
            let mut p: EconParams = match &c.file {
                Some(path) => read_json(path)?,
                None => EconParams::lottery(),
            };
            let ratio = |s: &str| parse_ratio(s).map_err(|e| anyhow!(e));
            if let Some(r) = r {
                p.r = ratio(r)?;
            }
            if let Some(d) = &c.delta {
                p.delta = ratio(d)?;
            }
            if let Some(a) = alpha {
                p.alpha = ratio(a)?;
            }
            if let Some(n) = c.n {
                p.n = n as u64;
            }
            if let Some(t) = c.t {
                p.t = t as u64;
            }
            if let Some(f) = c.framing_reward {
                p.framing_reward = reward(f);
            }
            let split = split.as_ref().map(|v| (v[0], v[1]));
            let max: Option<Money> = max_investment.as_deref().map(ratio).transpose()?;
            let report = full_report(&p, split, max).map_err(|e| anyhow!(e))?;
            let mut lines = vec![serde_json::to_value(&report).expect("report")];
            if *sweep {
                lines.extend(split_sweep(&p).iter().map(|cell| serde_json::to_value(cell).expect("cell")));
            }
            emit_lines(out, c.out.as_deref(), &lines)
        }
        Command::Scenario => {
            if c.file.is_none() {
                return Err(anyhow!("scenario needs --file").into());
            }
            let sc = scenario(c, None)?;
            run_and_stream(&sc, c, out)
        }
        Command::Sweep { count } => {
            let path = c.file.as_deref().ok_or_else(|| anyhow!("sweep needs --file"))?;
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text).context("parsing scenario file")?;
            let items = match value {
                serde_json::Value::Array(items) => items,
                other => vec![other],
            };
            let mut bases = Vec::new();
            for v in items {
                let sc: Scenario = serde_json::from_value(v).context("parsing scenario")?;
                bases.push(override_scenario(sc, c)?);
            }
            let mut scenarios = Vec::new();
            for b in &bases {
                b.validate().map_err(|e| anyhow!("{}: {e}", b.name))?;
                scenarios.extend(seed_sweep(b, b.seed..b.seed + count));
            }
            let results = sweep(&scenarios);
            let mut rows = Vec::new();
            let mut lines = Vec::new();
            for r in results {
                let s = r.map_err(|e| anyhow!(e))?;
                lines.push(serde_json::to_value(&s).expect("summary"));
                rows.push(s);
            }
            for l in &lines {
                writeln!(out, "{l}").context("writing output")?;
            }
            if let Some(path) = &c.out {
                fs::write(path, to_csv(&rows)).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
    }
}

fn run_and_stream(sc: &Scenario, c: &Common, out: &mut impl Write) -> CmdResult {
    let run = escrowdkg::run_scenario(sc).map_err(|e| anyhow!(e))?;
    let mut text = run.transcript.to_jsonl();
    text.push_str(&serde_json::to_string(&json!({ "summary": run.summary })).expect("summary"));
    text.push('\n');
    out.write_all(text.as_bytes()).context("writing output")?;
    if let Some(path) = &c.out {
        fs::write(path, run.transcript.to_jsonl()).with_context(|| format!("writing {}", path.display()))?;
    }
    exit_for(run.summary.outcome)
}

fn exit_for(outcome: Outcome) -> CmdResult {
    if outcome.is_success() {
        Ok(())
    } else {
        Err(Failure::Protocol)
    }
}

fn emit_lines<T: Serialize>(out: &mut impl Write, file: Option<&Path>, lines: &[T]) -> CmdResult {
    let mut text = String::new();
    for l in lines {
        text.push_str(&serde_json::to_string(l).expect("json"));
        text.push('\n');
    }
    out.write_all(text.as_bytes()).context("writing output")?;
    if let Some(path) = file {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn backend(b: BackendArg) -> Backend {
    match b {
        BackendArg::Mock => Backend::Mock,
        BackendArg::Pairing => Backend::Pairing,
    }
}

fn reward(r: RewardArg) -> FramingReward {
    match r {
        RewardArg::Full => FramingReward::Full,
        RewardArg::Half => FramingReward::Half,
    }
}

fn suite(b: Backend, q: u64) -> anyhow::Result<escrowdkg::GroupSuite> {
    escrowdkg::GroupSuite::new(b, q).map_err(|e| anyhow!(e))
}

/// Deposit in milli-units from a unit amount.
fn deposit(s: &str) -> anyhow::Result<u64> {
    let v = parse_ratio(s).map_err(|e| anyhow!(e))? * Money::from_integer(UNIT as i128);
    if !v.is_integer() || *v.numer() <= 0 {
        bail!("--delta {s} is not a positive multiple of 1/{UNIT}");
    }
    u64::try_from(*v.numer()).map_err(|_| anyhow!("--delta {s} is too large"))
}

fn scenario(c: &Common, protocol: Option<ProtocolArg>) -> anyhow::Result<Scenario> {
    let base = match &c.file {
        Some(path) => read_json(path)?,
        None => Scenario::honest(5, 2, 0),
    };
    let mut sc = override_scenario(base, c)?;
    if let Some(p) = protocol {
        sc.protocol = match p {
            ProtocolArg::EscrowDkg => Protocol::EscrowDkg,
            ProtocolArg::EthDkg => Protocol::EthDkg,
            ProtocolArg::PedDkg => Protocol::PedDkg,
        };
    }
    sc.validate().map_err(|e| anyhow!(e))?;
    Ok(sc)
}

fn override_scenario(mut sc: Scenario, c: &Common) -> anyhow::Result<Scenario> {
    if let Some(n) = c.n {
        sc.n = n;
    }
    if let Some(t) = c.t {
        sc.t = t;
    }
    if let Some(d) = &c.delta {
        sc.deposit = deposit(d)?;
    }
    if let Some(e) = c.epoch {
        sc.epoch = e;
    }
    if let Some(q) = c.q {
        sc.q = q;
    }
    if let Some(b) = c.backend {
        sc.backend = backend(b);
    }
    if let Some(s) = c.seed {
        sc.seed = s;
    }
    if let Some(r) = c.rounds {
        let app = sc.application.take().unwrap_or(ApplicationConfig::rounds(0));
        sc.application = Some(ApplicationConfig { rounds: r, ..app });
    }
    if let Some(f) = c.framing_reward {
        sc.framing_reward = reward(f);
    }
    Ok(sc)
}
