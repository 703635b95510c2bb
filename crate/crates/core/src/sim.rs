//! Scenario engine: a scripted DKG run, an optional beacon application
//! stage with collusion, framing and non-cooperation, and ledger settlement.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::beacon::{aggregate, elect_leader, sign_share, BeaconState, EarlyBeacon};
use crate::behavior::Behavior;
use crate::dkg::{DkgConfig, DkgOutput};
use crate::economics::{full_report, EconParams, EconReport};
use crate::escrow_dkg::{
    run_escrow_dkg, Complaint, EscrowDkg, Evidence, FramingEvidence, Phase, Transaction, TxBody,
};
use crate::eth_dkg::{run_eth_dkg, ChannelDrop, EthDkg};
use crate::group::{Backend, GroupSuite, GroupTag, Scalar};
use crate::hashing::{sha256, to_hex};
use crate::ledger::{Amount, ComplaintKind, EntityId, EscrowLedger, FramingReward, Ruling, UNIT};
use crate::ped_dkg::run_ped_dkg;
use crate::sharing::lagrange_interpolate;
use crate::transcript::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    #[default]
    EscrowDkg,
    EthDkg,
    PedDkg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceChoice {
    #[default]
    SecretKey,
    EarlyBeacon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationConfig {
    pub rounds: u64,
    /// Blocks between rounds; defaults to the phase length.
    #[serde(default)]
    pub interval: Option<u64>,
    #[serde(default = "default_rs0")]
    pub rs0: String,
}

fn default_rs0() -> String {
    "escrowdkg/beacon/rs0".to_string()
}

impl ApplicationConfig {
    pub fn rounds(rounds: u64) -> Self {
        ApplicationConfig { rounds, interval: None, rs0: default_rs0() }
    }
}

fn default_n() -> u32 {
    5
}
fn default_t() -> u32 {
    2
}
fn default_deposit() -> Amount {
    10_000 * UNIT
}
fn default_epoch() -> u64 {
    10
}
fn default_q() -> u64 {
    101
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(default = "default_t")]
    pub t: u32,
    /// Milli-units.
    #[serde(default = "default_deposit")]
    pub deposit: Amount,
    #[serde(default = "default_epoch")]
    pub epoch: u64,
    #[serde(default = "default_q")]
    pub q: u64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub protocol: Protocol,
    /// Empty means everyone is honest.
    #[serde(default)]
    pub behaviors: Vec<Behavior>,
    #[serde(default)]
    pub channel_drops: Vec<ChannelDrop>,
    #[serde(default)]
    pub application: Option<ApplicationConfig>,
    #[serde(default)]
    pub framing_reward: FramingReward,
    #[serde(default)]
    pub framing_evidence: EvidenceChoice,
    #[serde(default)]
    pub econ: Option<EconParams>,
}

impl Scenario {
    pub fn honest(n: u32, t: u32, seed: u64) -> Self {
        Scenario {
            name: String::new(),
            n,
            t,
            deposit: default_deposit(),
            epoch: default_epoch(),
            q: default_q(),
            backend: Backend::Mock,
            seed,
            protocol: Protocol::EscrowDkg,
            behaviors: Vec::new(),
            channel_drops: Vec::new(),
            application: None,
            framing_reward: FramingReward::Full,
            framing_evidence: EvidenceChoice::SecretKey,
            econ: None,
        }
    }

    pub fn with_behavior(mut self, i: u32, b: Behavior) -> Self {
        if self.behaviors.is_empty() {
            self.behaviors = vec![Behavior::Honest; self.n as usize];
        }
        self.behaviors[(i - 1) as usize] = b;
        self
    }

    pub fn config(&self) -> DkgConfig {
        DkgConfig {
            n: self.n,
            t: self.t,
            deposit: self.deposit,
            epoch: self.epoch,
            commit_tag: GroupTag::G2,
            framing_reward: self.framing_reward,
        }
    }

    pub fn suite(&self) -> Result<GroupSuite, String> {
        GroupSuite::new(self.backend, self.q).map_err(|e| e.to_string())
    }

    pub fn resolved_behaviors(&self) -> Vec<Behavior> {
        if self.behaviors.is_empty() {
            vec![Behavior::Honest; self.n as usize]
        } else {
            self.behaviors.clone()
        }
    }

    fn groups(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut g: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (i, b) in self.resolved_behaviors().iter().enumerate() {
            if let Some(id) = b.collusion_group() {
                g.entry(id).or_default().push(i as u32 + 1);
            }
        }
        g
    }

    pub fn validate(&self) -> Result<(), String> {
        self.config().validate()?;
        self.suite()?;
        let behaviors = self.resolved_behaviors();
        if behaviors.len() != self.n as usize {
            return Err(format!("behavior list has {} entries for n = {}", behaviors.len(), self.n));
        }
        let in_range = |j: u32| (1..=self.n).contains(&j);
        for (idx, b) in behaviors.iter().enumerate() {
            let i = idx as u32 + 1;
            let target = match b {
                Behavior::Withhold { target, .. } => *target,
                Behavior::InconsistentSubshare { recipient } | Behavior::DigestMismatch { recipient } => Some(*recipient),
                Behavior::UnjustComplainer { target, .. } => Some(*target),
                _ => None,
            };
            if let Some(j) = target {
                if !in_range(j) || j == i {
                    return Err(format!("participant {i}: target {j} must be another index in 1..={}", self.n));
                }
            }
            if let Behavior::NonmemberCommitment { k } | Behavior::InconsistentDualPair { k0: k } = b {
                if *k > self.t as usize {
                    return Err(format!("participant {i}: coefficient index {k} exceeds t = {}", self.t));
                }
            }
        }
        for (id, members) in self.groups() {
            if members.len() < 2 {
                return Err(format!("collusion group {id} needs at least two members"));
            }
        }
        for d in &self.channel_drops {
            if !in_range(d.from) || !in_range(d.to) || d.from == d.to {
                return Err(format!("channel drop {}->{} out of range", d.from, d.to));
            }
        }
        if self.framing_evidence == EvidenceChoice::EarlyBeacon && self.application.is_none() {
            return Err("early-beacon framing needs an application stage".into());
        }
        if let Some(p) = &self.econ {
            p.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    DkgFailed,
    Framed,
    NonCooperation,
    Aborted,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self == Outcome::Success
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub protocol: Protocol,
    pub n: u32,
    pub t: u32,
    pub seed: u64,
    pub outcome: Outcome,
    pub rulings: Vec<(ComplaintKind, bool)>,
    pub slashed: Vec<EntityId>,
    pub burned: Amount,
    pub rewards: BTreeMap<EntityId, Amount>,
    /// Final holdings minus deposits, per participant.
    pub net: BTreeMap<EntityId, i64>,
    pub beacon_rounds: u64,
    pub qual: Vec<u32>,
    pub conservation: bool,
    pub events: usize,
    pub transcript_digest: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub transcript: Transcript,
    pub summary: Summary,
    pub output: Option<DkgOutput>,
    pub beacon: Option<BeaconState>,
    pub ledger: Option<EscrowLedger>,
    pub econ: Option<EconReport>,
}

/// The escrow-bearing protocol state used during the application stage.
enum Escrowed {
    Escrow(Box<EscrowDkg>),
    Eth(Box<EthDkg>),
    Ped(Transcript),
}

impl Escrowed {
    fn transcript(&mut self) -> &mut Transcript {
        match self {
            Escrowed::Escrow(s) => s.transcript_mut(),
            Escrowed::Eth(s) => s.transcript_mut(),
            Escrowed::Ped(t) => t,
        }
    }

    fn advance_to(&mut self, h: u64) -> Result<(), String> {
        match self {
            Escrowed::Escrow(s) => s.advance_to(h).map(|_| ()).map_err(|e| e.to_string()),
            Escrowed::Eth(s) => {
                s.advance_to(h);
                Ok(())
            }
            Escrowed::Ped(_) => Ok(()),
        }
    }

    fn height(&self, fallback: u64) -> u64 {
        match self {
            Escrowed::Escrow(s) => s.height(),
            Escrowed::Eth(s) => s.height(),
            Escrowed::Ped(_) => fallback,
        }
    }

    fn ledger(&self) -> Option<&EscrowLedger> {
        match self {
            Escrowed::Escrow(s) => Some(s.ledger()),
            Escrowed::Eth(s) => Some(s.ledger()),
            Escrowed::Ped(_) => None,
        }
    }

    fn rulings(&self) -> Vec<Ruling> {
        match self {
            Escrowed::Escrow(s) => s.rulings().to_vec(),
            Escrowed::Eth(s) => s.rulings().to_vec(),
            Escrowed::Ped(_) => Vec::new(),
        }
    }

    /// Files a framing complaint; `None` when the protocol has no escrow.
    fn frame(&mut self, prover: u32, evidence: FramingEvidence) -> Result<Option<Ruling>, String> {
        match self {
            Escrowed::Escrow(s) => {
                let c = Complaint {
                    kind: ComplaintKind::Fm,
                    prover: EntityId::Participant(prover),
                    accused: None,
                    evidence: Evidence::Framing(evidence),
                };
                s.submit(Transaction::sign(EntityId::Participant(prover), TxBody::Complaint(c)))
                    .map_err(|e| e.to_string())
            }
            Escrowed::Eth(s) => match evidence {
                FramingEvidence::SecretKey(x) => s.file_framing(prover, &x).map(Some),
                FramingEvidence::EarlyBeacon(_) => Err("eth_dkg arbitrates framing by secret key only".into()),
            },
            Escrowed::Ped(_) => Ok(None),
        }
    }

    fn noncooperation(&mut self, round: u64) -> Result<Option<Ruling>, String> {
        match self {
            Escrowed::Escrow(s) => s.rule_noncooperation(round).map(Some).map_err(|e| e.to_string()),
            Escrowed::Eth(s) => s.rule_noncooperation(round).map(Some),
            Escrowed::Ped(_) => Ok(None),
        }
    }

    fn register_beacon(&mut self, rs0: Vec<u8>, schedule: Vec<u64>) {
        if let Escrowed::Escrow(s) = self {
            s.register_beacon(rs0, schedule);
        }
    }

    fn record_beacon(&mut self, round: u64, value: Vec<u8>) {
        if let Escrowed::Escrow(s) = self {
            s.record_beacon(round, value);
        }
    }
}

struct Framing {
    framer: u32,
    members: Vec<u32>,
    trigger: u64,
}

/// Runs a scenario end to end. Invalid configurations are rejected before any state exists.
pub fn run_scenario(sc: &Scenario) -> Result<ScenarioRun, String> {
    sc.validate()?;
    let suite = sc.suite()?;
    let config = sc.config();
    let behaviors = sc.resolved_behaviors();

    let (mut esc, output, qual, dkg_ok) = match sc.protocol {
        Protocol::EscrowDkg => {
            let run = run_escrow_dkg(&suite, &config, sc.seed, &behaviors)?;
            let ok = run.state.phase() == Phase::Concluded;
            (Escrowed::Escrow(Box::new(run.state)), run.output, (1..=sc.n).collect(), ok)
        }
        Protocol::EthDkg => {
            let run = run_eth_dkg(&suite, &config, sc.seed, &behaviors, &sc.channel_drops)?;
            let ok = run.state.phase() == Phase::Concluded;
            (Escrowed::Eth(Box::new(run.state)), run.output, (1..=sc.n).collect(), ok)
        }
        Protocol::PedDkg => {
            let out = run_ped_dkg(&suite, &config, sc.seed, &behaviors)?;
            let qual: Vec<u32> = out.qual.iter().copied().collect();
            let output = out.to_output(sc.n, sc.t);
            (Escrowed::Ped(out.transcript), Some(output), qual, true)
        }
    };

    let mut outcome = if dkg_ok { Outcome::Success } else { Outcome::DkgFailed };
    let mut beacon = None;
    let mut beacon_rounds = 0;
    if let (true, Some(out)) = (dkg_ok, output.as_ref()) {
        let (o, b) = application_stage(sc, &suite, &behaviors, out, &mut esc)?;
        outcome = o;
        beacon_rounds = b.as_ref().map_or(0, |s| s.round());
        beacon = b;
    }

    // settlement: remaining deposits go back
    let mut ledger = esc.ledger().cloned();
    if let Some(l) = ledger.as_mut() {
        let h = esc.height(0);
        let deltas = l.refund_all();
        if !deltas.is_empty() {
            esc.transcript().push_ledger(h, "settlement", deltas, json!({ "outcome": outcome }));
        }
    }
    let rulings = esc.rulings();
    let mut slashed: BTreeSet<EntityId> = BTreeSet::new();
    for r in &rulings {
        slashed.extend(r.net_slashed());
    }
    let (burned, rewards, net, conservation) = match &ledger {
        Some(l) => {
            let net = (1..=sc.n)
                .map(|i| {
                    let e = EntityId::Participant(i);
                    let back = l.refunded.get(&e).copied().unwrap_or(0) + l.holdings(e);
                    (e, back as i64 - sc.deposit as i64)
                })
                .collect();
            (l.burned_total, l.paid_out.clone(), net, l.check_conservation())
        }
        None => (0, BTreeMap::new(), BTreeMap::new(), true),
    };
    let econ = sc.econ.as_ref().map(|p| full_report(p, None, None)).transpose().map_err(|e| e.to_string())?;

    let height = esc.height(0);
    let transcript = esc.transcript();
    transcript.push(
        height,
        "harness",
        "summary",
        format!("{outcome:?}").as_bytes(),
        json!({ "outcome": outcome, "burned": burned, "slashed": slashed, "beacon_rounds": beacon_rounds }),
    );
    let transcript = transcript.clone();
    let summary = Summary {
        name: sc.name.clone(),
        protocol: sc.protocol,
        n: sc.n,
        t: sc.t,
        seed: sc.seed,
        outcome,
        rulings: rulings.iter().map(|r| (r.request.kind, r.request.justified)).collect(),
        slashed: slashed.into_iter().collect(),
        burned,
        rewards,
        net,
        beacon_rounds,
        qual,
        conservation,
        events: transcript.len(),
        transcript_digest: to_hex(&sha256(transcript.to_jsonl().as_bytes())),
    };
    Ok(ScenarioRun { transcript, summary, output, beacon, ledger, econ })
}

fn application_stage(
    sc: &Scenario,
    suite: &GroupSuite,
    behaviors: &[Behavior],
    out: &DkgOutput,
    esc: &mut Escrowed,
) -> Result<(Outcome, Option<BeaconState>), String> {
    let start = esc.height(0);
    let mut framings: Vec<Framing> = Vec::new();
    for (id, members) in sc.groups() {
        for &m in &members {
            if let Behavior::Framer { group, trigger_height } = behaviors[(m - 1) as usize] {
                if group == id {
                    framings.push(Framing { framer: m, members: members.clone(), trigger: trigger_height });
                }
            }
        }
    }
    framings.sort_by_key(|f| (f.trigger, f.framer));

    let mut state = sc.application.as_ref().map(|app| {
        let interval = app.interval.unwrap_or(sc.epoch).max(1);
        BeaconState::with_interval(app.rs0.as_bytes().to_vec(), app.rounds, start, interval)
    });
    if let Some(s) = &state {
        esc.register_beacon(s.values[0].clone(), s.schedule.clone());
    }

    let mut next_framing = framings.into_iter().peekable();
    loop {
        let next_round = state.as_ref().and_then(|s| s.scheduled(s.round() + 1));
        let trigger = next_framing.peek().map(|f| f.trigger.max(start));
        let frame_first = match (trigger, next_round) {
            (Some(tr), Some(r)) => tr < r,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        if frame_first {
            let f = next_framing.next().expect("peeked");
            esc.advance_to(f.trigger.max(start))?;
            if let Some(evidence) = collude(sc, suite, out, &f, state.as_ref(), esc)? {
                if let Some(r) = esc.frame(f.framer, evidence)? {
                    if r.request.justified {
                        return Ok((Outcome::Framed, state));
                    }
                }
            }
            continue;
        }
        let s = state.as_mut().expect("a round is scheduled");
        let round = s.round() + 1;
        let height = s.scheduled(round).expect("scheduled");
        esc.advance_to(height)?;
        let m = s.current().to_vec();
        let shares: Vec<_> = (1..=sc.n)
            .filter(|i| behaviors[(*i - 1) as usize] != Behavior::SilentNoncooperator)
            .map(|i| sign_share(suite, &m, i, &out.shares[&i]))
            .collect();
        match s.beacon_next(suite, height, &shares, &out.public_shares, sc.t) {
            Ok(agg) => {
                let rs = s.current().to_vec();
                let leader = elect_leader(&rs, sc.n);
                esc.record_beacon(round, rs.clone());
                esc.transcript().push(
                    height,
                    "beacon",
                    "beacon_round",
                    &rs,
                    json!({ "round": round, "rs": hex::encode(&rs), "leader": leader, "signers": agg.signers }),
                );
            }
            Err(crate::beacon::BeaconError::InsufficientShares { needed, valid }) => {
                esc.transcript().push(
                    height,
                    "beacon",
                    "beacon_stalled",
                    &m,
                    json!({ "round": round, "needed": needed, "valid": valid }),
                );
                esc.noncooperation(round)?;
                return Ok((Outcome::NonCooperation, state));
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok((Outcome::Success, state))
}

/// The group pools its shares; returns framing evidence when it reaches `t+1`.
fn collude(
    sc: &Scenario,
    suite: &GroupSuite,
    out: &DkgOutput,
    f: &Framing,
    beacon: Option<&BeaconState>,
    esc: &mut Escrowed,
) -> Result<Option<FramingEvidence>, String> {
    let height = esc.height(f.trigger);
    let field = suite.field();
    if f.members.len() < sc.t as usize + 1 {
        esc.transcript().push(
            height,
            format!("P{}", f.framer),
            "collusion_insufficient",
            &[],
            json!({ "members": f.members, "needed": sc.t + 1 }),
        );
        return Ok(None);
    }
    let pooled: Vec<u32> = f.members.iter().copied().take(sc.t as usize + 1).collect();
    let evidence = match (sc.framing_evidence, beacon) {
        (EvidenceChoice::EarlyBeacon, Some(b)) if b.scheduled(b.round() + 1).is_some_and(|s| height < s) => {
            let m = b.current().to_vec();
            let shares: Vec<_> = pooled.iter().map(|i| sign_share(suite, &m, *i, &out.shares[i])).collect();
            let agg = aggregate(suite, &m, &shares, &out.public_shares, sc.t).map_err(|e| e.to_string())?;
            FramingEvidence::EarlyBeacon(EarlyBeacon { round: b.round() + 1, message: m, signature: agg.sigma })
        }
        _ => {
            let points: Vec<(Scalar, Scalar)> =
                pooled.iter().map(|i| (field.from_u64(*i as u64), out.shares[i])).collect();
            let x = lagrange_interpolate(&field, &points, &field.zero()).map_err(|e| e.to_string())?;
            FramingEvidence::SecretKey(x)
        }
    };
    esc.transcript().push(
        height,
        format!("P{}", f.framer),
        "collusion",
        &serde_json::to_vec(&evidence).expect("evidence"),
        json!({ "members": pooled }),
    );
    Ok(Some(evidence))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub completed: bool,
    /// Mock backend only: the discrete log of the public key.
    pub secret: Option<u64>,
    pub public_key: Option<String>,
    pub qual: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub seed: u64,
    pub escrow: ProtocolResult,
    pub eth: ProtocolResult,
    pub ped: ProtocolResult,
    pub secrets_equal: bool,
    pub public_keys_equal: bool,
    pub shares_equal: bool,
    pub all_equal: bool,
}

/// Runs the three DKGs on the same seed and behaviours and compares outputs.
pub fn differential_run(
    suite: &GroupSuite,
    config: &DkgConfig,
    seed: u64,
    behaviors: &[Behavior],
) -> Result<Differential, String> {
    let escrow = run_escrow_dkg(suite, config, seed, behaviors)?.output;
    let eth = run_eth_dkg(suite, config, seed, behaviors, &[])?.output;
    let ped = run_ped_dkg(suite, config, seed, behaviors)?;
    let ped_out = ped.to_output(config.n, config.t);
    let result = |o: Option<&DkgOutput>| ProtocolResult {
        completed: o.is_some(),
        secret: o.and_then(|o| o.public_key.mock_value()),
        public_key: o.map(|o| hex::encode(o.public_key.to_bytes())),
        qual: o.map(|o| o.qualified.clone()).unwrap_or_default(),
    };
    let outs = [escrow.as_ref(), eth.as_ref(), Some(&ped_out)];
    let all_same = |f: &dyn Fn(&DkgOutput) -> String| {
        let vals: Vec<Option<String>> = outs.iter().map(|o| o.map(f)).collect();
        vals.iter().all(|v| v.is_some() && *v == vals[0])
    };
    let secrets_equal = suite.backend() == Backend::Mock && all_same(&|o| format!("{:?}", o.public_key.mock_value()));
    let public_keys_equal = all_same(&|o| hex::encode(o.public_key.to_bytes()));
    let shares_equal = all_same(&|o| format!("{:?}", o.shares));
    Ok(Differential {
        seed,
        escrow: result(escrow.as_ref()),
        eth: result(eth.as_ref()),
        ped: result(Some(&ped_out)),
        all_equal: public_keys_equal && shares_equal && (secrets_equal || suite.backend() != Backend::Mock),
        secrets_equal,
        public_keys_equal,
        shares_equal,
    })
}

pub const CSV_HEADER: &str =
    "name,protocol,n,t,seed,outcome,rulings,slashed,burned,rewarded,beacon_rounds,conservation,events,transcript_digest";

fn protocol_name(p: Protocol) -> String {
    serde_json::to_value(p).expect("protocol").as_str().expect("unit").to_string()
}

impl Summary {
    pub fn csv_row(&self) -> String {
        let rulings: Vec<String> = self
            .rulings
            .iter()
            .map(|(k, j)| format!("{k}:{}", if *j { "just" } else { "unjust" }))
            .collect();
        let slashed: Vec<String> = self.slashed.iter().map(|e| e.to_string()).collect();
        let outcome = serde_json::to_value(self.outcome).expect("outcome");
        [
            self.name.replace(',', ";"),
            protocol_name(self.protocol),
            self.n.to_string(),
            self.t.to_string(),
            self.seed.to_string(),
            outcome.as_str().expect("unit").to_string(),
            rulings.join(";"),
            slashed.join(";"),
            self.burned.to_string(),
            self.rewards.values().sum::<Amount>().to_string(),
            self.beacon_rounds.to_string(),
            self.conservation.to_string(),
            self.events.to_string(),
            self.transcript_digest.clone(),
        ]
        .join(",")
    }
}

/// Runs scenarios in parallel; results keep the input order.
pub fn sweep(scenarios: &[Scenario]) -> Vec<Result<Summary, String>> {
    scenarios.par_iter().map(|s| run_scenario(s).map(|r| r.summary)).collect()
}

/// The same scenario over consecutive seeds.
pub fn seed_sweep(base: &Scenario, seeds: std::ops::Range<u64>) -> Vec<Scenario> {
    seeds.map(|seed| Scenario { seed, ..base.clone() }).collect()
}

pub fn to_csv(rows: &[Summary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::WithheldTx;

    #[test]
    fn honest_escrow_with_beacon() {
        let sc = Scenario { application: Some(ApplicationConfig::rounds(5)), ..Scenario::honest(5, 2, 42) };
        let run = run_scenario(&sc).unwrap();
        assert_eq!(run.summary.outcome, Outcome::Success);
        assert_eq!(run.summary.burned, 0);
        assert_eq!(run.summary.beacon_rounds, 5);
        assert!(run.summary.net.values().all(|v| *v == 0));
        assert!(run.summary.conservation);
        assert_eq!(run.transcript.find("beacon_round").count(), 5);
    }

    #[test]
    fn replay_is_byte_identical() {
        let sc = Scenario { application: Some(ApplicationConfig::rounds(3)), ..Scenario::honest(5, 2, 9) };
        let a = run_scenario(&sc).unwrap().transcript.to_jsonl();
        let b = run_scenario(&sc).unwrap().transcript.to_jsonl();
        assert_eq!(a, b);
    }

    fn framing_scenario(reward: FramingReward, evidence: EvidenceChoice) -> Scenario {
        let mut sc = Scenario {
            application: Some(ApplicationConfig::rounds(4)),
            framing_reward: reward,
            framing_evidence: evidence,
            ..Scenario::honest(5, 2, 3)
        };
        sc = sc.with_behavior(1, Behavior::Colluder { group: 1 });
        sc = sc.with_behavior(2, Behavior::Colluder { group: 1 });
        sc.with_behavior(3, Behavior::Framer { group: 1, trigger_height: 55 })
    }

    #[test]
    fn colluders_frame_with_secret_key() {
        for (reward, expected) in [(FramingReward::Full, 2 * 10_000 * UNIT), (FramingReward::Half, 10_000 * UNIT)] {
            let run = run_scenario(&framing_scenario(reward, EvidenceChoice::SecretKey)).unwrap();
            assert_eq!(run.summary.outcome, Outcome::Framed);
            assert_eq!(run.summary.rulings, vec![(ComplaintKind::Fm, true)]);
            let d = (10_000 * UNIT) as i64;
            assert_eq!(run.summary.net[&EntityId::Participant(3)], expected as i64);
            for i in [1, 2, 4, 5] {
                assert_eq!(run.summary.net[&EntityId::Participant(i)], -d);
            }
            assert!(run.summary.conservation);
        }
    }

    #[test]
    fn colluders_frame_with_early_beacon() {
        let run = run_scenario(&framing_scenario(FramingReward::Full, EvidenceChoice::EarlyBeacon)).unwrap();
        assert_eq!(run.summary.outcome, Outcome::Framed);
        let ev = run.transcript.find("collusion").next().unwrap();
        assert!(ev.payload_digest.len() == 64);
    }

    #[test]
    fn silent_noncooperators_burn_everything() {
        let mut sc = Scenario { application: Some(ApplicationConfig::rounds(3)), ..Scenario::honest(5, 2, 4) };
        for i in [2, 4, 5] {
            sc = sc.with_behavior(i, Behavior::SilentNoncooperator);
        }
        let run = run_scenario(&sc).unwrap();
        assert_eq!(run.summary.outcome, Outcome::NonCooperation);
        assert_eq!(run.summary.burned, 5 * 10_000 * UNIT);
        let mut two = Scenario { application: Some(ApplicationConfig::rounds(3)), ..Scenario::honest(5, 2, 4) };
        for i in [2, 4] {
            two = two.with_behavior(i, Behavior::SilentNoncooperator);
        }
        assert_eq!(run_scenario(&two).unwrap().summary.outcome, Outcome::Success);
    }

    #[test]
    fn honest_participants_are_compensated_after_failures() {
        let faults = [
            Behavior::Withhold { tx: WithheldTx::Commitments, target: None },
            Behavior::InconsistentSubshare { recipient: 4 },
            Behavior::BadHashCommit,
        ];
        for protocol in [Protocol::EscrowDkg, Protocol::EthDkg] {
            for f in faults {
                let sc = Scenario { protocol, ..Scenario::honest(5, 2, 6) }.with_behavior(2, f);
                let run = run_scenario(&sc).unwrap();
                assert_eq!(run.summary.outcome, Outcome::DkgFailed);
                for (e, v) in &run.summary.net {
                    if *e != EntityId::Participant(2) {
                        assert!(*v >= 0, "{protocol:?} {f:?} {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn differential_agreement_and_divergence() {
        let su = GroupSuite::mock(101).unwrap();
        let cfg = DkgConfig::new(5, 2);
        let d = differential_run(&su, &cfg, 42, &[Behavior::Honest; 5]).unwrap();
        assert!(d.all_equal && d.secrets_equal);
        let mut b = vec![Behavior::Honest; 5];
        b[1] = Behavior::Withhold { tx: WithheldTx::SubShares, target: None };
        let d = differential_run(&su, &cfg, 42, &b).unwrap();
        assert!(!d.escrow.completed && d.ped.completed);
        assert_eq!(d.ped.qual, vec![1, 3, 4, 5]);
        assert!(!d.all_equal);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let bad = Scenario::honest(5, 2, 1).with_behavior(1, Behavior::Colluder { group: 7 });
        assert!(run_scenario(&bad).unwrap_err().contains("group 7"));
        let bad = Scenario { behaviors: vec![Behavior::Honest; 3], ..Scenario::honest(5, 2, 1) };
        assert!(run_scenario(&bad).is_err());
        let bad = Scenario { q: 100, ..Scenario::honest(5, 2, 1) };
        assert!(run_scenario(&bad).is_err());
        let bad = Scenario::honest(5, 2, 1).with_behavior(2, Behavior::InconsistentSubshare { recipient: 2 });
        assert!(run_scenario(&bad).is_err());
    }

    #[test]
    fn sweep_preserves_order_and_csv() {
        let base = Scenario { application: Some(ApplicationConfig::rounds(2)), ..Scenario::honest(4, 1, 0) };
        let rows: Vec<Summary> = sweep(&seed_sweep(&base, 0..8)).into_iter().map(Result::unwrap).collect();
        assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), (0..8).collect::<Vec<_>>());
        let serial: Vec<Summary> = seed_sweep(&base, 0..8).iter().map(|s| run_scenario(s).unwrap().summary).collect();
        assert_eq!(rows, serial);
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.lines().nth(1).unwrap().starts_with(",escrow_dkg,4,1,0,success,"));
    }

    #[test]
    fn scenario_json_defaults() {
        let sc: Scenario = serde_json::from_str(
            r#"{"n":5,"t":2,"seed":1,"behaviors":[{"kind":"honest"},{"kind":"inconsistent_subshare","recipient":4},{"kind":"honest"},{"kind":"honest"},{"kind":"honest"}]}"#,
        )
        .unwrap();
        assert_eq!(sc.q, 101);
        let run = run_scenario(&sc).unwrap();
        assert_eq!(run.summary.rulings, vec![(ComplaintKind::Cm4, true)]);
    }
}
