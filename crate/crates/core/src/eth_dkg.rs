//! Eth-DKG: enrollment is the only on-chain transaction in an honest run.
//! Commitments go out off-chain over both G1 and G2, pinned by a digest in the
//! enrollment; sub-shares are checked against the G1 half only. Undelivered
//! data is requested through on-chain alerts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::behavior::{Behavior, WithheldTx};
use crate::dispute::{
    run_dispute, ChallengerStrategy, DisputeConfig, DisputeOutcome, ProverStrategy, SignedCommitments, SignedSubShare,
};
use crate::dkg::{DkgConfig, DkgOutput, ParticipantSecrets};
use crate::escrow_dkg::{sender_tag, Phase};
use crate::group::{GroupElement, GroupSuite, GroupTag, Scalar};
use crate::hashing::{derive_rng, sha256, Digest};
use crate::ledger::{ComplaintKind, EntityId, EscrowLedger, Ruling, RulingRequest};
use crate::sharing::{elgamal_decrypt, elgamal_encrypt, index_scalar, verify_subshare, CommitmentVector, ElGamalCiphertext};
use crate::transcript::Transcript;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCommitmentVector {
    pub c1: CommitmentVector,
    pub c2: CommitmentVector,
}

impl DualCommitmentVector {
    pub fn commit(suite: &GroupSuite, f: &crate::sharing::Polynomial) -> Self {
        DualCommitmentVector {
            c1: CommitmentVector::commit(suite, f, GroupTag::G1),
            c2: CommitmentVector::commit(suite, f, GroupTag::G2),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.c1.to_bytes();
        out.extend(self.c2.to_bytes());
        out
    }

    pub fn digest(&self) -> Digest {
        sha256(&self.to_bytes())
    }

    /// First index whose pair is not `(G1, G2)`-consistent.
    pub fn first_inconsistent(&self, suite: &GroupSuite) -> Option<usize> {
        if self.c1.elements.len() != self.c2.elements.len() {
            return Some(self.c1.elements.len().min(self.c2.elements.len()));
        }
        (0..self.c1.elements.len()).find(|k| !check_g1g2_consistency(suite, &self.c1.elements[*k], &self.c2.elements[*k]))
    }
}

/// `e(g1, x2) = e(x1, g2)`; exactly two pairings.
pub fn check_g1g2_consistency(suite: &GroupSuite, x1: &GroupElement, x2: &GroupElement) -> bool {
    if x1.tag() != GroupTag::G1 || x2.tag() != GroupTag::G2 || !suite.is_member(x1) || !suite.is_member(x2) {
        return false;
    }
    let lhs = suite.pairing(&suite.generator(GroupTag::G1), x2);
    let rhs = suite.pairing(x1, &suite.generator(GroupTag::G2));
    matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelDrop {
    pub from: u32,
    pub to: u32,
    pub tx: WithheldTx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alert {
    pub requester: u32,
    pub dealer: u32,
    pub tx: WithheldTx,
    pub raised_at: u64,
    pub deadline: u64,
    pub answered: bool,
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "evidence", rename_all = "snake_case")]
pub enum EthEvidence {
    /// The copy `j` received, with the dealer's tag.
    Copy { copy: DualCommitmentVector, tag: Digest },
    Pair { k0: usize, x1: GroupElement, x2: GroupElement, tag: Digest },
    SubShare { share: SignedSubShare, prover: ProverStrategy },
    Missing { tx: WithheldTx },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EthComplaint {
    pub kind: ComplaintKind,
    pub prover: u32,
    pub accused: u32,
    pub evidence: EthEvidence,
}

fn pair_tag(dealer: u32, k: usize, x1: &GroupElement, x2: &GroupElement) -> Digest {
    let mut bytes = (k as u64).to_be_bytes().to_vec();
    bytes.extend(x1.to_bytes());
    bytes.extend(x2.to_bytes());
    sender_tag(EntityId::Participant(dealer), &bytes)
}

#[derive(Debug, Clone)]
struct Dealer {
    enc_pub: GroupElement,
    digest: Digest,
    published: DualCommitmentVector,
    /// Which copy each recipient holds (off-chain or from an on-chain response).
    copies: BTreeMap<u32, (DualCommitmentVector, Digest)>,
    shares: BTreeMap<u32, SignedSubShare>,
}

/// Contract plus modeled off-chain channel.
#[derive(Debug, Clone)]
pub struct EthDkg {
    suite: GroupSuite,
    config: DkgConfig,
    phase: Phase,
    height: u64,
    dealers: BTreeMap<u32, Dealer>,
    alerts: Vec<Alert>,
    ledger: EscrowLedger,
    transcript: Transcript,
    rulings: Vec<Ruling>,
    disputes: Vec<DisputeOutcome>,
    onchain_writes: u64,
    offchain_messages: u64,
    public_key: Option<GroupElement>,
}

impl EthDkg {
    pub fn new(suite: GroupSuite, config: DkgConfig) -> Result<Self, String> {
        config.validate()?;
        Ok(EthDkg {
            suite,
            config,
            phase: Phase::Enrollment,
            height: 0,
            dealers: BTreeMap::new(),
            alerts: Vec::new(),
            ledger: EscrowLedger::new(),
            transcript: Transcript::new(),
            rulings: Vec::new(),
            disputes: Vec::new(),
            onchain_writes: 0,
            offchain_messages: 0,
            public_key: None,
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn ledger(&self) -> &EscrowLedger {
        &self.ledger
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn rulings(&self) -> &[Ruling] {
        &self.rulings
    }

    pub fn disputes(&self) -> &[DisputeOutcome] {
        &self.disputes
    }

    pub fn alerts(&self) -> &[Alert] {
        &self.alerts
    }

    pub fn transcript_mut(&mut self) -> &mut Transcript {
        &mut self.transcript
    }

    pub fn public_key(&self) -> Option<&GroupElement> {
        self.public_key.as_ref()
    }

    pub fn advance_to(&mut self, height: u64) {
        self.height = self.height.max(height);
    }

    /// Framing with the reconstructed secret: justified iff `g2^secret` is the public key.
    pub fn file_framing(&mut self, prover: u32, secret: &Scalar) -> Result<Ruling, String> {
        let pk = self.public_key.ok_or_else(|| format!("framing needs a concluded DKG ({:?})", self.phase))?;
        let justified = self.suite.exp(&self.suite.generator(GroupTag::G2), secret).ok() == Some(pk);
        self.onchain(prover, "complaint", &secret.to_be_bytes(), json!({ "kind": ComplaintKind::Fm }));
        let req = RulingRequest { kind: ComplaintKind::Fm, justified, prover: EntityId::Participant(prover), accused: None };
        self.settle(req, json!({}))
    }

    /// Burns every deposit when too few signature shares arrive.
    pub fn rule_noncooperation(&mut self, round: u64) -> Result<Ruling, String> {
        let req = RulingRequest {
            kind: ComplaintKind::NonCooperation,
            justified: true,
            prover: EntityId::External(0),
            accused: None,
        };
        let ruling = self.settle(req, json!({ "round": round }))?;
        self.set_phase(Phase::Failed);
        Ok(ruling)
    }

    fn settle(&mut self, req: RulingRequest, extra: serde_json::Value) -> Result<Ruling, String> {
        let ruling = self.ledger.derive_and_apply(&self.config.terms(), req).map_err(|e| e.to_string())?;
        let mut detail = json!({
            "kind": req.kind,
            "justified": req.justified,
            "prover": req.prover,
            "accused": req.accused,
            "burn": ruling.burn,
        });
        if let (Some(d), Some(e)) = (detail.as_object_mut(), extra.as_object()) {
            d.extend(e.clone());
        }
        self.transcript.push_ledger(self.height, "ruling", ruling.net_deltas(), detail);
        self.rulings.push(ruling.clone());
        Ok(ruling)
    }

    pub fn ledger_mut(&mut self) -> &mut EscrowLedger {
        &mut self.ledger
    }

    pub fn onchain_writes(&self) -> u64 {
        self.onchain_writes
    }

    pub fn offchain_messages(&self) -> u64 {
        self.offchain_messages
    }

    fn onchain(&mut self, actor: u32, event: &str, payload: &[u8], detail: serde_json::Value) {
        self.onchain_writes += 1;
        self.transcript.push(self.height, format!("P{actor}"), event, payload, detail);
    }

    fn offchain(&mut self, actor: u32, event: &str, payload: &[u8], detail: serde_json::Value) {
        self.offchain_messages += 1;
        self.transcript.push(self.height, format!("P{actor}"), event, payload, detail);
    }

    fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
        self.transcript.push(self.height, "escrow", "phase", format!("{phase:?}").as_bytes(), json!({ "phase": phase }));
    }

    pub fn enroll(&mut self, i: u32, enc_pub: GroupElement, digest: Digest, dual: DualCommitmentVector) -> Result<(), String> {
        if self.phase != Phase::Enrollment {
            return Err(format!("enrollment closed ({:?})", self.phase));
        }
        self.ledger.deposit(i, self.config.deposit).map_err(|e| e.to_string())?;
        self.dealers.insert(
            i,
            Dealer { enc_pub, digest, published: dual, copies: BTreeMap::new(), shares: BTreeMap::new() },
        );
        self.onchain(i, "tx1'", &digest, json!({ "deposit": self.config.deposit, "digest": hex::encode(digest) }));
        Ok(())
    }

    fn deliver_copy(&mut self, i: u32, j: u32, copy: DualCommitmentVector, onchain: bool) {
        let tag = sender_tag(EntityId::Participant(i), &copy.to_bytes());
        let bytes = copy.to_bytes();
        self.dealers.get_mut(&i).expect("enrolled").copies.insert(j, (copy, tag));
        if onchain {
            self.onchain(i, "tx2'_onchain", &bytes, json!({ "requester": j }));
        } else {
            self.offchain(i, "offchain_tx2'", &bytes, json!({ "to": j }));
        }
    }

    fn deliver_share(&mut self, i: u32, j: u32, share: SignedSubShare) {
        self.dealers.get_mut(&i).expect("enrolled").shares.insert(j, share);
        self.offchain(i, "offchain_tx3'", &share.value.to_be_bytes(), json!({ "to": j }));
    }

    fn delivered(&self, i: u32, j: u32, tx: WithheldTx) -> bool {
        let d = &self.dealers[&i];
        match tx {
            WithheldTx::Commitments => d.copies.contains_key(&j),
            WithheldTx::SubShares => d.shares.contains_key(&j),
        }
    }

    /// Records a missing-data alert; a no-op (logged) when the data was delivered.
    pub fn raise_alert(&mut self, requester: u32, dealer: u32, tx: WithheldTx) -> bool {
        let payload = [requester.to_be_bytes(), dealer.to_be_bytes()].concat();
        if self.delivered(dealer, requester, tx) {
            self.onchain(requester, "alert_noop", &payload, json!({ "dealer": dealer, "tx": tx }));
            return false;
        }
        self.alerts.push(Alert {
            requester,
            dealer,
            tx,
            raised_at: self.height,
            deadline: self.height + self.config.epoch,
            answered: false,
        });
        self.onchain(requester, "alert", &payload, json!({ "dealer": dealer, "tx": tx }));
        true
    }

    /// Dealer posts the missing data; private data goes out encrypted to the requester.
    fn answer_alert(&mut self, idx: usize, x: Scalar, seed: u64) -> Result<Option<ElGamalCiphertext>, String> {
        let a = self.alerts[idx];
        self.alerts[idx].answered = true;
        match a.tx {
            WithheldTx::Commitments => {
                let dual = self.dealers[&a.dealer].published.clone();
                self.deliver_copy(a.dealer, a.requester, dual, true);
                Ok(None)
            }
            WithheldTx::SubShares => {
                let pk = self.dealers[&a.requester].enc_pub;
                let mut rng = derive_rng(seed, "tx3''", ((a.dealer as u64) << 32) | a.requester as u64);
                let ct = elgamal_encrypt(&self.suite, &x, &pk, &mut rng).map_err(|e| e.to_string())?;
                self.onchain(a.dealer, "tx3''", &ct.to_bytes(), json!({ "requester": a.requester }));
                Ok(Some(ct))
            }
        }
    }

    pub fn pending_alerts(&self) -> impl Iterator<Item = &Alert> {
        self.alerts.iter().filter(|a| !a.answered)
    }

    /// Deterministic verdict; cm3' runs the bisection game with the dealer as challenger.
    pub fn arbitrate(&mut self, c: &EthComplaint) -> bool {
        let su = self.suite;
        let Some(dealer) = self.dealers.get(&c.accused) else { return false };
        match (&c.kind, &c.evidence) {
            (ComplaintKind::EthCm1, EthEvidence::Copy { copy, tag }) => {
                *tag == sender_tag(EntityId::Participant(c.accused), &copy.to_bytes()) && copy.digest() != dealer.digest
            }
            (ComplaintKind::EthCm2, EthEvidence::Pair { k0, x1, x2, tag }) => {
                *tag == pair_tag(c.accused, *k0, x1, x2) && !check_g1g2_consistency(&su, x1, x2)
            }
            (ComplaintKind::EthCm3, EthEvidence::SubShare { share, prover }) => {
                let Some((copy, _)) = dealer.copies.get(&c.prover) else { return false };
                if !share.tag_valid() || share.dealer != c.accused || share.recipient != c.prover {
                    return false;
                }
                let signed = SignedCommitments::sign(c.accused, copy.c1.clone());
                let outcome =
                    run_dispute(&su, &signed, share, prover, &ChallengerStrategy::Honest, DisputeConfig::default());
                let just = outcome.verdict.justified;
                for turn in &outcome.turns {
                    self.onchain_writes += 1;
                    self.transcript.push(
                        self.height,
                        match turn.party {
                            crate::dispute::Party::Prover => format!("P{}", c.prover),
                            crate::dispute::Party::Challenger => format!("P{}", c.accused),
                        },
                        "dispute_turn",
                        serde_json::to_string(turn).expect("turn").as_bytes(),
                        serde_json::to_value(turn).expect("turn"),
                    );
                }
                self.disputes.push(outcome);
                just
            }
            (ComplaintKind::EthCm4, EthEvidence::Missing { tx }) => self
                .alerts
                .iter()
                .any(|a| a.dealer == c.accused && a.tx == *tx && !a.answered && self.height >= a.deadline),
            _ => false,
        }
    }

    pub fn file(&mut self, c: EthComplaint) -> Result<Ruling, String> {
        let payload = serde_json::to_vec(&c).expect("complaint");
        self.onchain(c.prover, "complaint", &payload, json!({ "kind": c.kind, "accused": c.accused }));
        let justified = self.arbitrate(&c);
        let req = RulingRequest {
            kind: c.kind,
            justified,
            prover: EntityId::Participant(c.prover),
            accused: Some(c.accused),
        };
        let ruling = self.settle(req, json!({}))?;
        self.set_phase(Phase::Failed);
        Ok(ruling)
    }
}

#[derive(Debug, Clone)]
pub struct EthDkgRun {
    pub state: EthDkg,
    pub secrets: Vec<ParticipantSecrets>,
    pub output: Option<DkgOutput>,
}

fn file_first(state: &mut EthDkg, mut candidates: Vec<EthComplaint>) -> Result<bool, String> {
    candidates.sort_by_key(|c| (c.prover, c.kind, c.accused));
    match candidates.into_iter().next() {
        Some(c) => {
            state.file(c)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

fn unanswered_alert_complaints(state: &EthDkg, behaviors: &[Behavior]) -> Vec<EthComplaint> {
    let mut out = Vec::new();
    for a in state.pending_alerts().filter(|a| state.height >= a.deadline) {
        for m in 1..=state.config.n {
            if m != a.dealer && behaviors[(m - 1) as usize].complains() {
                out.push(EthComplaint {
                    kind: ComplaintKind::EthCm4,
                    prover: m,
                    accused: a.dealer,
                    evidence: EthEvidence::Missing { tx: a.tx },
                });
            }
        }
    }
    out
}

/// Runs Eth-DKG with scripted behaviours and channel drops.
pub fn run_eth_dkg(
    suite: &GroupSuite,
    config: &DkgConfig,
    seed: u64,
    behaviors: &[Behavior],
    drops: &[ChannelDrop],
) -> Result<EthDkgRun, String> {
    if behaviors.len() != config.n as usize {
        return Err(format!("expected {} behaviors, got {}", config.n, behaviors.len()));
    }
    let n = config.n;
    let delta = config.epoch;
    let mut state = EthDkg::new(*suite, *config)?;
    let secrets = ParticipantSecrets::derive_all(suite, seed, n, config.t);
    let field = suite.field();
    let behavior = |i: u32| behaviors[(i - 1) as usize];
    let dropped = |from: u32, to: u32, tx: WithheldTx| drops.contains(&ChannelDrop { from, to, tx });
    let failed = |state: &EthDkg, secrets: Vec<ParticipantSecrets>| EthDkgRun { state: state.clone(), secrets, output: None };

    // enrollment
    state.height = 1;
    let mut duals = BTreeMap::new();
    for s in &secrets {
        let i = s.index;
        let mut dual = DualCommitmentVector::commit(suite, &s.polynomial);
        match behavior(i) {
            Behavior::InconsistentDualPair { k0 } if k0 < dual.c2.elements.len() => {
                let g2 = suite.generator(GroupTag::G2);
                dual.c2.elements[k0] = suite.mul(&dual.c2.elements[k0], &g2).expect("member");
            }
            Behavior::NonmemberCommitment { k } if k < dual.c1.elements.len() => {
                dual.c1.elements[k] = suite.non_member(GroupTag::G1);
            }
            _ => {}
        }
        let mut digest = dual.digest();
        if behavior(i) == Behavior::BadHashCommit {
            digest[0] ^= 1;
        }
        state.enroll(i, s.enc.public, digest, dual.clone())?;
        duals.insert(i, dual);
    }

    // off-chain commitments
    state.height = 1 + delta;
    state.set_phase(Phase::Commitments);
    for s in &secrets {
        let i = s.index;
        if behavior(i).withholds_commitments() {
            continue;
        }
        for j in (1..=n).filter(|j| *j != i) {
            if dropped(i, j, WithheldTx::Commitments) {
                continue;
            }
            let mut copy = duals[&i].clone();
            if behavior(i) == (Behavior::DigestMismatch { recipient: j }) {
                let (g1, g2) = (suite.generator(GroupTag::G1), suite.generator(GroupTag::G2));
                copy.c1.elements[0] = suite.mul(&copy.c1.elements[0], &g1).expect("member");
                copy.c2.elements[0] = suite.mul(&copy.c2.elements[0], &g2).expect("member");
            }
            state.deliver_copy(i, j, copy, false);
        }
    }
    if !alert_round(&mut state, &secrets, behaviors, WithheldTx::Commitments, seed)? {
        return Ok(failed(&state, secrets));
    }

    // checkpoint: digest and pair consistency of received copies
    let mut candidates = Vec::new();
    for j in 1..=n {
        if let Behavior::UnjustComplainer { complaint, target } = behavior(j) {
            if let Some(c) = unjust_eth_complaint(&state, j, complaint, target) {
                candidates.push(c);
            }
        }
        if !behavior(j).complains() {
            continue;
        }
        for i in (1..=n).filter(|i| *i != j) {
            let Some((copy, tag)) = state.dealers[&i].copies.get(&j).cloned() else { continue };
            if copy.digest() != state.dealers[&i].digest {
                candidates.push(EthComplaint {
                    kind: ComplaintKind::EthCm1,
                    prover: j,
                    accused: i,
                    evidence: EthEvidence::Copy { copy, tag },
                });
            } else if let Some(k0) = copy.first_inconsistent(suite) {
                let (x1, x2) = (copy.c1.elements[k0], copy.c2.elements[k0]);
                candidates.push(EthComplaint {
                    kind: ComplaintKind::EthCm2,
                    prover: j,
                    accused: i,
                    evidence: EthEvidence::Pair { k0, x1, x2, tag: pair_tag(i, k0, &x1, &x2) },
                });
            }
        }
    }
    if file_first(&mut state, candidates)? {
        return Ok(failed(&state, secrets));
    }

    // private sub-shares
    state.height += delta;
    state.set_phase(Phase::SubShares);
    for s in &secrets {
        let i = s.index;
        for j in (1..=n).filter(|j| *j != i) {
            if behavior(i).withholds_subshare_to(j) || dropped(i, j, WithheldTx::SubShares) {
                continue;
            }
            let mut x = s.polynomial.evaluate_at(j);
            if behavior(i) == (Behavior::InconsistentSubshare { recipient: j }) {
                x = field.add(&x, &field.one());
            }
            state.deliver_share(i, j, SignedSubShare::sign(i, j, x));
        }
    }
    if !alert_round(&mut state, &secrets, behaviors, WithheldTx::SubShares, seed)? {
        return Ok(failed(&state, secrets));
    }

    // local verification against G1
    state.height += 1;
    state.set_phase(Phase::Verification);
    let mut candidates = Vec::new();
    for j in 1..=n {
        if let Behavior::UnjustComplainer { complaint: ComplaintKind::EthCm3, target } = behavior(j) {
            if let Some(share) = state.dealers.get(&target).and_then(|d| d.shares.get(&j)).copied() {
                candidates.push(EthComplaint {
                    kind: ComplaintKind::EthCm3,
                    prover: j,
                    accused: target,
                    evidence: EthEvidence::SubShare { share, prover: ProverStrategy::AlwaysDisagree },
                });
            }
        }
        if !behavior(j).complains() {
            continue;
        }
        for i in (1..=n).filter(|i| *i != j) {
            let d = &state.dealers[&i];
            let (Some((copy, _)), Some(share)) = (d.copies.get(&j), d.shares.get(&j)) else { continue };
            if !verify_subshare(suite, j, &share.value, &copy.c1) {
                candidates.push(EthComplaint {
                    kind: ComplaintKind::EthCm3,
                    prover: j,
                    accused: i,
                    evidence: EthEvidence::SubShare { share: *share, prover: ProverStrategy::Honest },
                });
            }
        }
    }
    if file_first(&mut state, candidates)? {
        return Ok(failed(&state, secrets));
    }

    state.height += delta;
    state.set_phase(Phase::Concluded);
    let mut shares = BTreeMap::new();
    for s in &secrets {
        let j = s.index;
        let mut x = s.polynomial.evaluate_at(j);
        for (i, d) in &state.dealers {
            if *i != j {
                x = field.add(&x, &d.shares[&j].value);
            }
        }
        shares.insert(j, x);
    }
    // computed locally from each participant's G2 copies
    let g2_id = suite.identity(GroupTag::G2);
    let mut public_key = g2_id;
    for d in state.dealers.values() {
        public_key = suite.mul(&public_key, &d.published.c2.elements[0]).map_err(|e| e.to_string())?;
    }
    let mut public_shares = BTreeMap::new();
    for j in 1..=n {
        let z = index_scalar(&field, j);
        let mut acc = g2_id;
        for d in state.dealers.values() {
            let y = d.published.c2.evaluate_in_exponent(suite, &z).map_err(|e| e.to_string())?;
            acc = suite.mul(&acc, &y).map_err(|e| e.to_string())?;
        }
        public_shares.insert(j, acc);
    }
    state.public_key = Some(public_key);
    let output = DkgOutput { n, t: config.t, shares, public_key, public_shares, qualified: (1..=n).collect() };
    Ok(EthDkgRun { state, secrets, output: Some(output) })
}

/// End-of-phase alerts, dealer responses and cm4' filings. Returns false if the run failed.
fn alert_round(
    state: &mut EthDkg,
    secrets: &[ParticipantSecrets],
    behaviors: &[Behavior],
    tx: WithheldTx,
    seed: u64,
) -> Result<bool, String> {
    let n = state.config.n;
    let behavior = |i: u32| behaviors[(i - 1) as usize];
    state.height += state.config.epoch;
    for j in 1..=n {
        for i in (1..=n).filter(|i| *i != j) {
            if !state.delivered(i, j, tx) {
                state.raise_alert(j, i, tx);
            }
        }
    }
    state.height += 1;
    for idx in 0..state.alerts.len() {
        let a = state.alerts[idx];
        if a.answered || a.tx != tx {
            continue;
        }
        let withholds = match tx {
            WithheldTx::Commitments => behavior(a.dealer).withholds_commitments(),
            WithheldTx::SubShares => behavior(a.dealer).withholds_subshare_to(a.requester),
        };
        if !withholds {
            let x = secrets[(a.dealer - 1) as usize].polynomial.evaluate_at(a.requester);
            if let Some(ct) = state.answer_alert(idx, x, seed)? {
                let key = &secrets[(a.requester - 1) as usize].enc.secret;
                let x = elgamal_decrypt(&state.suite, &ct, key).map_err(|e| e.to_string())?;
                state.dealers.get_mut(&a.dealer).expect("enrolled").shares.insert(
                    a.requester,
                    SignedSubShare::sign(a.dealer, a.requester, x),
                );
            }
        }
    }
    if state.pending_alerts().next().is_none() {
        return Ok(true);
    }
    state.height = state.pending_alerts().map(|a| a.deadline).max().expect("pending");
    let candidates = unanswered_alert_complaints(state, behaviors);
    if candidates.is_empty() {
        // nobody is willing to complain; the missing data blocks conclusion
        state.set_phase(Phase::Failed);
        return Ok(false);
    }
    file_first(state, candidates)?;
    Ok(false)
}

fn unjust_eth_complaint(state: &EthDkg, j: u32, kind: ComplaintKind, target: u32) -> Option<EthComplaint> {
    let d = state.dealers.get(&target)?;
    let evidence = match kind {
        ComplaintKind::EthCm1 => {
            let (copy, tag) = d.copies.get(&j)?.clone();
            EthEvidence::Copy { copy, tag }
        }
        ComplaintKind::EthCm2 => {
            let (copy, _) = d.copies.get(&j)?;
            let (x1, x2) = (copy.c1.elements[0], copy.c2.elements[0]);
            EthEvidence::Pair { k0: 0, x1, x2, tag: pair_tag(target, 0, &x1, &x2) }
        }
        ComplaintKind::EthCm4 => EthEvidence::Missing { tx: WithheldTx::Commitments },
        _ => return None,
    };
    Some(EthComplaint { kind, prover: j, accused: target, evidence })
}

/// Sub-shares that pass the G1 check, by `x` value, for G1-sufficiency testing.
pub fn g1_g2_agreement(suite: &GroupSuite, dual: &DualCommitmentVector, j: u32, candidates: &[Scalar]) -> BTreeSet<bool> {
    candidates
        .iter()
        .map(|x| verify_subshare(suite, j, x, &dual.c1) == verify_subshare(suite, j, x, &dual.c2))
        .collect()
}
