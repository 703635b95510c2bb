//! Escrow-DKG: an on-chain phase machine (enrollment, commitments, encrypted
//! sub-shares, verification) whose escrow arbitrates complaints and framing
//! and applies the resulting rulings to the deposit ledger.
//!
//! Any complaint filed before conclusion fails the DKG. After conclusion a
//! complaint only slashes; the slashed participant's share is then revealed
//! and the system runs with threshold `(t-1, n-1)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::beacon::{verify_aggregate, EarlyBeacon};
use crate::behavior::Behavior;
use crate::dkg::{DkgConfig, DkgOutput, ParticipantSecrets};
use crate::group::{GroupElement, GroupSuite, GroupTag, Scalar};
use crate::hashing::{derive_rng, hex_bytes, hex_digest, sha256_parts, Digest};
use crate::ledger::{ComplaintKind, EntityId, EscrowLedger, LedgerError, Ruling, RulingRequest};
use crate::sharing::{
    elgamal_decrypt, elgamal_encrypt, hash_commit, index_scalar, verify_subshare, CommitmentVector,
    ElGamalCiphertext,
};
use crate::transcript::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Deployed,
    Enrollment,
    Commitments,
    SubShares,
    Verification,
    Concluded,
    Failed,
    /// Enrollment closed with fewer than `n` participants; everyone was refunded.
    Aborted,
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Failed | Phase::Aborted)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EscrowError {
    #[error("transaction not accepted in phase {0:?}")]
    WrongPhase(Phase),
    #[error("protocol is terminal ({0:?})")]
    Terminal(Phase),
    #[error("participant {0} is not enrolled")]
    NotEnrolled(u32),
    #[error("participant {0} already enrolled")]
    DuplicateEnrollment(u32),
    #[error("index {0} outside 1..=n")]
    BadIndex(u32),
    #[error("{0} is already on record")]
    Duplicate(String),
    #[error("sender tag does not match {0}")]
    BadSenderTag(EntityId),
    #[error("{0} has no live deposit or bond")]
    NotBonded(EntityId),
    #[error("complaint kind {0} is not arbitrated by this protocol")]
    UnsupportedKind(ComplaintKind),
    #[error("deposit must equal {0}")]
    WrongDeposit(u64),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PublicData {
    PublicKey(GroupElement),
    PublicShare { index: u32, value: GroupElement },
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FramingEvidence {
    /// The reconstructed global secret `f(0)`.
    SecretKey(Scalar),
    EarlyBeacon(EarlyBeacon),
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    None,
    MissingSubShare { recipient: u32 },
    DecryptionKey { key: Scalar },
    PublicData { idx: usize },
    Framing(FramingEvidence),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complaint {
    pub kind: ComplaintKind,
    pub prover: EntityId,
    pub accused: Option<u32>,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxBody {
    Enroll {
        deposit: u64,
        enc_pub: GroupElement,
        #[serde(with = "hex_digest")]
        hash_commitment: Digest,
    },
    Commitments(CommitmentVector),
    SubShare { recipient: u32, ciphertext: ElGamalCiphertext },
    Public(PublicData),
    Complaint(Complaint),
}

impl TxBody {
    fn name(&self) -> &'static str {
        match self {
            TxBody::Enroll { .. } => "tx1",
            TxBody::Commitments(_) => "tx2",
            TxBody::SubShare { .. } => "tx3",
            TxBody::Public(_) => "tx_pub",
            TxBody::Complaint(_) => "complaint",
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("transaction bodies serialize")
    }
}

/// Simulated signature: a tag binding the sender to the body bytes.
pub fn sender_tag(sender: EntityId, body_bytes: &[u8]) -> Digest {
    sha256_parts(&[b"escrowdkg/sender", sender.to_string().as_bytes(), body_bytes])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub sender: EntityId,
    pub body: TxBody,
    #[serde(with = "hex_digest")]
    pub tag: Digest,
}

impl Transaction {
    pub fn sign(sender: EntityId, body: TxBody) -> Self {
        let tag = sender_tag(sender, &body.to_bytes());
        Transaction { sender, body, tag }
    }

    pub fn tag_valid(&self) -> bool {
        self.tag == sender_tag(self.sender, &self.body.to_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub index: u32,
    pub enc_pub: GroupElement,
    #[serde(with = "hex_digest")]
    pub hash_commitment: Digest,
    pub commitments: Option<CommitmentVector>,
    /// Encrypted sub-shares this participant dealt, by recipient.
    pub subshares: BTreeMap<u32, ElGamalCiphertext>,
    pub slashed: bool,
    pub revealed_share: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicOutput {
    pub public_key: GroupElement,
    pub public_shares: BTreeMap<u32, GroupElement>,
}

/// What the escrow knows about the application's beacon, for early-release framing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeaconRegistry {
    #[serde(with = "hex_bytes")]
    pub rs0: Vec<u8>,
    pub schedule: Vec<u64>,
    pub published: BTreeMap<u64, Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub justified: bool,
    pub reason: String,
}

impl Verdict {
    fn just(reason: &str) -> Self {
        Verdict { justified: true, reason: reason.to_string() }
    }

    fn unjust(reason: &str) -> Self {
        Verdict { justified: false, reason: reason.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct EscrowDkg {
    suite: GroupSuite,
    config: DkgConfig,
    phase: Phase,
    height: u64,
    phase_start: u64,
    participants: BTreeMap<u32, ParticipantRecord>,
    log: Vec<Transaction>,
    public_data: Vec<(u32, PublicData)>,
    ledger: EscrowLedger,
    transcript: Transcript,
    output: Option<PublicOutput>,
    rulings: Vec<Ruling>,
    effective_t: u32,
    effective_n: u32,
    beacon: Option<BeaconRegistry>,
    framed: bool,
}

impl EscrowDkg {
    pub fn new(suite: GroupSuite, config: DkgConfig) -> Result<Self, String> {
        config.validate()?;
        Ok(EscrowDkg {
            suite,
            config,
            phase: Phase::Deployed,
            height: 0,
            phase_start: 0,
            participants: BTreeMap::new(),
            log: Vec::new(),
            public_data: Vec::new(),
            ledger: EscrowLedger::new(),
            transcript: Transcript::new(),
            output: None,
            rulings: Vec::new(),
            effective_t: config.t,
            effective_n: config.n,
            beacon: None,
            framed: false,
        })
    }

    pub fn suite(&self) -> &GroupSuite {
        &self.suite
    }

    pub fn config(&self) -> &DkgConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn participants(&self) -> &BTreeMap<u32, ParticipantRecord> {
        &self.participants
    }

    pub fn log(&self) -> &[Transaction] {
        &self.log
    }

    pub fn public_data(&self) -> &[(u32, PublicData)] {
        &self.public_data
    }

    pub fn ledger(&self) -> &EscrowLedger {
        &self.ledger
    }

    pub fn ledger_mut(&mut self) -> &mut EscrowLedger {
        &mut self.ledger
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transcript_mut(&mut self) -> &mut Transcript {
        &mut self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn output(&self) -> Option<&PublicOutput> {
        self.output.as_ref()
    }

    pub fn rulings(&self) -> &[Ruling] {
        &self.rulings
    }

    pub fn framed(&self) -> bool {
        self.framed
    }

    /// Current `(t, n)`; degrades by one per participant slashed after conclusion.
    pub fn effective_threshold(&self) -> (u32, u32) {
        (self.effective_t, self.effective_n)
    }

    fn log_phase(&mut self) {
        let phase = self.phase;
        self.transcript.push(
            self.height,
            "escrow",
            "phase",
            format!("{phase:?}").as_bytes(),
            json!({ "phase": phase }),
        );
    }

    fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
        self.phase_start = self.height;
        self.log_phase();
    }

    pub fn open_enrollment(&mut self) -> Result<(), EscrowError> {
        if self.phase != Phase::Deployed {
            return Err(EscrowError::WrongPhase(self.phase));
        }
        self.transcript.push(
            self.height,
            "escrow",
            "deployed",
            self.suite.curve_name().as_bytes(),
            json!({
                "curve": self.suite.curve_name(),
                "n": self.config.n,
                "t": self.config.t,
                "deposit": self.config.deposit,
                "epoch": self.config.epoch,
            }),
        );
        self.set_phase(Phase::Enrollment);
        Ok(())
    }

    /// Advances the logical clock by one block and rolls phases over.
    pub fn advance_block(&mut self) -> Result<Phase, EscrowError> {
        if self.phase.is_terminal() {
            return Err(EscrowError::Terminal(self.phase));
        }
        self.height += 1;
        let elapsed = self.height - self.phase_start;
        let delta = self.config.epoch;
        match self.phase {
            Phase::Enrollment if self.participants.len() == self.config.n as usize => {
                self.set_phase(Phase::Commitments)
            }
            Phase::Enrollment if elapsed >= delta => {
                let refunds = self.ledger.refund_all();
                self.set_phase(Phase::Aborted);
                self.transcript.push_ledger(
                    self.height,
                    "refund",
                    refunds,
                    json!({ "enrolled": self.participants.len() }),
                );
            }
            Phase::Commitments if elapsed >= delta => self.set_phase(Phase::SubShares),
            Phase::SubShares if elapsed >= delta => self.set_phase(Phase::Verification),
            Phase::Verification if elapsed >= delta => {
                self.output = Some(self.compute_public_output());
                self.set_phase(Phase::Concluded);
            }
            _ => {}
        }
        Ok(self.phase)
    }

    /// Advances block by block up to `height` (no-op if already there).
    pub fn advance_to(&mut self, height: u64) -> Result<Phase, EscrowError> {
        while self.height < height {
            self.advance_block()?;
        }
        Ok(self.phase)
    }

    /// Advances until the phase changes (or the protocol becomes terminal).
    pub fn advance_phase(&mut self) -> Result<Phase, EscrowError> {
        let start = self.phase;
        while self.phase == start && !self.phase.is_terminal() && start != Phase::Concluded {
            self.advance_block()?;
        }
        Ok(self.phase)
    }

    pub fn register_beacon(&mut self, rs0: Vec<u8>, schedule: Vec<u64>) {
        self.beacon = Some(BeaconRegistry { rs0, schedule, published: BTreeMap::new() });
    }

    pub fn record_beacon(&mut self, round: u64, value: Vec<u8>) {
        if let Some(b) = self.beacon.as_mut() {
            b.published.insert(round, value.clone());
        }
        self.transcript.push(self.height, "escrow", "beacon_value", &value, json!({ "round": round }));
    }

    /// Validates, records and (for complaints) arbitrates a transaction.
    pub fn submit(&mut self, tx: Transaction) -> Result<Option<Ruling>, EscrowError> {
        if self.phase.is_terminal() {
            return Err(EscrowError::Terminal(self.phase));
        }
        if !tx.tag_valid() {
            return Err(EscrowError::BadSenderTag(tx.sender));
        }
        let bytes = tx.body.to_bytes();
        let sender = tx.sender;
        let mut detail = json!({});
        match &tx.body {
            TxBody::Enroll { deposit, enc_pub, hash_commitment } => {
                let i = self.participant_sender(sender)?;
                if self.phase != Phase::Enrollment {
                    return Err(EscrowError::WrongPhase(self.phase));
                }
                if i == 0 || i > self.config.n {
                    return Err(EscrowError::BadIndex(i));
                }
                if self.participants.contains_key(&i) {
                    return Err(EscrowError::DuplicateEnrollment(i));
                }
                if *deposit != self.config.deposit {
                    return Err(EscrowError::WrongDeposit(self.config.deposit));
                }
                self.ledger.deposit(i, *deposit)?;
                self.participants.insert(
                    i,
                    ParticipantRecord {
                        index: i,
                        enc_pub: *enc_pub,
                        hash_commitment: *hash_commitment,
                        commitments: None,
                        subshares: BTreeMap::new(),
                        slashed: false,
                        revealed_share: None,
                    },
                );
                detail = json!({ "deposit": deposit, "hash_commitment": hex::encode(hash_commitment) });
            }
            TxBody::Commitments(c) => {
                let i = self.enrolled_sender(sender)?;
                if self.phase != Phase::Commitments {
                    return Err(EscrowError::WrongPhase(self.phase));
                }
                let rec = self.participants.get_mut(&i).expect("enrolled");
                if rec.commitments.is_some() {
                    return Err(EscrowError::Duplicate(format!("tx2({i})")));
                }
                rec.commitments = Some(c.clone());
                detail = json!({ "len": c.elements.len() });
            }
            TxBody::SubShare { recipient, ciphertext } => {
                let i = self.enrolled_sender(sender)?;
                if self.phase != Phase::SubShares {
                    return Err(EscrowError::WrongPhase(self.phase));
                }
                if !self.participants.contains_key(recipient) || *recipient == i {
                    return Err(EscrowError::BadIndex(*recipient));
                }
                let rec = self.participants.get_mut(&i).expect("enrolled");
                if rec.subshares.contains_key(recipient) {
                    return Err(EscrowError::Duplicate(format!("tx3({i},{recipient})")));
                }
                rec.subshares.insert(*recipient, ciphertext.clone());
                detail = json!({ "recipient": recipient });
            }
            TxBody::Public(data) => {
                let i = self.enrolled_sender(sender)?;
                if self.phase < Phase::SubShares {
                    return Err(EscrowError::WrongPhase(self.phase));
                }
                self.public_data.push((i, data.clone()));
                detail = json!({ "idx": self.public_data.len() - 1 });
            }
            TxBody::Complaint(c) => {
                self.check_complaint_legal(c)?;
                detail = json!({ "kind": c.kind, "accused": c.accused });
            }
        }
        self.transcript.push(self.height, sender.to_string(), tx.body.name(), &bytes, detail);
        let ruling = match &tx.body {
            TxBody::Complaint(c) => Some(self.rule(c)?),
            _ => None,
        };
        self.log.push(tx);
        Ok(ruling)
    }

    fn participant_sender(&self, sender: EntityId) -> Result<u32, EscrowError> {
        sender.participant().ok_or(EscrowError::NotBonded(sender))
    }

    fn enrolled_sender(&self, sender: EntityId) -> Result<u32, EscrowError> {
        let i = self.participant_sender(sender)?;
        if self.participants.contains_key(&i) {
            Ok(i)
        } else {
            Err(EscrowError::NotEnrolled(i))
        }
    }

    fn check_complaint_legal(&self, c: &Complaint) -> Result<(), EscrowError> {
        match c.kind {
            ComplaintKind::Cm1 | ComplaintKind::Cm2 | ComplaintKind::Cm3 | ComplaintKind::Cm4 | ComplaintKind::Cm5 => {
                if self.phase < Phase::Commitments {
                    return Err(EscrowError::WrongPhase(self.phase));
                }
            }
            ComplaintKind::Fm => {
                if self.phase != Phase::Concluded {
                    return Err(EscrowError::WrongPhase(self.phase));
                }
            }
            other => return Err(EscrowError::UnsupportedKind(other)),
        }
        if self.ledger.balance(c.prover) < self.config.deposit {
            return Err(EscrowError::NotBonded(c.prover));
        }
        if let Some(a) = c.accused {
            match self.participants.get(&a) {
                Some(rec) if !rec.slashed => {}
                Some(_) => return Err(EscrowError::NotBonded(EntityId::Participant(a))),
                None => return Err(EscrowError::NotEnrolled(a)),
            }
        }
        Ok(())
    }

    fn rule(&mut self, c: &Complaint) -> Result<Ruling, EscrowError> {
        let verdict = self.arbitrate(c);
        let req = RulingRequest { kind: c.kind, justified: verdict.justified, prover: c.prover, accused: c.accused };
        let ruling = self.ledger.derive_and_apply(&self.config.terms(), req)?;
        self.transcript.push_ledger(
            self.height,
            "ruling",
            ruling.net_deltas(),
            json!({
                "kind": c.kind,
                "justified": verdict.justified,
                "reason": verdict.reason,
                "prover": c.prover,
                "accused": c.accused,
                "burn": ruling.burn,
            }),
        );
        if self.phase < Phase::Concluded {
            self.set_phase(Phase::Failed);
        } else if c.kind == ComplaintKind::Fm && verdict.justified {
            self.framed = true;
        } else {
            for e in ruling.net_slashed() {
                if let Some(i) = e.participant() {
                    if let Some(rec) = self.participants.get_mut(&i) {
                        if !rec.slashed {
                            rec.slashed = true;
                            self.effective_t = self.effective_t.saturating_sub(1);
                            self.effective_n = self.effective_n.saturating_sub(1);
                        }
                    }
                }
            }
        }
        self.rulings.push(ruling.clone());
        Ok(ruling)
    }

    fn commitments_deadline_passed(&self) -> bool {
        self.phase > Phase::Commitments
    }

    fn subshares_deadline_passed(&self) -> bool {
        self.phase > Phase::SubShares
    }

    /// Global public key `Π_i X_{i,0}` over the published commitments.
    fn recomputed_public_key(&self) -> GroupElement {
        let mut acc = self.suite.identity(self.config.commit_tag);
        for rec in self.participants.values() {
            if let Some(c) = rec.commitments.as_ref().filter(|c| c.all_members(&self.suite)) {
                acc = self.suite.mul(&acc, &c.elements[0]).expect("members of one group");
            }
        }
        acc
    }

    /// `g^{x_j} = Π_i Π_k X_{i,k}^{j^k}`.
    fn recomputed_public_share(&self, j: u32) -> GroupElement {
        let z = index_scalar(&self.suite.field(), j);
        let mut acc = self.suite.identity(self.config.commit_tag);
        for rec in self.participants.values() {
            if let Some(c) = rec.commitments.as_ref().filter(|c| c.all_members(&self.suite)) {
                let y = c.evaluate_in_exponent(&self.suite, &z).expect("members");
                acc = self.suite.mul(&acc, &y).expect("members of one group");
            }
        }
        acc
    }

    fn compute_public_output(&self) -> PublicOutput {
        PublicOutput {
            public_key: self.recomputed_public_key(),
            public_shares: self.participants.keys().map(|j| (*j, self.recomputed_public_share(*j))).collect(),
        }
    }

    /// Deterministic verdict for a complaint against the current state.
    pub fn arbitrate(&self, c: &Complaint) -> Verdict {
        let su = &self.suite;
        let accused = c.accused.and_then(|a| self.participants.get(&a));
        match (c.kind, &c.evidence) {
            (ComplaintKind::Cm1, Evidence::None) => match accused {
                Some(rec) if self.commitments_deadline_passed() && rec.commitments.is_none() => {
                    Verdict::just("commitments missing after deadline")
                }
                _ => Verdict::unjust("commitments present or deadline not reached"),
            },
            (ComplaintKind::Cm2, Evidence::None) => {
                let Some(rec) = accused else { return Verdict::unjust("no accused") };
                if !su.is_member(&rec.enc_pub) || rec.enc_pub.tag() != GroupTag::G1 {
                    return Verdict::just("encryption key not in the key group");
                }
                match &rec.commitments {
                    None => Verdict::unjust("no commitments to check"),
                    Some(cv) if !cv.all_members(su) => Verdict::just("commitment fails group membership"),
                    Some(cv) if cv.elements.len() != self.config.t as usize + 1 => {
                        Verdict::just("commitment vector has wrong length")
                    }
                    Some(cv) if hash_commit(&cv.elements[0]) != rec.hash_commitment => {
                        Verdict::just("X_0 does not match hash commitment")
                    }
                    Some(_) => Verdict::unjust("commitments consistent with hash commitment"),
                }
            }
            (ComplaintKind::Cm3, Evidence::MissingSubShare { recipient }) => match accused {
                Some(rec)
                    if self.subshares_deadline_passed()
                        && *recipient != rec.index
                        && self.participants.contains_key(recipient)
                        && !rec.subshares.contains_key(recipient) =>
                {
                    Verdict::just("sub-share missing after deadline")
                }
                _ => Verdict::unjust("sub-share present or deadline not reached"),
            },
            (ComplaintKind::Cm4, Evidence::DecryptionKey { key }) => {
                let Some(rec) = accused else { return Verdict::unjust("no accused") };
                let Some(j) = c.prover.participant() else { return Verdict::unjust("prover is not a recipient") };
                let Some(prover) = self.participants.get(&j) else { return Verdict::unjust("prover not enrolled") };
                let derived = su.exp(&su.generator(GroupTag::G1), key).expect("generator");
                if derived != prover.enc_pub {
                    return Verdict::unjust("decryption key does not match enrolled key");
                }
                let Some(ct) = rec.subshares.get(&j) else { return Verdict::unjust("no sub-share transaction") };
                let Some(cv) = rec.commitments.as_ref() else { return Verdict::unjust("no commitments") };
                match elgamal_decrypt(su, ct, key) {
                    Ok(x) if verify_subshare(su, j, &x, cv) => Verdict::unjust("sub-share is consistent"),
                    _ => Verdict::just("sub-share inconsistent with commitments"),
                }
            }
            (ComplaintKind::Cm5, Evidence::PublicData { idx }) => {
                let Some((publisher, data)) = self.public_data.get(*idx) else {
                    return Verdict::unjust("no such public data");
                };
                if Some(*publisher) != c.accused {
                    return Verdict::unjust("public data published by someone else");
                }
                let ok = match data {
                    PublicData::PublicKey(pk) => *pk == self.recomputed_public_key(),
                    PublicData::PublicShare { index, value } => *value == self.recomputed_public_share(*index),
                };
                if ok {
                    Verdict::unjust("public data matches commitments")
                } else {
                    Verdict::just("public data differs from commitments")
                }
            }
            (ComplaintKind::Fm, Evidence::Framing(FramingEvidence::SecretKey(s))) => {
                let g = su.generator(self.config.commit_tag);
                if su.exp(&g, s).ok() == Some(self.recomputed_public_key()) {
                    Verdict::just("g^data equals the public key")
                } else {
                    Verdict::unjust("g^data differs from the public key")
                }
            }
            (ComplaintKind::Fm, Evidence::Framing(FramingEvidence::EarlyBeacon(eb))) => self.arbitrate_early_beacon(eb),
            _ => Verdict::unjust("evidence does not match complaint kind"),
        }
    }

    fn arbitrate_early_beacon(&self, eb: &EarlyBeacon) -> Verdict {
        let Some(reg) = &self.beacon else { return Verdict::unjust("no beacon registered") };
        if self.config.commit_tag != GroupTag::G2 {
            return Verdict::unjust("public key is not in G2");
        }
        let Some(&scheduled) = reg.schedule.get(eb.round as usize).filter(|_| eb.round >= 1) else {
            return Verdict::unjust("round outside schedule");
        };
        if self.height >= scheduled {
            return Verdict::unjust("round is already due");
        }
        let expected = if eb.round == 1 { Some(&reg.rs0) } else { reg.published.get(&(eb.round - 1)) };
        if expected != Some(&eb.message) {
            return Verdict::unjust("message is not the previous beacon value");
        }
        if verify_aggregate(&self.suite, &eb.message, &eb.signature, &self.recomputed_public_key()) {
            Verdict::just("valid beacon signature released before schedule")
        } else {
            Verdict::unjust("signature does not verify")
        }
    }

    /// Applies the all-deposits burn when the application cannot gather `t+1` shares.
    /// The escrow itself is recorded as the prover (`X0`).
    pub fn rule_noncooperation(&mut self, round: u64) -> Result<Ruling, EscrowError> {
        let req = RulingRequest {
            kind: ComplaintKind::NonCooperation,
            justified: true,
            prover: EntityId::External(0),
            accused: None,
        };
        let ruling = self.ledger.derive_and_apply(&self.config.terms(), req)?;
        self.transcript.push_ledger(
            self.height,
            "ruling",
            ruling.net_deltas(),
            json!({ "kind": ComplaintKind::NonCooperation, "justified": true, "round": round, "burn": ruling.burn }),
        );
        self.rulings.push(ruling.clone());
        self.set_phase(Phase::Failed);
        Ok(ruling)
    }

    /// Publishes a slashed participant's key share once others reconstruct it.
    pub fn reveal_share(&mut self, index: u32, share: Scalar) -> Result<bool, EscrowError> {
        let expected = self
            .output
            .as_ref()
            .and_then(|o| o.public_shares.get(&index).copied())
            .ok_or(EscrowError::WrongPhase(self.phase))?;
        let g = self.suite.generator(self.config.commit_tag);
        let ok = self.suite.exp(&g, &share).ok() == Some(expected);
        if ok {
            if let Some(rec) = self.participants.get_mut(&index) {
                rec.revealed_share = Some(share);
            }
            self.transcript.push(
                self.height,
                "escrow",
                "share_revealed",
                &share.to_be_bytes(),
                json!({ "index": index, "share": share, "threshold": [self.effective_t, self.effective_n] }),
            );
        }
        Ok(ok)
    }
}

/// Result of driving a full Escrow-DKG with scripted participants.
#[derive(Debug, Clone)]
pub struct EscrowDkgRun {
    pub state: EscrowDkg,
    pub secrets: Vec<ParticipantSecrets>,
    pub output: Option<DkgOutput>,
}

fn complaint_rank(c: &Complaint) -> (EntityId, ComplaintKind, Option<u32>) {
    (c.prover, c.kind, c.accused)
}

/// Files the lowest-ranked candidate complaint, if any; ties break by
/// `(prover, kind, accused)`.
fn file_first(state: &mut EscrowDkg, mut candidates: Vec<Complaint>) -> Result<(), String> {
    candidates.sort_by_key(complaint_rank);
    if let Some(c) = candidates.into_iter().next() {
        let tx = Transaction::sign(c.prover, TxBody::Complaint(c));
        state.submit(tx).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn scripted_complaint(secrets: &ParticipantSecrets, kind: ComplaintKind, target: u32) -> Complaint {
    let evidence = match kind {
        ComplaintKind::Cm3 => Evidence::MissingSubShare { recipient: secrets.index },
        ComplaintKind::Cm4 => Evidence::DecryptionKey { key: secrets.enc.secret },
        ComplaintKind::Cm5 => Evidence::PublicData { idx: 0 },
        _ => Evidence::None,
    };
    Complaint { kind, prover: EntityId::Participant(secrets.index), accused: Some(target), evidence }
}

/// Runs Escrow-DKG to conclusion or failure with rational complaint filing.
pub fn run_escrow_dkg(
    suite: &GroupSuite,
    config: &DkgConfig,
    seed: u64,
    behaviors: &[Behavior],
) -> Result<EscrowDkgRun, String> {
    if behaviors.len() != config.n as usize {
        return Err(format!("expected {} behaviors, got {}", config.n, behaviors.len()));
    }
    let mut state = EscrowDkg::new(*suite, *config)?;
    let secrets = ParticipantSecrets::derive_all(suite, seed, config.n, config.t);
    let field = suite.field();
    let tag = config.commit_tag;
    let behavior = |i: u32| behaviors[(i - 1) as usize];
    let err = |e: EscrowError| e.to_string();

    // enrollment
    state.open_enrollment().map_err(err)?;
    let commitments: Vec<CommitmentVector> =
        secrets.iter().map(|s| CommitmentVector::commit(suite, &s.polynomial, tag)).collect();
    for s in &secrets {
        let x0 = commitments[(s.index - 1) as usize].elements[0];
        let committed = if behavior(s.index) == Behavior::BadHashCommit {
            suite.mul(&x0, &suite.generator(tag)).expect("members")
        } else {
            x0
        };
        let body = TxBody::Enroll {
            deposit: config.deposit,
            enc_pub: s.enc.public,
            hash_commitment: hash_commit(&committed),
        };
        state.submit(Transaction::sign(EntityId::Participant(s.index), body)).map_err(err)?;
    }
    state.advance_phase().map_err(err)?;

    // commitments
    for s in &secrets {
        let i = s.index;
        if behavior(i).withholds_commitments() {
            continue;
        }
        let mut c = commitments[(i - 1) as usize].clone();
        if let Behavior::NonmemberCommitment { k } = behavior(i) {
            if k < c.elements.len() {
                c.elements[k] = suite.non_member(tag);
            }
        }
        state.submit(Transaction::sign(EntityId::Participant(i), TxBody::Commitments(c))).map_err(err)?;
    }
    state.advance_phase().map_err(err)?;

    // checkpoint: public data of the commitment phase
    let mut candidates = Vec::new();
    for s in &secrets {
        let j = s.index;
        if let Behavior::UnjustComplainer { complaint, target } = behavior(j) {
            if complaint != ComplaintKind::Fm {
                candidates.push(scripted_complaint(s, complaint, target));
            }
        }
        if !behavior(j).complains() {
            continue;
        }
        for i in (1..=config.n).filter(|i| *i != j) {
            let kind = if state.participants()[&i].commitments.is_none() {
                Some(ComplaintKind::Cm1)
            } else if state.arbitrate(&Complaint {
                kind: ComplaintKind::Cm2,
                prover: EntityId::Participant(j),
                accused: Some(i),
                evidence: Evidence::None,
            })
            .justified
            {
                Some(ComplaintKind::Cm2)
            } else {
                None
            };
            if let Some(kind) = kind {
                candidates.push(Complaint {
                    kind,
                    prover: EntityId::Participant(j),
                    accused: Some(i),
                    evidence: Evidence::None,
                });
            }
        }
    }
    file_first(&mut state, candidates)?;
    if state.phase() == Phase::Failed {
        return Ok(EscrowDkgRun { state, secrets, output: None });
    }

    // encrypted sub-shares
    for s in &secrets {
        let i = s.index;
        let mut rng = derive_rng(seed, "enc-rand", i as u64);
        for j in (1..=config.n).filter(|j| *j != i) {
            if behavior(i).withholds_subshare_to(j) {
                continue;
            }
            let mut x = s.polynomial.evaluate_at(j);
            if behavior(i) == (Behavior::InconsistentSubshare { recipient: j }) {
                x = field.add(&x, &field.one());
            }
            let pk = state.participants()[&j].enc_pub;
            let ciphertext = elgamal_encrypt(suite, &x, &pk, &mut rng).map_err(|e| e.to_string())?;
            state
                .submit(Transaction::sign(EntityId::Participant(i), TxBody::SubShare { recipient: j, ciphertext }))
                .map_err(err)?;
        }
    }
    state.advance_phase().map_err(err)?;

    // checkpoint: missing and inconsistent sub-shares
    let mut candidates = Vec::new();
    for s in &secrets {
        let j = s.index;
        if !behavior(j).complains() {
            continue;
        }
        for i in (1..=config.n).filter(|i| *i != j) {
            let dealer = &state.participants()[&i];
            for r in (1..=config.n).filter(|r| *r != i) {
                if !dealer.subshares.contains_key(&r) {
                    candidates.push(Complaint {
                        kind: ComplaintKind::Cm3,
                        prover: EntityId::Participant(j),
                        accused: Some(i),
                        evidence: Evidence::MissingSubShare { recipient: r },
                    });
                }
            }
            if let (Some(ct), Some(cv)) = (dealer.subshares.get(&j), dealer.commitments.as_ref()) {
                let ok = elgamal_decrypt(suite, ct, &s.enc.secret).is_ok_and(|x| verify_subshare(suite, j, &x, cv));
                if !ok {
                    candidates.push(Complaint {
                        kind: ComplaintKind::Cm4,
                        prover: EntityId::Participant(j),
                        accused: Some(i),
                        evidence: Evidence::DecryptionKey { key: s.enc.secret },
                    });
                }
            }
        }
    }
    file_first(&mut state, candidates)?;
    if state.phase() == Phase::Failed {
        return Ok(EscrowDkgRun { state, secrets, output: None });
    }

    state.advance_phase().map_err(err)?;
    let public = state.output().expect("concluded").clone();
    let mut shares = BTreeMap::new();
    for s in &secrets {
        let j = s.index;
        let mut x = s.polynomial.evaluate_at(j);
        for (i, rec) in state.participants() {
            if *i == j {
                continue;
            }
            if let Some(ct) = rec.subshares.get(&j) {
                let xij = elgamal_decrypt(suite, ct, &s.enc.secret).map_err(|e| e.to_string())?;
                x = field.add(&x, &xij);
            }
        }
        shares.insert(j, x);
    }
    let output = DkgOutput {
        n: config.n,
        t: config.t,
        shares,
        public_key: public.public_key,
        public_shares: public.public_shares,
        qualified: (1..=config.n).collect(),
    };
    Ok(EscrowDkgRun { state, secrets, output: Some(output) })
}
