//! Interactive sub-share dispute: prover `j` and challenger `i` bisect the
//! prefix products `ζ(m) = Π_{k≤m} X_{i,k}^{j^k}` until a single step is left,
//! which the contract settles with at most one exponentiation. Also provides
//! the naive one-shot arbitration and a structural cost model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupSuite, GroupTag, Scalar};
use crate::hashing::{derive_rng, sha256_parts, Digest};
use crate::ledger::{ComplaintKind, EntityId, RulingRequest};
use crate::sharing::{index_scalar, CommitmentVector, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DisputeError {
    #[error("prefix index {m} outside 0..={t}")]
    OutOfRange { m: usize, t: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostCounters {
    pub onchain_writes: u64,
    pub scalar_ops: u64,
    pub group_exps: u64,
    pub group_muls: u64,
    pub hash_evals: u64,
    pub rounds: u64,
}

impl CostCounters {
    pub fn add(&self, o: &CostCounters) -> CostCounters {
        CostCounters {
            onchain_writes: self.onchain_writes + o.onchain_writes,
            scalar_ops: self.scalar_ops + o.scalar_ops,
            group_exps: self.group_exps + o.group_exps,
            group_muls: self.group_muls + o.group_muls,
            hash_evals: self.hash_evals + o.hash_evals,
            rounds: self.rounds + o.rounds,
        }
    }

    pub fn weighted(&self, w: &CostWeights) -> u64 {
        self.onchain_writes * w.write
            + self.scalar_ops * w.scalar
            + self.group_exps * w.exp
            + self.group_muls * w.mul
            + self.hash_evals * w.hash
            + self.rounds * w.round
    }

    /// Componentwise `self ≤ o`.
    pub fn dominated_by(&self, o: &CostCounters) -> bool {
        self.onchain_writes <= o.onchain_writes
            && self.scalar_ops <= o.scalar_ops
            && self.group_exps <= o.group_exps
            && self.group_muls <= o.group_muls
            && self.hash_evals <= o.hash_evals
            && self.rounds <= o.rounds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostWeights {
    pub write: u64,
    pub scalar: u64,
    pub exp: u64,
    pub mul: u64,
    pub hash: u64,
    pub round: u64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { write: 1, scalar: 1, exp: 1, mul: 1, hash: 1, round: 1 }
    }
}

impl CostWeights {
    /// Rough EVM-like relative prices: storage write, ecMul, ecAdd, sha256, base transaction.
    pub fn evm_like() -> Self {
        CostWeights { write: 20_000, scalar: 5, exp: 6_000, mul: 150, hash: 72, round: 21_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Prover,
    Challenger,
}

fn element_tag(dealer: u32, k: usize, x: &GroupElement) -> Digest {
    sha256_parts(&[b"escrowdkg/commitment", &dealer.to_be_bytes(), &(k as u64).to_be_bytes(), &x.to_bytes()])
}

fn share_tag(dealer: u32, recipient: u32, x: &Scalar) -> Digest {
    sha256_parts(&[b"escrowdkg/subshare", &dealer.to_be_bytes(), &recipient.to_be_bytes(), &x.to_be_bytes()])
}

/// Commitments carrying one dealer tag per coefficient, so single elements can be
/// presented to the contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedCommitments {
    pub dealer: u32,
    pub commitments: CommitmentVector,
    pub tags: Vec<Digest>,
}

impl SignedCommitments {
    pub fn sign(dealer: u32, commitments: CommitmentVector) -> Self {
        let tags = commitments.elements.iter().enumerate().map(|(k, x)| element_tag(dealer, k, x)).collect();
        SignedCommitments { dealer, commitments, tags }
    }

    pub fn t(&self) -> usize {
        self.commitments.elements.len().saturating_sub(1)
    }

    pub fn element(&self, k: usize) -> Option<SignedElement> {
        Some(SignedElement { k, value: *self.commitments.elements.get(k)?, tag: *self.tags.get(k)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedElement {
    pub k: usize,
    pub value: GroupElement,
    pub tag: Digest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedSubShare {
    pub dealer: u32,
    pub recipient: u32,
    pub value: Scalar,
    pub tag: Digest,
}

impl SignedSubShare {
    pub fn sign(dealer: u32, recipient: u32, value: Scalar) -> Self {
        SignedSubShare { dealer, recipient, value, tag: share_tag(dealer, recipient, &value) }
    }

    pub fn tag_valid(&self) -> bool {
        self.tag == share_tag(self.dealer, self.recipient, &self.value)
    }
}

/// `ζ(m) = Π_{k=0..m} X_k^{j^k}`.
pub fn zeta(suite: &GroupSuite, c: &CommitmentVector, j: u32, m: usize) -> Result<GroupElement, DisputeError> {
    let t = c.elements.len().saturating_sub(1);
    if m > t || c.elements.is_empty() {
        return Err(DisputeError::OutOfRange { m, t });
    }
    Ok(zeta_table(suite, &CommitmentVector { tag: c.tag, elements: c.elements[..=m].to_vec() }, j)?[m])
}

/// All prefix products `ζ(0..=t)`.
pub fn zeta_table(suite: &GroupSuite, c: &CommitmentVector, j: u32) -> Result<Vec<GroupElement>, GroupError> {
    let f = suite.field();
    let z = index_scalar(&f, j);
    let mut power = f.one();
    let mut acc = suite.identity(c.tag);
    let mut out = Vec::with_capacity(c.elements.len());
    for x in &c.elements {
        acc = suite.mul(&acc, &suite.exp(x, &power)?)?;
        out.push(acc);
        power = f.mul(&power, &z);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChallengerStrategy {
    /// Submits its own `ζ(m)`.
    #[default]
    Honest,
    /// Submits `ζ(m)·g` whenever `m ≥ from`.
    LieFrom { from: usize },
    /// Submits `ζ(m)·g` for `m` in `at`.
    LieAt { at: Vec<usize> },
    /// Submits `values[r]` in round `r`; honest once the script runs out.
    Script { values: Vec<GroupElement> },
    /// Never submits.
    Silent,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProverStrategy {
    /// Agrees exactly when the submission matches its own `ζ(m)`.
    #[default]
    Honest,
    AlwaysAgree,
    AlwaysDisagree,
    /// `agree[r]` in round `r`; honest once the list runs out.
    Bits { agree: Vec<bool> },
    /// Answers honestly but tampers with the terminal evidence.
    ForgeTerminal,
    Silent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCase {
    /// Agreement at `l`, disagreement at `l+1`.
    Step,
    /// Disagreement already at `ζ(0)`.
    First,
    /// Agreement at `ζ(t)`.
    Last,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisputeState {
    pub t: usize,
    pub l: i64,
    pub h: i64,
    pub last: Option<GroupElement>,
    pub highest_agree: Option<GroupElement>,
    pub lowest_disagree: Option<GroupElement>,
    pub round: u64,
    pub height: u64,
    pub prover_costs: CostCounters,
    pub challenger_costs: CostCounters,
}

impl DisputeState {
    pub fn new(t: usize) -> Self {
        DisputeState {
            t,
            l: -1,
            h: t as i64 + 1,
            last: None,
            highest_agree: None,
            lowest_disagree: None,
            round: 0,
            height: 0,
            prover_costs: CostCounters::default(),
            challenger_costs: CostCounters::default(),
        }
    }

    pub fn open(&self) -> bool {
        self.h - self.l > 1
    }

    pub fn next_m(&self) -> usize {
        (self.l + (self.h - self.l + 1) / 2) as usize
    }

    pub fn terminal_case(&self) -> TerminalCase {
        if self.l == -1 {
            TerminalCase::First
        } else if self.h == self.t as i64 + 1 {
            TerminalCase::Last
        } else {
            TerminalCase::Step
        }
    }

    pub fn total_costs(&self) -> CostCounters {
        self.prover_costs.add(&self.challenger_costs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Submission {
    Zeta { m: usize, value: GroupElement },
    Answer { m: usize, agree: bool },
    Element { case: TerminalCase, element: SignedElement },
    Share { case: TerminalCase, share: SignedSubShare },
    Timeout,
    Invalid { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub round: u64,
    pub party: Party,
    pub height: u64,
    pub submission: Submission,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisputeVerdict {
    /// True when the complaint against the challenger stands.
    pub justified: bool,
    pub terminal: Option<TerminalCase>,
    pub forfeit: Option<Party>,
    pub reason: String,
}

impl DisputeVerdict {
    pub fn ruling_request(&self, kind: ComplaintKind, prover: u32, challenger: u32) -> RulingRequest {
        RulingRequest {
            kind,
            justified: self.justified,
            prover: EntityId::Participant(prover),
            accused: Some(challenger),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisputeOutcome {
    pub verdict: DisputeVerdict,
    pub state: DisputeState,
    pub turns: Vec<TurnRecord>,
}

impl DisputeOutcome {
    pub fn turns_jsonl(&self) -> String {
        self.turns.iter().map(|t| serde_json::to_string(t).expect("turns serialize") + "\n").collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisputeConfig {
    /// Blocks each party has for its turn.
    pub turn_deadline: u64,
}

impl Default for DisputeConfig {
    fn default() -> Self {
        DisputeConfig { turn_deadline: 1 }
    }
}

struct Run {
    state: DisputeState,
    turns: Vec<TurnRecord>,
}

impl Run {
    fn record(&mut self, party: Party, submission: Submission) {
        self.turns.push(TurnRecord {
            round: self.state.round,
            party,
            height: self.state.height,
            submission,
            verdict: None,
        });
    }

    fn finish(mut self, verdict: DisputeVerdict) -> DisputeOutcome {
        if let Some(last) = self.turns.last_mut() {
            last.verdict = Some(if verdict.justified { "just".into() } else { "unjust".into() });
        }
        DisputeOutcome { verdict, state: self.state, turns: self.turns }
    }

    fn forfeit(mut self, party: Party, deadline: u64, reason: &str) -> DisputeOutcome {
        self.state.height += deadline + 1;
        self.record(party, Submission::Timeout);
        self.finish(DisputeVerdict {
            justified: party == Party::Challenger,
            terminal: None,
            forfeit: Some(party),
            reason: reason.to_string(),
        })
    }
}

fn lie(suite: &GroupSuite, x: &GroupElement) -> GroupElement {
    suite.mul(x, &suite.generator(x.tag())).expect("member")
}

/// Runs the bisection between prover `share.recipient` and challenger `share.dealer`.
///
/// `signed` and `share` are the dealer-signed data the prover holds; the
/// challenger computes its own `ζ` from the same commitments.
pub fn run_dispute(
    suite: &GroupSuite,
    signed: &SignedCommitments,
    share: &SignedSubShare,
    prover: &ProverStrategy,
    challenger: &ChallengerStrategy,
    config: DisputeConfig,
) -> DisputeOutcome {
    let t = signed.t();
    let j = share.recipient;
    let c = &signed.commitments;
    let mut run = Run { state: DisputeState::new(t), turns: Vec::new() };

    // Invalid dealer data settles the dispute without bisection.
    let table = match c.all_members(suite).then(|| zeta_table(suite, c, j)) {
        Some(Ok(table)) if !c.elements.is_empty() => table,
        _ => {
            return run.finish(DisputeVerdict {
                justified: true,
                terminal: None,
                forfeit: None,
                reason: "signed commitments are not group elements".into(),
            })
        }
    };

    while run.state.open() {
        let m = run.state.next_m();
        let r = run.state.round as usize;
        run.state.height += 1;

        let submitted = match challenger {
            ChallengerStrategy::Silent => {
                return run.forfeit(Party::Challenger, config.turn_deadline, "challenger missed its turn")
            }
            ChallengerStrategy::Honest => table[m],
            ChallengerStrategy::LieFrom { from } if m >= *from => lie(suite, &table[m]),
            ChallengerStrategy::LieAt { at } if at.contains(&m) => lie(suite, &table[m]),
            ChallengerStrategy::Script { values } if r < values.len() => values[r],
            _ => table[m],
        };
        run.state.challenger_costs.onchain_writes += 1;
        run.state.challenger_costs.rounds += 1;
        if submitted.tag() != c.tag || !suite.is_member(&submitted) {
            run.record(Party::Challenger, Submission::Invalid { reason: "not a commitment-group element".into() });
            return run.forfeit(Party::Challenger, config.turn_deadline, "challenger submitted an invalid element");
        }
        run.state.last = Some(submitted);
        run.record(Party::Challenger, Submission::Zeta { m, value: submitted });

        run.state.height += 1;
        let honest = submitted == table[m];
        let agree = match prover {
            ProverStrategy::Silent => {
                return run.forfeit(Party::Prover, config.turn_deadline, "prover missed its turn")
            }
            ProverStrategy::AlwaysAgree => true,
            ProverStrategy::AlwaysDisagree => false,
            ProverStrategy::Bits { agree } if r < agree.len() => agree[r],
            _ => honest,
        };
        run.state.prover_costs.onchain_writes += 1;
        run.state.prover_costs.rounds += 1;
        if agree {
            run.state.highest_agree = Some(submitted);
            run.state.l = m as i64;
        } else {
            run.state.lowest_disagree = Some(submitted);
            run.state.h = m as i64;
        }
        run.record(Party::Prover, Submission::Answer { m, agree });
        run.state.round += 1;
    }

    run.state.height += 1;
    let case = run.state.terminal_case();
    let forge = *prover == ProverStrategy::ForgeTerminal;
    let costs = &mut run.state.prover_costs;
    costs.onchain_writes += 1;
    costs.hash_evals += 1;
    let (holds, valid) = match case {
        TerminalCase::Step | TerminalCase::First => {
            let k = if case == TerminalCase::Step { run.state.l as usize + 1 } else { 0 };
            let mut element = signed.element(k).expect("k ≤ t");
            if forge {
                element.value = lie(suite, &element.value);
            }
            let valid = element.tag == element_tag(signed.dealer, k, &element.value) && element.k == k;
            let lowest = run.state.lowest_disagree.expect("h ≤ t");
            let holds = if case == TerminalCase::First {
                lowest == element.value
            } else {
                costs.scalar_ops += 1;
                costs.group_exps += 1;
                costs.group_muls += 1;
                let f = suite.field();
                let power = f.pow(&index_scalar(&f, j), k as u64);
                let step = suite.exp(&element.value, &power).expect("signed element is a member");
                suite.mul(&run.state.highest_agree.expect("l ≥ 0"), &step).expect("same group") == lowest
            };
            run.record(Party::Prover, Submission::Element { case, element });
            (holds, valid)
        }
        TerminalCase::Last => {
            let mut s = *share;
            if forge {
                s.value = suite.field().add(&s.value, &suite.field().one());
            }
            costs.group_exps += 1;
            let valid = s.tag_valid() && s.dealer == signed.dealer;
            let g = suite.generator(c.tag);
            let holds = suite.exp(&g, &s.value).expect("generator") == run.state.highest_agree.expect("l = t");
            run.record(Party::Prover, Submission::Share { case, share: s });
            (holds, valid)
        }
    };
    let verdict = if !valid {
        DisputeVerdict {
            justified: false,
            terminal: Some(case),
            forfeit: Some(Party::Prover),
            reason: "terminal evidence not signed by the challenger".into(),
        }
    } else {
        DisputeVerdict {
            justified: !holds,
            terminal: Some(case),
            forfeit: None,
            reason: if holds { "terminal equation holds" } else { "terminal equation fails" }.into(),
        }
    };
    run.finish(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaiveOutcome {
    pub justified: bool,
    pub costs: CostCounters,
}

/// One-shot arbitration: the prover posts all `t+1` commitments and the sub-share.
pub fn naive_arbitrate(suite: &GroupSuite, signed: &SignedCommitments, share: &SignedSubShare) -> NaiveOutcome {
    let c = &signed.commitments;
    let t = signed.t() as u64;
    let mut costs = CostCounters { onchain_writes: t + 2, hash_evals: 2, rounds: 1, ..Default::default() };
    let signed_ok = share.tag_valid()
        && share.dealer == signed.dealer
        && c.elements.iter().enumerate().all(|(k, x)| signed.tags.get(k) == Some(&element_tag(signed.dealer, k, x)));
    if !signed_ok {
        return NaiveOutcome { justified: false, costs };
    }
    if c.elements.is_empty() || !c.all_members(suite) {
        return NaiveOutcome { justified: true, costs };
    }
    // Horner in the exponent: ((X_t^j · X_{t-1})^j · ...)^j · X_0
    let z = index_scalar(&suite.field(), share.recipient);
    let mut acc = *c.elements.last().expect("non-empty");
    for x in c.elements.iter().rev().skip(1) {
        acc = suite.mul(&suite.exp(&acc, &z).expect("member"), x).expect("same group");
        costs.group_exps += 1;
        costs.group_muls += 1;
    }
    let lhs = suite.exp(&suite.generator(c.tag), &share.value).expect("generator");
    costs.group_exps += 1;
    NaiveOutcome { justified: lhs != acc, costs }
}

/// `⌈log2(t+2)⌉`, the number of bisection rounds on the longest path.
pub fn max_rounds(t: usize) -> u64 {
    let s = t as u64 + 2;
    64 - (s - 1).leading_zeros() as u64
}

/// Per-party upper bounds on interactive costs for degree `t`.
pub fn interactive_cost_bound(t: usize) -> (CostCounters, CostCounters) {
    let r = max_rounds(t);
    let prover = CostCounters {
        onchain_writes: r + 1,
        scalar_ops: 1,
        group_exps: 1,
        group_muls: 1,
        hash_evals: 1,
        rounds: r,
    };
    let challenger = CostCounters { onchain_writes: r, rounds: r, ..Default::default() };
    (prover, challenger)
}

/// Gas measurements of the reference implementation, `(t, gas)`.
pub const REFERENCE_NAIVE_PROVER: &[(u64, u64)] = &[(1, 237_232), (5, 451_782), (10, 719_973), (15, 988_170)];
pub const REFERENCE_INTERACTIVE_PROVER: &[(u64, u64)] = &[
    (5, 328_532),
    (20, 407_624),
    (50, 447_170),
    (100, 486_716),
    (500, 565_808),
    (1000, 605_354),
    (10_000, 763_538),
    (100_000, 842_630),
];
pub const REFERENCE_INTERACTIVE_CHALLENGER: &[(u64, u64)] = &[
    (5, 139_575),
    (20, 212_625),
    (50, 249_150),
    (100, 285_675),
    (500, 358_725),
    (1000, 395_250),
    (10_000, 541_350),
    (100_000, 614_400),
];

fn reference_at(table: &[(u64, u64)], t: u64) -> Option<u64> {
    table.iter().find(|(x, _)| *x == t).map(|(_, g)| *g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostRow {
    pub t: u64,
    pub rounds: u64,
    pub naive: CostCounters,
    pub interactive_prover: CostCounters,
    pub interactive_challenger: CostCounters,
    pub naive_weighted: u64,
    pub interactive_prover_weighted: u64,
    pub interactive_challenger_weighted: u64,
    pub reference_naive_prover: Option<u64>,
    pub reference_interactive_prover: Option<u64>,
    pub reference_interactive_challenger: Option<u64>,
}

/// Naive cost counted analytically (it is data independent): `t+2` writes,
/// `t+1` exponentiations, `t` multiplications.
pub fn naive_costs(t: usize) -> CostCounters {
    let t = t as u64;
    CostCounters { onchain_writes: t + 2, scalar_ops: 0, group_exps: t + 1, group_muls: t, hash_evals: 2, rounds: 1 }
}

pub fn cost_report(t_values: &[u64], weights: &CostWeights) -> Vec<CostRow> {
    t_values
        .iter()
        .map(|&t| {
            let naive = naive_costs(t as usize);
            let (p, c) = interactive_cost_bound(t as usize);
            CostRow {
                t,
                rounds: max_rounds(t as usize),
                naive,
                interactive_prover: p,
                interactive_challenger: c,
                naive_weighted: naive.weighted(weights),
                interactive_prover_weighted: p.weighted(weights),
                interactive_challenger_weighted: c.weighted(weights),
                reference_naive_prover: reference_at(REFERENCE_NAIVE_PROVER, t),
                reference_interactive_prover: reference_at(REFERENCE_INTERACTIVE_PROVER, t),
                reference_interactive_challenger: reference_at(REFERENCE_INTERACTIVE_CHALLENGER, t),
            }
        })
        .collect()
}

/// A self-contained dispute instance, as read by `dispute-replay`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisputeCase {
    pub t: usize,
    #[serde(default = "default_dealer")]
    pub dealer: u32,
    #[serde(default = "default_recipient")]
    pub recipient: u32,
    #[serde(default)]
    pub seed: u64,
    /// Added to the true sub-share; zero means the share is consistent.
    #[serde(default)]
    pub share_offset: u64,
    #[serde(default)]
    pub prover: ProverStrategy,
    #[serde(default)]
    pub challenger: ChallengerStrategy,
    #[serde(default)]
    pub turn_deadline: Option<u64>,
}

fn default_dealer() -> u32 {
    1
}

fn default_recipient() -> u32 {
    2
}

impl DisputeCase {
    pub fn materialize(&self, suite: &GroupSuite, tag: GroupTag) -> (SignedCommitments, SignedSubShare) {
        let f = suite.field();
        let poly = Polynomial::random(f, self.t.max(1), &mut derive_rng(self.seed, "dispute", self.dealer as u64))
            .expect("degree ≥ 1");
        let poly = if self.t == 0 {
            Polynomial::from_coefficients(f, vec![poly.secret()])
        } else {
            poly
        };
        let c = CommitmentVector::commit(suite, &poly, tag);
        let x = f.add(&poly.evaluate_at(self.recipient), &f.from_u64(self.share_offset));
        (SignedCommitments::sign(self.dealer, c), SignedSubShare::sign(self.dealer, self.recipient, x))
    }

    pub fn run(&self, suite: &GroupSuite, tag: GroupTag) -> (DisputeOutcome, NaiveOutcome) {
        let (c, s) = self.materialize(suite, tag);
        let config = DisputeConfig { turn_deadline: self.turn_deadline.unwrap_or(1) };
        (run_dispute(suite, &c, &s, &self.prover, &self.challenger, config), naive_arbitrate(suite, &c, &s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mock() -> GroupSuite {
        GroupSuite::mock(101).unwrap()
    }

    fn mock_commitments(su: &GroupSuite, xs: &[u64]) -> CommitmentVector {
        CommitmentVector { tag: GroupTag::G1, elements: xs.iter().map(|x| su.mock_element(GroupTag::G1, *x)).collect() }
    }

    fn instance(su: &GroupSuite, t: usize, seed: u64, bad: bool) -> (SignedCommitments, SignedSubShare) {
        DisputeCase {
            t,
            dealer: 1,
            recipient: 3,
            seed,
            share_offset: bad as u64,
            prover: ProverStrategy::Honest,
            challenger: ChallengerStrategy::Honest,
            turn_deadline: None,
        }
        .materialize(su, GroupTag::G1)
    }

    #[test]
    fn zeta_prefix_products() {
        let su = mock();
        let c = mock_commitments(&su, &[2, 3, 4]);
        let got: Vec<_> = (0..3).map(|m| zeta(&su, &c, 2, m).unwrap().mock_value().unwrap()).collect();
        assert_eq!(got, vec![2, 8, 24]);
        assert_eq!(zeta(&su, &c, 2, 3), Err(DisputeError::OutOfRange { m: 3, t: 2 }));
        assert_eq!(zeta(&su, &c, 5, 0).unwrap(), c.elements[0]);
    }

    #[test]
    fn zeta_t_is_the_share_commitment() {
        for su in [mock(), GroupSuite::bls12_381()] {
            let (c, s) = instance(&su, 3, 4, false);
            let full = zeta(&su, &c.commitments, 3, 3).unwrap();
            assert_eq!(full, su.exp(&su.generator(GroupTag::G1), &s.value).unwrap());
        }
    }

    #[test]
    fn bad_share_trace_with_defending_challenger() {
        let su = mock();
        let (c, s) = instance(&su, 2, 1, true);
        let out = run_dispute(
            &su,
            &c,
            &s,
            &ProverStrategy::Honest,
            &ChallengerStrategy::LieFrom { from: 1 },
            DisputeConfig::default(),
        );
        let answers: Vec<_> = out
            .turns
            .iter()
            .filter_map(|t| match t.submission {
                Submission::Answer { m, agree } => Some((m, agree)),
                _ => None,
            })
            .collect();
        assert_eq!(answers, vec![(1, false), (0, true)]);
        assert_eq!((out.state.l, out.state.h), (0, 1));
        assert_eq!(out.verdict.terminal, Some(TerminalCase::Step));
        assert!(out.verdict.justified);
        assert_eq!(out.state.round, 2);
    }

    #[test]
    fn bad_share_against_truthful_challenger_ends_at_last() {
        let su = mock();
        let (c, s) = instance(&su, 2, 1, true);
        let out = run_dispute(&su, &c, &s, &ProverStrategy::Honest, &ChallengerStrategy::Honest, DisputeConfig::default());
        assert_eq!(out.verdict.terminal, Some(TerminalCase::Last));
        assert!(out.verdict.justified);
    }

    #[test]
    fn unjust_complaint_loses_under_every_answer_pattern() {
        let su = mock();
        let (c, s) = instance(&su, 2, 8, false);
        let cases = [
            (ProverStrategy::AlwaysAgree, TerminalCase::Last),
            (ProverStrategy::AlwaysDisagree, TerminalCase::First),
            (ProverStrategy::Bits { agree: vec![false, true] }, TerminalCase::Step),
        ];
        for (p, case) in cases {
            let out = run_dispute(&su, &c, &s, &p, &ChallengerStrategy::Honest, DisputeConfig::default());
            assert_eq!(out.verdict.terminal, Some(case));
            assert!(!out.verdict.justified, "{p:?}");
        }
    }

    #[test]
    fn timeouts_and_forgery_forfeit() {
        let su = mock();
        let (c, s) = instance(&su, 3, 2, false);
        let cfg = DisputeConfig { turn_deadline: 5 };
        let out = run_dispute(&su, &c, &s, &ProverStrategy::Honest, &ChallengerStrategy::Silent, cfg);
        assert_eq!(out.verdict.forfeit, Some(Party::Challenger));
        assert!(out.verdict.justified);
        assert_eq!(out.state.height, 7);
        let out = run_dispute(&su, &c, &s, &ProverStrategy::Silent, &ChallengerStrategy::Honest, cfg);
        assert_eq!(out.verdict.forfeit, Some(Party::Prover));
        assert!(!out.verdict.justified);
        let (c, s) = instance(&su, 3, 2, true);
        let out = run_dispute(&su, &c, &s, &ProverStrategy::ForgeTerminal, &ChallengerStrategy::Honest, cfg);
        assert_eq!(out.verdict.forfeit, Some(Party::Prover));
        assert!(!out.verdict.justified);
    }

    #[test]
    fn invalid_challenger_submission_forfeits() {
        let su = mock();
        let (c, s) = instance(&su, 3, 2, false);
        let script = ChallengerStrategy::Script { values: vec![su.non_member(GroupTag::G1)] };
        let out = run_dispute(&su, &c, &s, &ProverStrategy::Honest, &script, DisputeConfig::default());
        assert_eq!(out.verdict.forfeit, Some(Party::Challenger));
    }

    #[test]
    fn round_counts() {
        assert_eq!([2, 5, 1000].map(max_rounds), [2, 3, 10]);
        let su = mock();
        for t in [2usize, 5, 1000] {
            let (c, s) = instance(&su, t, 3, false);
            let out = run_dispute(&su, &c, &s, &ProverStrategy::AlwaysDisagree, &ChallengerStrategy::Honest, DisputeConfig::default());
            assert_eq!(out.state.round, max_rounds(t));
        }
    }

    #[test]
    fn naive_counts() {
        let su = mock();
        let (c, s) = instance(&su, 4, 1, false);
        let n = naive_arbitrate(&su, &c, &s);
        assert!(!n.justified);
        assert_eq!(n.costs, naive_costs(4));
        let (c, s) = instance(&su, 4, 1, true);
        assert!(naive_arbitrate(&su, &c, &s).justified);
        for t in [3usize, 8, 20] {
            assert_eq!(naive_costs(2 * t).group_exps - naive_costs(t).group_exps, t as u64);
            assert_eq!(naive_costs(2 * t).group_muls, 2 * naive_costs(t).group_muls);
        }
    }

    #[test]
    fn report_rows_carry_reference_points() {
        let rows = cost_report(&[1, 5, 20], &CostWeights::default());
        assert_eq!(rows[0].reference_naive_prover, Some(237_232));
        assert_eq!(rows[1].reference_interactive_prover, Some(328_532));
        assert_eq!(rows[2].reference_interactive_challenger, Some(212_625));
        assert_eq!(rows[2].reference_naive_prover, None);
    }

    #[test]
    fn turns_serialize_as_jsonl() {
        let su = mock();
        let (c, s) = instance(&su, 2, 1, true);
        let out = run_dispute(&su, &c, &s, &ProverStrategy::Honest, &ChallengerStrategy::Honest, DisputeConfig::default());
        let text = out.turns_jsonl();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), out.turns.len());
        assert_eq!(lines.last().unwrap()["verdict"], "just");
    }

    proptest! {
        #[test]
        fn dispute_matches_naive_and_respects_bounds(
            t in 1usize..24,
            seed in any::<u64>(),
            bad in any::<bool>(),
            lie in proptest::option::of(0usize..24),
        ) {
            let su = mock();
            let (c, s) = instance(&su, t, seed, bad);
            let ch = lie.map_or(ChallengerStrategy::Honest, |from| ChallengerStrategy::LieFrom { from });
            let out = run_dispute(&su, &c, &s, &ProverStrategy::Honest, &ch, DisputeConfig::default());
            prop_assert_eq!(out.verdict.justified, naive_arbitrate(&su, &c, &s).justified || lie.is_some_and(|m| m <= t));
            prop_assert!(out.state.round <= max_rounds(t));
            let (pb, cb) = interactive_cost_bound(t);
            prop_assert!(out.state.prover_costs.dominated_by(&pb));
            prop_assert!(out.state.challenger_costs.dominated_by(&cb));
        }
    }
}
