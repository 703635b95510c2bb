//! The escrow: deposits, external bonds, and atomic slash/reward/burn rulings.
//!
//! Amounts are integer milli-units. Per-participant rewards that do not divide
//! evenly are rounded down and the remainder is burned, so conservation is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Amount = u64;

/// Milli-units per currency unit.
pub const UNIT: Amount = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityId {
    Participant(u32),
    External(u32),
}

impl EntityId {
    pub fn participant(&self) -> Option<u32> {
        match self {
            EntityId::Participant(i) => Some(*i),
            EntityId::External(_) => None,
        }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityId::Participant(i) => write!(f, "P{i}"),
            EntityId::External(i) => write!(f, "X{i}"),
        }
    }
}

impl FromStr for EntityId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, rest) = s.split_at(s.len().min(1));
        let idx: u32 = rest.parse().map_err(|_| format!("bad entity id `{s}`"))?;
        match head {
            "P" => Ok(EntityId::Participant(idx)),
            "X" => Ok(EntityId::External(idx)),
            _ => Err(format!("bad entity id `{s}`")),
        }
    }
}

impl Serialize for EntityId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Complaint and ruling kinds. `eth_*` are the off-chain-delivery variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplaintKind {
    Cm1,
    Cm2,
    Cm3,
    Cm4,
    Cm5,
    EthCm1,
    EthCm2,
    EthCm3,
    EthCm4,
    Fm,
    NonCooperation,
}

impl ComplaintKind {
    /// Rulings that pay the wronged prover directly instead of everyone.
    fn pays_prover(self) -> bool {
        matches!(self, ComplaintKind::Cm4 | ComplaintKind::EthCm3)
    }
}

impl fmt::Display for ComplaintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("kind serializes");
        f.write_str(s.as_str().expect("unit variant"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FramingReward {
    /// `tΔ`
    #[default]
    Full,
    /// `tΔ/2`
    Half,
}

impl FromStr for FramingReward {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(FramingReward::Full),
            "half" => Ok(FramingReward::Half),
            other => Err(format!("unknown framing reward `{other}` (expected full|half)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscrowTerms {
    pub n: u32,
    pub t: u32,
    pub deposit: Amount,
    pub framing_reward: FramingReward,
}

impl EscrowTerms {
    pub fn framer_reward(&self) -> Amount {
        match self.framing_reward {
            FramingReward::Full => self.t as Amount * self.deposit,
            FramingReward::Half => self.t as Amount * self.deposit / 2,
        }
    }
}

/// Verdict input for [`EscrowLedger::derive_ruling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulingRequest {
    pub kind: ComplaintKind,
    pub justified: bool,
    pub prover: EntityId,
    pub accused: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ruling {
    pub request: RulingRequest,
    pub slashed: Vec<(EntityId, Amount)>,
    pub rewards: Vec<(EntityId, Amount)>,
    pub burn: Amount,
}

impl Ruling {
    pub fn total_slashed(&self) -> Amount {
        self.slashed.iter().map(|(_, a)| a).sum()
    }

    pub fn total_rewarded(&self) -> Amount {
        self.rewards.iter().map(|(_, a)| a).sum()
    }

    /// Net balance change per entity.
    pub fn net_deltas(&self) -> Vec<(EntityId, i64)> {
        let mut net: BTreeMap<EntityId, i64> = BTreeMap::new();
        for (e, a) in &self.slashed {
            *net.entry(*e).or_default() -= *a as i64;
        }
        for (e, a) in &self.rewards {
            *net.entry(*e).or_default() += *a as i64;
        }
        net.into_iter().collect()
    }

    /// Entities whose balance went down.
    pub fn net_slashed(&self) -> Vec<EntityId> {
        self.net_deltas()
            .into_iter()
            .filter(|(_, d)| *d < 0)
            .map(|(e, _)| e)
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("deposit must be positive")]
    ZeroDeposit,
    #[error("{0} already deposited")]
    DuplicateDeposit(EntityId),
    #[error("{0} has insufficient funds")]
    InsufficientDeposit(EntityId),
    #[error("reward {reward} exceeds slashed pool {slashed}")]
    NegativeBurn { reward: Amount, slashed: Amount },
    #[error("ruling is inconsistent with the request: {0}")]
    InvalidRequest(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscrowLedger {
    pub deposits: BTreeMap<u32, Amount>,
    pub external_bonds: BTreeMap<u32, Amount>,
    pub burned_total: Amount,
    pub paid_out: BTreeMap<EntityId, Amount>,
    pub refunded: BTreeMap<EntityId, Amount>,
    pub total_inflow: Amount,
}

impl EscrowLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn deposit(&mut self, participant: u32, amount: Amount) -> Result<(), LedgerError> {
        if amount == 0 {
            return Err(LedgerError::ZeroDeposit);
        }
        if self.deposits.contains_key(&participant) {
            return Err(LedgerError::DuplicateDeposit(EntityId::Participant(participant)));
        }
        self.deposits.insert(participant, amount);
        self.total_inflow += amount;
        Ok(())
    }

    /// Bond posted by an external entity before it may complain or frame.
    pub fn bond(&mut self, external: u32, amount: Amount) -> Result<(), LedgerError> {
        if amount == 0 {
            return Err(LedgerError::ZeroDeposit);
        }
        *self.external_bonds.entry(external).or_default() += amount;
        self.total_inflow += amount;
        Ok(())
    }

    pub fn balance(&self, e: EntityId) -> Amount {
        match e {
            EntityId::Participant(i) => self.deposits.get(&i).copied().unwrap_or(0),
            EntityId::External(x) => self.external_bonds.get(&x).copied().unwrap_or(0),
        }
    }

    /// Returns every remaining deposit and bond; used when enrollment aborts.
    pub fn refund_all(&mut self) -> Vec<(EntityId, i64)> {
        let mut out = Vec::new();
        for (i, a) in std::mem::take(&mut self.deposits) {
            if a > 0 {
                *self.refunded.entry(EntityId::Participant(i)).or_default() += a;
                out.push((EntityId::Participant(i), -(a as i64)));
            }
        }
        for (x, a) in std::mem::take(&mut self.external_bonds) {
            if a > 0 {
                *self.refunded.entry(EntityId::External(x)).or_default() += a;
                out.push((EntityId::External(x), -(a as i64)));
            }
        }
        out
    }

    /// Returns an external entity's bond in full.
    pub fn release_bond(&mut self, external: u32) -> Amount {
        let a = self.external_bonds.remove(&external).unwrap_or(0);
        if a > 0 {
            *self.refunded.entry(EntityId::External(external)).or_default() += a;
        }
        a
    }

    fn live_participants(&self) -> impl Iterator<Item = u32> + '_ {
        self.deposits.iter().filter(|(_, a)| **a > 0).map(|(i, _)| *i)
    }

    /// Computes the slashing, reward and burn transfers for a verdict without touching balances.
    pub fn derive_ruling(&self, terms: &EscrowTerms, req: RulingRequest) -> Result<Ruling, LedgerError> {
        let d = terms.deposit;
        let n = terms.n as Amount;
        let invalid = |m: &str| LedgerError::InvalidRequest(m.to_string());
        let mut slashed = Vec::new();
        let mut rewards = Vec::new();

        let pay_others = |rewards: &mut Vec<(EntityId, Amount)>, except: Option<u32>, each: Amount| {
            for m in self.live_participants().filter(|m| Some(*m) != except) {
                rewards.push((EntityId::Participant(m), each));
            }
        };

        match (req.kind, req.justified) {
            (ComplaintKind::NonCooperation, _) => {
                for m in self.live_participants() {
                    slashed.push((EntityId::Participant(m), self.deposits[&m]));
                }
            }
            (ComplaintKind::Fm, true) => {
                for m in self.live_participants() {
                    if EntityId::Participant(m) != req.prover {
                        slashed.push((EntityId::Participant(m), d));
                    }
                }
                rewards.push((req.prover, terms.framer_reward()));
            }
            (kind, true) => {
                let accused = req.accused.ok_or_else(|| invalid("justified complaint without accused"))?;
                slashed.push((EntityId::Participant(accused), d));
                if kind.pays_prover() {
                    if req.prover.participant().is_none() {
                        return Err(invalid("sub-share complaints are filed by the recipient"));
                    }
                    rewards.push((req.prover, d / 2));
                } else {
                    pay_others(&mut rewards, Some(accused), d / (2 * (n - 1)));
                }
            }
            (_, false) => {
                slashed.push((req.prover, d));
                match req.prover {
                    EntityId::Participant(p) => pay_others(&mut rewards, Some(p), d / (2 * (n - 1))),
                    EntityId::External(_) => pay_others(&mut rewards, None, d / (2 * n)),
                }
            }
        }

        for (e, a) in &slashed {
            if self.balance(*e) < *a {
                return Err(LedgerError::InsufficientDeposit(*e));
            }
        }
        let total_slashed: Amount = slashed.iter().map(|(_, a)| a).sum();
        let total_reward: Amount = rewards.iter().map(|(_, a)| a).sum();
        if total_reward > total_slashed {
            return Err(LedgerError::NegativeBurn { reward: total_reward, slashed: total_slashed });
        }
        Ok(Ruling { request: req, slashed, rewards, burn: total_slashed - total_reward })
    }

    /// Applies a ruling atomically: either every transfer happens or none.
    pub fn apply_ruling(&mut self, ruling: &Ruling) -> Result<(), LedgerError> {
        let mut next = self.clone();
        for (e, a) in &ruling.slashed {
            let bal = match e {
                EntityId::Participant(i) => next.deposits.get_mut(i),
                EntityId::External(x) => next.external_bonds.get_mut(x),
            }
            .ok_or(LedgerError::InsufficientDeposit(*e))?;
            *bal = bal.checked_sub(*a).ok_or(LedgerError::InsufficientDeposit(*e))?;
        }
        for (e, a) in &ruling.rewards {
            *next.paid_out.entry(*e).or_default() += a;
        }
        next.burned_total += ruling.burn;
        if ruling.total_slashed() != ruling.total_rewarded() + ruling.burn {
            return Err(LedgerError::InvalidRequest("ruling does not balance".into()));
        }
        *self = next;
        Ok(())
    }

    pub fn derive_and_apply(&mut self, terms: &EscrowTerms, req: RulingRequest) -> Result<Ruling, LedgerError> {
        let ruling = self.derive_ruling(terms, req)?;
        self.apply_ruling(&ruling)?;
        Ok(ruling)
    }

    /// `inflow = remaining + paid + refunded + burned`, exactly.
    pub fn check_conservation(&self) -> bool {
        let remaining: Amount =
            self.deposits.values().sum::<Amount>() + self.external_bonds.values().sum::<Amount>();
        let paid: Amount = self.paid_out.values().sum();
        let refunded: Amount = self.refunded.values().sum();
        self.total_inflow == remaining + paid + refunded + self.burned_total
    }

    /// Current deposit plus cumulative rewards for a participant.
    pub fn holdings(&self, e: EntityId) -> Amount {
        self.balance(e) + self.paid_out.get(&e).copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: fn(u32) -> EntityId = EntityId::Participant;

    fn funded(n: u32, d: Amount) -> EscrowLedger {
        let mut l = EscrowLedger::new();
        for i in 1..=n {
            l.deposit(i, d).unwrap();
        }
        l
    }

    fn terms(n: u32, t: u32, d: Amount) -> EscrowTerms {
        EscrowTerms { n, t, deposit: d, framing_reward: FramingReward::Full }
    }

    #[test]
    fn deposits() {
        let mut l = EscrowLedger::new();
        l.deposit(3, 10_000).unwrap();
        assert_eq!(l.deposits[&3], 10_000);
        assert_eq!(l.deposit(3, 10_000), Err(LedgerError::DuplicateDeposit(P(3))));
        assert_eq!(l.deposit(4, 0), Err(LedgerError::ZeroDeposit));
        assert_eq!(funded(5, 100).total_inflow, 500);
    }

    #[test]
    fn justified_cm1_pays_everyone_else() {
        // Δ = 100 units at milli scale
        let mut l = funded(5, 100 * UNIT);
        let r = l
            .derive_and_apply(
                &terms(5, 2, 100 * UNIT),
                RulingRequest { kind: ComplaintKind::Cm1, justified: true, prover: P(1), accused: Some(2) },
            )
            .unwrap();
        assert_eq!(r.slashed, vec![(P(2), 100_000)]);
        assert_eq!(r.rewards, vec![(P(1), 12_500), (P(3), 12_500), (P(4), 12_500), (P(5), 12_500)]);
        assert_eq!(r.burn, 50_000);
        assert_eq!(r.net_slashed(), vec![P(2)]);
        assert!(l.check_conservation());
    }

    #[test]
    fn justified_cm4_pays_prover_half() {
        let mut l = funded(5, 100);
        let r = l
            .derive_and_apply(
                &terms(5, 2, 100),
                RulingRequest { kind: ComplaintKind::Cm4, justified: true, prover: P(4), accused: Some(2) },
            )
            .unwrap();
        assert_eq!(r.net_deltas(), vec![(P(2), -100), (P(4), 50)]);
        assert_eq!(r.burn, 50);
    }

    #[test]
    fn unjust_complaint_slashes_prover() {
        let mut l = funded(5, 100 * UNIT);
        let r = l
            .derive_and_apply(
                &terms(5, 2, 100 * UNIT),
                RulingRequest { kind: ComplaintKind::Cm4, justified: false, prover: P(3), accused: Some(1) },
            )
            .unwrap();
        assert_eq!(r.net_slashed(), vec![P(3)]);
        assert_eq!(r.burn, 50_000);
        assert_eq!(r.rewards.len(), 4);
    }

    #[test]
    fn unjust_external_complaint_splits_over_all_participants() {
        let mut l = funded(5, 100 * UNIT);
        l.bond(1, 100 * UNIT).unwrap();
        let r = l
            .derive_and_apply(
                &terms(5, 2, 100 * UNIT),
                RulingRequest {
                    kind: ComplaintKind::Cm2,
                    justified: false,
                    prover: EntityId::External(1),
                    accused: Some(2),
                },
            )
            .unwrap();
        assert_eq!(r.rewards.len(), 5);
        assert!(r.rewards.iter().all(|(_, a)| *a == 10_000));
        assert_eq!(r.burn, 50_000);
        assert!(l.check_conservation());
    }

    #[test]
    fn framing_by_external_burns_n_minus_t() {
        let mut l = funded(5, 100);
        l.bond(7, 100).unwrap();
        let r = l
            .derive_and_apply(
                &terms(5, 3, 100),
                RulingRequest { kind: ComplaintKind::Fm, justified: true, prover: EntityId::External(7), accused: None },
            )
            .unwrap();
        assert_eq!(r.slashed.len(), 5);
        assert_eq!(r.rewards, vec![(EntityId::External(7), 300)]);
        assert_eq!(r.burn, 200);
        assert_eq!(l.release_bond(7), 100);
        assert!(l.check_conservation());
    }

    #[test]
    fn framing_by_participant_burns_n_minus_t_minus_one() {
        let mut l = funded(5, 100);
        let r = l
            .derive_and_apply(
                &terms(5, 3, 100),
                RulingRequest { kind: ComplaintKind::Fm, justified: true, prover: P(2), accused: None },
            )
            .unwrap();
        assert_eq!(r.slashed.len(), 4);
        assert_eq!(r.burn, 100);
        assert_eq!(l.holdings(P(2)), 400);
    }

    #[test]
    fn framing_reward_cannot_exceed_pool() {
        let l = funded(3, 100);
        let err = l
            .derive_ruling(
                &terms(3, 4, 100),
                RulingRequest { kind: ComplaintKind::Fm, justified: true, prover: P(1), accused: None },
            )
            .unwrap_err();
        assert!(matches!(err, LedgerError::NegativeBurn { .. }));
    }

    #[test]
    fn insufficient_deposit_is_rejected_atomically() {
        let mut l = funded(3, 100);
        let before = l.clone();
        let err = l
            .derive_and_apply(
                &terms(3, 1, 200),
                RulingRequest { kind: ComplaintKind::Cm1, justified: true, prover: P(1), accused: Some(2) },
            )
            .unwrap_err();
        assert_eq!(err, LedgerError::InsufficientDeposit(P(2)));
        assert_eq!(l, before);
    }

    #[test]
    fn noncooperation_burns_everything() {
        let mut l = funded(4, 100);
        let r = l
            .derive_and_apply(
                &terms(4, 2, 100),
                RulingRequest { kind: ComplaintKind::NonCooperation, justified: true, prover: P(1), accused: None },
            )
            .unwrap();
        assert_eq!(r.burn, 400);
        assert!(l.deposits.values().all(|a| *a == 0));
    }

    #[test]
    fn refund_returns_deposits_without_burn() {
        let mut l = funded(4, 100);
        l.refund_all();
        assert_eq!(l.burned_total, 0);
        assert_eq!(l.refunded.values().sum::<Amount>(), 400);
        assert!(l.check_conservation());
    }

    #[test]
    fn entity_ids_round_trip() {
        assert_eq!("P3".parse::<EntityId>().unwrap(), P(3));
        assert_eq!(EntityId::External(1).to_string(), "X1");
        assert!("Q1".parse::<EntityId>().is_err());
        assert_eq!(serde_json::to_string(&P(12)).unwrap(), "\"P12\"");
    }

    fn kind_strategy() -> impl Strategy<Value = ComplaintKind> {
        prop_oneof![
            Just(ComplaintKind::Cm1),
            Just(ComplaintKind::Cm2),
            Just(ComplaintKind::Cm3),
            Just(ComplaintKind::Cm4),
            Just(ComplaintKind::Cm5),
            Just(ComplaintKind::EthCm1),
            Just(ComplaintKind::EthCm2),
            Just(ComplaintKind::EthCm3),
            Just(ComplaintKind::EthCm4),
        ]
    }

    proptest! {
        #[test]
        fn conservation_and_positive_burn(
            n in 3u32..12,
            d in 1u64..10_000,
            rulings in proptest::collection::vec((kind_strategy(), any::<bool>(), 1u32..12, 1u32..12), 1..6),
        ) {
            let d = d * UNIT;
            let mut l = funded(n, 10 * d);
            let terms = terms(n, n / 2, d);
            for (kind, justified, p, a) in rulings {
                let (p, a) = ((p - 1) % n + 1, (a - 1) % n + 1);
                if p == a { continue; }
                let req = RulingRequest { kind, justified, prover: P(p), accused: Some(a) };
                if let Ok(r) = l.derive_and_apply(&terms, req) {
                    prop_assert!(r.burn > 0);
                    prop_assert!(r.burn >= d / 2);
                    prop_assert_eq!(r.net_slashed().len(), 1);
                }
                prop_assert!(l.check_conservation());
            }
        }
    }
}
