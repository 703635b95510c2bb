//! Threshold BLS over a type-3 pairing (messages and signatures in G1, keys
//! in G2), the chained randomness beacon `RS^{r+1} = sig(RS^r)`, and
//! beacon-driven leader election.
//!
//! Unforgeability rests on a co-CDH style assumption and is not tested here;
//! with the mock backend or the exposed-dlog `hash_to_g1` it does not hold.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupSuite, GroupTag, Scalar};
use crate::hashing::{hex_bytes, sha256};
use crate::sharing::{index_scalar, lagrange_coefficients, SharingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BeaconError {
    #[error("need {needed} valid signature shares, got {valid}")]
    InsufficientShares { needed: usize, valid: usize },
    #[error("round {round} is scheduled for height {scheduled}, current height is {height}")]
    EarlyRelease { round: u64, height: u64, scheduled: u64 },
    #[error("round {0} is beyond the configured schedule")]
    BeyondSchedule(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Sharing(#[from] SharingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureShare {
    pub signer: u32,
    pub sigma: GroupElement,
}

/// `σ_i = H1(m)^{x_i}`.
pub fn sign_share(suite: &GroupSuite, m: &[u8], signer: u32, x_i: &Scalar) -> SignatureShare {
    let sigma = suite.exp(&suite.hash_to_g1(m), x_i).expect("hash point is a member");
    SignatureShare { signer, sigma }
}

fn pairing_check(suite: &GroupSuite, m: &[u8], sigma: &GroupElement, pk: &GroupElement) -> bool {
    if sigma.tag() != GroupTag::G1 || pk.tag() != GroupTag::G2 {
        return false;
    }
    let lhs = suite.pairing(sigma, &suite.generator(GroupTag::G2));
    let rhs = suite.pairing(&suite.hash_to_g1(m), pk);
    matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
}

/// `e(σ_i, g2) = e(H1(m), pk_i)`.
pub fn verify_share(suite: &GroupSuite, m: &[u8], share: &SignatureShare, pk_i: &GroupElement) -> bool {
    pairing_check(suite, m, &share.sigma, pk_i)
}

pub fn verify_aggregate(suite: &GroupSuite, m: &[u8], sigma: &GroupElement, pk: &GroupElement) -> bool {
    pairing_check(suite, m, sigma, pk)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateSignature {
    pub sigma: GroupElement,
    pub signers: Vec<u32>,
    /// Signers whose share failed verification or was a duplicate.
    pub rejected: Vec<u32>,
}

/// Verifies each share against its public share, then combines the `t+1`
/// lowest-indexed valid shares with Lagrange coefficients at 0.
pub fn aggregate(
    suite: &GroupSuite,
    m: &[u8],
    shares: &[SignatureShare],
    public_shares: &BTreeMap<u32, GroupElement>,
    t: u32,
) -> Result<AggregateSignature, BeaconError> {
    let mut valid: BTreeMap<u32, GroupElement> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let mut rejected = Vec::new();
    for s in shares {
        let ok = seen.insert(s.signer)
            && public_shares.get(&s.signer).is_some_and(|pk| verify_share(suite, m, s, pk));
        if ok {
            valid.insert(s.signer, s.sigma);
        } else {
            rejected.push(s.signer);
        }
    }
    let needed = t as usize + 1;
    if valid.len() < needed {
        return Err(BeaconError::InsufficientShares { needed, valid: valid.len() });
    }
    let chosen: Vec<(u32, GroupElement)> = valid.into_iter().take(needed).collect();
    let field = suite.field();
    let indices: Vec<Scalar> = chosen.iter().map(|(i, _)| index_scalar(&field, *i)).collect();
    let lambdas = lagrange_coefficients(&field, &indices, &field.zero())?;
    let mut sigma = suite.identity(GroupTag::G1);
    for ((_, s), l) in chosen.iter().zip(&lambdas) {
        sigma = suite.mul(&sigma, &suite.exp(s, l)?)?;
    }
    Ok(AggregateSignature { sigma, signers: chosen.iter().map(|(i, _)| *i).collect(), rejected })
}

/// `1 + (digest(rs) mod n)`, reading the digest as a big-endian integer.
pub fn elect_leader(rs: &[u8], n: u32) -> u32 {
    assert!(n >= 1, "leader election needs at least one participant");
    let d = sha256(rs);
    let r = d.iter().fold(0u64, |acc, b| (acc * 256 + *b as u64) % n as u64);
    1 + r as u32
}

/// The beacon chain. `values[r]` is `RS^r`; `schedule[r]` is the first
/// height at which round `r` may be released (`schedule[0]` belongs to `RS^0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeaconState {
    #[serde(with = "hex_values")]
    pub values: Vec<Vec<u8>>,
    pub schedule: Vec<u64>,
}

mod hex_values {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<u8>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(hex::encode))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<u8>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|h| hex::decode(h).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl BeaconState {
    pub fn new(rs0: Vec<u8>, schedule: Vec<u64>) -> Self {
        BeaconState { values: vec![rs0], schedule }
    }

    /// Rounds `1..=rounds` released every `interval` blocks after `start`.
    pub fn with_interval(rs0: Vec<u8>, rounds: u64, start: u64, interval: u64) -> Self {
        Self::new(rs0, (0..=rounds).map(|r| start + r * interval).collect())
    }

    /// Index of the latest released value.
    pub fn round(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn current(&self) -> &[u8] {
        self.values.last().expect("RS^0 is always present")
    }

    pub fn scheduled(&self, round: u64) -> Option<u64> {
        self.schedule.get(round as usize).copied()
    }

    /// Aggregates shares over `RS^r` and appends `RS^{r+1}`.
    pub fn beacon_next(
        &mut self,
        suite: &GroupSuite,
        height: u64,
        shares: &[SignatureShare],
        public_shares: &BTreeMap<u32, GroupElement>,
        t: u32,
    ) -> Result<AggregateSignature, BeaconError> {
        let next = self.round() + 1;
        let scheduled = self.scheduled(next).ok_or(BeaconError::BeyondSchedule(next))?;
        if height < scheduled {
            return Err(BeaconError::EarlyRelease { round: next, height, scheduled });
        }
        let agg = aggregate(suite, self.current(), shares, public_shares, t)?;
        self.values.push(agg.sigma.to_bytes());
        Ok(agg)
    }
}

/// A beacon value released ahead of schedule: checkable collusion evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarlyBeacon {
    pub round: u64,
    #[serde(with = "hex_bytes")]
    pub message: Vec<u8>,
    pub signature: GroupElement,
}
