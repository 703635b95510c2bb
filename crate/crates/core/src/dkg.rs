//! Pieces shared by the three DKG drivers: per-participant secrets derived
//! from the run seed, run configuration, and the common output shape.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, GroupSuite, GroupTag, Scalar};
use crate::hashing::derive_rng;
use crate::ledger::{Amount, EscrowTerms, FramingReward, UNIT};
use crate::sharing::{ElGamalKeyPair, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkgConfig {
    pub n: u32,
    pub t: u32,
    /// Milli-units.
    pub deposit: Amount,
    /// Blocks per phase (δ).
    pub epoch: u64,
    pub commit_tag: GroupTag,
    pub framing_reward: FramingReward,
}

impl DkgConfig {
    pub fn new(n: u32, t: u32) -> Self {
        DkgConfig {
            n,
            t,
            deposit: 10_000 * UNIT,
            epoch: 10,
            commit_tag: GroupTag::G2,
            framing_reward: FramingReward::Full,
        }
    }

    pub fn terms(&self) -> EscrowTerms {
        EscrowTerms { n: self.n, t: self.t, deposit: self.deposit, framing_reward: self.framing_reward }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.t == 0 {
            return Err("t must be at least 1".into());
        }
        if self.n <= self.t {
            return Err(format!("need n > t (n={}, t={})", self.n, self.t));
        }
        if self.n < 2 {
            return Err("need at least two participants".into());
        }
        if self.deposit == 0 {
            return Err("deposit must be positive".into());
        }
        if self.epoch == 0 {
            return Err("epoch must be at least one block".into());
        }
        Ok(())
    }
}

/// A participant's private material. Identical across protocols for the
/// same `(seed, index)`, which is what makes differential runs meaningful.
#[derive(Debug, Clone)]
pub struct ParticipantSecrets {
    pub index: u32,
    pub polynomial: Polynomial,
    pub enc: ElGamalKeyPair,
}

impl ParticipantSecrets {
    pub fn derive(suite: &GroupSuite, seed: u64, index: u32, t: u32) -> Self {
        let polynomial = Polynomial::random(
            suite.field(),
            t as usize,
            &mut derive_rng(seed, "polynomial", index as u64),
        )
        .expect("t >= 1 is validated by the caller");
        let enc = ElGamalKeyPair::generate(suite, &mut derive_rng(seed, "enc-key", index as u64));
        ParticipantSecrets { index, polynomial, enc }
    }

    pub fn derive_all(suite: &GroupSuite, seed: u64, n: u32, t: u32) -> Vec<ParticipantSecrets> {
        (1..=n).map(|i| Self::derive(suite, seed, i, t)).collect()
    }
}

/// Key material produced by a successful DKG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkgOutput {
    pub n: u32,
    pub t: u32,
    pub shares: BTreeMap<u32, Scalar>,
    pub public_key: GroupElement,
    pub public_shares: BTreeMap<u32, GroupElement>,
    pub qualified: Vec<u32>,
}
