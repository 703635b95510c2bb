//! Pedersen DKG over a reliable broadcast channel, with complaint-driven
//! QUAL. Serves as the correctness oracle for the escrow protocols.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::behavior::Behavior;
use crate::dkg::{DkgConfig, DkgOutput, ParticipantSecrets};
use crate::group::{GroupElement, GroupSuite, Scalar};
use crate::sharing::{index_scalar, verify_subshare, CommitmentVector};
use crate::transcript::Transcript;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PedDkgOutcome {
    pub qual: BTreeSet<u32>,
    pub secret_shares: BTreeMap<u32, Scalar>,
    pub public_key: GroupElement,
    pub public_shares: BTreeMap<u32, GroupElement>,
    /// `(complainer, dealer)` pairs in filing order.
    pub complaints: Vec<(u32, u32)>,
    pub transcript: Transcript,
}

impl PedDkgOutcome {
    pub fn to_output(&self, n: u32, t: u32) -> DkgOutput {
        DkgOutput {
            n,
            t,
            shares: self.secret_shares.clone(),
            public_key: self.public_key,
            public_shares: self.public_shares.clone(),
            qualified: self.qual.iter().copied().collect(),
        }
    }
}

const STEP_BROADCAST: u64 = 1;
const STEP_SHARES: u64 = 2;
const STEP_COMPLAIN: u64 = 3;
const STEP_OUTPUT: u64 = 4;

fn actor(i: u32) -> String {
    format!("P{i}")
}

pub fn run_ped_dkg(
    suite: &GroupSuite,
    config: &DkgConfig,
    seed: u64,
    behaviors: &[Behavior],
) -> Result<PedDkgOutcome, String> {
    config.validate()?;
    let (n, t) = (config.n, config.t as usize);
    if behaviors.len() != n as usize {
        return Err(format!("expected {n} behaviors, got {}", behaviors.len()));
    }
    let field = suite.field();
    let tag = config.commit_tag;
    let secrets = ParticipantSecrets::derive_all(suite, seed, n, config.t);
    let behavior = |i: u32| behaviors[(i - 1) as usize];
    let mut transcript = Transcript::new();

    // 1. broadcast commitments
    let mut commitments: BTreeMap<u32, CommitmentVector> = BTreeMap::new();
    for s in &secrets {
        let i = s.index;
        if behavior(i).withholds_commitments() {
            continue;
        }
        let mut c = CommitmentVector::commit(suite, &s.polynomial, tag);
        if let Behavior::NonmemberCommitment { k } = behavior(i) {
            if k <= t {
                c.elements[k] = suite.non_member(tag);
            }
        }
        transcript.push(STEP_BROADCAST, actor(i), "broadcast_commitments", &c.to_bytes(), json!({"t": t}));
        commitments.insert(i, c);
    }

    // 2. private sub-shares
    let mut received: BTreeMap<(u32, u32), Scalar> = BTreeMap::new();
    for s in &secrets {
        let i = s.index;
        for j in 1..=n {
            if j != i && behavior(i).withholds_subshare_to(j) {
                continue;
            }
            let mut x = s.polynomial.evaluate_at(j);
            if behavior(i) == (Behavior::InconsistentSubshare { recipient: j }) {
                x = field.add(&x, &field.one());
            }
            received.insert((i, j), x);
            if i != j {
                transcript.push(STEP_SHARES, actor(i), "private_subshare", &x.to_be_bytes(), json!({"to": j}));
            }
        }
    }

    // 3. complaints and reveals
    let mut disqualified: BTreeSet<u32> = (1..=n).filter(|i| !commitments.contains_key(i)).collect();
    for i in &disqualified {
        transcript.push(STEP_COMPLAIN, "broadcast", "disqualified", &i.to_be_bytes(), json!({"dealer": i, "reason": "no_commitments"}));
    }
    let mut complaints: Vec<(u32, u32)> = Vec::new();
    for j in 1..=n {
        for (&i, c) in &commitments {
            if i == j {
                continue;
            }
            let bad = received.get(&(i, j)).map_or(true, |x| !verify_subshare(suite, j, x, c));
            let scripted = matches!(behavior(j), Behavior::UnjustComplainer { target, .. } if target == i);
            if (bad && behavior(j).complains()) || scripted {
                complaints.push((j, i));
                transcript.push(STEP_COMPLAIN, actor(j), "complaint", &i.to_be_bytes(), json!({"dealer": i}));
            }
        }
    }
    let mut revealed: BTreeMap<(u32, u32), Scalar> = BTreeMap::new();
    for (&i, c) in &commitments {
        let against: Vec<u32> = complaints.iter().filter(|(_, d)| *d == i).map(|(j, _)| *j).collect();
        if against.is_empty() {
            continue;
        }
        if against.len() > t {
            disqualified.insert(i);
            transcript.push(
                STEP_COMPLAIN,
                "broadcast",
                "disqualified",
                &i.to_be_bytes(),
                json!({"dealer": i, "reason": "too_many_complaints", "complaints": against.len()}),
            );
            continue;
        }
        for j in against {
            if behavior(i).withholds_subshare_to(j) {
                disqualified.insert(i);
                transcript.push(STEP_COMPLAIN, "broadcast", "disqualified", &i.to_be_bytes(), json!({"dealer": i, "reason": "missing_reveal", "recipient": j}));
                break;
            }
            let x = secrets[(i - 1) as usize].polynomial.evaluate_at(j);
            transcript.push(STEP_COMPLAIN, actor(i), "reveal", &x.to_be_bytes(), json!({"recipient": j}));
            if verify_subshare(suite, j, &x, c) {
                revealed.insert((i, j), x);
            } else {
                disqualified.insert(i);
                transcript.push(STEP_COMPLAIN, "broadcast", "disqualified", &i.to_be_bytes(), json!({"dealer": i, "reason": "bad_reveal", "recipient": j}));
                break;
            }
        }
    }

    // 4. output over QUAL
    let qual: BTreeSet<u32> = (1..=n).filter(|i| !disqualified.contains(i)).collect();
    let mut secret_shares = BTreeMap::new();
    for j in 1..=n {
        let x = qual.iter().fold(field.zero(), |acc, i| {
            let share = revealed
                .get(&(*i, j))
                .or_else(|| received.get(&(*i, j)))
                .copied()
                .unwrap_or_else(|| field.zero());
            field.add(&acc, &share)
        });
        secret_shares.insert(j, x);
    }
    let mut public_key = suite.identity(tag);
    for i in &qual {
        public_key = suite.mul(&public_key, &commitments[i].elements[0]).map_err(|e| e.to_string())?;
    }
    let mut public_shares = BTreeMap::new();
    for j in 1..=n {
        let mut acc = suite.identity(tag);
        for i in &qual {
            let y = commitments[i]
                .evaluate_in_exponent(suite, &index_scalar(&field, j))
                .map_err(|e| e.to_string())?;
            acc = suite.mul(&acc, &y).map_err(|e| e.to_string())?;
        }
        public_shares.insert(j, acc);
    }
    transcript.push(
        STEP_OUTPUT,
        "broadcast",
        "qual",
        &public_key.to_bytes(),
        json!({"qual": qual.iter().collect::<Vec<_>>()}),
    );
    Ok(PedDkgOutcome { qual, secret_shares, public_key, public_shares, complaints, transcript })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::WithheldTx;
    use crate::group::GroupTag;
    use crate::sharing::lagrange_interpolate;

    fn suite() -> GroupSuite {
        GroupSuite::mock(101).unwrap()
    }

    fn run(behaviors: Vec<Behavior>) -> PedDkgOutcome {
        run_ped_dkg(&suite(), &DkgConfig::new(behaviors.len() as u32, 2), 42, &behaviors).unwrap()
    }

    fn expected_secret(seed: u64, qual: &BTreeSet<u32>) -> Scalar {
        let su = suite();
        let f = su.field();
        qual.iter().fold(f.zero(), |acc, i| {
            f.add(&acc, &ParticipantSecrets::derive(&su, seed, *i, 2).polynomial.secret())
        })
    }

    #[test]
    fn honest_run_qualifies_everyone() {
        let out = run(vec![Behavior::Honest; 5]);
        assert_eq!(out.qual, (1..=5).collect());
        let f = suite().field();
        let pts: Vec<_> = [1u32, 3, 5].iter().map(|j| (f.from_u64(*j as u64), out.secret_shares[j])).collect();
        let x = lagrange_interpolate(&f, &pts, &f.zero()).unwrap();
        assert_eq!(x, expected_secret(42, &out.qual));
        assert_eq!(out.public_key.mock_value(), x.to_u64());
    }

    #[test]
    fn revealed_share_keeps_dealer_in_qual() {
        let mut b = vec![Behavior::Honest; 5];
        b[1] = Behavior::InconsistentSubshare { recipient: 4 };
        let out = run(b);
        assert_eq!(out.complaints, vec![(4, 2)]);
        assert!(out.qual.contains(&2));
        let su = suite();
        let g = su.generator(GroupTag::G2);
        for (j, x) in &out.secret_shares {
            assert_eq!(su.exp(&g, x).unwrap(), out.public_shares[j]);
        }
    }

    #[test]
    fn more_than_t_complaints_disqualify() {
        let mut b = vec![Behavior::Honest; 5];
        b[1] = Behavior::Withhold { tx: WithheldTx::SubShares, target: None };
        let out = run(b);
        assert_eq!(out.qual, [1, 3, 4, 5].into_iter().collect());
        assert_eq!(out.public_key.mock_value(), expected_secret(42, &out.qual).to_u64());
    }

    #[test]
    fn missing_reveal_disqualifies() {
        let mut b = vec![Behavior::Honest; 5];
        b[2] = Behavior::Withhold { tx: WithheldTx::SubShares, target: Some(1) };
        let out = run(b);
        assert!(!out.qual.contains(&3));
        assert!(out.transcript.find("disqualified").any(|e| e.detail["reason"] == "missing_reveal"));
    }

    #[test]
    fn nonmember_commitment_draws_everyone() {
        let mut b = vec![Behavior::Honest; 5];
        b[0] = Behavior::NonmemberCommitment { k: 1 };
        let out = run(b);
        assert!(!out.qual.contains(&1));
    }

    #[test]
    fn public_shares_match_every_qualified_share() {
        let out = run_ped_dkg(&suite(), &DkgConfig::new(6, 2), 7, &[Behavior::Honest; 6]).unwrap();
        let su = suite();
        let g = su.generator(GroupTag::G2);
        for j in 1..=6 {
            assert_eq!(su.exp(&g, &out.secret_shares[&j]).unwrap(), out.public_shares[&j]);
        }
    }
}
