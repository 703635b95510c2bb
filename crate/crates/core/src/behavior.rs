//! Scripted participant behaviours shared by every protocol driver.

use serde::{Deserialize, Serialize};

use crate::ledger::ComplaintKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WithheldTx {
    Commitments,
    SubShares,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Behavior {
    #[default]
    Honest,
    /// Omits the commitments, or the sub-share for `target` (every recipient when absent).
    Withhold {
        tx: WithheldTx,
        #[serde(default)]
        target: Option<u32>,
    },
    /// Enrolls with a hash commitment to a different `X_0`.
    BadHashCommit,
    /// Publishes a non-member at coefficient index `k`.
    NonmemberCommitment { k: usize },
    /// Sends `f(recipient) + 1` to `recipient`.
    InconsistentSubshare { recipient: u32 },
    /// Publishes a `(G1, G2)` pair with different exponents at `k0`.
    InconsistentDualPair { k0: usize },
    /// Sends `recipient` a commitment copy that differs from the digest.
    DigestMismatch { recipient: u32 },
    /// Files a complaint of `complaint` kind against an honest `target`.
    UnjustComplainer { complaint: ComplaintKind, target: u32 },
    /// Follows the protocol but never complains.
    SilentNonComplainer,
    /// Pools its share with the rest of `group` during the application stage.
    Colluder { group: u32 },
    /// Colluder that files the framing complaint once the height reaches `trigger_height`.
    Framer { group: u32, trigger_height: u64 },
    /// Withholds signature shares during the application stage.
    SilentNoncooperator,
}

impl Behavior {
    pub fn complains(&self) -> bool {
        !matches!(self, Behavior::SilentNonComplainer)
    }

    pub fn collusion_group(&self) -> Option<u32> {
        match self {
            Behavior::Colluder { group } | Behavior::Framer { group, .. } => Some(*group),
            _ => None,
        }
    }

    pub fn is_fault(&self) -> bool {
        !matches!(
            self,
            Behavior::Honest
                | Behavior::SilentNonComplainer
                | Behavior::Colluder { .. }
                | Behavior::Framer { .. }
                | Behavior::SilentNoncooperator
        )
    }

    pub fn withholds_commitments(&self) -> bool {
        matches!(self, Behavior::Withhold { tx: WithheldTx::Commitments, .. })
    }

    pub fn withholds_subshare_to(&self, j: u32) -> bool {
        matches!(self, Behavior::Withhold { tx: WithheldTx::SubShares, target } if target.map_or(true, |t| t == j))
    }
}
