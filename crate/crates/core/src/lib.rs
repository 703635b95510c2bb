pub mod beacon;
pub mod behavior;
pub mod dispute;
pub mod dkg;
pub mod economics;
pub mod escrow_dkg;
pub mod eth_dkg;
pub mod group;
pub mod hashing;
pub mod ledger;
pub mod ped_dkg;
pub mod sharing;
pub mod sim;
pub mod transcript;

pub use beacon::{aggregate, elect_leader, sign_share, verify_aggregate, BeaconState, EarlyBeacon};
pub use behavior::{Behavior, WithheldTx};
pub use dispute::{naive_arbitrate, run_dispute, ChallengerStrategy, CostCounters, DisputeCase, ProverStrategy};
pub use dkg::{DkgConfig, DkgOutput};
pub use economics::{full_report, EconParams, EconReport, Money};
pub use escrow_dkg::{run_escrow_dkg, EscrowDkg, Phase};
pub use eth_dkg::{run_eth_dkg, EthDkg};
pub use group::{Backend, GroupElement, GroupSuite, GroupTag, Scalar, ScalarField};
pub use ledger::{Amount, ComplaintKind, EntityId, EscrowLedger, FramingReward, UNIT};
pub use ped_dkg::run_ped_dkg;
pub use sim::{differential_run, run_scenario, Outcome, Protocol, Scenario, Summary};
pub use transcript::Transcript;
