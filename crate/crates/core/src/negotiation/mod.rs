//! Pre-vote side payments: the payoff update, payoff redistribution inside
//! a coalition, the commitment and deviation transfers, survival of
//! equilibria, a brute-force grid oracle and integrity-constraint analysis.

mod constructions;
mod oracle;
mod paradox;
mod survival;
mod transfer;

pub use constructions::{
    commitment_transfer, deviation_transfer, deviation_transfer_capped, payoff_bound_m,
    redistribute_capped, redistribute_for_coalition, verify_commitment, verify_commitment_capped,
    verify_refutation, CommitmentReport, Redistribution, RefutationCheck,
};
pub use oracle::{
    grid_spe_oracle, grid_spe_oracle_capped, GridSpec, OracleOutcome, OracleReport, Selection,
    SlotGroup, DEFAULT_GRID_CAP,
};
pub use paradox::{paradox_analysis, paradox_analysis_capped, ParadoxReport, ParadoxRow};
pub use survival::{check_surviving, check_surviving_capped, EndogenousGame, SurvivalStatus};
pub use transfer::{apply_transfers, apply_transfers_capped, TransferProfile};
