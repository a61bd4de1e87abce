use std::fmt;

use crate::error::{Error, Result};
use crate::game::{is_nash, AggregationGame, Verdict};
use crate::logic::Consistency;
use crate::model::{Ballot, BallotProfile, Coalition, DEFAULT_PROFILE_BITS_CAP};

use super::constructions::{
    commitment_transfer, deviation_transfer_capped, require_cubes, require_systematic_monotonic,
    require_uniform, verify_commitment_capped, verify_refutation, CommitmentReport, RefutationCheck,
};
use super::transfer::TransferProfile;

/// A uniform game extended with a transfer stage before the vote.
#[derive(Debug, Clone)]
pub struct EndogenousGame {
    base: AggregationGame,
}

impl EndogenousGame {
    pub fn new(base: AggregationGame) -> Result<Self> {
        require_uniform(&base)?;
        Ok(Self { base })
    }

    pub fn base(&self) -> &AggregationGame {
        &self.base
    }
}

#[derive(Debug, Clone)]
pub enum SurvivalStatus {
    /// Sustained by the commitment transfer.
    Certified {
        witness: TransferProfile,
        report: Box<CommitmentReport>,
    },
    /// `deviator` profitably replaces her part of the commitment transfer
    /// with offers pinning everyone else to `target`.
    Refuted {
        deviator: usize,
        coalition: Coalition,
        target: Ballot,
        witness: TransferProfile,
        check: Box<RefutationCheck>,
    },
    /// Neither construction applies or verifies.
    Unknown { reason: String },
}

impl SurvivalStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SurvivalStatus::Certified { .. } => "CERTIFIED",
            SurvivalStatus::Refuted { .. } => "REFUTED",
            SurvivalStatus::Unknown { .. } => "UNKNOWN",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, SurvivalStatus::Certified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, SurvivalStatus::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&TransferProfile> {
        match self {
            SurvivalStatus::Certified { witness, .. } | SurvivalStatus::Refuted { witness, .. } => Some(witness),
            SurvivalStatus::Unknown { .. } => None,
        }
    }
}

impl fmt::Display for SurvivalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurvivalStatus::Certified { witness, .. } => {
                write!(f, "CERTIFIED ({} transfer entries)", witness.len())
            }
            SurvivalStatus::Refuted {
                deviator,
                coalition,
                target,
                ..
            } => write!(
                f,
                "REFUTED (voter {} for coalition {coalition} toward {})",
                deviator + 1,
                target.spaced()
            ),
            SurvivalStatus::Unknown { reason } => write!(f, "UNKNOWN ({reason})"),
        }
    }
}

pub fn check_surviving(endo: &EndogenousGame, b: &BallotProfile) -> Result<SurvivalStatus> {
    check_surviving_capped(endo, b, DEFAULT_PROFILE_BITS_CAP)
}

/// Decides survival of the equilibrium `b` where the commitment and
/// deviation constructions reach.
///
/// Consistent winning coalitions whose goals `b` misses are tried largest
/// first; the first one whose deviation transfer verifies refutes `b`.
/// Otherwise an efficient `b` of a fully consistent game is certified by
/// the commitment transfer.
pub fn check_surviving_capped(endo: &EndogenousGame, b: &BallotProfile, cap: usize) -> Result<SurvivalStatus> {
    let game = endo.base();
    game.check_profile(b)?;
    require_cubes(game)?;
    let winning = require_systematic_monotonic(game, cap)?;
    if let Verdict::Fails(d) = is_nash(game, b)? {
        return Err(Error::precondition(
            "nash profile",
            format!("voter {} improves by voting {}", d.voter + 1, d.ballot.spaced()),
        ));
    }
    let outcome = game.outcome(b)?;
    let n = game.voters();

    let mut candidates: Vec<(Coalition, Ballot)> = Vec::new();
    for &c in winning.iter() {
        if game.efficient(c, &outcome) {
            continue;
        }
        if let Consistency::Consistent(w) = game.coalition_consistency(c)? {
            candidates.push((c, w));
        }
    }
    candidates.sort_by_key(|(c, _)| (std::cmp::Reverse(c.len()), c.mask()));

    let mut failures = Vec::new();
    if !candidates.is_empty() {
        let tau_star = commitment_transfer(game, b)?;
        for (c, target) in candidates {
            let deviator = c
                .members()
                .find(|&i| !game.goal(i).holds(&outcome))
                .expect("coalition goal is violated by some member");
            let tau = deviation_transfer_capped(game, deviator, &target, &tau_star, cap)?;
            let check = verify_refutation(game, c, deviator, &target, &tau, cap)?;
            if check.passed() {
                return Ok(SurvivalStatus::Refuted {
                    deviator,
                    coalition: c,
                    target,
                    witness: tau,
                    check: Box::new(check),
                });
            }
            failures.push(format!("deviation for {c} does not verify"));
        }
        return Ok(SurvivalStatus::Unknown {
            reason: failures.join("; "),
        });
    }

    let grand = Coalition::grand(n);
    if !game.coalition_consistency(grand)?.is_consistent() {
        return Ok(SurvivalStatus::Unknown {
            reason: "goals are jointly inconsistent and no consistent winning coalition is missed".into(),
        });
    }
    if !game.efficient(grand, &outcome) {
        return Ok(SurvivalStatus::Unknown {
            reason: "profile is not efficient for all voters".into(),
        });
    }
    let witness = commitment_transfer(game, b)?;
    let report = verify_commitment_capped(game, b, &witness, cap)?;
    match report.failure() {
        None => Ok(SurvivalStatus::Certified {
            witness,
            report: Box::new(report),
        }),
        Some(reason) => Ok(SurvivalStatus::Unknown {
            reason: format!("commitment does not verify: {reason}"),
        }),
    }
}
