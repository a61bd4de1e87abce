use crate::error::Result;
use crate::game::{AggregationGame, GameTable};
use crate::logic::{entails, Formula};
use crate::model::{Ballot, BallotProfile, Coalition, DEFAULT_PROFILE_BITS_CAP};

use super::survival::{check_surviving_capped, EndogenousGame, SurvivalStatus};

/// One equilibrium under an integrity constraint.
#[derive(Debug, Clone)]
pub struct ParadoxRow {
    pub profile: BallotProfile,
    pub outcome: Ballot,
    pub outcome_admissible: bool,
    pub ballots_admissible: Vec<bool>,
    /// Survival status, or the reason it could not be computed.
    pub status: std::result::Result<SurvivalStatus, String>,
}

impl ParadoxRow {
    /// Admissible individual ballots, inadmissible collective outcome.
    pub fn is_paradox(&self) -> bool {
        !self.outcome_admissible && self.ballots_admissible.iter().all(|&a| a)
    }
}

#[derive(Debug, Clone)]
pub struct ParadoxReport {
    /// Voters whose goal entails the constraint.
    pub responsible: Coalition,
    pub consistent: bool,
    /// Consistent goals plus a responsible voter: every surviving equilibrium
    /// has an admissible outcome.
    pub guaranteed: bool,
    pub rows: Vec<ParadoxRow>,
}

pub fn paradox_analysis(game: &AggregationGame, ic: &Formula) -> Result<ParadoxReport> {
    paradox_analysis_capped(game, ic, DEFAULT_PROFILE_BITS_CAP)
}

pub fn paradox_analysis_capped(game: &AggregationGame, ic: &Formula, cap: usize) -> Result<ParadoxReport> {
    let m = game.issues();
    let n = game.voters();
    let mut responsible = Coalition::EMPTY;
    for i in 0..n {
        if entails(game.goal(i).formula(), ic, m)? {
            responsible = responsible.with(i);
        }
    }
    let consistent = game.all_cubes() && game.coalition_consistency(Coalition::grand(n))?.is_consistent();
    let endo = EndogenousGame::new(game.clone());
    let table = GameTable::new(game, cap)?;
    let mut rows = Vec::new();
    for idx in table.nash_indices() {
        let profile = table.space().profile(idx);
        let outcome = Ballot::from_code(table.outcome(idx), m);
        let status = match &endo {
            Ok(e) => check_surviving_capped(e, &profile, cap).map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        };
        rows.push(ParadoxRow {
            outcome_admissible: ic.eval(&outcome),
            ballots_admissible: profile.ballots().iter().map(|b| ic.eval(b)).collect(),
            profile,
            outcome,
            status,
        });
    }
    Ok(ParadoxReport {
        responsible,
        consistent,
        guaranteed: consistent && !responsible.is_empty(),
        rows,
    })
}
