use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{is_uniform, AggregationGame, Deviation, DominanceWitness, GameTable, PayoffTable};
use crate::model::{
    systematic_family, winning_coalitions, Ballot, BallotProfile, Coalition, CoalitionFamily,
    DEFAULT_PROFILE_BITS_CAP,
};
use crate::rational::{int, Q};

use super::transfer::{apply_transfers_capped, TransferProfile};

pub(crate) fn require_uniform(game: &AggregationGame) -> Result<()> {
    if !is_uniform(game)? {
        return Err(Error::precondition("uniform game", "payoffs depend on more than the outcome"));
    }
    Ok(())
}

/// Winning coalitions of a systematic, monotonic aggregator.
pub(crate) fn require_systematic_monotonic(game: &AggregationGame, cap: usize) -> Result<CoalitionFamily> {
    let family = match systematic_family(game.aggregator(), &game.structure(), cap) {
        Ok(f) => f,
        Err(Error::NotSystematic(w)) => {
            return Err(Error::precondition("systematic aggregator", w.to_string()))
        }
        Err(e) => return Err(e),
    };
    if let Err((c, sup)) = family.is_monotonic() {
        return Err(Error::precondition(
            "monotonic aggregator",
            format!("{c} is decisive but {sup} is not"),
        ));
    }
    winning_coalitions(game.aggregator(), &game.structure(), cap)
}

pub(crate) fn require_cubes(game: &AggregationGame) -> Result<()> {
    match (0..game.voters()).find(|&i| !game.goal(i).is_cube()) {
        None => Ok(()),
        Some(i) => Err(Error::precondition(
            "cube goals",
            format!("goal of voter {} is not a cube", i + 1),
        )),
    }
}

/// One plus the largest spread of any voter's payoff across outcomes.
pub fn payoff_bound_m(game: &AggregationGame) -> Result<Q> {
    let outcomes;
    let view = match game.payoffs() {
        PayoffTable::Full(_) => {
            let table = GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?;
            outcomes = table.outcomes().to_vec();
            game.payoffs().outcome_view(game.issues(), Some(&outcomes))
        }
        other => other.outcome_view(game.issues(), None),
    }
    .ok_or_else(|| Error::precondition("uniform game", "payoffs depend on more than the outcome"))?;
    let spread = view
        .iter()
        .map(|row| {
            let vals: Vec<Q> = row.iter().flatten().copied().collect();
            let hi = vals.iter().max().copied().unwrap_or_else(Q::zero);
            let lo = vals.iter().min().copied().unwrap_or_else(Q::zero);
            hi - lo
        })
        .max()
        .unwrap_or_else(Q::zero);
    Ok(spread + int(1))
}

/// Coalition payoffs rebuilt so that every member but the sponsor earns a
/// bonus of `M` for voting the target ballot, paid for by the sponsor.
#[derive(Debug, Clone)]
pub struct Redistribution {
    pub coalition: Coalition,
    pub sponsor: usize,
    pub target: Ballot,
    pub bonus: Q,
    /// New payoff rows (indexed by profile) for the coalition's members.
    pub payoffs: Vec<(usize, Vec<Q>)>,
    /// The base game with those rows substituted.
    pub game: AggregationGame,
}

pub fn redistribute_for_coalition(game: &AggregationGame, c: Coalition, target: &Ballot) -> Result<Redistribution> {
    redistribute_capped(game, c, target, DEFAULT_PROFILE_BITS_CAP)
}

pub fn redistribute_capped(
    game: &AggregationGame,
    c: Coalition,
    target: &Ballot,
    cap: usize,
) -> Result<Redistribution> {
    require_uniform(game)?;
    let winning = require_systematic_monotonic(game, cap)?;
    if !winning.contains(&c) {
        return Err(Error::precondition("winning coalition", format!("{c} is not winning")));
    }
    if target.len() != game.issues() {
        return Err(Error::DimensionMismatch("target ballot length".into()));
    }
    if let Some(i) = c.members().find(|&i| !game.goal(i).holds(target)) {
        return Err(Error::precondition(
            "coalition consistency",
            format!("{} does not satisfy the goal of voter {}", target.spaced(), i + 1),
        ));
    }
    let sponsor = c.members().next().expect("winning coalitions are nonempty");
    let m = payoff_bound_m(game)?;
    let table = GameTable::new(game, cap)?;
    let space = *table.space();
    let mut values = game.payoffs().materialize(&space, table.outcomes());
    for idx in 0..space.size() {
        for j in c.members().filter(|&j| j != sponsor) {
            if space.code(idx, j) == target.code() {
                values[j][idx as usize] += m;
                values[sponsor][idx as usize] -= m;
            }
        }
    }
    let payoffs: Vec<(usize, Vec<Q>)> = c.members().map(|i| (i, values[i].clone())).collect();
    let game = game.with_payoffs(PayoffTable::Full(values))?;
    Ok(Redistribution {
        coalition: c,
        sponsor,
        target: *target,
        bonus: m,
        payoffs,
        game,
    })
}

/// Every voter promises `2M` to each other voter at every profile where she
/// does not cast her ballot from `b`.
pub fn commitment_transfer(game: &AggregationGame, b: &BallotProfile) -> Result<TransferProfile> {
    require_uniform(game)?;
    game.check_profile(b)?;
    let amount = payoff_bound_m(game)? * int(2);
    let space = game.structure().check_cap(DEFAULT_PROFILE_BITS_CAP, "commitment transfer")?;
    let n = game.voters();
    let mut tau = TransferProfile::void(game.structure());
    for idx in 0..space.size() {
        for i in (0..n).filter(|&i| space.code(idx, i) != b.ballot(i).code()) {
            for j in (0..n).filter(|&j| j != i) {
                tau.set_index(i, idx, j, amount)?;
            }
        }
    }
    Ok(tau)
}

/// What [`verify_commitment`] found. The first four fields decide the
/// verdict; the rest are diagnostics.
#[derive(Debug, Clone)]
pub struct CommitmentReport {
    /// `b` satisfies every goal through its outcome.
    pub efficient: bool,
    /// Outcome of `b` under the transferred game equals the base outcome.
    pub outcome_matches: bool,
    /// Improving deviation from `b` in the transferred game, if any.
    pub deviation: Option<Deviation>,
    /// A context where a committed ballot and an alternative tie on the goal
    /// but the alternative pays at least as much.
    pub margin_violation: Option<DominanceWitness>,
    /// Voters whose committed ballot is not literally weakly dominant.
    pub not_dominant: Vec<DominanceWitness>,
    /// Result of the dominant-strategy-equilibrium check.
    pub dominant_equilibrium: Option<BallotProfile>,
    /// Number of pure equilibria of the transferred game.
    pub equilibria: usize,
}

impl CommitmentReport {
    pub fn passed(&self) -> bool {
        self.efficient && self.outcome_matches && self.deviation.is_none() && self.margin_violation.is_none()
    }

    /// The stronger reading: `b` is the dominant-strategy equilibrium.
    pub fn literal_claim_holds(&self) -> bool {
        self.not_dominant.is_empty() && self.dominant_equilibrium.is_some()
    }

    pub fn failure(&self) -> Option<String> {
        if !self.efficient {
            return Some("profile is not efficient for all voters".into());
        }
        if !self.outcome_matches {
            return Some("transferred outcome differs".into());
        }
        if let Some(d) = &self.deviation {
            return Some(format!("voter {} improves by voting {}", d.voter + 1, d.ballot.spaced()));
        }
        if let Some(w) = &self.margin_violation {
            return Some(format!(
                "voter {} loses no payoff by voting {} in {}",
                w.voter + 1,
                w.alternative.spaced(),
                w.context.grouped()
            ));
        }
        None
    }
}

pub fn verify_commitment(game: &AggregationGame, b: &BallotProfile, tau: &TransferProfile) -> Result<CommitmentReport> {
    verify_commitment_capped(game, b, tau, DEFAULT_PROFILE_BITS_CAP)
}

pub fn verify_commitment_capped(
    game: &AggregationGame,
    b: &BallotProfile,
    tau: &TransferProfile,
    cap: usize,
) -> Result<CommitmentReport> {
    game.check_profile(b)?;
    let transferred = apply_transfers_capped(game, tau, cap)?;
    let table = GameTable::new(&transferred, cap)?;
    let space = *table.space();
    let idx = b.index();
    let outcome = game.outcome(b)?;
    let n = game.voters();

    let mut margin_violation = None;
    'voters: for i in 0..n {
        let own = b.ballot(i).code();
        for ctx in space.contexts(i) {
            let at = space.replace(ctx, i, own);
            let (sat, pay) = table.standing(at, i);
            for alt in (0..1u64 << game.issues()).filter(|&c| c != own) {
                let (sat2, pay2) = table.standing(space.replace(ctx, i, alt), i);
                if sat == sat2 && pay2 >= pay {
                    margin_violation = Some(DominanceWitness {
                        voter: i,
                        context: space.profile(at),
                        alternative: Ballot::from_code(alt, game.issues()),
                    });
                    break 'voters;
                }
            }
        }
    }

    let not_dominant = (0..n)
        .filter_map(|i| table.weak_dominance_witness(i, b.ballot(i).code()))
        .collect();

    Ok(CommitmentReport {
        efficient: game.efficient(Coalition::grand(n), &outcome),
        outcome_matches: table.outcome(idx) == outcome.code(),
        deviation: table.deviation(idx),
        margin_violation,
        not_dominant,
        dominant_equilibrium: table.dominant_strategy_equilibrium(),
        equilibria: table.nash_indices().len(),
    })
}

/// Voter `i` replaces her part of `tau_star` with an offer to every other
/// voter `j`, paid whenever `j` votes `target`, exceeding anything `j` could
/// gain by voting otherwise.
pub fn deviation_transfer(
    game: &AggregationGame,
    i: usize,
    target: &Ballot,
    tau_star: &TransferProfile,
) -> Result<TransferProfile> {
    deviation_transfer_capped(game, i, target, tau_star, DEFAULT_PROFILE_BITS_CAP)
}

pub fn deviation_transfer_capped(
    game: &AggregationGame,
    i: usize,
    target: &Ballot,
    tau_star: &TransferProfile,
    cap: usize,
) -> Result<TransferProfile> {
    require_uniform(game)?;
    game.structure().check_voter(i)?;
    if target.len() != game.issues() {
        return Err(Error::DimensionMismatch("target ballot length".into()));
    }
    let others = tau_star.without_payer(i);
    let reduced = apply_transfers_capped(game, &others, cap)?;
    let table = GameTable::new(&reduced, cap)?;
    let space = *table.space();
    let code = target.code();
    let mut tau = others;
    for j in (0..game.voters()).filter(|&j| j != i) {
        let mut gap: Option<Q> = None;
        for ctx in space.contexts(j) {
            let base = table.payoff(space.replace(ctx, j, code), j);
            for alt in (0..1u64 << game.issues()).filter(|&c| c != code) {
                let d = table.payoff(space.replace(ctx, j, alt), j) - base;
                gap = Some(gap.map_or(d, |g: Q| g.max(d)));
            }
        }
        let offer = (gap.unwrap_or_else(Q::zero) + int(1)).max(Q::zero());
        if offer.is_zero() {
            continue;
        }
        for ctx in space.contexts(j) {
            tau.set_index(i, space.replace(ctx, j, code), j, offer)?;
        }
    }
    Ok(tau)
}

/// Effect of a deviation transfer on the voting stage.
#[derive(Debug, Clone)]
pub struct RefutationCheck {
    pub survivors: Vec<Vec<Ballot>>,
    /// The deviator's partners in the coalition are left with the target alone.
    pub coalition_pinned: bool,
    /// Every voter other than the deviator is left with the target alone.
    pub others_pinned: bool,
    pub equilibria: usize,
    /// Every equilibrium outcome satisfies the deviator's goal.
    pub deviator_satisfied: bool,
}

impl RefutationCheck {
    /// Voters outside the coalition may keep several ballots; what matters
    /// is that the voting stage has equilibria and all of them reach the
    /// deviator's goal.
    pub fn passed(&self) -> bool {
        self.coalition_pinned && self.equilibria > 0 && self.deviator_satisfied
    }
}

pub fn verify_refutation(
    game: &AggregationGame,
    coalition: Coalition,
    deviator: usize,
    target: &Ballot,
    tau: &TransferProfile,
    cap: usize,
) -> Result<RefutationCheck> {
    let transferred = apply_transfers_capped(game, tau, cap)?;
    let table = GameTable::new(&transferred, cap)?;
    let survivors = table.iesds().survivors;
    let pinned = |j: usize| j == deviator || survivors[j].as_slice() == [*target];
    let coalition_pinned = coalition.members().all(pinned);
    let others_pinned = (0..game.voters()).all(pinned);
    let ne = table.nash_indices();
    let m = game.issues();
    let deviator_satisfied = ne
        .iter()
        .all(|&idx| game.goal(deviator).holds(&Ballot::from_code(table.outcome(idx), m)));
    Ok(RefutationCheck {
        survivors,
        coalition_pinned,
        others_pinned,
        equilibria: ne.len(),
        deviator_satisfied,
    })
}
