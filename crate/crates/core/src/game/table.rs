use std::cmp::Ordering;

use crate::error::Result;
use crate::model::{Ballot, BallotProfile, Coalition, ProfileSpace};
use crate::rational::Q;

use super::aggregation_game::AggregationGame;

/// Position of a voter in the quasi-dichotomous order: goal first, payoff second.
pub type Standing = (bool, Q);

/// A strictly improving unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub voter: usize,
    pub ballot: Ballot,
}

/// An opponent context in which `alternative` beats the tested ballot.
/// `context` holds the tested ballot in the voter's slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceWitness {
    pub voter: usize,
    pub context: BallotProfile,
    pub alternative: Ballot,
}

/// Result of a check that either holds or fails with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// Surviving ballots after iterated strict elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iesds {
    pub survivors: Vec<Vec<Ballot>>,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileClassification {
    pub profile: BallotProfile,
    pub outcome: Ballot,
    pub is_nash: bool,
    pub deviation: Option<Deviation>,
    pub truthful_for: Coalition,
    pub efficient_for: Vec<(Coalition, bool)>,
    pub totally_inefficient_for: Vec<(Coalition, bool)>,
}

/// Outcomes and goal satisfaction of every profile, computed once.
pub struct GameTable<'g> {
    game: &'g AggregationGame,
    space: ProfileSpace,
    outcomes: Vec<u64>,
    sat: Vec<Vec<bool>>,
}

impl<'g> GameTable<'g> {
    pub fn new(game: &'g AggregationGame, cap: usize) -> Result<Self> {
        let space = game.structure().check_cap(cap, "profile enumeration")?;
        let agg = game.aggregator();
        let outcomes = (0..space.size()).map(|idx| agg.aggregate_index(&space, idx)).collect();
        let m = game.issues();
        let sat = game
            .goals()
            .iter()
            .map(|g| (0..1u64 << m).map(|c| g.holds(&Ballot::from_code(c, m))).collect())
            .collect();
        Ok(Self {
            game,
            space,
            outcomes,
            sat,
        })
    }

    pub fn game(&self) -> &'g AggregationGame {
        self.game
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn outcomes(&self) -> &[u64] {
        &self.outcomes
    }

    #[inline]
    pub fn outcome(&self, idx: u64) -> u64 {
        self.outcomes[idx as usize]
    }

    #[inline]
    pub fn satisfied(&self, idx: u64, i: usize) -> bool {
        self.sat[i][self.outcome(idx) as usize]
    }

    #[inline]
    pub fn payoff(&self, idx: u64, i: usize) -> Q {
        self.game.payoffs().value(i, idx, self.outcome(idx))
    }

    #[inline]
    pub fn standing(&self, idx: u64, i: usize) -> Standing {
        (self.satisfied(idx, i), self.payoff(idx, i))
    }

    fn ballots(&self) -> std::ops::Range<u64> {
        0..1u64 << self.game.issues()
    }

    /// Smallest strictly improving deviation (voter, then ballot), if any.
    pub fn deviation(&self, idx: u64) -> Option<Deviation> {
        for i in 0..self.space.voters() {
            let here = self.standing(idx, i);
            let own = self.space.code(idx, i);
            for code in self.ballots().filter(|&c| c != own) {
                if self.standing(self.space.replace(idx, i, code), i) > here {
                    return Some(Deviation {
                        voter: i,
                        ballot: Ballot::from_code(code, self.game.issues()),
                    });
                }
            }
        }
        None
    }

    pub fn is_nash(&self, idx: u64) -> bool {
        self.deviation(idx).is_none()
    }

    /// Indices of all pure equilibria, ascending.
    pub fn nash_indices(&self) -> Vec<u64> {
        let n = self.space.voters();
        // best standing per (voter, context) first, then one pass over profiles
        let best: Vec<std::collections::HashMap<u64, Standing>> = (0..n)
            .map(|i| {
                self.space
                    .contexts(i)
                    .map(|ctx| {
                        let top = self
                            .ballots()
                            .map(|c| self.standing(self.space.replace(ctx, i, c), i))
                            .max()
                            .expect("at least one ballot");
                        (ctx, top)
                    })
                    .collect()
            })
            .collect();
        (0..self.space.size())
            .filter(|&idx| {
                (0..n).all(|i| {
                    let ctx = self.space.replace(idx, i, 0);
                    self.standing(idx, i) == best[i][&ctx]
                })
            })
            .collect()
    }

    pub fn nash_profiles(&self) -> Vec<BallotProfile> {
        self.nash_indices().into_iter().map(|idx| self.space.profile(idx)).collect()
    }

    /// First context (ascending) and alternative (ascending) beating `code`.
    pub fn weak_dominance_witness(&self, i: usize, code: u64) -> Option<DominanceWitness> {
        for ctx in self.space.contexts(i) {
            let at = self.space.replace(ctx, i, code);
            let mine = self.standing(at, i);
            for alt in self.ballots().filter(|&c| c != code) {
                if self.standing(self.space.replace(ctx, i, alt), i) > mine {
                    return Some(DominanceWitness {
                        voter: i,
                        context: self.space.profile(at),
                        alternative: Ballot::from_code(alt, self.game.issues()),
                    });
                }
            }
        }
        None
    }

    /// Every weakly dominant ballot of voter `i`, ascending.
    pub fn weakly_dominant(&self, i: usize) -> Vec<u64> {
        let mut alive: Vec<u64> = self.ballots().collect();
        for ctx in self.space.contexts(i) {
            let standings: Vec<Standing> = self
                .ballots()
                .map(|c| self.standing(self.space.replace(ctx, i, c), i))
                .collect();
            let top = standings.iter().max().copied().expect("nonempty");
            alive.retain(|&c| standings[c as usize] == top);
            if alive.is_empty() {
                break;
            }
        }
        alive
    }

    /// Profile indices where voter `i` plays 0 and every other voter `j`
    /// plays a ballot from `sets[j]`.
    fn restricted_contexts(&self, i: usize, sets: &[Vec<u64>]) -> Vec<u64> {
        let mut out = vec![0u64];
        for (j, set) in sets.iter().enumerate() {
            if j == i {
                continue;
            }
            out = out
                .iter()
                .flat_map(|&base| set.iter().map(move |&c| (base, c)))
                .map(|(base, c)| self.space.replace(base, j, c))
                .collect();
        }
        out
    }

    fn strictly_dominated(&self, i: usize, sets: &[Vec<u64>]) -> Vec<u64> {
        let contexts = self.restricted_contexts(i, sets);
        let standings: Vec<Vec<Standing>> = sets[i]
            .iter()
            .map(|&c| {
                contexts
                    .iter()
                    .map(|&ctx| self.standing(self.space.replace(ctx, i, c), i))
                    .collect()
            })
            .collect();
        (0..sets[i].len())
            .filter(|&b| {
                (0..sets[i].len()).any(|d| {
                    d != b
                        && standings[d]
                            .iter()
                            .zip(&standings[b])
                            .all(|(x, y)| x.cmp(y) == Ordering::Greater)
                })
            })
            .map(|b| sets[i][b])
            .collect()
    }

    /// Iterated elimination of strictly dominated ballots (pure dominators),
    /// removing every dominated ballot of every voter in each round.
    pub fn iesds(&self) -> Iesds {
        let n = self.space.voters();
        let mut sets: Vec<Vec<u64>> = vec![self.ballots().collect(); n];
        let mut rounds = 0;
        loop {
            let doomed: Vec<Vec<u64>> = (0..n).map(|i| self.strictly_dominated(i, &sets)).collect();
            if doomed.iter().all(Vec::is_empty) {
                break;
            }
            rounds += 1;
            for (set, gone) in sets.iter_mut().zip(&doomed) {
                set.retain(|c| !gone.contains(c));
            }
        }
        self.finish_iesds(sets, rounds)
    }

    /// One ballot at a time, always the largest dominated ballot of the
    /// lowest voter that has one. Used to check order independence.
    pub fn iesds_one_at_a_time(&self) -> Iesds {
        let n = self.space.voters();
        let mut sets: Vec<Vec<u64>> = vec![self.ballots().collect(); n];
        let mut rounds = 0;
        'outer: loop {
            for i in 0..n {
                if let Some(&gone) = self.strictly_dominated(i, &sets).last() {
                    sets[i].retain(|&c| c != gone);
                    rounds += 1;
                    continue 'outer;
                }
            }
            break;
        }
        self.finish_iesds(sets, rounds)
    }

    fn finish_iesds(&self, sets: Vec<Vec<u64>>, rounds: usize) -> Iesds {
        let m = self.game.issues();
        Iesds {
            survivors: sets
                .into_iter()
                .map(|s| s.into_iter().map(|c| Ballot::from_code(c, m)).collect())
                .collect(),
            rounds,
        }
    }

    /// The profile of weakly dominant ballots, provided every voter has one
    /// and any other weakly dominant ballot of that voter yields the same
    /// outcome and payoffs in every context.
    pub fn dominant_strategy_equilibrium(&self) -> Option<BallotProfile> {
        let n = self.space.voters();
        let mut idx = 0u64;
        for i in 0..n {
            let dominant = self.weakly_dominant(i);
            let (&chosen, others) = dominant.split_first()?;
            for &other in others {
                for ctx in self.space.contexts(i) {
                    let a = self.space.replace(ctx, i, chosen);
                    let b = self.space.replace(ctx, i, other);
                    if self.outcome(a) != self.outcome(b)
                        || (0..n).any(|k| self.payoff(a, k) != self.payoff(b, k))
                    {
                        return None;
                    }
                }
            }
            idx = self.space.replace(idx, i, chosen);
        }
        Some(self.space.profile(idx))
    }

    pub fn classify(&self, idx: u64, coalitions: &[Coalition]) -> ProfileClassification {
        let profile = self.space.profile(idx);
        let outcome = Ballot::from_code(self.outcome(idx), self.game.issues());
        let deviation = self.deviation(idx);
        classification(self.game, profile, outcome, deviation, coalitions)
    }
}

pub(crate) fn classification(
    game: &AggregationGame,
    profile: BallotProfile,
    outcome: Ballot,
    deviation: Option<Deviation>,
    coalitions: &[Coalition],
) -> ProfileClassification {
    let truthful_for = Coalition::from_members(
        (0..game.voters()).filter(|&i| game.goal(i).holds(&profile.ballot(i))),
    );
    ProfileClassification {
        is_nash: deviation.is_none(),
        deviation,
        truthful_for,
        efficient_for: coalitions.iter().map(|&c| (c, game.efficient(c, &outcome))).collect(),
        totally_inefficient_for: coalitions
            .iter()
            .map(|&c| (c, game.totally_inefficient(c, &outcome)))
            .collect(),
        profile,
        outcome,
    }
}
