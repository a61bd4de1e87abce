//! Aggregation games: goals, payoffs, quasi-dichotomous preferences,
//! equilibria and dominance.
//!
//! One-off questions about a single profile (`prefers`, `is_nash`) are
//! answered directly. Everything that quantifies over the profile space goes
//! through a [`GameTable`], which evaluates the aggregator once per profile
//! and refuses spaces larger than the cap.

mod aggregation_game;
mod payoff;
mod table;

pub use aggregation_game::{AggregationGame, Goal};
pub use payoff::PayoffTable;
pub use table::{
    Deviation, DominanceWitness, GameTable, Iesds, ProfileClassification, Standing, Verdict,
};

use crate::error::Result;
use crate::model::{Ballot, BallotProfile, Coalition, DEFAULT_PROFILE_BITS_CAP};

fn standing(game: &AggregationGame, i: usize, p: &BallotProfile) -> Result<Standing> {
    let outcome = game.outcome(p)?;
    Ok((
        game.goal(i).holds(&outcome),
        game.payoffs().value(i, p.index(), outcome.code()),
    ))
}

/// Whether voter `i` weakly prefers `b1` to `b2`.
pub fn prefers(game: &AggregationGame, i: usize, b1: &BallotProfile, b2: &BallotProfile) -> Result<bool> {
    game.structure().check_voter(i)?;
    Ok(standing(game, i, b1)? >= standing(game, i, b2)?)
}

/// Whether voter `i` strictly prefers `b1` to `b2`.
pub fn strictly_prefers(
    game: &AggregationGame,
    i: usize,
    b1: &BallotProfile,
    b2: &BallotProfile,
) -> Result<bool> {
    game.structure().check_voter(i)?;
    Ok(standing(game, i, b1)? > standing(game, i, b2)?)
}

/// Whether `b` satisfies voter `i`'s own goal.
pub fn is_truthful(game: &AggregationGame, i: usize, b: &Ballot) -> Result<bool> {
    game.structure().check_voter(i)?;
    if b.len() != game.issues() {
        return Err(crate::Error::DimensionMismatch("ballot length".into()));
    }
    Ok(game.goal(i).holds(b))
}

/// Equilibrium check for one profile; fails with the smallest strictly
/// improving deviation.
pub fn is_nash(game: &AggregationGame, profile: &BallotProfile) -> Result<Verdict<Deviation>> {
    game.check_profile(profile)?;
    for i in 0..game.voters() {
        let here = standing(game, i, profile)?;
        let own = profile.ballot(i);
        for b in game.structure().ballots().filter(|b| *b != own) {
            if standing(game, i, &profile.with_ballot(i, b))? > here {
                return Ok(Verdict::Fails(Deviation { voter: i, ballot: b }));
            }
        }
    }
    Ok(Verdict::Holds)
}

pub fn classify_profile(
    game: &AggregationGame,
    profile: &BallotProfile,
    coalitions: &[Coalition],
) -> Result<ProfileClassification> {
    let deviation = is_nash(game, profile)?.witness().cloned();
    let outcome = game.outcome(profile)?;
    Ok(table::classification(game, profile.clone(), outcome, deviation, coalitions))
}

/// All pure equilibria in increasing profile order.
pub fn enumerate_nash(game: &AggregationGame) -> Result<Vec<BallotProfile>> {
    Ok(GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?.nash_profiles())
}

pub fn is_weakly_dominant(game: &AggregationGame, i: usize, b: &Ballot) -> Result<Verdict<DominanceWitness>> {
    game.structure().check_voter(i)?;
    let table = GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?;
    Ok(match table.weak_dominance_witness(i, b.code()) {
        None => Verdict::Holds,
        Some(w) => Verdict::Fails(w),
    })
}

pub fn iesds(game: &AggregationGame) -> Result<Iesds> {
    Ok(GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?.iesds())
}

pub fn dominant_strategy_equilibrium(game: &AggregationGame) -> Result<Option<BallotProfile>> {
    Ok(GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?.dominant_strategy_equilibrium())
}

/// Payoffs depend on the outcome only. Full tables are checked extensionally.
pub fn is_uniform(game: &AggregationGame) -> Result<bool> {
    match game.payoffs() {
        PayoffTable::Constant(_) | PayoffTable::Uniform(_) => Ok(true),
        PayoffTable::Full(_) => {
            let table = GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?;
            Ok(game.payoffs().outcome_view(game.issues(), Some(table.outcomes())).is_some())
        }
    }
}

/// Every payoff function is constant.
pub fn is_constant(game: &AggregationGame) -> bool {
    match game.payoffs() {
        PayoffTable::Constant(_) => true,
        PayoffTable::Uniform(rows) | PayoffTable::Full(rows) => {
            rows.iter().all(|row| row.windows(2).all(|w| w[0] == w[1]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Formula, IssueTable};
    use crate::model::{Aggregator, BAStructure};
    use crate::rational::{int, Q};

    fn st(n: usize, m: usize) -> BAStructure {
        BAStructure::new(n, m).unwrap()
    }

    fn b(s: &str) -> Ballot {
        Ballot::parse(s).unwrap()
    }

    fn profile(n: usize, m: usize, s: &str) -> BallotProfile {
        BallotProfile::parse(&st(n, m), s).unwrap()
    }

    fn goals(names: &IssueTable, texts: &[&str]) -> Vec<Goal> {
        texts.iter().map(|t| Goal::new(parse_formula(t, names).unwrap())).collect()
    }

    fn constant(n: usize, m: usize, texts: &[&str]) -> AggregationGame {
        let names = IssueTable::anonymous(m);
        AggregationGame::new(st(n, m), Aggregator::Majority, goals(&names, texts), PayoffTable::zero(n)).unwrap()
    }

    /// Three voters over p, q, t; voter 3 earns 1 on outcome 010.
    fn nodominant_game() -> AggregationGame {
        let s = st(3, 3);
        let names = IssueTable::named(&["p", "q", "t"]).unwrap();
        let g = goals(&names, &["!p & q & !t", "!p & !q & !t", "!p & !q & t"]);
        let pay = PayoffTable::uniform_from_entries(&s, &[int(0); 3], [(2, b("010"), int(1))]).unwrap();
        AggregationGame::with_names(s, Aggregator::Majority, names, g, pay).unwrap()
    }

    #[test]
    fn voter_three_prefers_the_paid_outcome() {
        let g = nodominant_game();
        let b1 = profile(3, 3, "010 000 001");
        let b2 = profile(3, 3, "010 000 010");
        assert!(prefers(&g, 2, &b2, &b1).unwrap());
        assert!(!prefers(&g, 2, &b1, &b2).unwrap());
        assert!(prefers(&g, 0, &b1, &b1).unwrap());
    }

    #[test]
    fn truthful_strategy_is_not_dominant_under_uniform_payoffs() {
        let g = nodominant_game();
        assert!(is_truthful(&g, 2, &b("001")).unwrap());
        let verdict = is_weakly_dominant(&g, 2, &b("001")).unwrap();
        assert!(!verdict.holds());
        assert_eq!(
            is_nash(&g, &profile(3, 3, "010 000 001")).unwrap(),
            Verdict::Fails(Deviation { voter: 2, ballot: b("010") })
        );
        assert!(is_uniform(&g).unwrap());
        assert!(!is_constant(&g));
    }

    #[test]
    fn goal_beats_payoff() {
        let s = st(3, 1);
        let names = IssueTable::anonymous(1);
        let pay = PayoffTable::Full(vec![vec![int(0), int(0), int(9), int(9), int(0), int(0), int(9), int(9)]; 3]);
        let g = AggregationGame::new(s, Aggregator::Majority, goals(&names, &["p1", "top", "top"]), pay).unwrap();
        let yes = profile(3, 1, "1 1 0");
        let no = profile(3, 1, "0 1 0");
        assert!(prefers(&g, 0, &yes, &no).unwrap());
        assert!(strictly_prefers(&g, 0, &yes, &no).unwrap());
    }

    #[test]
    fn own_issue_profile_is_truthful_inefficient_equilibrium() {
        let g = constant(3, 3, &["p1", "p2", "p3"]);
        let p = profile(3, 3, "100 010 001");
        let c = classify_profile(&g, &p, &[Coalition::grand(3), Coalition::EMPTY]).unwrap();
        assert!(c.is_nash);
        assert_eq!(c.truthful_for, Coalition::grand(3));
        assert_eq!(c.outcome, b("000"));
        assert_eq!(c.totally_inefficient_for[0], (Coalition::grand(3), true));
        assert_eq!(c.efficient_for[1], (Coalition::EMPTY, true));
        assert_eq!(c.totally_inefficient_for[1], (Coalition::EMPTY, true));
        assert!(enumerate_nash(&g).unwrap().contains(&p));
    }

    #[test]
    fn indifferent_voters_make_everything_an_equilibrium() {
        let g = constant(3, 2, &["top", "top", "top"]);
        assert_eq!(enumerate_nash(&g).unwrap().len(), 64);
        for x in st(3, 2).ballots() {
            assert!(is_weakly_dominant(&g, 1, &x).unwrap().holds());
        }
        let survivors = iesds(&g).unwrap().survivors;
        assert!(survivors.iter().all(|s| s.len() == 4));
        assert_eq!(dominant_strategy_equilibrium(&g).unwrap(), None);
    }

    #[test]
    fn single_issue_common_goal() {
        let g = constant(3, 1, &["p1", "p1", "p1"]);
        let ne = enumerate_nash(&g).unwrap();
        // oracle: a profile is NE unless some voter is pivotal against her goal
        let oracle: Vec<BallotProfile> = (0..8u64)
            .map(|idx| profile(3, 1, &format!("{:03b}", idx)))
            .filter(|p| {
                let ones = p.ballots().iter().filter(|x| x.get(0)).count();
                ones != 1
            })
            .collect();
        assert_eq!(ne, oracle);
        assert!(ne.contains(&profile(3, 1, "1 1 1")));
        // 0 is weakly, not strictly, dominated: it survives the first round
        let table = GameTable::new(&g, 20).unwrap();
        assert_eq!(table.iesds().survivors, vec![vec![b("0"), b("1")]; 3]);
    }

    #[test]
    fn complete_cubes_give_a_dominant_strategy_equilibrium() {
        let g = constant(3, 2, &["p1 & p2", "p1 & !p2", "!p1 & !p2"]);
        assert_eq!(dominant_strategy_equilibrium(&g).unwrap(), Some(profile(3, 2, "11 10 00")));
    }

    #[test]
    fn odd_parity_goal_breaks_truthful_dominance() {
        let names = IssueTable::anonymous(3);
        let odd = parse_formula(
            "p1 & !p2 & !p3 | !p1 & p2 & !p3 | !p1 & !p2 & p3 | p1 & p2 & p3",
            &names,
        )
        .unwrap();
        let gs = vec![Goal::new(odd), Goal::top(), Goal::top()];
        assert!(!gs[0].is_cube());
        let g = AggregationGame::new(st(3, 3), Aggregator::Majority, gs, PayoffTable::zero(3)).unwrap();
        let truthful = profile(3, 3, "001 100 010");
        let deviant = profile(3, 3, "101 100 010");
        assert!(is_truthful(&g, 0, &b("001")).unwrap());
        assert!(!is_truthful(&g, 0, &b("101")).unwrap());
        assert!(strictly_prefers(&g, 0, &deviant, &truthful).unwrap());
        assert!(!is_weakly_dominant(&g, 0, &b("001")).unwrap().holds());
    }

    #[test]
    fn full_table_with_outcome_dependence_only_is_uniform() {
        let s = st(3, 1);
        let names = IssueTable::anonymous(1);
        let gs = goals(&names, &["top", "top", "top"]);
        let mut row: Vec<Q> = (0..8).map(|_| int(0)).collect();
        let g = AggregationGame::new(s, Aggregator::Majority, gs.clone(), PayoffTable::Full(vec![row.clone(); 3])).unwrap();
        assert!(is_uniform(&g).unwrap());
        assert!(is_constant(&g));
        // profiles 000 and 001 share outcome 0 but now pay differently
        row[1] = int(1);
        let g = AggregationGame::new(s, Aggregator::Majority, gs, PayoffTable::Full(vec![row; 3])).unwrap();
        assert!(!is_uniform(&g).unwrap());
    }

    #[test]
    fn iesds_is_order_independent_on_a_small_game() {
        let g = nodominant_game();
        let t = GameTable::new(&g, 20).unwrap();
        assert_eq!(t.iesds().survivors, t.iesds_one_at_a_time().survivors);
    }

    #[test]
    fn goal_atoms_must_fit() {
        let r = AggregationGame::new(
            st(3, 1),
            Aggregator::Majority,
            vec![Goal::new(Formula::Atom(1)), Goal::top(), Goal::top()],
            PayoffTable::zero(3),
        );
        assert!(r.is_err());
    }
}
