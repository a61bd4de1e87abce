//! Seeded randomized checks of the structural results: truthful dominance,
//! coalition equilibria, payoff redistribution, commitment and deviation
//! transfers. Each suite draws its own stream from the master seed, so the
//! outcome of one suite does not depend on which others ran.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{is_nash, is_truthful, AggregationGame, GameTable, Goal, PayoffTable};
use crate::logic::GoalCube;
use crate::model::{
    resilient_winning_coalitions, winning_coalitions, Aggregator, BAStructure, Ballot, BallotProfile, Coalition,
    CoalitionFamily, DEFAULT_PROFILE_BITS_CAP,
};
use crate::negotiation::{
    check_surviving, commitment_transfer, redistribute_for_coalition, verify_commitment, verify_refutation,
    EndogenousGame, SurvivalStatus,
};
use crate::{Result, Q};

pub const DEFAULT_SEED: u64 = 20_150_101;

/// Deliberate defects used to confirm that the harness can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutant {
    /// The dominance test asks whether every alternative does at least as
    /// well as the tested ballot, instead of the other way round.
    InvertDominance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    TruthfulDominance,
    TruthfulDominanceFamily,
    CoalitionEquilibrium,
    Redistribution,
    Commitment,
    Deviation,
    DeviationGeneral,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::TruthfulDominance,
        Suite::TruthfulDominanceFamily,
        Suite::CoalitionEquilibrium,
        Suite::Redistribution,
        Suite::Commitment,
        Suite::Deviation,
        Suite::DeviationGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TruthfulDominance => "truthful-dominance",
            Suite::TruthfulDominanceFamily => "truthful-dominance-family",
            Suite::CoalitionEquilibrium => "coalition-equilibrium",
            Suite::Redistribution => "redistribution",
            Suite::Commitment => "commitment",
            Suite::Deviation => "deviation",
            Suite::DeviationGeneral => "deviation-general",
        }
    }

    pub fn default_count(self) -> usize {
        match self {
            Suite::TruthfulDominance | Suite::TruthfulDominanceFamily => 200,
            Suite::CoalitionEquilibrium | Suite::Redistribution => 100,
            Suite::Commitment | Suite::Deviation | Suite::DeviationGeneral => 50,
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    fn stream(self, seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self as u64 + 1);
        rng
    }
}

/// Witnesses kept per suite; further failures are only counted.
const KEPT_FAILURES: usize = 5;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite: Suite,
    pub seed: u64,
    pub instances: usize,
    /// Individual predicates evaluated across all instances.
    pub checks: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
    /// Observations that are not pass/fail conditions.
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(suite: Suite, seed: u64) -> Self {
        Self {
            suite,
            seed,
            instances: 0,
            checks: 0,
            failure_count: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(witness());
            }
        }
    }

    pub fn skipped(&self) -> bool {
        self.instances == 0
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn status(&self) -> &'static str {
        match (self.skipped(), self.passed()) {
            (true, _) => "skipped",
            (false, true) => "pass",
            (false, false) => "fail",
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} instances, {} checks, {} failures",
            self.suite.name(),
            self.status(),
            self.instances,
            self.checks,
            self.failure_count
        )
    }
}

pub fn run_suite(suite: Suite, seed: u64, count: usize, mutant: Option<Mutant>) -> Result<SuiteResult> {
    let mut rng = suite.stream(seed);
    let mut result = SuiteResult::new(suite, seed);
    match suite {
        Suite::TruthfulDominance => truthful_dominance(&mut rng, count, false, mutant, &mut result)?,
        Suite::TruthfulDominanceFamily => truthful_dominance(&mut rng, count, true, mutant, &mut result)?,
        Suite::CoalitionEquilibrium => coalition_equilibrium(&mut rng, count, &mut result)?,
        Suite::Redistribution => redistribution(&mut rng, count, &mut result)?,
        Suite::Commitment => commitment(&mut rng, count, &mut result)?,
        Suite::Deviation => deviation(&mut rng, count, false, &mut result)?,
        Suite::DeviationGeneral => deviation(&mut rng, count, true, &mut result)?,
    }
    Ok(result)
}

/// Runs every suite; `count` overrides the per-suite defaults.
pub fn run_all(seed: u64, count: Option<usize>, mutant: Option<Mutant>) -> Result<Vec<SuiteResult>> {
    Suite::ALL
        .into_iter()
        .map(|s| run_suite(s, seed, count.unwrap_or(s.default_count()), mutant))
        .collect()
}

// ---------------------------------------------------------------------------
// generators

pub fn random_cube<R: Rng>(rng: &mut R, m: usize) -> GoalCube {
    let literals = (0..m).filter_map(|j| match rng.gen_range(0..3) {
        0 => None,
        v => Some((j, v == 1)),
    });
    GoalCube::new(literals.collect::<Vec<_>>()).expect("one literal per issue")
}

/// A cube made of some of `b`'s literals, hence satisfied by `b`.
pub fn random_subcube<R: Rng>(rng: &mut R, b: &Ballot) -> GoalCube {
    let literals = (0..b.len()).filter(|_| rng.gen_bool(0.5)).map(|j| (j, b.get(j)));
    GoalCube::new(literals.collect::<Vec<_>>()).expect("one literal per issue")
}

pub fn random_ballot<R: Rng>(rng: &mut R, m: usize) -> Ballot {
    Ballot::from_code(rng.gen_range(0..1u64 << m), m)
}

fn random_value<R: Rng>(rng: &mut R) -> Q {
    Q::new(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn random_constant_payoffs<R: Rng>(rng: &mut R, n: usize) -> PayoffTable {
    PayoffTable::Constant((0..n).map(|_| random_value(rng)).collect())
}

pub fn random_uniform_payoffs<R: Rng>(rng: &mut R, n: usize, m: usize) -> PayoffTable {
    PayoffTable::Uniform(
        (0..n)
            .map(|_| (0..1usize << m).map(|_| random_value(rng)).collect())
            .collect(),
    )
}

/// Upward closure of one to three random nonempty coalitions.
pub fn random_monotone_family<R: Rng>(rng: &mut R, n: usize) -> CoalitionFamily {
    let generators = (0..rng.gen_range(1..=3)).map(|_| Coalition::from_mask(rng.gen_range(1..1u64 << n)));
    CoalitionFamily::new(n, generators.collect::<Vec<_>>())
        .expect("masks below 2^n")
        .upward_closure()
}

fn random_aggregator<R: Rng>(rng: &mut R, n: usize, family: bool) -> Aggregator {
    if family {
        Aggregator::explicit_family(random_monotone_family(rng, n)).expect("upward closures are monotonic")
    } else {
        Aggregator::Majority
    }
}

fn game_from_cubes(s: BAStructure, agg: Aggregator, cubes: Vec<GoalCube>, payoffs: PayoffTable) -> Result<AggregationGame> {
    AggregationGame::new(s, agg, cubes.into_iter().map(Goal::from_cube).collect(), payoffs)
}

/// A uniform game in which the goals of `C` share the model `witness`. The
/// aggregator is majority or a random monotone family, and `C` is drawn
/// from the winning (or resilient winning) coalitions of that aggregator.
pub struct CoalitionInstance {
    pub game: AggregationGame,
    pub coalition: Coalition,
    pub witness: Ballot,
}

pub fn coalition_instance<R: Rng>(
    rng: &mut R,
    sizes: &[(usize, usize)],
    resilient: bool,
    constant: bool,
) -> Result<CoalitionInstance> {
    let &(n, m) = sizes.choose(rng).expect("nonempty size list");
    let s = BAStructure::new(n, m)?;
    let (agg, pool) = loop {
        let family = rng.gen_bool(0.5);
        let agg = random_aggregator(rng, n, family);
        let pool = if resilient {
            resilient_winning_coalitions(&agg, &s, DEFAULT_PROFILE_BITS_CAP)?
        } else {
            winning_coalitions(&agg, &s, DEFAULT_PROFILE_BITS_CAP)?
        };
        if !pool.is_empty() {
            break (agg, pool);
        }
    };
    let coalitions: Vec<Coalition> = pool.iter().copied().collect();
    let coalition = *coalitions.choose(rng).expect("nonempty pool");
    let witness = random_ballot(rng, m);
    let cubes = (0..n)
        .map(|i| {
            if coalition.contains(i) {
                random_subcube(rng, &witness)
            } else {
                random_cube(rng, m)
            }
        })
        .collect();
    let payoffs = if constant {
        random_constant_payoffs(rng, n)
    } else {
        random_uniform_payoffs(rng, n, m)
    };
    Ok(CoalitionInstance {
        game: game_from_cubes(s, agg, cubes, payoffs)?,
        coalition,
        witness,
    })
}

/// Random majority game whose goals are jointly satisfiable.
fn consistent_majority_game<R: Rng>(rng: &mut R) -> Result<AggregationGame> {
    const SIZES: [(usize, usize); 4] = [(3, 1), (3, 2), (3, 3), (5, 1)];
    let constant = rng.gen_bool(0.5);
    let &(n, m) = SIZES.choose(rng).expect("nonempty");
    let s = BAStructure::new(n, m)?;
    let witness = random_ballot(rng, m);
    let cubes = (0..n).map(|_| random_subcube(rng, &witness)).collect();
    let payoffs = if constant {
        random_constant_payoffs(rng, n)
    } else {
        random_uniform_payoffs(rng, n, m)
    };
    game_from_cubes(s, Aggregator::Majority, cubes, payoffs)
}

fn describe(game: &AggregationGame) -> String {
    let goals: Vec<String> = game.goals().iter().map(|g| g.formula().to_string()).collect();
    format!(
        "n={} m={} {} goals [{}] payoffs {}",
        game.voters(),
        game.issues(),
        game.aggregator(),
        goals.join(", "),
        game.payoffs().kind()
    )
}

// ---------------------------------------------------------------------------
// suites

fn truthful_dominance<R: Rng>(
    rng: &mut R,
    count: usize,
    family: bool,
    mutant: Option<Mutant>,
    out: &mut SuiteResult,
) -> Result<()> {
    const SIZES: [(usize, usize); 4] = [(3, 2), (3, 3), (5, 2), (5, 3)];
    for _ in 0..count {
        let &(n, m) = SIZES.choose(rng).expect("nonempty");
        let s = BAStructure::new(n, m)?;
        let agg = random_aggregator(rng, n, family);
        let cubes = (0..n).map(|_| random_cube(rng, m)).collect();
        let payoffs = random_constant_payoffs(rng, n);
        let game = game_from_cubes(s, agg, cubes, payoffs)?;
        let table = GameTable::new(&game, DEFAULT_PROFILE_BITS_CAP)?;
        out.instances += 1;
        for i in 0..n {
            for b in s.ballots().filter(|b| game.goal(i).holds(b)) {
                let failure = match mutant {
                    None => table.weak_dominance_witness(i, b.code()).map(|w| {
                        format!(
                            "voter {} ballot {} beaten by {} in {}",
                            i + 1,
                            b.spaced(),
                            w.alternative.spaced(),
                            w.context.grouped()
                        )
                    }),
                    Some(Mutant::InvertDominance) => inverted_dominance_witness(&table, i, b.code()),
                };
                out.check(failure.is_none(), || {
                    format!("{}: {}", describe(&game), failure.clone().unwrap_or_default())
                });
            }
        }
    }
    Ok(())
}

/// The mutant: "dominant" if no alternative ever does worse.
fn inverted_dominance_witness(table: &GameTable, i: usize, code: u64) -> Option<String> {
    let space = table.space();
    let m = space.issues();
    for ctx in space.contexts(i) {
        let tested = table.standing(space.replace(ctx, i, code), i);
        for alt in 0..1u64 << m {
            if table.standing(space.replace(ctx, i, alt), i) < tested {
                return Some(format!(
                    "voter {} ballot {} beats {} in {}",
                    i + 1,
                    Ballot::from_code(code, m).spaced(),
                    Ballot::from_code(alt, m).spaced(),
                    space.profile(space.replace(ctx, i, code)).grouped()
                ));
            }
        }
    }
    None
}

fn coalition_equilibrium<R: Rng>(rng: &mut R, count: usize, out: &mut SuiteResult) -> Result<()> {
    const SIZES: [(usize, usize); 5] = [(3, 1), (3, 2), (3, 3), (5, 2), (5, 3)];
    for _ in 0..count {
        let inst = coalition_instance(rng, &SIZES, true, false)?;
        let game = &inst.game;
        let c = inst.coalition;
        let witness = game
            .coalition_consistency(c)?
            .witness()
            .expect("coalition goals share a model by construction");
        let ballots = (0..game.voters())
            .map(|i| if c.contains(i) { witness } else { witness.inverse() })
            .collect();
        let profile = BallotProfile::new(&game.structure(), ballots)?;
        out.instances += 1;
        let nash = is_nash(game, &profile)?;
        out.check(nash.holds(), || {
            let d = nash.witness().expect("failing verdicts carry a deviation");
            format!(
                "{} C={}: {} not an equilibrium, voter {} deviates to {}",
                describe(game),
                c,
                profile.grouped(),
                d.voter + 1,
                d.ballot.spaced()
            )
        });
        let mut truthful = true;
        for i in c.members() {
            truthful &= is_truthful(game, i, &profile.ballot(i))?;
        }
        out.check(truthful, || {
            format!("{} C={}: {} not C-truthful", describe(game), c, profile.grouped())
        });
        let outcome = game.outcome(&profile)?;
        out.check(game.efficient(c, &outcome), || {
            format!(
                "{} C={}: {} has outcome {} that misses a goal of C",
                describe(game),
                c,
                profile.grouped(),
                outcome.spaced()
            )
        });
    }
    Ok(())
}

fn redistribution<R: Rng>(rng: &mut R, count: usize, out: &mut SuiteResult) -> Result<()> {
    const SIZES: [(usize, usize); 5] = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)];
    let mut merely_inefficient = 0usize;
    for _ in 0..count {
        let inst = coalition_instance(rng, &SIZES, false, false)?;
        let game = &inst.game;
        let c = inst.coalition;
        let red = redistribute_for_coalition(game, c, &inst.witness)?;
        let before = GameTable::new(game, DEFAULT_PROFILE_BITS_CAP)?;
        let after = GameTable::new(&red.game, DEFAULT_PROFILE_BITS_CAP)?;
        out.instances += 1;
        let space = *before.space();
        let unbalanced = (0..space.size()).find(|&idx| {
            let old: Q = c.members().map(|i| before.payoff(idx, i)).sum();
            let new: Q = red.payoffs.iter().map(|(_, row)| row[idx as usize]).sum();
            let modified: Q = c.members().map(|i| after.payoff(idx, i)).sum();
            old != new || old != modified
        });
        out.check(unbalanced.is_none(), || {
            format!(
                "{} C={}: coalition total changes at {}",
                describe(game),
                c,
                space.profile(unbalanced.unwrap_or(0)).grouped()
            )
        });
        let m = game.issues();
        let ne = after.nash_indices();
        let bad = ne
            .iter()
            .find(|&&idx| game.totally_inefficient(c, &Ballot::from_code(after.outcome(idx), m)));
        out.check(bad.is_none(), || {
            format!(
                "{} C={} target {}: {} is a totally inefficient equilibrium",
                describe(game),
                c,
                inst.witness.spaced(),
                space.profile(*bad.unwrap_or(&0)).grouped()
            )
        });
        merely_inefficient += ne
            .iter()
            .filter(|&&idx| !game.efficient(c, &Ballot::from_code(after.outcome(idx), m)))
            .count();
    }
    out.notes.push(format!(
        "{merely_inefficient} equilibria of redistributed games miss some but not all coalition goals"
    ));
    Ok(())
}

fn commitment<R: Rng>(rng: &mut R, count: usize, out: &mut SuiteResult) -> Result<()> {
    let mut literal_failures = 0usize;
    let mut verified = 0usize;
    for _ in 0..count {
        let game = consistent_majority_game(rng)?;
        let table = GameTable::new(&game, DEFAULT_PROFILE_BITS_CAP)?;
        let endo = EndogenousGame::new(game.clone())?;
        let n = game.voters();
        let m = game.issues();
        out.instances += 1;
        for idx in table.nash_indices() {
            if !game.efficient(Coalition::grand(n), &Ballot::from_code(table.outcome(idx), m)) {
                continue;
            }
            let b = table.space().profile(idx);
            let tau = commitment_transfer(&game, &b)?;
            let report = verify_commitment(&game, &b, &tau)?;
            verified += 1;
            if !report.literal_claim_holds() {
                literal_failures += 1;
            }
            out.check(report.passed(), || {
                format!(
                    "{}: commitment for {} fails: {}",
                    describe(&game),
                    b.grouped(),
                    report.failure().unwrap_or_default()
                )
            });
            let status = check_surviving(&endo, &b)?;
            out.check(status.is_certified(), || {
                format!("{}: {} is {}", describe(&game), b.grouped(), status)
            });
        }
    }
    out.notes.push(format!(
        "{verified} efficient equilibria verified; committed ballots not literally weakly dominant in {literal_failures}"
    ));
    Ok(())
}

/// With `general`, games only need some consistent winning coalition and
/// voters outside the deviating coalition may stay unpinned; otherwise the
/// games are fully consistent majority games and every other voter must be
/// left with the target ballot alone.
fn deviation<R: Rng>(rng: &mut R, count: usize, general: bool, out: &mut SuiteResult) -> Result<()> {
    const SIZES: [(usize, usize); 4] = [(3, 1), (3, 2), (3, 3), (5, 1)];
    let mut refuted = 0usize;
    let mut loose = 0usize;
    for _ in 0..count {
        let game = if general {
            let constant = rng.gen_bool(0.5);
            coalition_instance(rng, &SIZES, false, constant)?.game
        } else {
            consistent_majority_game(rng)?
        };
        let s = game.structure();
        let table = GameTable::new(&game, DEFAULT_PROFILE_BITS_CAP)?;
        let endo = EndogenousGame::new(game.clone())?;
        let winning = winning_coalitions(game.aggregator(), &s, DEFAULT_PROFILE_BITS_CAP)?;
        let consistent: Vec<Coalition> = winning
            .iter()
            .copied()
            .filter(|&c| game.coalition_consistency(c).map(|r| r.is_consistent()).unwrap_or(false))
            .collect();
        out.instances += 1;
        for idx in table.nash_indices() {
            let outcome = Ballot::from_code(table.outcome(idx), s.issues());
            let Some(&c) = consistent.iter().find(|&&c| !game.efficient(c, &outcome)) else {
                continue;
            };
            let b = table.space().profile(idx);
            let status = check_surviving(&endo, &b)?;
            match &status {
                SurvivalStatus::Refuted {
                    deviator,
                    coalition,
                    target,
                    witness,
                    ..
                } => {
                    refuted += 1;
                    let check = verify_refutation(&game, *coalition, *deviator, target, witness, DEFAULT_PROFILE_BITS_CAP)?;
                    if !check.others_pinned {
                        loose += 1;
                    }
                    out.check(check.passed() && (general || check.others_pinned), || {
                        format!(
                            "{}: refutation of {} by voter {} toward {} does not verify",
                            describe(&game),
                            b.grouped(),
                            deviator + 1,
                            target.spaced()
                        )
                    });
                }
                other => out.check(false, || {
                    format!("{}: {} misses the goals of {} but is {}", describe(&game), b.grouped(), c, other)
                }),
            }
        }
    }
    out.notes.push(format!("{refuted} inefficient equilibria refuted"));
    if loose > 0 {
        out.notes.push(format!("{loose} refutations leave some voter outside the coalition unpinned"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_count_is_skipped() {
        for suite in Suite::ALL {
            let r = run_suite(suite, DEFAULT_SEED, 0, None).unwrap();
            assert!(r.skipped() && r.passed());
            assert_eq!(r.status(), "skipped");
        }
    }

    #[test]
    fn names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(Suite::parse(suite.name()), Some(suite));
        }
        assert_eq!(Suite::parse("nope"), None);
    }

    #[test]
    fn inverted_dominance_is_caught() {
        let r = run_suite(Suite::TruthfulDominance, DEFAULT_SEED, 20, Some(Mutant::InvertDominance)).unwrap();
        assert!(!r.passed());
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn same_seed_same_result() {
        let a = run_suite(Suite::CoalitionEquilibrium, 7, 10, None).unwrap();
        let b = run_suite(Suite::CoalitionEquilibrium, 7, 10, None).unwrap();
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a.checks, 30);
    }

    #[test]
    fn subcubes_hold_on_their_ballot() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let b = random_ballot(&mut rng, 4);
            assert!(random_subcube(&mut rng, &b).satisfied_by(&b));
        }
    }
}
