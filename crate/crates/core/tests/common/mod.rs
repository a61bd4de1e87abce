#![allow(dead_code)]

use aggregation_games::game::{AggregationGame, Goal, PayoffTable};
use aggregation_games::logic::{parse_formula, IssueTable};
use aggregation_games::model::{Aggregator, BAStructure, Ballot, BallotProfile};
use aggregation_games::rational::int;

pub fn st(n: usize, m: usize) -> BAStructure {
    BAStructure::new(n, m).unwrap()
}

pub fn b(s: &str) -> Ballot {
    Ballot::parse(s).unwrap()
}

pub fn profile(n: usize, m: usize, s: &str) -> BallotProfile {
    BallotProfile::parse(&st(n, m), s).unwrap()
}

pub fn game(
    n: usize,
    names: &[&str],
    agg: Aggregator,
    goals: &[&str],
    payoffs: PayoffTable,
) -> AggregationGame {
    let m = names.len();
    let table = IssueTable::named(names).unwrap();
    let goals = goals
        .iter()
        .map(|t| Goal::new(parse_formula(t, &table).unwrap()))
        .collect();
    AggregationGame::with_names(st(n, m), agg, table, goals, payoffs).unwrap()
}

pub fn constant(n: usize, m: usize, goals: &[&str]) -> AggregationGame {
    let names: Vec<String> = (1..=m).map(|k| format!("p{k}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    game(n, &names, Aggregator::Majority, goals, PayoffTable::zero(n))
}

/// Parties A, B, C over W, F, P with goals W, F, !P.
pub fn discursive() -> AggregationGame {
    game(3, &["W", "F", "P"], Aggregator::Majority, &["W", "F", "!P"], PayoffTable::zero(3))
}

/// Voter 3 earns 1 on outcome 010; truthful voting is not dominant for her.
pub fn nodominant() -> AggregationGame {
    let s = st(3, 3);
    let pay = PayoffTable::uniform_from_entries(&s, &[int(0); 3], [(2, b("010"), int(1))]).unwrap();
    game(3, &["p", "q", "t"], Aggregator::Majority, &["!p & q & !t", "!p & !q & !t", "!p & !q & t"], pay)
}

/// Two opposed voters and three indifferent ones over p, r.
pub fn opposed_pair() -> AggregationGame {
    game(
        5,
        &["p", "r"],
        Aggregator::Majority,
        &["p & !r", "top", "top", "top", "r & !p"],
        PayoffTable::zero(5),
    )
}
