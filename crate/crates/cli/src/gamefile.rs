//! Line-oriented game files.
//!
//! ```text
//! # comment
//! voters 3
//! issues 3
//! names W F P              # or: name 2 F
//! aggregator majority      # quota 2 2 1 | coalitions {1,2} {1,3} ...
//! goal 1 W
//! goal 2 F
//! goal 3 !P
//! payoffs uniform          # constant (default) | uniform | full
//! default 3 0
//! payoff 3 010 1/2
//! constraint W -> (F | P)
//! profile 101 110 000
//! ```
//!
//! Directives may appear in any order. Goals and constraints are parsed
//! once names are known, so `names` may come after the goals.

use std::collections::BTreeMap;

use aggregation_games::game::{AggregationGame, Goal, PayoffTable};
use aggregation_games::logic::{parse_formula, Formula, IssueTable};
use aggregation_games::model::{Aggregator, BAStructure, Ballot, BallotProfile, Coalition, CoalitionFamily};
use aggregation_games::rational::{format_fraction, parse_rational};
use aggregation_games::{Error, Q};

use crate::error::CliError;

/// A parsed game file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub game: AggregationGame,
    pub constraint: Option<Formula>,
    pub profile: Option<BallotProfile>,
}

impl GameFile {
    /// Whether each voter's goal was recognised as a cube.
    pub fn cube_flags(&self) -> Vec<bool> {
        self.game.goals().iter().map(Goal::is_cube).collect()
    }
}

struct Directive<'a> {
    line: usize,
    rest: &'a str,
    /// Byte offset of `rest` within the line, for column reporting.
    offset: usize,
}

fn syntax(line: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line,
        message: message.into(),
    }
}

/// Rebases column numbers of core parse errors onto the file line.
fn at(line: usize, offset: usize, e: Error) -> CliError {
    match e {
        Error::Parse { column, message } => syntax(line, format!("column {}: {message}", column + offset)),
        Error::UnknownIssue { name, column } => {
            syntax(line, format!("column {}: unknown issue `{name}`", column + offset))
        }
        other => syntax(line, other.to_string()),
    }
}

fn single<'a>(found: &[&Directive<'a>], keyword: &str) -> Result<Option<&'a str>, CliError> {
    match found {
        [] => Ok(None),
        [d] => Ok(Some(d.rest)),
        [_, d, ..] => Err(syntax(d.line, format!("duplicate `{keyword}`"))),
    }
}

fn parse_count(d: &Directive, what: &str) -> Result<usize, CliError> {
    d.rest
        .parse()
        .map_err(|_| syntax(d.line, format!("{what} must be a positive integer, got `{}`", d.rest)))
}

fn parse_voter(token: &str, n: usize, line: usize) -> Result<usize, CliError> {
    match token.parse::<usize>() {
        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
        _ => Err(syntax(line, format!("voter must be between 1 and {n}, got `{token}`"))),
    }
}

fn parse_value(token: &str, line: usize) -> Result<Q, CliError> {
    parse_rational(token).map_err(|e| syntax(line, e.to_string()))
}

fn parse_coalitions(text: &str, n: usize, line: usize) -> Result<Vec<Coalition>, CliError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let end = if rest.starts_with('{') {
            rest.find('}').map(|k| k + 1).ok_or_else(|| syntax(line, "unclosed `{`"))?
        } else {
            rest.find(char::is_whitespace).unwrap_or(rest.len())
        };
        let c = Coalition::parse(&rest[..end], n).map_err(|e| syntax(line, e.to_string()))?;
        out.push(c);
        rest = rest[end..].trim_start();
    }
    Ok(out)
}

pub fn parse_game_file(text: &str, cap: usize) -> Result<GameFile, CliError> {
    let mut directives: BTreeMap<&str, Vec<Directive>> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim_end();
        let trimmed = content.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_trimmed = rest.trim_start();
        let offset = indent + keyword.len() + (rest.len() - rest_trimmed.len()) + 1;
        const KNOWN: [&str; 11] = [
            "voters", "issues", "names", "name", "aggregator", "goal", "payoffs", "default", "payoff", "constraint",
            "profile",
        ];
        let Some(&keyword) = KNOWN.iter().find(|&&w| w == keyword) else {
            return Err(syntax(line, format!("unknown directive `{keyword}`")));
        };
        directives.entry(keyword).or_default().push(Directive {
            line,
            rest: rest_trimmed.trim_end(),
            offset,
        });
    }
    let get = |k: &str| -> Vec<&Directive> { directives.get(k).map(|v| v.iter().collect()).unwrap_or_default() };
    let required = |k: &str| -> Result<&Directive, CliError> {
        let found = get(k);
        match found.as_slice() {
            [d] => Ok(*d),
            [] => Err(syntax(0, format!("missing `{k}`"))),
            [_, d, ..] => Err(syntax(d.line, format!("duplicate `{k}`"))),
        }
    };

    let vd = required("voters")?;
    let id = required("issues")?;
    let n = parse_count(vd, "voters")?;
    let m = parse_count(id, "issues")?;
    let structure = BAStructure::new(n, m).map_err(|e| syntax(vd.line, e.to_string()))?;

    let mut names = IssueTable::anonymous(m);
    if let Some(d) = get("names").first() {
        if get("names").len() > 1 {
            return Err(syntax(get("names")[1].line, "duplicate `names`"));
        }
        let list: Vec<&str> = d.rest.split_whitespace().collect();
        if list.len() != m {
            return Err(syntax(d.line, format!("{} names for {m} issues", list.len())));
        }
        names = IssueTable::named(&list).map_err(|e| syntax(d.line, e.to_string()))?;
    }
    for d in get("name") {
        let (k, name) = d
            .rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(d.line, "expected `name <issue> <name>`"))?;
        let issue = match k.parse::<usize>() {
            Ok(j) if (1..=m).contains(&j) => j - 1,
            _ => return Err(syntax(d.line, format!("issue must be between 1 and {m}, got `{k}`"))),
        };
        names.set_name(issue, name.trim()).map_err(|e| syntax(d.line, e.to_string()))?;
    }

    let aggregator = match get("aggregator").as_slice() {
        [] => Aggregator::Majority,
        [_, d, ..] => return Err(syntax(d.line, "duplicate `aggregator`")),
        [d] => {
            let (kind, args) = d.rest.split_once(char::is_whitespace).unwrap_or((d.rest, ""));
            match kind {
                "majority" if args.trim().is_empty() => Aggregator::Majority,
                "quota" => {
                    let q = args
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| syntax(d.line, format!("bad quota `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    Aggregator::quota(&structure, q).map_err(|e| syntax(d.line, e.to_string()))?
                }
                "coalitions" => {
                    let family = CoalitionFamily::new(n, parse_coalitions(args, n, d.line)?)
                        .map_err(|e| syntax(d.line, e.to_string()))?;
                    Aggregator::explicit_family(family).map_err(|e| syntax(d.line, e.to_string()))?
                }
                _ => {
                    return Err(syntax(
                        d.line,
                        format!("aggregator must be `majority`, `quota ...` or `coalitions ...`, got `{}`", d.rest),
                    ))
                }
            }
        }
    };

    let mut goals: Vec<Option<Goal>> = vec![None; n];
    for d in get("goal") {
        let (v, text) = d.rest.split_once(char::is_whitespace).unwrap_or((d.rest, ""));
        let i = parse_voter(v, n, d.line)?;
        if goals[i].is_some() {
            return Err(syntax(d.line, format!("second goal for voter {}", i + 1)));
        }
        let text_offset = d.offset + (d.rest.len() - text.trim_start().len());
        let f = parse_formula(text.trim(), &names).map_err(|e| at(d.line, text_offset, e))?;
        if f.atom_bound() > m {
            return Err(syntax(d.line, format!("goal mentions issue {} of {m}", f.atom_bound())));
        }
        goals[i] = Some(Goal::new(f));
    }
    let goals = goals
        .into_iter()
        .enumerate()
        .map(|(i, g)| g.ok_or_else(|| syntax(0, format!("missing goal for voter {}", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;

    let kind = single(&get("payoffs"), "payoffs")?.unwrap_or("constant");
    let mut defaults = vec![Q::from_integer(0); n];
    for d in get("default") {
        let (v, value) = d
            .rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(d.line, "expected `default <voter> <value>`"))?;
        defaults[parse_voter(v, n, d.line)?] = parse_value(value.trim(), d.line)?;
    }
    let entries: Vec<(usize, &str, Q, usize)> = get("payoff")
        .into_iter()
        .map(|d| {
            let (v, rest) = d
                .rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(d.line, "expected `payoff <voter> ... <value>`"))?;
            let (key, value) = rest.trim().rsplit_once(char::is_whitespace).unwrap_or(("", rest.trim()));
            Ok((parse_voter(v, n, d.line)?, key.trim(), parse_value(value, d.line)?, d.line))
        })
        .collect::<Result<_, CliError>>()?;
    let payoffs = match kind {
        "constant" => {
            if !get("default").is_empty() {
                return Err(syntax(get("default")[0].line, "constant payoffs take no defaults"));
            }
            let mut values = defaults;
            for (i, key, v, line) in entries {
                if !key.is_empty() {
                    return Err(syntax(line, "constant payoffs are `payoff <voter> <value>`"));
                }
                values[i] = v;
            }
            PayoffTable::Constant(values)
        }
        "uniform" => {
            let rows = entries
                .into_iter()
                .map(|(i, key, v, line)| {
                    let b = Ballot::parse(key).map_err(|e| syntax(line, e.to_string()))?;
                    if b.len() != m {
                        return Err(syntax(line, format!("outcome `{key}` has {} issues, expected {m}", b.len())));
                    }
                    Ok((i, b, v))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            PayoffTable::uniform_from_entries(&structure, &defaults, rows)?
        }
        "full" => {
            let rows = entries
                .into_iter()
                .map(|(i, key, v, line)| {
                    let p = BallotProfile::parse(&structure, key).map_err(|e| syntax(line, e.to_string()))?;
                    Ok((i, p, v))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            PayoffTable::full_from_entries(&structure, cap, &defaults, rows)?
        }
        other => {
            let line = get("payoffs")[0].line;
            return Err(syntax(line, format!("payoffs must be constant, uniform or full, got `{other}`")));
        }
    };

    let constraint = match get("constraint").as_slice() {
        [] => None,
        [_, d, ..] => return Err(syntax(d.line, "duplicate `constraint`")),
        [d] => {
            let f = parse_formula(d.rest, &names).map_err(|e| at(d.line, d.offset, e))?;
            if f.atom_bound() > m {
                return Err(syntax(d.line, format!("constraint mentions issue {} of {m}", f.atom_bound())));
            }
            Some(f)
        }
    };
    let profile = match get("profile").as_slice() {
        [] => None,
        [_, d, ..] => return Err(syntax(d.line, "duplicate `profile`")),
        [d] => Some(BallotProfile::parse(&structure, d.rest).map_err(|e| at(d.line, d.offset, e))?),
    };

    let game = AggregationGame::with_names(structure, aggregator, names, goals, payoffs)?;
    Ok(GameFile {
        game,
        constraint,
        profile,
    })
}

/// Canonical text of a game file; parsing it gives back the same game.
pub fn write_game_file(file: &GameFile) -> String {
    let g = &file.game;
    let n = g.voters();
    let m = g.issues();
    let names = g.names();
    let mut out = vec![format!("voters {n}"), format!("issues {m}")];
    for j in 0..m {
        if let Some(name) = names.declared(j) {
            out.push(format!("name {} {name}", j + 1));
        }
    }
    out.push(match g.aggregator() {
        Aggregator::ExplicitFamily(fam) => {
            let cs: Vec<String> = fam.iter().map(|c| c.to_string()).collect();
            format!("aggregator coalitions {}", cs.join(" "))
        }
        other => format!("aggregator {other}"),
    });
    for (i, goal) in g.goals().iter().enumerate() {
        out.push(format!("goal {} {}", i + 1, goal.formula().render(names)));
    }
    let payoffs = g.payoffs();
    out.push(format!("payoffs {}", payoffs.kind()));
    let space = g.structure();
    for (i, (default, exceptions)) in payoffs.sparse_rows().into_iter().enumerate() {
        match payoffs {
            PayoffTable::Constant(_) => {
                if default != Q::from_integer(0) {
                    out.push(format!("payoff {} {}", i + 1, format_fraction(&default)));
                }
            }
            PayoffTable::Uniform(_) | PayoffTable::Full(_) => {
                if default != Q::from_integer(0) {
                    out.push(format!("default {} {}", i + 1, format_fraction(&default)));
                }
                for (key, value) in exceptions {
                    let key = match payoffs {
                        PayoffTable::Uniform(_) => Ballot::from_code(key, m).to_string(),
                        _ => profile_from_index(space, key).grouped(),
                    };
                    out.push(format!("payoff {} {key} {}", i + 1, format_fraction(&value)));
                }
            }
        }
    }
    if let Some(c) = &file.constraint {
        out.push(format!("constraint {}", c.render(names)));
    }
    if let Some(p) = &file.profile {
        out.push(format!("profile {}", p.grouped()));
    }
    out.push(String::new());
    out.join("\n")
}

fn profile_from_index(s: BAStructure, idx: u64) -> BallotProfile {
    let m = s.issues();
    let n = s.voters();
    let ballots = (0..n)
        .map(|i| Ballot::from_code((idx >> ((n - 1 - i) * m)) & ((1u64 << m) - 1), m))
        .collect();
    BallotProfile::new(&s, ballots).expect("index within the profile space")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DILEMMA: &str = "\
# three parties
voters 3
issues 3
names W F P
aggregator majority
goal 1 W
goal 2 F
goal 3 !P
constraint W -> (F | P)
profile 101 110 000
";

    fn parse(text: &str) -> Result<GameFile, CliError> {
        parse_game_file(text, 20)
    }

    fn error_line(text: &str) -> usize {
        match parse(text) {
            Err(CliError::Syntax { line, .. }) => line,
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parses_the_dilemma() {
        let f = parse(DILEMMA).unwrap();
        assert_eq!(f.game.voters(), 3);
        assert_eq!(f.game.names().name(1), "F");
        assert_eq!(f.cube_flags(), vec![true; 3]);
        assert_eq!(f.profile.unwrap().grouped(), "101 110 000");
        assert!(f.constraint.is_some());
    }

    #[test]
    fn canonical_text_round_trips() {
        let f = parse(DILEMMA).unwrap();
        let text = write_game_file(&f);
        assert_eq!(parse(&text).unwrap(), f);
        assert_eq!(write_game_file(&parse(&text).unwrap()), text);
    }

    #[test]
    fn payoff_tables_round_trip() {
        let uniform = "voters 3\nissues 2\ngoal 1 p1\ngoal 2 top\ngoal 3 !p2\npayoffs uniform\ndefault 2 -1/2\npayoff 1 10 3\npayoff 3 01 2/3\n";
        let f = parse(uniform).unwrap();
        assert_eq!(parse(&write_game_file(&f)).unwrap(), f);
        let full = "voters 3\nissues 1\ngoal 1 top\ngoal 2 top\ngoal 3 top\npayoffs full\ndefault 1 1\npayoff 1 0 1 1 5\npayoff 2 111 -2\n";
        let f = parse(full).unwrap();
        assert_eq!(parse(&write_game_file(&f)).unwrap(), f);
        let coalitions = "voters 3\nissues 1\naggregator coalitions {1, 2} {1,2,3}\ngoal 1 top\ngoal 2 top\ngoal 3 top\npayoffs constant\npayoff 2 7\n";
        let f = parse(coalitions).unwrap();
        assert_eq!(parse(&write_game_file(&f)).unwrap(), f);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(error_line("voters 3\nissues 1\ngoal 1 p1\ngoal 2 p1 &\ngoal 3 p1\n"), 4);
        assert_eq!(error_line("voters 3\nissues 1\nfoo 1\n"), 3);
        assert_eq!(error_line("voters 3\nissues 2\ngoal 1 top\ngoal 2 top\ngoal 3 top\nprofile 10 1x 00\n"), 6);
        assert_eq!(error_line("voters 3\nissues 1\ngoal 1 top\ngoal 2 top\ngoal 9 top\n"), 5);
        assert_eq!(error_line("voters 4\nissues 1\n"), 1);
        assert_eq!(error_line("voters 3\nissues 1\naggregator coalitions {1}\ngoal 1 top\ngoal 2 top\ngoal 3 top\n"), 3);
        // missing sections are reported without a line
        assert_eq!(error_line("voters 3\nissues 1\ngoal 1 top\n"), 0);
    }

    #[test]
    fn formula_errors_point_into_the_line() {
        match parse("voters 3\nissues 1\ngoal 1 p1 & q\ngoal 2 top\ngoal 3 top\n") {
            Err(CliError::Syntax { line: 3, message }) => assert!(message.contains("column 13"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_cube_goals_are_flagged() {
        let f = parse("voters 3\nissues 2\ngoal 1 p1 | p2\ngoal 2 top\ngoal 3 p1 & !p2\n").unwrap();
        assert_eq!(f.cube_flags(), vec![false, true, true]);
    }
}
