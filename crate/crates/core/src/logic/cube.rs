use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Ballot, BAStructure};

use super::formula::{Formula, IssueTable};

/// Largest issue count for truth-table enumeration.
pub const MAX_MODEL_ISSUES: usize = 24;

/// A consistent conjunction of literals: issue -> required value.
/// The empty cube is `top`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GoalCube {
    literals: BTreeMap<usize, bool>,
}

impl GoalCube {
    pub fn top() -> Self {
        Self::default()
    }

    /// Fails if some issue is given both signs.
    pub fn new<I: IntoIterator<Item = (usize, bool)>>(literals: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (j, v) in literals {
            if map.insert(j, v).is_some_and(|old| old != v) {
                return Err(Error::NotACube(format!("issue {} appears with both signs", j + 1)));
            }
        }
        Ok(Self { literals: map })
    }

    pub fn literals(&self) -> &BTreeMap<usize, bool> {
        &self.literals
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn atom_bound(&self) -> usize {
        self.literals.keys().next_back().map_or(0, |j| j + 1)
    }

    /// Whether `b` extends the literal map.
    pub fn satisfied_by(&self, b: &Ballot) -> bool {
        self.literals
            .iter()
            .all(|(&j, &v)| j < b.len() && b.get(j) == v)
    }

    /// Bits fixed by the cube, as (mask, values) over ballots of length `m`.
    pub fn masks(&self, m: usize) -> (u64, u64) {
        self.literals.iter().fold((0, 0), |(mask, val), (&j, &v)| {
            let bit = Ballot::issue_mask(m, j);
            (mask | bit, if v { val | bit } else { val })
        })
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conjunction(self.literals.iter().map(|(&j, &v)| {
            if v {
                Formula::Atom(j)
            } else {
                Formula::not(Formula::Atom(j))
            }
        }))
    }

    pub fn render(&self, names: &IssueTable) -> String {
        self.to_formula().render(names)
    }
}

impl fmt::Display for GoalCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

fn literal(f: &Formula) -> Option<(usize, bool)> {
    match f {
        Formula::Atom(j) => Some((*j, true)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(j) => Some((*j, false)),
            _ => None,
        },
        _ => None,
    }
}

fn collect_conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    if let Formula::And(a, b) = f {
        collect_conjuncts(a, out);
        collect_conjuncts(b, out);
    } else {
        out.push(f);
    }
}

/// Reads `f` as a cube: `top`, or a conjunction of literals on distinct issues.
pub fn as_cube(f: &Formula) -> Result<GoalCube> {
    if *f == Formula::Top {
        return Ok(GoalCube::top());
    }
    let mut parts = Vec::new();
    collect_conjuncts(f, &mut parts);
    let mut map = BTreeMap::new();
    for part in parts {
        let (j, v) = literal(part)
            .ok_or_else(|| Error::NotACube(format!("`{part}` is not a literal")))?;
        if map.insert(j, v).is_some() {
            return Err(Error::NotACube(format!("issue p{} occurs twice", j + 1)));
        }
    }
    Ok(GoalCube { literals: map })
}

/// Outcome of a joint consistency check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    /// Smallest satisfying ballot: required literals set, everything else 0.
    Consistent(Ballot),
    /// First issue on which two cubes disagree.
    Inconsistent { issue: usize },
}

impl Consistency {
    pub fn witness(&self) -> Option<Ballot> {
        match self {
            Consistency::Consistent(b) => Some(*b),
            Consistency::Inconsistent { .. } => None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent(_))
    }
}

/// Joint satisfiability of cubes over `m` issues.
pub fn cubes_consistent<'a, I>(cubes: I, m: usize) -> Result<Consistency>
where
    I: IntoIterator<Item = &'a GoalCube>,
{
    let mut required: BTreeMap<usize, bool> = BTreeMap::new();
    let mut clash: Option<usize> = None;
    for cube in cubes {
        if cube.atom_bound() > m {
            return Err(Error::IssueOutOfRange {
                issue: cube.atom_bound(),
                issues: m,
            });
        }
        for (&j, &v) in &cube.literals {
            if required.insert(j, v).is_some_and(|old| old != v) {
                clash = Some(clash.map_or(j, |c| c.min(j)));
            }
        }
    }
    if let Some(issue) = clash {
        return Ok(Consistency::Inconsistent { issue });
    }
    let mut b = Ballot::zeros(m);
    for (j, v) in required {
        b = b.with(j, v);
    }
    Ok(Consistency::Consistent(b))
}

fn check_model_cap(f: &Formula, m: usize) -> Result<()> {
    if m > MAX_MODEL_ISSUES {
        return Err(Error::CapExceeded {
            what: "model enumeration",
            needed: m,
            cap: MAX_MODEL_ISSUES,
        });
    }
    if f.atom_bound() > m {
        return Err(Error::IssueOutOfRange {
            issue: f.atom_bound(),
            issues: m,
        });
    }
    Ok(())
}

/// All ballots of length `m` satisfying `f`, in increasing code order.
pub fn models_of(f: &Formula, m: usize) -> Result<Vec<Ballot>> {
    check_model_cap(f, m)?;
    Ok((0..1u64 << m)
        .map(|c| Ballot::from_code(c, m))
        .filter(|b| f.eval(b))
        .collect())
}

/// Whether every model of `f` is a model of `g` (over `m` issues).
pub fn entails(f: &Formula, g: &Formula, m: usize) -> Result<bool> {
    check_model_cap(f, m)?;
    check_model_cap(g, m)?;
    Ok((0..1u64 << m)
        .map(|c| Ballot::from_code(c, m))
        .all(|b| !f.eval(&b) || g.eval(&b)))
}

/// Ballots admissible under an integrity constraint.
pub fn admissible_ballots(structure: &BAStructure, ic: &Formula) -> Result<Vec<Ballot>> {
    models_of(ic, structure.issues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn wfp() -> IssueTable {
        IssueTable::named(&["W", "F", "P"]).unwrap()
    }

    fn cube(text: &str, names: &IssueTable) -> GoalCube {
        as_cube(&parse_formula(text, names).unwrap()).unwrap()
    }

    #[test]
    fn cube_literals() {
        let t = IssueTable::named(&["p", "q", "t"]).unwrap();
        let c = cube("!p & q & !t", &t);
        let lits: Vec<_> = c.literals().iter().map(|(&j, &v)| (j, v)).collect();
        assert_eq!(lits, vec![(0, false), (1, true), (2, false)]);
        assert!(cube("top", &t).is_top());
    }

    #[test]
    fn non_cubes_are_rejected() {
        let t = IssueTable::anonymous(2);
        for text in ["p1 | p2", "p1 & !p1", "p1 & p1", "!!p1", "p1 & top", "bot"] {
            let f = parse_formula(text, &t).unwrap();
            assert!(matches!(as_cube(&f), Err(Error::NotACube(_))), "{text}");
        }
    }

    #[test]
    fn consistency_witness_fills_with_zero() {
        let t = wfp();
        let cubes = [cube("W", &t), cube("F", &t), cube("!P", &t)];
        assert_eq!(
            cubes_consistent(&cubes, 3).unwrap(),
            Consistency::Consistent(Ballot::parse("110").unwrap())
        );
        assert_eq!(
            cubes_consistent(&[GoalCube::top()], 3).unwrap().witness(),
            Some(Ballot::zeros(3))
        );
    }

    #[test]
    fn opposite_cubes_clash() {
        let t = IssueTable::named(&["p", "q", "r"]).unwrap();
        let cubes = [cube("p & !r", &t), cube("r & !p", &t)];
        assert_eq!(
            cubes_consistent(&cubes, 3).unwrap(),
            Consistency::Inconsistent { issue: 0 }
        );
    }

    #[test]
    fn models_of_constraint() {
        let ic = parse_formula("W -> (F | P)", &wfp()).unwrap();
        let models = models_of(&ic, 3).unwrap();
        assert_eq!(models.len(), 7);
        assert!(!models.contains(&Ballot::parse("100").unwrap()));
        assert!(models_of(&Formula::Bot, 3).unwrap().is_empty());
        assert_eq!(models_of(&Formula::Atom(0), 1).unwrap(), vec![Ballot::parse("1").unwrap()]);
        assert!(models_of(&Formula::Top, 30).is_err());
    }

    #[test]
    fn entailment_examples() {
        let t = wfp();
        let ic = parse_formula("W -> (F | P)", &t).unwrap();
        assert!(entails(&parse_formula("F", &t).unwrap(), &ic, 3).unwrap());
        assert!(!entails(&parse_formula("W", &t).unwrap(), &ic, 3).unwrap());
        assert!(entails(&ic, &Formula::Top, 3).unwrap());
    }
}
