use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{as_cube, cubes_consistent, Consistency, Formula, GoalCube, IssueTable};
use crate::model::{Aggregator, BAStructure, Ballot, BallotProfile, Coalition};
use crate::rational::Q;

use super::payoff::PayoffTable;

/// A voter's goal. Goals that are cubes carry their literal map; anything
/// else is a general formula, which the cube-only analyses refuse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    formula: Formula,
    cube: Option<GoalCube>,
}

impl Goal {
    pub fn new(formula: Formula) -> Self {
        let cube = as_cube(&formula).ok();
        Self { formula, cube }
    }

    pub fn top() -> Self {
        Self::new(Formula::Top)
    }

    pub fn from_cube(cube: GoalCube) -> Self {
        Self {
            formula: cube.to_formula(),
            cube: Some(cube),
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn cube(&self) -> Option<&GoalCube> {
        self.cube.as_ref()
    }

    pub fn is_cube(&self) -> bool {
        self.cube.is_some()
    }

    pub fn holds(&self, outcome: &Ballot) -> bool {
        match &self.cube {
            Some(c) => c.satisfied_by(outcome),
            None => self.formula.eval(outcome),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

/// Voters, issues, rule, goals and payoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationGame {
    structure: BAStructure,
    aggregator: Aggregator,
    names: IssueTable,
    goals: Vec<Goal>,
    payoffs: PayoffTable,
}

impl AggregationGame {
    pub fn new(
        structure: BAStructure,
        aggregator: Aggregator,
        goals: Vec<Goal>,
        payoffs: PayoffTable,
    ) -> Result<Self> {
        let names = IssueTable::anonymous(structure.issues());
        Self::with_names(structure, aggregator, names, goals, payoffs)
    }

    pub fn with_names(
        structure: BAStructure,
        aggregator: Aggregator,
        names: IssueTable,
        goals: Vec<Goal>,
        payoffs: PayoffTable,
    ) -> Result<Self> {
        aggregator.validate(&structure)?;
        payoffs.validate(&structure)?;
        if names.issues() != structure.issues() {
            return Err(Error::DimensionMismatch("issue name table".into()));
        }
        if goals.len() != structure.voters() {
            return Err(Error::DimensionMismatch(format!(
                "{} goals for {} voters",
                goals.len(),
                structure.voters()
            )));
        }
        for g in &goals {
            let bound = g.formula.atom_bound();
            if bound > structure.issues() {
                return Err(Error::IssueOutOfRange {
                    issue: bound,
                    issues: structure.issues(),
                });
            }
        }
        Ok(Self {
            structure,
            aggregator,
            names,
            goals,
            payoffs,
        })
    }

    /// Same game with a different payoff table.
    pub fn with_payoffs(&self, payoffs: PayoffTable) -> Result<Self> {
        payoffs.validate(&self.structure)?;
        Ok(Self {
            payoffs,
            ..self.clone()
        })
    }

    pub fn structure(&self) -> BAStructure {
        self.structure
    }

    pub fn voters(&self) -> usize {
        self.structure.voters()
    }

    pub fn issues(&self) -> usize {
        self.structure.issues()
    }

    pub fn aggregator(&self) -> &Aggregator {
        &self.aggregator
    }

    pub fn names(&self) -> &IssueTable {
        &self.names
    }

    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    pub fn goal(&self, i: usize) -> &Goal {
        &self.goals[i]
    }

    pub fn payoffs(&self) -> &PayoffTable {
        &self.payoffs
    }

    pub fn all_cubes(&self) -> bool {
        self.goals.iter().all(Goal::is_cube)
    }

    pub fn check_profile(&self, p: &BallotProfile) -> Result<()> {
        if p.voters() != self.voters() || p.issues() != self.issues() {
            return Err(Error::DimensionMismatch(format!(
                "profile is {}x{}, game is {}x{}",
                p.voters(),
                p.issues(),
                self.voters(),
                self.issues()
            )));
        }
        Ok(())
    }

    pub fn outcome(&self, p: &BallotProfile) -> Result<Ballot> {
        self.check_profile(p)?;
        Ok(self.aggregator.aggregate_unchecked(p))
    }

    pub fn payoff(&self, i: usize, p: &BallotProfile) -> Result<Q> {
        self.structure.check_voter(i)?;
        let outcome = self.outcome(p)?;
        Ok(self.payoffs.value(i, p.index(), outcome.code()))
    }

    /// Goals of the coalition's members, if all are cubes.
    pub fn coalition_cubes(&self, c: Coalition) -> Result<Vec<&GoalCube>> {
        c.members()
            .map(|i| {
                self.goals[i].cube().ok_or_else(|| {
                    Error::precondition("cube goals", format!("goal of voter {} is not a cube", i + 1))
                })
            })
            .collect()
    }

    /// Joint satisfiability of the coalition's goals (cube goals only).
    pub fn coalition_consistency(&self, c: Coalition) -> Result<Consistency> {
        cubes_consistent(self.coalition_cubes(c)?, self.issues())
    }

    /// Whether `outcome` satisfies every member's goal.
    pub fn efficient(&self, c: Coalition, outcome: &Ballot) -> bool {
        c.members().all(|i| self.goals[i].holds(outcome))
    }

    /// Whether `outcome` violates every member's goal.
    pub fn totally_inefficient(&self, c: Coalition, outcome: &Ballot) -> bool {
        c.members().all(|i| !self.goals[i].holds(outcome))
    }
}
