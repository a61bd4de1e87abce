//! Propositional goals and integrity constraints over issue atoms.

mod cube;
mod formula;

pub use cube::{
    admissible_ballots, as_cube, cubes_consistent, entails, models_of, Consistency, GoalCube,
    MAX_MODEL_ISSUES,
};
pub use formula::{parse_formula, satisfies, Formula, IssueTable};
