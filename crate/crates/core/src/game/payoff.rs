use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{BAStructure, Ballot, BallotProfile, ProfileSpace};
use crate::rational::Q;

/// Per-voter payoff functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PayoffTable {
    /// One fixed value per voter.
    Constant(Vec<Q>),
    /// `values[i][outcome code]`, all `2^m` outcomes.
    Uniform(Vec<Vec<Q>>),
    /// `values[i][profile index]`, all `2^(n*m)` profiles.
    Full(Vec<Vec<Q>>),
}

impl PayoffTable {
    pub fn zero(voters: usize) -> Self {
        PayoffTable::Constant(vec![Q::from_integer(0); voters])
    }

    /// Uniform table from explicit outcome entries; missing outcomes get `default[i]`.
    pub fn uniform_from_entries<I>(structure: &BAStructure, default: &[Q], entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Ballot, Q)>,
    {
        check_len(default.len(), structure.voters(), "default payoffs")?;
        let size = structure.ballot_count() as usize;
        let mut values: Vec<Vec<Q>> = default.iter().map(|d| vec![*d; size]).collect();
        for (i, b, v) in entries {
            structure.check_voter(i)?;
            check_len(b.len(), structure.issues(), "outcome ballot")?;
            values[i][b.code() as usize] = v;
        }
        Ok(PayoffTable::Uniform(values))
    }

    /// Full table from explicit profile entries; missing profiles get `default[i]`.
    pub fn full_from_entries<I>(structure: &BAStructure, cap: usize, default: &[Q], entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, BallotProfile, Q)>,
    {
        check_len(default.len(), structure.voters(), "default payoffs")?;
        let space = structure.check_cap(cap, "full payoff table")?;
        let size = space.size() as usize;
        let mut values: Vec<Vec<Q>> = default.iter().map(|d| vec![*d; size]).collect();
        for (i, p, v) in entries {
            structure.check_voter(i)?;
            check_len(p.voters(), structure.voters(), "profile voters")?;
            check_len(p.issues(), structure.issues(), "profile issues")?;
            values[i][p.index() as usize] = v;
        }
        Ok(PayoffTable::Full(values))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PayoffTable::Constant(_) => "constant",
            PayoffTable::Uniform(_) => "uniform",
            PayoffTable::Full(_) => "full",
        }
    }

    pub fn voters(&self) -> usize {
        match self {
            PayoffTable::Constant(v) => v.len(),
            PayoffTable::Uniform(v) | PayoffTable::Full(v) => v.len(),
        }
    }

    pub(crate) fn validate(&self, structure: &BAStructure) -> Result<()> {
        check_len(self.voters(), structure.voters(), "payoff voters")?;
        match self {
            PayoffTable::Constant(_) => Ok(()),
            PayoffTable::Uniform(v) => v
                .iter()
                .try_for_each(|row| check_len(row.len() as u64, structure.ballot_count(), "uniform payoff rows")),
            PayoffTable::Full(v) => {
                let bits = structure.profile_bits();
                if bits >= 64 {
                    return Err(Error::DimensionMismatch("full payoff table too large".into()));
                }
                v.iter()
                    .try_for_each(|row| check_len(row.len() as u64, 1u64 << bits, "full payoff rows"))
            }
        }
    }

    /// Payoff of voter `i` at profile `index` whose outcome is `outcome`.
    #[inline]
    pub fn value(&self, i: usize, index: u64, outcome: u64) -> Q {
        match self {
            PayoffTable::Constant(v) => v[i],
            PayoffTable::Uniform(v) => v[i][outcome as usize],
            PayoffTable::Full(v) => v[i][index as usize],
        }
    }

    /// Dense per-profile table, as needed for transfers.
    pub(crate) fn materialize(&self, space: &ProfileSpace, outcomes: &[u64]) -> Vec<Vec<Q>> {
        (0..self.voters())
            .map(|i| {
                (0..space.size())
                    .map(|idx| self.value(i, idx, outcomes[idx as usize]))
                    .collect()
            })
            .collect()
    }

    /// Payoff of each voter per realised outcome, when it depends on the
    /// outcome alone. `None` entries are outcomes never realised.
    pub(crate) fn outcome_view(&self, issues: usize, outcomes: Option<&[u64]>) -> Option<Vec<Vec<Option<Q>>>> {
        let size = 1usize << issues;
        match self {
            PayoffTable::Constant(v) => Some(v.iter().map(|x| vec![Some(*x); size]).collect()),
            PayoffTable::Uniform(v) => Some(v.iter().map(|row| row.iter().map(|x| Some(*x)).collect()).collect()),
            PayoffTable::Full(v) => {
                let outcomes = outcomes?;
                let mut view = vec![vec![None; size]; v.len()];
                for (i, row) in v.iter().enumerate() {
                    for (idx, x) in row.iter().enumerate() {
                        let slot = &mut view[i][outcomes[idx] as usize];
                        match slot {
                            Some(y) if y != x => return None,
                            Some(_) => {}
                            None => *slot = Some(*x),
                        }
                    }
                }
                Some(view)
            }
        }
    }

    /// Per voter, the sparse form used by the game-file writer: most common
    /// value as default plus the exceptions.
    pub fn sparse_rows(&self) -> Vec<(Q, BTreeMap<u64, Q>)> {
        let rows: Vec<Vec<Q>> = match self {
            PayoffTable::Constant(v) => return v.iter().map(|x| (*x, BTreeMap::new())).collect(),
            PayoffTable::Uniform(v) | PayoffTable::Full(v) => v.clone(),
        };
        rows.into_iter()
            .map(|row| {
                let mut counts: BTreeMap<Q, usize> = BTreeMap::new();
                for x in &row {
                    *counts.entry(*x).or_default() += 1;
                }
                let default = counts
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                    .map(|(q, _)| *q)
                    .unwrap_or_default();
                let exceptions = row
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != default)
                    .map(|(k, x)| (k as u64, *x))
                    .collect();
                (default, exceptions)
            })
            .collect()
    }
}

fn check_len<T: PartialEq + std::fmt::Display>(got: T, want: T, what: &str) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{what}: got {got}, expected {want}")));
    }
    Ok(())
}
