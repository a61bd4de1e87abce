use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

use super::ballot::{BAStructure, Ballot, BallotProfile, ProfileSpace};
use super::coalition::{Coalition, CoalitionFamily};

/// Default cap on `n * m` for exhaustive profile enumeration (about 10^6 profiles).
pub const DEFAULT_PROFILE_BITS_CAP: usize = 20;

/// An aggregation rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Aggregator {
    /// Issue-wise strict majority.
    Majority,
    /// Accept issue `j` iff at least `thresholds[j]` voters accept it.
    Quota(Vec<usize>),
    /// Accept an issue iff its acceptors form a member of the family.
    /// Built through [`Aggregator::explicit_family`], which checks monotonicity.
    ExplicitFamily(CoalitionFamily),
    /// Arbitrary rule given by its outcome on every profile, indexed as in
    /// [`ProfileSpace`]. Only meant for exercising the axiom checkers.
    GeneralTable(Vec<Ballot>),
}

impl Aggregator {
    pub fn quota(structure: &BAStructure, thresholds: Vec<usize>) -> Result<Self> {
        if thresholds.len() != structure.issues() {
            return Err(Error::DimensionMismatch(format!(
                "{} quota thresholds for {} issues",
                thresholds.len(),
                structure.issues()
            )));
        }
        if let Some(q) = thresholds
            .iter()
            .find(|&&q| q == 0 || q > structure.voters())
        {
            return Err(Error::InvalidStructure(format!(
                "quota {q} outside [1, {}]",
                structure.voters()
            )));
        }
        Ok(Aggregator::Quota(thresholds))
    }

    pub fn explicit_family(family: CoalitionFamily) -> Result<Self> {
        family
            .is_monotonic()
            .map_err(|(member, superset)| Error::NotMonotonic { member, superset })?;
        Ok(Aggregator::ExplicitFamily(family))
    }

    /// Tabulates `rule` over the whole profile space.
    pub fn general_table<F>(structure: &BAStructure, cap: usize, mut rule: F) -> Result<Self>
    where
        F: FnMut(&BallotProfile) -> Ballot,
    {
        let space = structure.check_cap(cap, "general aggregation table")?;
        let table = (0..space.size())
            .map(|idx| rule(&space.profile(idx)))
            .collect();
        Ok(Aggregator::GeneralTable(table))
    }

    /// Checks that the rule is dimensioned for `structure`.
    pub fn validate(&self, structure: &BAStructure) -> Result<()> {
        match self {
            Aggregator::Majority => Ok(()),
            Aggregator::Quota(q) => Aggregator::quota(structure, q.clone()).map(|_| ()),
            Aggregator::ExplicitFamily(f) if f.voters() != structure.voters() => {
                Err(Error::DimensionMismatch(format!(
                    "coalition family over {} voters, structure has {}",
                    f.voters(),
                    structure.voters()
                )))
            }
            Aggregator::ExplicitFamily(_) => Ok(()),
            Aggregator::GeneralTable(t) => {
                let bits = structure.profile_bits();
                if bits >= 64 || t.len() as u64 != 1u64 << bits {
                    return Err(Error::DimensionMismatch(format!(
                        "table has {} rows, structure needs 2^{bits}",
                        t.len()
                    )));
                }
                if t.iter().any(|b| b.len() != structure.issues()) {
                    return Err(Error::DimensionMismatch("table ballot width".into()));
                }
                Ok(())
            }
        }
    }

    /// Outcome on one issue given its acceptor set; `None` for tables.
    fn decide(&self, n: usize, issue: usize, acceptors: Coalition) -> Option<bool> {
        match self {
            Aggregator::Majority => Some(acceptors.len() >= n.div_ceil(2)),
            Aggregator::Quota(q) => Some(acceptors.len() >= q[issue]),
            Aggregator::ExplicitFamily(f) => Some(f.contains(&acceptors)),
            Aggregator::GeneralTable(_) => None,
        }
    }

    /// Collective ballot for `profile`.
    pub fn aggregate(&self, profile: &BallotProfile) -> Result<Ballot> {
        let structure = BAStructure::new(profile.voters(), profile.issues())
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        self.validate(&structure)?;
        Ok(self.aggregate_unchecked(profile))
    }

    pub(crate) fn aggregate_unchecked(&self, profile: &BallotProfile) -> Ballot {
        let n = profile.voters();
        let m = profile.issues();
        if let Aggregator::GeneralTable(t) = self {
            return t[profile.index() as usize];
        }
        let mut out = Ballot::zeros(m);
        for j in 0..m {
            let acceptors = acceptors_of(profile, j);
            if self.decide(n, j, acceptors).unwrap_or(false) {
                out = out.with(j, true);
            }
        }
        out
    }

    /// Outcome code of profile `index`; the hot path of the game engine.
    pub(crate) fn aggregate_index(&self, space: &ProfileSpace, index: u64) -> u64 {
        if let Aggregator::GeneralTable(t) = self {
            return t[index as usize].code();
        }
        let n = space.voters();
        let m = space.issues();
        let mut out = 0u64;
        for j in 0..m {
            let bit = Ballot::issue_mask(m, j);
            let mut acceptors = 0u64;
            for i in 0..n {
                if space.code(index, i) & bit != 0 {
                    acceptors |= 1 << i;
                }
            }
            if self
                .decide(n, j, Coalition::from_mask(acceptors))
                .unwrap_or(false)
            {
                out |= bit;
            }
        }
        out
    }

    pub fn name(&self) -> &'static str {
        match self {
            Aggregator::Majority => "majority",
            Aggregator::Quota(_) => "quota",
            Aggregator::ExplicitFamily(_) => "coalitions",
            Aggregator::GeneralTable(_) => "table",
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregator::Majority => write!(f, "majority"),
            Aggregator::Quota(q) => {
                let qs: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                write!(f, "quota {}", qs.join(" "))
            }
            Aggregator::ExplicitFamily(fam) => write!(f, "coalitions {fam}"),
            Aggregator::GeneralTable(t) => write!(f, "table ({} rows)", t.len()),
        }
    }
}

fn acceptors_of(profile: &BallotProfile, issue: usize) -> Coalition {
    Coalition::from_members(
        profile
            .ballots()
            .iter()
            .enumerate()
            .filter(|(_, b)| b.get(issue))
            .map(|(i, _)| i),
    )
}

/// Voters accepting `issue` in `profile`.
pub fn acceptor_set(profile: &BallotProfile, issue: usize) -> Result<Coalition> {
    if issue >= profile.issues() {
        return Err(Error::IssueOutOfRange {
            issue: issue + 1,
            issues: profile.issues(),
        });
    }
    Ok(acceptors_of(profile, issue))
}

/// Free-function form of [`Aggregator::aggregate`].
pub fn aggregate(agg: &Aggregator, profile: &BallotProfile) -> Result<Ballot> {
    agg.aggregate(profile)
}

/// Two (profile, issue) pairs with the same acceptor set and different outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicityWitness {
    pub acceptors: Coalition,
    pub accepted: (BallotProfile, usize),
    pub rejected: (BallotProfile, usize),
}

impl fmt::Display for SystematicityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "acceptors {} accept issue {} in profile {} but reject issue {} in profile {}",
            self.acceptors,
            self.accepted.1 + 1,
            self.accepted.0.grouped(),
            self.rejected.1 + 1,
            self.rejected.0.grouped()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Systematicity {
    /// Decided issue-wise by one family; carries `W_F`.
    Systematic(CoalitionFamily),
    NotSystematic {
        witness: SystematicityWitness,
        /// One family per issue when each issue, taken alone, depends only on
        /// its acceptor set (e.g. quota rules with differing thresholds).
        per_issue: Option<Vec<CoalitionFamily>>,
    },
}

impl Systematicity {
    pub fn is_systematic(&self) -> bool {
        matches!(self, Systematicity::Systematic(_))
    }
}

/// Decides whether `agg` is characterised by a single family of coalitions.
///
/// Majority, uniform quotas and explicit families are systematic by
/// construction. Other rules are checked by enumerating every profile, so
/// the lexicographically smallest witness is reported.
pub fn is_systematic(agg: &Aggregator, structure: &BAStructure, cap: usize) -> Result<Systematicity> {
    agg.validate(structure)?;
    let n = structure.voters();
    match agg {
        Aggregator::Majority => {
            return Ok(Systematicity::Systematic(CoalitionFamily::threshold(
                n,
                n.div_ceil(2),
            )))
        }
        Aggregator::Quota(q) if q.windows(2).all(|w| w[0] == w[1]) => {
            return Ok(Systematicity::Systematic(CoalitionFamily::threshold(n, q[0])))
        }
        Aggregator::ExplicitFamily(f) => return Ok(Systematicity::Systematic(f.clone())),
        _ => {}
    }

    let space = structure.check_cap(cap, "systematicity check")?;
    let m = structure.issues();
    let mut first_seen: HashMap<Coalition, (u64, usize, bool)> = HashMap::new();
    let mut per_issue: Vec<HashMap<Coalition, bool>> = vec![HashMap::new(); m];
    let mut per_issue_ok = true;
    let mut witness = None;

    for idx in 0..space.size() {
        let profile = space.profile(idx);
        let outcome = agg.aggregate_unchecked(&profile);
        for j in 0..m {
            let s = acceptors_of(&profile, j);
            let x = outcome.get(j);
            match per_issue[j].get(&s) {
                Some(&y) if y != x => per_issue_ok = false,
                Some(_) => {}
                None => {
                    per_issue[j].insert(s, x);
                }
            }
            match first_seen.get(&s) {
                Some(&(pidx, pj, y)) if y != x && witness.is_none() => {
                    let earlier = (space.profile(pidx), pj);
                    let later = (profile.clone(), j);
                    let (accepted, rejected) = if y { (earlier, later) } else { (later, earlier) };
                    witness = Some(SystematicityWitness {
                        acceptors: s,
                        accepted,
                        rejected,
                    });
                }
                Some(_) => {}
                None => {
                    first_seen.insert(s, (idx, j, x));
                }
            }
        }
    }

    match witness {
        None => {
            let family = CoalitionFamily::new(
                n,
                first_seen
                    .into_iter()
                    .filter(|(_, (_, _, x))| *x)
                    .map(|(c, _)| c),
            )?;
            Ok(Systematicity::Systematic(family))
        }
        Some(witness) => {
            let per_issue = if per_issue_ok {
                let fams = per_issue
                    .into_iter()
                    .map(|map| {
                        CoalitionFamily::new(n, map.into_iter().filter(|(_, x)| *x).map(|(c, _)| c))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(fams)
            } else {
                None
            };
            Ok(Systematicity::NotSystematic { witness, per_issue })
        }
    }
}

/// The family `W_F` characterising `agg`, or an error carrying a witness.
pub fn systematic_family(agg: &Aggregator, structure: &BAStructure, cap: usize) -> Result<CoalitionFamily> {
    match is_systematic(agg, structure, cap)? {
        Systematicity::Systematic(f) => Ok(f),
        Systematicity::NotSystematic { witness, .. } => Err(Error::NotSystematic(Box::new(witness))),
    }
}

/// Coalitions that force the outcome on an issue whenever they vote unanimously
/// and everybody else votes the other way.
///
/// For a systematic rule with family `W`, `C` is winning iff `C` is in `W`
/// (forcing acceptance) and its complement is not (forcing rejection).
/// Self-dual families such as majority are returned unchanged.
pub fn winning_coalitions(agg: &Aggregator, structure: &BAStructure, cap: usize) -> Result<CoalitionFamily> {
    let family = systematic_family(agg, structure, cap)?;
    let n = structure.voters();
    CoalitionFamily::new(
        n,
        family
            .iter()
            .copied()
            .filter(|c| !family.contains(&c.complement(n)))
            .collect::<Vec<_>>(),
    )
}

/// Winning coalitions that stay winning after losing any single member.
pub fn resilient_winning_coalitions(
    agg: &Aggregator,
    structure: &BAStructure,
    cap: usize,
) -> Result<CoalitionFamily> {
    let winning = winning_coalitions(agg, structure, cap)?;
    Ok(resilient_subfamily(&winning))
}

fn resilient_subfamily(winning: &CoalitionFamily) -> CoalitionFamily {
    let members: Vec<Coalition> = winning
        .iter()
        .copied()
        .filter(|c| c.members().all(|i| winning.contains(&c.without(i))))
        .collect();
    CoalitionFamily::new(winning.voters(), members).expect("subfamily of a valid family")
}
