use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A set of voters, stored as a bit mask over 0-based voter indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_mask(mask: u64) -> Self {
        Coalition(mask)
    }

    /// Everybody in an electorate of `n` voters.
    pub fn grand(n: usize) -> Self {
        Coalition((1u64 << n) - 1)
    }

    /// From 0-based voter indices.
    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        Coalition(members.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    /// Parses `1,2,3`, `{1,2}` or `N` (1-based).
    pub fn parse(text: &str, voters: usize) -> Result<Self> {
        let t = text.trim();
        if t == "N" {
            return Ok(Self::grand(voters));
        }
        let inner = t.trim_start_matches('{').trim_end_matches('}');
        let mut c = Coalition::EMPTY;
        for part in inner.split(|c: char| c == ',' || c.is_whitespace()) {
            if part.is_empty() {
                continue;
            }
            let v: usize = part.parse().map_err(|_| Error::Parse {
                column: 1,
                message: format!("bad voter `{part}` in coalition `{text}`"),
            })?;
            if v == 0 || v > voters {
                return Err(Error::VoterOutOfRange { voter: v, voters });
            }
            c = c.with(v - 1);
        }
        Ok(c)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn contains(&self, voter: usize) -> bool {
        self.0 >> voter & 1 == 1
    }

    pub fn with(&self, voter: usize) -> Self {
        Coalition(self.0 | 1 << voter)
    }

    pub fn without(&self, voter: usize) -> Self {
        Coalition(self.0 & !(1 << voter))
    }

    pub fn complement(&self, n: usize) -> Self {
        Coalition(!self.0 & Self::grand(n).0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..64).filter(move |i| mask >> i & 1 == 1)
    }

    /// `N` for the grand coalition, `{1,3}` otherwise.
    pub fn label(&self, n: usize) -> String {
        if *self == Self::grand(n) {
            "N".to_string()
        } else {
            self.to_string()
        }
    }

    /// All `2^n` coalitions in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        (0..1u64 << n).map(Coalition)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A set of coalitions over a fixed electorate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionFamily {
    voters: usize,
    members: BTreeSet<Coalition>,
}

impl CoalitionFamily {
    pub fn new<I: IntoIterator<Item = Coalition>>(voters: usize, members: I) -> Result<Self> {
        let members: BTreeSet<Coalition> = members.into_iter().collect();
        if let Some(c) = members.iter().find(|c| !c.is_subset(&Coalition::grand(voters))) {
            return Err(Error::DimensionMismatch(format!(
                "coalition {c} mentions voters beyond {voters}"
            )));
        }
        Ok(Self { voters, members })
    }

    pub fn empty(voters: usize) -> Self {
        Self {
            voters,
            members: BTreeSet::new(),
        }
    }

    /// Every coalition with at least `k` members.
    pub fn threshold(voters: usize, k: usize) -> Self {
        Self {
            voters,
            members: Coalition::all(voters).filter(|c| c.len() >= k).collect(),
        }
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    pub fn contains(&self, c: &Coalition) -> bool {
        self.members.contains(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Coalition> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Smallest superset-closed family containing `self`.
    pub fn upward_closure(&self) -> Self {
        let members = Coalition::all(self.voters)
            .filter(|c| self.members.iter().any(|g| g.is_subset(c)))
            .collect();
        Self {
            voters: self.voters,
            members,
        }
    }

    /// Checks closure under supersets. On failure returns the smallest pair
    /// `(C, C')` with `C` in the family, `C' = C + {i}` outside it.
    pub fn is_monotonic(&self) -> std::result::Result<(), (Coalition, Coalition)> {
        for c in &self.members {
            for i in 0..self.voters {
                if !c.contains(i) && !self.contains(&c.with(i)) {
                    return Err((*c, c.with(i)));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CoalitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Free-function form of [`CoalitionFamily::is_monotonic`].
pub fn is_monotonic(family: &CoalitionFamily) -> std::result::Result<(), (Coalition, Coalition)> {
    family.is_monotonic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(members: &[usize]) -> Coalition {
        Coalition::from_members(members.iter().map(|i| i - 1))
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(c(&[1, 3]).to_string(), "{1,3}");
        assert_eq!(Coalition::grand(3).label(3), "N");
        assert_eq!(Coalition::EMPTY.to_string(), "{}");
    }

    #[test]
    fn parse_accepts_braces_and_grand() {
        assert_eq!(Coalition::parse("{1,2}", 3).unwrap(), c(&[1, 2]));
        assert_eq!(Coalition::parse("2 3", 3).unwrap(), c(&[2, 3]));
        assert_eq!(Coalition::parse("N", 5).unwrap(), Coalition::grand(5));
        assert!(Coalition::parse("4", 3).is_err());
    }

    #[test]
    fn majority_family_is_monotonic() {
        assert!(CoalitionFamily::threshold(3, 2).is_monotonic().is_ok());
    }

    #[test]
    fn missing_superset_is_reported() {
        let f = CoalitionFamily::new(3, [c(&[1, 2])]).unwrap();
        assert_eq!(f.is_monotonic(), Err((c(&[1, 2]), c(&[1, 2, 3]))));
    }

    #[test]
    fn empty_family_is_vacuously_monotonic() {
        assert!(CoalitionFamily::empty(3).is_monotonic().is_ok());
    }

    #[test]
    fn closure_is_monotonic() {
        let f = CoalitionFamily::new(5, [c(&[1, 2]), c(&[4])]).unwrap().upward_closure();
        assert!(f.is_monotonic().is_ok());
        assert!(f.contains(&c(&[1, 2, 5])));
        assert!(!f.contains(&c(&[1, 3])));
    }
}
