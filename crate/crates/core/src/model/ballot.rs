use std::fmt;

use crate::error::{Error, Result};

/// Largest voter or issue count the bit-packed representations support.
pub const MAX_DIMENSION: usize = 32;

/// Voters and issues of a binary aggregation problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BAStructure {
    voters: usize,
    issues: usize,
}

impl BAStructure {
    pub fn new(voters: usize, issues: usize) -> Result<Self> {
        if voters < 3 || voters % 2 == 0 {
            return Err(Error::InvalidStructure(format!(
                "voter count must be odd and at least 3, got {voters}"
            )));
        }
        if issues == 0 {
            return Err(Error::InvalidStructure("at least one issue is required".into()));
        }
        if voters > MAX_DIMENSION || issues > MAX_DIMENSION {
            return Err(Error::InvalidStructure(format!(
                "at most {MAX_DIMENSION} voters and {MAX_DIMENSION} issues are supported"
            )));
        }
        Ok(Self { voters, issues })
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    pub fn issues(&self) -> usize {
        self.issues
    }

    /// Bits needed to index a whole profile (`n * m`).
    pub fn profile_bits(&self) -> usize {
        self.voters * self.issues
    }

    pub fn ballot_count(&self) -> u64 {
        1u64 << self.issues
    }

    /// All ballots in increasing binary order (issue 1 most significant).
    pub fn ballots(&self) -> impl Iterator<Item = Ballot> {
        let m = self.issues;
        (0..1u64 << m).map(move |code| Ballot::from_code(code, m))
    }

    pub fn check_voter(&self, voter: usize) -> Result<()> {
        if voter >= self.voters {
            return Err(Error::VoterOutOfRange {
                voter: voter + 1,
                voters: self.voters,
            });
        }
        Ok(())
    }

    pub fn check_issue(&self, issue: usize) -> Result<()> {
        if issue >= self.issues {
            return Err(Error::IssueOutOfRange {
                issue: issue + 1,
                issues: self.issues,
            });
        }
        Ok(())
    }

    /// Fails unless the whole profile space (`2^(n*m)`) fits within `cap` bits.
    pub fn check_cap(&self, cap: usize, what: &'static str) -> Result<ProfileSpace> {
        if self.profile_bits() > cap {
            return Err(Error::CapExceeded {
                what,
                needed: self.profile_bits(),
                cap,
            });
        }
        Ok(ProfileSpace::new(*self))
    }
}

/// A yes/no opinion on every issue.
///
/// Stored as a binary number whose most significant bit is issue 1, so the
/// derived ordering is the lexicographic order used for witnesses.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ballot {
    code: u64,
    len: u8,
}

impl Ballot {
    pub fn from_code(code: u64, len: usize) -> Self {
        debug_assert!(len <= 64 && (len == 64 || code >> len == 0));
        Self {
            code,
            len: len as u8,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_code(0, len)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let code = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Self::from_code(code, bits.len())
    }

    /// Parses `101`, `1 0 1` or `1,0,1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for (col, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | ',' | '(' | ')' => {}
                other => {
                    return Err(Error::Parse {
                        column: col + 1,
                        message: format!("unexpected `{other}` in ballot"),
                    })
                }
            }
        }
        if bits.is_empty() || bits.len() > MAX_DIMENSION {
            return Err(Error::Parse {
                column: 1,
                message: format!("ballot must have between 1 and {MAX_DIMENSION} issues"),
            });
        }
        Ok(Self::from_bits(&bits))
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit mask selecting `issue` within [`Ballot::code`].
    pub fn issue_mask(len: usize, issue: usize) -> u64 {
        1u64 << (len - 1 - issue)
    }

    pub fn get(&self, issue: usize) -> bool {
        self.code & Self::issue_mask(self.len(), issue) != 0
    }

    pub fn with(&self, issue: usize, value: bool) -> Self {
        let mask = Self::issue_mask(self.len(), issue);
        let code = if value { self.code | mask } else { self.code & !mask };
        Self { code, len: self.len }
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|j| self.get(j)).collect()
    }

    /// Bitwise complement.
    pub fn inverse(&self) -> Self {
        let mask = if self.len == 64 {
            u64::MAX
        } else {
            (1u64 << self.len) - 1
        };
        Self {
            code: !self.code & mask,
            len: self.len,
        }
    }

    /// `1 0 0` style rendering.
    pub fn spaced(&self) -> String {
        self.bits()
            .iter()
            .map(|&b| if b { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ballot({self})")
    }
}

/// Flips every issue of `b`.
pub fn inverse_ballot(b: &Ballot) -> Ballot {
    b.inverse()
}

/// One ballot per voter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallotProfile {
    ballots: Vec<Ballot>,
}

impl BallotProfile {
    pub fn new(structure: &BAStructure, ballots: Vec<Ballot>) -> Result<Self> {
        if ballots.len() != structure.voters() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} ballots, structure has {} voters",
                ballots.len(),
                structure.voters()
            )));
        }
        if let Some(b) = ballots.iter().find(|b| b.len() != structure.issues()) {
            return Err(Error::DimensionMismatch(format!(
                "ballot {b} has {} issues, structure has {}",
                b.len(),
                structure.issues()
            )));
        }
        Ok(Self { ballots })
    }

    pub fn unanimous(structure: &BAStructure, ballot: Ballot) -> Result<Self> {
        Self::new(structure, vec![ballot; structure.voters()])
    }

    /// Parses `n*m` bits in voter-major order; `,`, `/`, `_` and spaces
    /// are ignored as separators.
    pub fn parse(structure: &BAStructure, text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for (col, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | ',' | '/' | '_' | '\t' => {}
                other => {
                    return Err(Error::Parse {
                        column: col + 1,
                        message: format!("unexpected `{other}` in profile"),
                    })
                }
            }
        }
        let expected = structure.profile_bits();
        if bits.len() != expected {
            return Err(Error::Parse {
                column: text.chars().count().max(1),
                message: format!(
                    "profile has {} bits, expected {expected} ({} voters x {} issues)",
                    bits.len(),
                    structure.voters(),
                    structure.issues()
                ),
            });
        }
        let ballots = bits
            .chunks(structure.issues())
            .map(Ballot::from_bits)
            .collect();
        Self::new(structure, ballots)
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn ballot(&self, voter: usize) -> Ballot {
        self.ballots[voter]
    }

    pub fn voters(&self) -> usize {
        self.ballots.len()
    }

    pub fn issues(&self) -> usize {
        self.ballots.first().map_or(0, |b| b.len())
    }

    pub fn with_ballot(&self, voter: usize, ballot: Ballot) -> Self {
        let mut ballots = self.ballots.clone();
        ballots[voter] = ballot;
        Self { ballots }
    }

    /// Complements every ballot.
    pub fn inverse(&self) -> Self {
        Self {
            ballots: self.ballots.iter().map(Ballot::inverse).collect(),
        }
    }

    /// Position in the voter-major enumeration of all profiles.
    pub fn index(&self) -> u64 {
        let m = self.issues();
        self.ballots
            .iter()
            .fold(0u64, |acc, b| (acc << m) | b.code())
    }

    /// Ballots separated by spaces, e.g. `101 110 000`.
    pub fn grouped(&self) -> String {
        self.ballots
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for BallotProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.ballots {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BallotProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({})", self.grouped())
    }
}

/// Index arithmetic over the `2^(n*m)` profiles of a structure.
///
/// Voter 1's ballot occupies the most significant `m` bits, so increasing
/// indices enumerate profiles lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileSpace {
    structure: BAStructure,
    mask: u64,
}

impl ProfileSpace {
    pub(crate) fn new(structure: BAStructure) -> Self {
        assert!(structure.profile_bits() < 64, "profile index overflow");
        Self {
            structure,
            mask: (1u64 << structure.issues()) - 1,
        }
    }

    pub fn structure(&self) -> BAStructure {
        self.structure
    }

    pub fn size(&self) -> u64 {
        1u64 << self.structure.profile_bits()
    }

    pub fn voters(&self) -> usize {
        self.structure.voters()
    }

    pub fn issues(&self) -> usize {
        self.structure.issues()
    }

    fn shift(&self, voter: usize) -> usize {
        self.structure.issues() * (self.structure.voters() - 1 - voter)
    }

    /// Ballot code of `voter` within profile `index`.
    pub fn code(&self, index: u64, voter: usize) -> u64 {
        (index >> self.shift(voter)) & self.mask
    }

    pub fn ballot(&self, index: u64, voter: usize) -> Ballot {
        Ballot::from_code(self.code(index, voter), self.issues())
    }

    /// Profile `index` with `voter`'s ballot replaced by `code`.
    pub fn replace(&self, index: u64, voter: usize, code: u64) -> u64 {
        let s = self.shift(voter);
        (index & !(self.mask << s)) | (code << s)
    }

    pub fn profile(&self, index: u64) -> BallotProfile {
        BallotProfile {
            ballots: (0..self.voters()).map(|i| self.ballot(index, i)).collect(),
        }
    }

    /// Indices of all profiles in which `voter` casts ballot 0; each one
    /// stands for an opponent context.
    pub fn contexts(&self, voter: usize) -> impl Iterator<Item = u64> + '_ {
        let s = self.shift(voter);
        let hole = self.mask << s;
        (0..self.size()).filter(move |idx| idx & hole == 0)
    }
}
