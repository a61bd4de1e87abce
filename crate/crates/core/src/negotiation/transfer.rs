use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{AggregationGame, GameTable, PayoffTable};
use crate::model::{BAStructure, BallotProfile, DEFAULT_PROFILE_BITS_CAP};
use crate::rational::{format_fraction, is_nonnegative, parse_rational, Q};

/// Sparse side payments: `(payer, profile index, payee) -> amount`.
/// Absent entries are zero; the empty map is the void transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferProfile {
    structure: BAStructure,
    entries: BTreeMap<(usize, u64, usize), Q>,
}

impl TransferProfile {
    pub fn void(structure: BAStructure) -> Self {
        Self {
            structure,
            entries: BTreeMap::new(),
        }
    }

    pub fn structure(&self) -> BAStructure {
        self.structure
    }

    fn check(&self, payer: usize, index: u64, payee: usize, amount: &Q) -> Result<()> {
        self.structure.check_voter(payer)?;
        self.structure.check_voter(payee)?;
        if payer == payee {
            return Err(Error::InvalidTransfer(format!("voter {} pays itself", payer + 1)));
        }
        if !is_nonnegative(amount) {
            return Err(Error::InvalidTransfer(format!(
                "negative amount {}",
                format_fraction(amount)
            )));
        }
        let bits = self.structure.profile_bits();
        if bits >= 64 || index >= 1u64 << bits {
            return Err(Error::InvalidTransfer(format!("profile index {index} out of range")));
        }
        Ok(())
    }

    /// Sets one entry; a zero amount removes it.
    pub fn set(&mut self, payer: usize, profile: &BallotProfile, payee: usize, amount: Q) -> Result<()> {
        if profile.voters() != self.structure.voters() || profile.issues() != self.structure.issues() {
            return Err(Error::DimensionMismatch("transfer profile dimensions".into()));
        }
        self.set_index(payer, profile.index(), payee, amount)
    }

    pub fn set_index(&mut self, payer: usize, index: u64, payee: usize, amount: Q) -> Result<()> {
        self.check(payer, index, payee, &amount)?;
        if amount.is_zero() {
            self.entries.remove(&(payer, index, payee));
        } else {
            self.entries.insert((payer, index, payee), amount);
        }
        Ok(())
    }

    pub fn get_index(&self, payer: usize, index: u64, payee: usize) -> Q {
        self.entries.get(&(payer, index, payee)).copied().unwrap_or_else(Q::zero)
    }

    pub fn get(&self, payer: usize, profile: &BallotProfile, payee: usize) -> Q {
        self.get_index(payer, profile.index(), payee)
    }

    pub fn is_void(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries as `(payer, profile index, payee, amount)`, ordered.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u64, usize, Q)> + '_ {
        self.entries.iter().map(|(&(p, idx, q), &a)| (p, idx, q, a))
    }

    /// The same profile with payer `i`'s entries dropped.
    pub fn without_payer(&self, i: usize) -> Self {
        Self {
            structure: self.structure,
            entries: self
                .entries
                .iter()
                .filter(|((p, _, _), _)| *p != i)
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    fn profile_bits(&self, index: u64) -> String {
        let bits = self.structure.profile_bits();
        format!("{:0width$b}", index, width = bits)
    }

    /// One `payer profile payee p/q` line per entry (1-based voters).
    pub fn to_lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(&(p, idx, q), a)| {
                format!("{} {} {} {}", p + 1, self.profile_bits(idx), q + 1, format_fraction(a))
            })
            .collect()
    }

    pub fn parse_lines(structure: BAStructure, text: &str) -> Result<Self> {
        let mut tau = Self::void(structure);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                column: 1,
                message: format!("transfer line {}: {msg}", ln + 1),
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [payer, bits, payee, amount] = parts[..] else {
                return Err(bad("expected `payer profile payee amount`"));
            };
            let payer: usize = payer.parse().map_err(|_| bad("bad payer"))?;
            let payee: usize = payee.parse().map_err(|_| bad("bad payee"))?;
            if payer == 0 || payee == 0 {
                return Err(bad("voters are numbered from 1"));
            }
            if bits.len() != structure.profile_bits() {
                return Err(bad("profile has the wrong length"));
            }
            let index = u64::from_str_radix(bits, 2).map_err(|_| bad("profile is not a bit string"))?;
            tau.set_index(payer - 1, index, payee - 1, parse_rational(amount)?)?;
        }
        Ok(tau)
    }
}

impl fmt::Display for TransferProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.to_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// The game whose payoffs are updated by `tau`: every voter gains what the
/// others pay her and loses what she pays them, profile by profile.
pub fn apply_transfers(game: &AggregationGame, tau: &TransferProfile) -> Result<AggregationGame> {
    apply_transfers_capped(game, tau, DEFAULT_PROFILE_BITS_CAP)
}

pub fn apply_transfers_capped(game: &AggregationGame, tau: &TransferProfile, cap: usize) -> Result<AggregationGame> {
    if tau.structure() != game.structure() {
        return Err(Error::DimensionMismatch("transfer profile and game differ in shape".into()));
    }
    let table = GameTable::new(game, cap)?;
    let mut values = game.payoffs().materialize(table.space(), table.outcomes());
    for (&(payer, idx, payee), &a) in &tau.entries {
        values[payer][idx as usize] -= a;
        values[payee][idx as usize] += a;
    }
    game.with_payoffs(PayoffTable::Full(values))
}
