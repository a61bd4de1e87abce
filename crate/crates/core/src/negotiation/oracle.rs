//! Brute-force subgame-perfect search over a finite menu of transfers.
//!
//! Each payer picks one menu entry (a transfer pattern and an amount) or
//! nothing. Every resulting transfer profile is solved for its pure
//! equilibria, one is selected deterministically, and the profiles from
//! which no payer gains by switching entry are reported. Deviations into
//! subgames without a pure equilibrium never count as profitable.

use std::collections::BTreeSet;
use std::thread;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{AggregationGame, GameTable};
use crate::model::{Ballot, BallotProfile, ProfileSpace, DEFAULT_PROFILE_BITS_CAP};
use crate::rational::{format_short, int, Q};

use super::constructions::payoff_bound_m;
use super::survival::EndogenousGame;
use super::transfer::TransferProfile;

/// Largest number of transfer profiles the oracle will enumerate.
pub const DEFAULT_GRID_CAP: u128 = 1_000_000;

/// A transfer pattern; the amount is chosen separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotGroup {
    /// Pay `payee` at one profile.
    Cell { profile: u64, payee: usize },
    /// Pay every other voter whenever the payer does not vote `ballot`.
    Commit { ballot: Ballot },
    /// Pay every other voter who votes `ballot`.
    Offer { ballot: Ballot },
    /// Pay `payee` whenever she votes `ballot`.
    OfferTo { payee: usize, ballot: Ballot },
}

impl SlotGroup {
    pub fn describe(&self) -> String {
        match self {
            SlotGroup::Cell { profile, payee } => format!("cell({profile},{})", payee + 1),
            SlotGroup::Commit { ballot } => format!("commit({ballot})"),
            SlotGroup::Offer { ballot } => format!("offer({ballot})"),
            SlotGroup::OfferTo { payee, ballot } => format!("offer-to({},{ballot})", payee + 1),
        }
    }

    /// Payees of `payer` at profile `idx`.
    fn payees(&self, space: &ProfileSpace, payer: usize, idx: u64) -> Vec<usize> {
        let n = space.voters();
        match *self {
            SlotGroup::Cell { profile, payee } => {
                if profile == idx {
                    vec![payee]
                } else {
                    vec![]
                }
            }
            SlotGroup::Commit { ballot } => {
                if space.code(idx, payer) != ballot.code() {
                    (0..n).filter(|&j| j != payer).collect()
                } else {
                    vec![]
                }
            }
            SlotGroup::Offer { ballot } => (0..n)
                .filter(|&j| j != payer && space.code(idx, j) == ballot.code())
                .collect(),
            SlotGroup::OfferTo { payee, ballot } => {
                if space.code(idx, payee) == ballot.code() {
                    vec![payee]
                } else {
                    vec![]
                }
            }
        }
    }
}

/// Which equilibrium the voting stage settles on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Always the smallest equilibrium profile.
    #[default]
    LexSmallest,
    /// Always the largest equilibrium profile.
    LexLargest,
    /// Any equilibrium may be played on path, and after a deviation the
    /// equilibrium worst for the deviator is played. This is exactly the
    /// subgame-perfect condition on the finite grid.
    Punishing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    amounts: Vec<Q>,
    menus: Vec<Vec<SlotGroup>>,
    pub selection: Selection,
}

impl GridSpec {
    /// Validates amounts (nonnegative, containing 0) and menus.
    pub fn new(game: &AggregationGame, amounts: Vec<Q>, menus: Vec<Vec<SlotGroup>>) -> Result<Self> {
        let n = game.voters();
        if !amounts.iter().any(Q::is_zero) {
            return Err(Error::InvalidTransfer("grid amounts must include 0".into()));
        }
        if let Some(a) = amounts.iter().find(|a| a.is_negative()) {
            return Err(Error::InvalidTransfer(format!("negative grid amount {}", format_short(a))));
        }
        if menus.len() != n {
            return Err(Error::DimensionMismatch(format!("{} menus for {n} voters", menus.len())));
        }
        for (p, menu) in menus.iter().enumerate() {
            for g in menu {
                let ok = match *g {
                    SlotGroup::Cell { payee, .. } | SlotGroup::OfferTo { payee, .. } => payee < n && payee != p,
                    _ => true,
                };
                if !ok {
                    return Err(Error::InvalidTransfer(format!("bad menu entry {} for voter {}", g.describe(), p + 1)));
                }
            }
        }
        let mut amounts: Vec<Q> = amounts.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        amounts.retain(|a| !a.is_zero());
        amounts.insert(0, Q::zero());
        Ok(Self {
            amounts,
            menus,
            selection: Selection::default(),
        })
    }

    /// Amounts `{0, M, 2M, 3M}` over the default menus.
    pub fn default_for(game: &AggregationGame) -> Result<Self> {
        let m = payoff_bound_m(game)?;
        Self::with_amounts(game, vec![Q::zero(), m, m * int(2), m * int(3)])
    }

    /// Default menus: commit to, or offer for, every ballot, to everybody or
    /// to a single voter.
    pub fn with_amounts(game: &AggregationGame, amounts: Vec<Q>) -> Result<Self> {
        let n = game.voters();
        let ballots: Vec<Ballot> = game.structure().ballots().collect();
        let menus = (0..n)
            .map(|p| {
                let mut menu: Vec<SlotGroup> = ballots.iter().map(|&ballot| SlotGroup::Commit { ballot }).collect();
                menu.extend(ballots.iter().map(|&ballot| SlotGroup::Offer { ballot }));
                for payee in (0..n).filter(|&j| j != p) {
                    menu.extend(ballots.iter().map(|&ballot| SlotGroup::OfferTo { payee, ballot }));
                }
                menu
            })
            .collect();
        Self::new(game, amounts, menus)
    }

    /// Only the void transfer.
    pub fn void(game: &AggregationGame) -> Self {
        Self {
            amounts: vec![Q::zero()],
            menus: vec![Vec::new(); game.voters()],
            selection: Selection::default(),
        }
    }

    pub fn amounts(&self) -> &[Q] {
        &self.amounts
    }

    pub fn menus(&self) -> &[Vec<SlotGroup>] {
        &self.menus
    }

    fn choices(&self, p: usize) -> usize {
        1 + self.menus[p].len() * (self.amounts.len() - 1)
    }

    /// Number of transfer profiles in the grid.
    pub fn size(&self) -> u128 {
        (0..self.menus.len()).map(|p| self.choices(p) as u128).product()
    }

    /// Menu entry `k` of payer `p`; `None` is the void choice.
    pub fn choice(&self, p: usize, k: usize) -> Option<(SlotGroup, Q)> {
        if k == 0 {
            return None;
        }
        let per = self.amounts.len() - 1;
        Some((self.menus[p][(k - 1) / per], self.amounts[1 + (k - 1) % per]))
    }

    pub fn describe_choice(&self, p: usize, k: usize) -> String {
        match self.choice(p, k) {
            None => "none".into(),
            Some((g, a)) => format!("{}={}", g.describe(), format_short(&a)),
        }
    }

    /// The transfer profile picked by `choices` (one menu index per payer).
    pub fn transfer(&self, game: &AggregationGame, choices: &[usize]) -> Result<TransferProfile> {
        let space = game.structure().check_cap(DEFAULT_PROFILE_BITS_CAP, "grid transfer")?;
        let mut tau = TransferProfile::void(game.structure());
        for (p, &k) in choices.iter().enumerate() {
            if let Some((g, a)) = self.choice(p, k) {
                for idx in 0..space.size() {
                    for j in g.payees(&space, p, idx) {
                        tau.set_index(p, idx, j, tau.get_index(p, idx, j) + a)?;
                    }
                }
            }
        }
        Ok(tau)
    }
}

/// One equilibrium path: the payers' menu choices and the vote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub choices: Vec<usize>,
    pub profile: BallotProfile,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub outcomes: Vec<OracleOutcome>,
    pub transfer_profiles: u64,
    /// Transfer profiles whose voting stage has no pure equilibrium.
    pub without_equilibrium: u64,
    /// Unilateral deviations into such subgames, discarded as unprofitable.
    pub discarded_deviations: u64,
}

impl OracleReport {
    /// Distinct on-path vote profiles, by index.
    pub fn on_path(&self) -> BTreeSet<u64> {
        self.outcomes.iter().map(|o| o.profile.index()).collect()
    }
}

/// Scaled integer form of the game and grid: all rationals times a common
/// denominator.
struct Scaled {
    space: ProfileSpace,
    n: usize,
    m: usize,
    base: Vec<i128>,
    sat: Vec<bool>,
    /// `patterns[p][choice]`: net units per (profile, voter), times amount.
    effects: Vec<Vec<Vec<i128>>>,
    radix: Vec<usize>,
}

impl Scaled {
    fn build(game: &AggregationGame, grid: &GridSpec, cap: usize) -> Result<Self> {
        let table = GameTable::new(game, cap)?;
        let space = *table.space();
        let n = game.voters();
        let size = space.size() as usize;
        let mut denom: i128 = 1;
        for idx in 0..space.size() {
            for i in 0..n {
                denom = denom.lcm(table.payoff(idx, i).denom());
            }
        }
        for a in grid.amounts() {
            denom = denom.lcm(a.denom());
        }
        let scale = |q: Q| q.numer() * (denom / q.denom());
        let mut base = vec![0i128; size * n];
        let mut sat = vec![false; size * n];
        for idx in 0..space.size() {
            for i in 0..n {
                base[idx as usize * n + i] = scale(table.payoff(idx, i));
                sat[idx as usize * n + i] = table.satisfied(idx, i);
            }
        }
        let mut effects = Vec::with_capacity(n);
        for p in 0..n {
            let mut per_choice = Vec::with_capacity(grid.choices(p));
            for k in 0..grid.choices(p) {
                let mut eff = vec![0i128; size * n];
                if let Some((g, a)) = grid.choice(p, k) {
                    let a = scale(a);
                    for idx in 0..space.size() {
                        for j in g.payees(&space, p, idx) {
                            eff[idx as usize * n + j] += a;
                            eff[idx as usize * n + p] -= a;
                        }
                    }
                }
                per_choice.push(eff);
            }
            effects.push(per_choice);
        }
        Ok(Self {
            space,
            n,
            m: game.issues(),
            base,
            sat,
            effects,
            radix: (0..n).map(|p| grid.choices(p)).collect(),
        })
    }

    fn decode(&self, mut t: u64) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for p in (0..self.n).rev() {
            out[p] = (t % self.radix[p] as u64) as usize;
            t /= self.radix[p] as u64;
        }
        out
    }

    fn encode(&self, choices: &[usize]) -> u64 {
        choices
            .iter()
            .zip(&self.radix)
            .fold(0u64, |acc, (&k, &r)| acc * r as u64 + k as u64)
    }

    fn load(&self, choices: &[usize], pay: &mut [i128]) {
        pay.copy_from_slice(&self.base);
        for (p, &k) in choices.iter().enumerate() {
            if k != 0 {
                for (x, e) in pay.iter_mut().zip(&self.effects[p][k]) {
                    *x += e;
                }
            }
        }
    }

    #[inline]
    fn standing(&self, pay: &[i128], idx: u64, i: usize) -> (bool, i128) {
        let k = idx as usize * self.n + i;
        (self.sat[k], pay[k])
    }

    fn is_ne(&self, pay: &[i128], idx: u64) -> bool {
        (0..self.n).all(|i| {
            let here = self.standing(pay, idx, i);
            let own = self.space.code(idx, i);
            (0..1u64 << self.m)
                .filter(|&c| c != own)
                .all(|c| self.standing(pay, self.space.replace(idx, i, c), i) <= here)
        })
    }

    /// Solves the voting stage under `choices` (loaded into `pay`).
    fn solve(&self, choices: &[usize], selection: Selection, pay: &mut [i128]) -> Option<Stage> {
        self.load(choices, pay);
        match selection {
            Selection::LexSmallest | Selection::LexLargest => {
                let found = if selection == Selection::LexSmallest {
                    (0..self.space.size()).find(|&idx| self.is_ne(pay, idx))
                } else {
                    (0..self.space.size()).rev().find(|&idx| self.is_ne(pay, idx))
                }?;
                Some(Stage {
                    selected: Some(found),
                    standings: (0..self.n).map(|i| self.standing(pay, found, i)).collect(),
                })
            }
            Selection::Punishing => {
                let mut worst: Option<Vec<(bool, i128)>> = None;
                for idx in (0..self.space.size()).filter(|&idx| self.is_ne(pay, idx)) {
                    let here: Vec<_> = (0..self.n).map(|i| self.standing(pay, idx, i)).collect();
                    worst = Some(match worst {
                        None => here,
                        Some(w) => w.into_iter().zip(here).map(|(a, b)| a.min(b)).collect(),
                    });
                }
                worst.map(|standings| Stage {
                    selected: None,
                    standings,
                })
            }
        }
    }
}

/// What a deviating payer can expect from a subgame: the selected
/// equilibrium's standings, or for punishing selection the worst standing
/// per voter over all equilibria.
struct Stage {
    selected: Option<u64>,
    standings: Vec<(bool, i128)>,
}

/// On-path outcomes of the subgame-perfect equilibria of the grid game.
pub fn grid_spe_oracle(endo: &EndogenousGame, grid: &GridSpec) -> Result<OracleReport> {
    grid_spe_oracle_capped(endo, grid, DEFAULT_PROFILE_BITS_CAP, DEFAULT_GRID_CAP)
}

pub fn grid_spe_oracle_capped(
    endo: &EndogenousGame,
    grid: &GridSpec,
    cap: usize,
    grid_cap: u128,
) -> Result<OracleReport> {
    let game = endo.base();
    if grid.menus().len() != game.voters() {
        return Err(Error::DimensionMismatch("grid menus".into()));
    }
    let total = grid.size();
    if total > grid_cap {
        return Err(Error::SpaceTooLarge {
            what: "transfer grid",
            size: total,
            cap: grid_cap,
        });
    }
    let scaled = Scaled::build(game, grid, cap)?;
    let total = total as u64;
    let workers = thread::available_parallelism().map_or(1, |w| w.get()).min(16) as u64;
    let chunk = total.div_ceil(workers).max(1);
    let selection = grid.selection;

    let solved: Vec<Option<Stage>> = thread::scope(|s| {
        let handles: Vec<_> = (0..total)
            .step_by(chunk as usize)
            .map(|start| {
                let scaled = &scaled;
                s.spawn(move || {
                    let mut pay = vec![0i128; scaled.base.len()];
                    (start..(start + chunk).min(total))
                        .map(|t| scaled.solve(&scaled.decode(t), selection, &mut pay))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    });

    let mut outcomes = Vec::new();
    let mut discarded = 0u64;
    let mut pay = vec![0i128; scaled.base.len()];
    for t in 0..total {
        let Some(stage) = &solved[t as usize] else {
            continue;
        };
        let choices = scaled.decode(t);
        // what each payer could secure by switching its own entry
        let mut threshold: Vec<Option<(bool, i128)>> = vec![None; scaled.n];
        for p in 0..scaled.n {
            let mut alt = choices.clone();
            for k in (0..scaled.radix[p]).filter(|&k| k != choices[p]) {
                alt[p] = k;
                match &solved[scaled.encode(&alt) as usize] {
                    None => discarded += 1,
                    Some(other) => {
                        let v = other.standings[p];
                        threshold[p] = Some(threshold[p].map_or(v, |w| w.max(v)));
                    }
                }
            }
        }
        let stable = |standings: &[(bool, i128)]| {
            (0..scaled.n).all(|p| threshold[p].is_none_or(|w| w <= standings[p]))
        };
        match stage.selected {
            Some(idx) => {
                if stable(&stage.standings) {
                    outcomes.push(OracleOutcome {
                        choices,
                        profile: scaled.space.profile(idx),
                    });
                }
            }
            None => {
                scaled.load(&choices, &mut pay);
                for idx in (0..scaled.space.size()).filter(|&idx| scaled.is_ne(&pay, idx)) {
                    let here: Vec<_> = (0..scaled.n).map(|i| scaled.standing(&pay, idx, i)).collect();
                    if stable(&here) {
                        outcomes.push(OracleOutcome {
                            choices: choices.clone(),
                            profile: scaled.space.profile(idx),
                        });
                    }
                }
            }
        }
    }
    Ok(OracleReport {
        outcomes,
        transfer_profiles: total,
        without_equilibrium: solved.iter().filter(|s| s.is_none()).count() as u64,
        discarded_deviations: discarded,
    })
}
