//! Exact rational payoffs.
//!
//! Every payoff, transfer and comparison in the crate is carried out on
//! [`Q`]. Inputs are limited to 64-bit numerators and denominators so that
//! sums of a few thousand terms stay far inside the 128-bit range.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i128>;

pub fn int(v: i64) -> Q {
    Q::from_integer(v as i128)
}

/// Parses `p/q`, `p` or `-p/q`.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Q::new(num as i128, den as i128))
}

/// Always `p/q`, the wire form used for transfer witnesses.
pub fn format_fraction(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// `p` for integers, `p/q` otherwise.
pub fn format_short(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format_fraction(q)
    }
}

pub(crate) fn is_nonnegative(q: &Q) -> bool {
    !q.is_negative() || q.is_zero()
}
