//! Balayage (sweeping) of atomic measures out of open intervals.
//!
//! For a finite interval `(a, b)` every atom in the closure is split between
//! the endpoints in the proportions of the Brownian exit law, so mass and
//! mean are preserved. For a half-line all mass in the closure collapses
//! onto the finite endpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure};

/// Which half-line a semi-infinite interval occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `(a, +∞)`
    Above,
    /// `(-∞, a)`
    Below,
}

/// Open interval with possibly one infinite end. `None` stands for `∓∞`.
///
/// Serialises as a two-element JSON array with `null` for an infinite end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "(Option<f64>, Option<f64>)",
    into = "(Option<f64>, Option<f64>)"
)]
pub struct Interval {
    lower: Option<f64>,
    upper: Option<f64>,
}

impl TryFrom<(Option<f64>, Option<f64>)> for Interval {
    type Error = Error;

    fn try_from((lower, upper): (Option<f64>, Option<f64>)) -> Result<Self> {
        Interval::new(lower, upper)
    }
}

impl From<Interval> for (Option<f64>, Option<f64>) {
    fn from(i: Interval) -> Self {
        (i.lower, i.upper)
    }
}

impl Interval {
    pub fn new(lower: Option<f64>, upper: Option<f64>) -> Result<Self> {
        let lo = lower.unwrap_or(f64::NEG_INFINITY);
        let hi = upper.unwrap_or(f64::INFINITY);
        let bad_end =
            lower.is_some_and(|a| !a.is_finite()) || upper.is_some_and(|b| !b.is_finite());
        if bad_end || lower.is_none() && upper.is_none() || !(lo < hi) {
            return Err(Error::InvalidInterval {
                lower: lo,
                upper: hi,
            });
        }
        Ok(Interval { lower, upper })
    }

    pub fn finite(a: f64, b: f64) -> Result<Self> {
        Self::new(Some(a), Some(b))
    }

    pub fn half_line(a: f64, side: Side) -> Result<Self> {
        match side {
            Side::Above => Self::new(Some(a), None),
            Side::Below => Self::new(None, Some(a)),
        }
    }

    pub fn lower(&self) -> Option<f64> {
        self.lower
    }

    pub fn upper(&self) -> Option<f64> {
        self.upper
    }

    /// Lower end with `-∞` for an unbounded side.
    pub fn lo(&self) -> f64 {
        self.lower.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn hi(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_some() && self.upper.is_some()
    }

    /// `Some((a, side))` for a half-line.
    pub fn half(&self) -> Option<(f64, Side)> {
        match (self.lower, self.upper) {
            (Some(a), None) => Some((a, Side::Above)),
            (None, Some(a)) => Some((a, Side::Below)),
            _ => None,
        }
    }

    /// Strict membership in the open interval.
    pub fn contains(&self, x: f64) -> bool {
        self.lo() < x && x < self.hi()
    }
}

/// Balayage of `m` on the finite interval `(a, b)`.
pub fn balayage_finite(m: &AtomicMeasure, a: f64, b: f64) -> Result<AtomicMeasure> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInterval { lower: a, upper: b });
    }
    let width = b - a;
    let mut out = Vec::with_capacity(m.len() + 2);
    for atom in m.atoms() {
        let x = atom.position;
        if x <= a || x >= b {
            // Outside, or already on an endpoint.
            out.push(*atom);
        } else {
            out.push(Atom {
                position: a,
                weight: atom.weight * (b - x) / width,
            });
            out.push(Atom {
                position: b,
                weight: atom.weight * (x - a) / width,
            });
        }
    }
    Ok(AtomicMeasure::from_raw(out))
}

/// Balayage of `m` on the half-line `(a, ∞)` (`Above`) or `(-∞, a)`
/// (`Below`): the closed half-line's mass collapses onto `a`.
pub fn balayage_semi(m: &AtomicMeasure, a: f64, side: Side) -> AtomicMeasure {
    let swept = |x: f64| match side {
        Side::Above => x >= a,
        Side::Below => x <= a,
    };
    AtomicMeasure::from_raw(
        m.atoms()
            .iter()
            .map(|atom| {
                if swept(atom.position) {
                    Atom {
                        position: a,
                        weight: atom.weight,
                    }
                } else {
                    *atom
                }
            })
            .collect(),
    )
}

/// `Δm = ∫_I |x - a| m(dx)` for the half-line `I` on `side` of `a`.
///
/// Sweeping `m` onto `a` raises its potential by exactly this amount off `I`.
pub fn delta_m(m: &AtomicMeasure, a: f64, side: Side) -> f64 {
    m.atoms()
        .iter()
        .filter(|atom| match side {
            Side::Above => atom.position > a,
            Side::Below => atom.position < a,
        })
        .map(|atom| atom.weight * (atom.position - a).abs())
        .sum()
}

/// Balayage on an arbitrary [`Interval`].
pub fn balayage(m: &AtomicMeasure, interval: &Interval) -> Result<AtomicMeasure> {
    match interval.half() {
        Some((a, side)) => Ok(balayage_semi(m, a, side)),
        None => balayage_finite(m, interval.lo(), interval.hi()),
    }
}
