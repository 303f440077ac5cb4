//! Finitely supported (sub-)probability measures on the real line.
//!
//! Atoms are kept sorted by position with coincident positions merged, so two
//! measures built from the same mass distribution compare structurally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Kink, PLConcave};
use crate::{TAU, TAU_MASS};

/// A single point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

impl From<(f64, f64)> for Atom {
    fn from((position, weight): (f64, f64)) -> Self {
        Atom { position, weight }
    }
}

impl From<Atom> for (f64, f64) {
    fn from(a: Atom) -> Self {
        (a.position, a.weight)
    }
}

/// Finitely atomic measure with total mass in `(0, 1]`.
///
/// On the wire this is a JSON array of `[position, weight]` pairs sorted by
/// position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for AtomicMeasure {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        AtomicMeasure::new(atoms.into_iter().map(|a| (a.position, a.weight)))
    }
}

impl From<AtomicMeasure> for Vec<Atom> {
    fn from(m: AtomicMeasure) -> Self {
        m.atoms
    }
}

/// Sort by position, merge equal positions, drop zero weights.
fn canonical(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if a.weight <= 0.0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.position == a.position => last.weight += a.weight,
            _ => out.push(a),
        }
    }
    out
}

impl AtomicMeasure {
    /// Builds a measure from `(position, weight)` pairs in any order.
    ///
    /// Pairs at the same position are merged. Positions must be finite,
    /// weights finite and strictly positive, and the total mass in `(0, 1]`.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let atoms: Vec<Atom> = atoms.into_iter().map(Atom::from).collect();
        for a in &atoms {
            if !a.position.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "non-finite position {}",
                    a.position
                )));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "weight {} at {} is not strictly positive",
                    a.weight, a.position
                )));
            }
        }
        let atoms = canonical(atoms);
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mass: f64 = atoms.iter().map(|a| a.weight).sum();
        if mass > 1.0 + TAU_MASS {
            return Err(Error::InvalidMeasure(format!(
                "total mass {mass} exceeds 1"
            )));
        }
        Ok(AtomicMeasure { atoms })
    }

    /// Same as [`AtomicMeasure::new`] but additionally requires total mass 1.
    pub fn probability<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let m = Self::new(atoms)?;
        m.require_probability()?;
        Ok(m)
    }

    /// Unit mass at `x`.
    pub fn dirac(x: f64) -> Self {
        AtomicMeasure {
            atoms: vec![Atom {
                position: x,
                weight: 1.0,
            }],
        }
    }

    /// Internal constructor for measures produced by exact operations on
    /// valid measures. May be empty (zero mass) for split remainders.
    pub(crate) fn from_raw(atoms: Vec<Atom>) -> Self {
        AtomicMeasure {
            atoms: canonical(atoms),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.position)
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.mass() - 1.0).abs() <= TAU_MASS
    }

    pub fn require_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::InvalidMeasure(format!(
                "expected a probability measure, total mass is {}",
                self.mass()
            )))
        }
    }

    /// Barycentre `Σ wᵢxᵢ / Σ wᵢ`.
    pub fn mean(&self) -> f64 {
        let first = self
            .atoms
            .iter()
            .map(|a| a.weight * a.position)
            .sum::<f64>();
        first / self.mass()
    }

    /// First moment `Σ wᵢxᵢ` (not normalised).
    pub fn first_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.position).sum()
    }

    /// `m((-∞, x))`
    pub fn mass_below(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.position < x)
            .map(|a| a.weight)
            .sum()
    }

    /// `m((-∞, x])`
    pub fn mass_at_or_below(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.position <= x)
            .map(|a| a.weight)
            .sum()
    }

    /// `m([x, ∞))`
    pub fn mass_at_or_above(&self, x: f64) -> f64 {
        self.mass() - self.mass_below(x)
    }

    /// Weight of the atom at exactly `x` (zero if none).
    pub fn weight_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.position == x)
            .map_or(0.0, |a| a.weight)
    }

    /// Smallest and largest atom position.
    pub fn support_hull(&self) -> (f64, f64) {
        (
            self.atoms.first().map_or(0.0, |a| a.position),
            self.atoms.last().map_or(0.0, |a| a.position),
        )
    }

    /// Image under `x ↦ -x`.
    pub fn mirrored(&self) -> Self {
        AtomicMeasure::from_raw(
            self.atoms
                .iter()
                .map(|a| Atom {
                    position: -a.position,
                    weight: a.weight,
                })
                .collect(),
        )
    }

    /// Splits `self` at `a` into the part carried by `(-∞, a]` with total
    /// mass `theta` and the remainder. Mass of an atom at `a` is divided so
    /// that the lower part has exactly mass `theta`.
    pub fn split_at(&self, a: f64, theta: f64) -> Result<(AtomicMeasure, AtomicMeasure)> {
        let below = self.mass_below(a);
        let at_or_below = self.mass_at_or_below(a);
        if !(theta >= below - TAU_MASS && theta <= at_or_below + TAU_MASS) {
            return Err(Error::InvalidSplit {
                theta,
                lower: below,
                upper: at_or_below,
            });
        }
        let theta = theta.clamp(below, at_or_below);
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for atom in &self.atoms {
            if atom.position < a {
                lower.push(*atom);
            } else if atom.position > a {
                upper.push(*atom);
            } else {
                let low_part = theta - below;
                lower.push(Atom {
                    position: a,
                    weight: low_part,
                });
                upper.push(Atom {
                    position: a,
                    weight: atom.weight - low_part,
                });
            }
        }
        Ok((
            AtomicMeasure::from_raw(lower),
            AtomicMeasure::from_raw(upper),
        ))
    }

    /// Atom-by-atom comparison: equal support (positions within `tol_x`)
    /// and weights within `tol_w`.
    pub fn approx_eq(&self, other: &AtomicMeasure, tol_x: f64, tol_w: f64) -> bool {
        self.len() == other.len()
            && self.atoms.iter().zip(&other.atoms).all(|(a, b)| {
                (a.position - b.position).abs() <= tol_x && (a.weight - b.weight).abs() <= tol_w
            })
    }

    /// Potential `u(x) = -Σ wᵢ |x - xᵢ|` as an exact piecewise-linear
    /// concave function.
    pub fn potential(&self) -> PLConcave {
        potential_of(self)
    }
}

/// Direct evaluation of `-Σ wᵢ |x - xᵢ|`.
pub fn potential_value(m: &AtomicMeasure, x: f64) -> f64 {
    -m.atoms
        .iter()
        .map(|a| a.weight * (x - a.position).abs())
        .sum::<f64>()
}

/// Potential of `m`: kinks at the atoms with slope drop `2wᵢ`, slope `+mass`
/// on the far left. Kink levels are evaluated directly rather than by
/// integrating slopes.
pub fn potential_of(m: &AtomicMeasure) -> PLConcave {
    let kinks: Vec<Kink> = m
        .atoms
        .iter()
        .map(|a| Kink {
            x: a.position,
            drop: 2.0 * a.weight,
        })
        .collect();
    let levels: Vec<f64> = m
        .atoms
        .iter()
        .map(|a| potential_value(m, a.position))
        .collect();
    PLConcave::from_levels(m.mass(), kinks, levels)
}

/// Inverse of [`potential_of`]: atoms at the kinks with weight `drop / 2`.
///
/// The slope on the far left must equal minus the slope on the far right;
/// the additive level is discarded.
pub fn measure_from_potential(f: &PLConcave) -> Result<AtomicMeasure> {
    let left = f.left_slope();
    let right = f.right_slope();
    if (left + right).abs() > TAU_MASS || left <= 0.0 {
        return Err(Error::MalformedPotential(format!(
            "outer slopes {left} and {right} are not of measure type"
        )));
    }
    if left > 1.0 + TAU_MASS {
        return Err(Error::MalformedPotential(format!(
            "outer slope {left} exceeds 1"
        )));
    }
    AtomicMeasure::new(f.kinks().iter().map(|k| (k.x, k.drop / 2.0)))
}

/// Position-tolerant comparison helper used by tests and the verifier.
pub fn positions_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= TAU * (1.0 + a.abs().max(b.abs()))
}
