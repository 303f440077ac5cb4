//! Piecewise-linear concave functions.
//!
//! A [`PLConcave`] is stored as its slope on the far left, the ordered list
//! of kinks with their (positive) slope drops, and one anchor point fixing
//! the additive level. Kink levels are cached relative to the anchor, so
//! adding a constant only touches the anchor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outer slopes closer than this are treated as equal.
pub(crate) const SLOPE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kink {
    pub x: f64,
    /// Left derivative minus right derivative at `x`; strictly positive.
    pub drop: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub x: f64,
    pub value: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPLConcave {
    left_slope: f64,
    breakpoints: Vec<Kink>,
    anchor: Anchor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPLConcave", into = "RawPLConcave")]
pub struct PLConcave {
    left_slope: f64,
    kinks: Vec<Kink>,
    anchor: Anchor,
    /// `f(kinks[i].x) - anchor.value`
    levels: Vec<f64>,
}

impl TryFrom<RawPLConcave> for PLConcave {
    type Error = Error;

    fn try_from(raw: RawPLConcave) -> Result<Self> {
        PLConcave::from_kinks(
            raw.left_slope,
            raw.breakpoints,
            (raw.anchor.x, raw.anchor.value),
        )
    }
}

impl From<PLConcave> for RawPLConcave {
    fn from(f: PLConcave) -> Self {
        RawPLConcave {
            left_slope: f.left_slope,
            breakpoints: f.kinks,
            anchor: f.anchor,
        }
    }
}

/// One affine piece of a [`PLConcave`]; `from`/`to` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Segment {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

impl PLConcave {
    /// Builds a function from its far-left slope, kinks and a point
    /// `(x, value)` it passes through.
    pub fn from_kinks(left_slope: f64, kinks: Vec<Kink>, anchor: (f64, f64)) -> Result<Self> {
        if !left_slope.is_finite() || !anchor.0.is_finite() || !anchor.1.is_finite() {
            return Err(Error::MalformedPotential(
                "non-finite slope or anchor".into(),
            ));
        }
        for w in kinks.windows(2) {
            if !(w[0].x < w[1].x) {
                return Err(Error::MalformedPotential(format!(
                    "breakpoints {} and {} are not strictly increasing",
                    w[0].x, w[1].x
                )));
            }
        }
        for k in &kinks {
            if !(k.x.is_finite() && k.drop.is_finite() && k.drop > 0.0) {
                return Err(Error::MalformedPotential(format!(
                    "breakpoint at {} has slope drop {}",
                    k.x, k.drop
                )));
            }
        }
        // Integrate slopes from the first kink, then pin to the anchor.
        let mut levels = Vec::with_capacity(kinks.len());
        let mut level = 0.0;
        let mut slope = left_slope;
        for (i, k) in kinks.iter().enumerate() {
            if i > 0 {
                level += slope * (k.x - kinks[i - 1].x);
            }
            levels.push(level);
            slope -= k.drop;
        }
        let mut f = PLConcave {
            left_slope,
            kinks,
            anchor: Anchor {
                x: anchor.0,
                value: 0.0,
            },
            levels,
        };
        // Make levels relative to the anchor point itself.
        let rel = f.eval(anchor.0);
        for l in &mut f.levels {
            *l -= rel;
        }
        f.anchor.value = anchor.1;
        Ok(f)
    }

    /// Kinks with absolute levels already known; the first kink becomes the
    /// anchor. `kinks` must be non-empty, sorted, with positive drops.
    pub(crate) fn from_levels(left_slope: f64, kinks: Vec<Kink>, abs_levels: Vec<f64>) -> Self {
        debug_assert_eq!(kinks.len(), abs_levels.len());
        debug_assert!(!kinks.is_empty());
        let base = abs_levels[0];
        PLConcave {
            left_slope,
            anchor: Anchor {
                x: kinks[0].x,
                value: base,
            },
            levels: abs_levels.iter().map(|v| v - base).collect(),
            kinks,
        }
    }

    /// The affine function `slope * x + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        PLConcave {
            left_slope: slope,
            kinks: Vec::new(),
            anchor: Anchor {
                x: 0.0,
                value: intercept,
            },
            levels: Vec::new(),
        }
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.left_slope - self.kinks.iter().map(|k| k.drop).sum::<f64>()
    }

    pub fn kinks(&self) -> &[Kink] {
        &self.kinks
    }

    pub fn anchor(&self) -> Anchor {
        self.anchor
    }

    /// Absolute value at kink `i`.
    pub fn level(&self, i: usize) -> f64 {
        self.levels[i] + self.anchor.value
    }

    /// Slope on the piece right of kink `i`.
    pub fn slope_after(&self, i: usize) -> f64 {
        self.left_slope - self.kinks[..=i].iter().map(|k| k.drop).sum::<f64>()
    }

    /// Slope on the piece left of kink `i`.
    pub fn slope_before(&self, i: usize) -> f64 {
        self.left_slope - self.kinks[..i].iter().map(|k| k.drop).sum::<f64>()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.kinks.len();
        if n == 0 {
            return self.anchor.value + self.left_slope * (x - self.anchor.x);
        }
        let i = self.kinks.partition_point(|k| k.x <= x);
        let rel = if i == 0 {
            self.levels[0] + self.left_slope * (x - self.kinks[0].x)
        } else if i == n {
            self.levels[n - 1] + self.right_slope() * (x - self.kinks[n - 1].x)
        } else {
            let (x0, x1) = (self.kinks[i - 1].x, self.kinks[i].x);
            let (y0, y1) = (self.levels[i - 1], self.levels[i]);
            if x == x0 {
                y0
            } else {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        };
        rel + self.anchor.value
    }

    /// Left and right derivatives at `x`.
    pub fn derivatives(&self, x: f64) -> (f64, f64) {
        let mut left = self.left_slope;
        for k in &self.kinks {
            if k.x < x {
                left -= k.drop;
            } else {
                break;
            }
        }
        let at = self.kinks.iter().find(|k| k.x == x).map_or(0.0, |k| k.drop);
        (left, left - at)
    }

    /// Adds a constant in place.
    pub fn shift(&mut self, c: f64) {
        self.anchor.value += c;
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut f = self.clone();
        f.shift(c);
        f
    }

    /// Affine pieces from left to right.
    pub fn segments(&self) -> Vec<Segment> {
        let n = self.kinks.len();
        if n == 0 {
            let slope = self.left_slope;
            return vec![Segment {
                from: f64::NEG_INFINITY,
                to: f64::INFINITY,
                slope,
                intercept: self.eval(0.0),
            }];
        }
        let mut out = Vec::with_capacity(n + 1);
        let mut slope = self.left_slope;
        let mut from = f64::NEG_INFINITY;
        for i in 0..=n {
            let (to, px, py) = if i < n {
                (self.kinks[i].x, self.kinks[i].x, self.level(i))
            } else {
                (f64::INFINITY, self.kinks[n - 1].x, self.level(n - 1))
            };
            out.push(Segment {
                from,
                to,
                slope,
                intercept: py - slope * px,
            });
            if i < n {
                slope -= self.kinks[i].drop;
                from = to;
            }
        }
        out
    }

    /// Exact `sup_x |self(x) - other(x)|`.
    ///
    /// Beyond the outermost kinks both functions are affine, so the supremum
    /// is attained on the union of kinks unless the outer slopes differ, in
    /// which case it is infinite.
    pub fn sup_difference(&self, other: &PLConcave) -> f64 {
        if (self.left_slope - other.left_slope).abs() > SLOPE_EPS
            || (self.right_slope() - other.right_slope()).abs() > SLOPE_EPS
        {
            return f64::INFINITY;
        }
        let mut xs: Vec<f64> = self.kinks.iter().chain(&other.kinks).map(|k| k.x).collect();
        if xs.is_empty() {
            xs.push(0.0);
        }
        xs.iter()
            .map(|&x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise minimum with the line `slope * x + intercept`, given the
    /// open set `(lower, upper)` where the line lies strictly below `self`.
    ///
    /// `lower`/`upper` of `None` mean `-∞`/`+∞`. Finite endpoints that equal
    /// an existing kink position reuse that kink's level.
    pub(crate) fn min_with_line(
        &self,
        slope: f64,
        intercept: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> PLConcave {
        let line = |x: f64| slope * x + intercept;
        let mut kinks = Vec::new();
        let mut levels = Vec::new();
        let left_slope = if lower.is_none() {
            slope
        } else {
            self.left_slope
        };

        for (i, k) in self.kinks.iter().enumerate() {
            if matches!(lower, Some(a) if k.x < a) {
                kinks.push(*k);
                levels.push(self.level(i));
            }
        }

        if let Some(a) = lower {
            let (before, level) = self.slope_left_of(a);
            let level = level.unwrap_or_else(|| line(a));
            kinks.push(Kink {
                x: a,
                drop: before - slope,
            });
            levels.push(level);
        }
        if let Some(b) = upper {
            let (after, level) = self.slope_right_of(b);
            let level = level.unwrap_or_else(|| line(b));
            kinks.push(Kink {
                x: b,
                drop: slope - after,
            });
            levels.push(level);
        }
        for (i, k) in self.kinks.iter().enumerate() {
            if matches!(upper, Some(b) if k.x > b) {
                kinks.push(*k);
                levels.push(self.level(i));
            }
        }

        // Roundoff can leave vanishing kinks where the line is parallel to a
        // neighbouring piece.
        let mut clean_k = Vec::with_capacity(kinks.len());
        let mut clean_l = Vec::with_capacity(kinks.len());
        for (k, l) in kinks.into_iter().zip(levels) {
            if k.drop > SLOPE_EPS {
                clean_k.push(k);
                clean_l.push(l);
            }
        }
        if clean_k.is_empty() {
            return PLConcave::linear(slope, intercept);
        }
        PLConcave::from_levels(left_slope, clean_k, clean_l)
    }

    /// Slope just left of `x`, and the level if `x` is a kink.
    fn slope_left_of(&self, x: f64) -> (f64, Option<f64>) {
        let i = self.kinks.partition_point(|k| k.x < x);
        let level = (i < self.kinks.len() && self.kinks[i].x == x).then(|| self.level(i));
        (self.slope_before(i), level)
    }

    /// Slope just right of `x`, and the level if `x` is a kink.
    fn slope_right_of(&self, x: f64) -> (f64, Option<f64>) {
        let i = self.kinks.partition_point(|k| k.x <= x);
        let level = (i > 0 && self.kinks[i - 1].x == x).then(|| self.level(i - 1));
        (self.slope_before(i), level)
    }
}
