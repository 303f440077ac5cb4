use crate::balayage::{balayage, delta_m, Interval};
use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::minimality::gap_c;
use crate::potential::{PLConcave, SLOPE_EPS};
use crate::TAU;

use super::{EmbeddingPlan, Step, Tangent};

/// Running potential and law after some number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningState {
    pub potential: PLConcave,
    pub measure: AtomicMeasure,
    /// `Cₙ` with `potential = u(measure) - Cₙ`.
    pub shift: f64,
    /// Extra points, besides kinks of the potential, that computed crossings
    /// snap onto (sorted).
    pub anchors: Vec<f64>,
}

impl RunningState {
    pub fn start(mu0: &AtomicMeasure) -> Self {
        RunningState {
            potential: mu0.potential(),
            measure: mu0.clone(),
            shift: 0.0,
            anchors: Vec::new(),
        }
    }

    /// Start state whose crossings snap onto the atoms of `target`.
    pub fn towards(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Self {
        RunningState {
            anchors: target.positions().collect(),
            ..Self::start(mu0)
        }
    }

    /// State after `step`, keeping the anchors of `self`.
    pub fn then(&self, step: &Step) -> Self {
        RunningState {
            potential: step.potential_after.clone(),
            measure: step.measure_after.clone(),
            shift: step.shift_after,
            anchors: self.anchors.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Cut(Step),
    /// The tangent lies on or above the running potential.
    NoOp,
}

impl StepOutcome {
    pub fn into_step(self) -> Option<Step> {
        match self {
            StepOutcome::Cut(s) => Some(s),
            StepOutcome::NoOp => None,
        }
    }
}

/// Snap distance for matching a computed crossing to an existing kink.
fn snap_tolerance(x: f64) -> f64 {
    TAU * (1.0 + x.abs())
}

fn snap(x: f64, g: &PLConcave, anchors: &[f64]) -> f64 {
    let kinks: Vec<f64> = g.kinks().iter().map(|k| k.x).collect();
    let mut best = x;
    let mut dist = snap_tolerance(x);
    for pts in [&kinks[..], anchors] {
        let i = pts.partition_point(|&p| p < x);
        for j in [i.wrapping_sub(1), i] {
            if let Some(&p) = pts.get(j) {
                let d = (p - x).abs();
                // Kinks come first and win ties.
                if d < dist || (d == dist && best == x) {
                    best = p;
                    dist = d;
                }
            }
        }
    }
    best
}

fn whole_line(t: &Tangent) -> Error {
    Error::InvalidTangent {
        slope: t.slope,
        intercept: t.intercept,
        reason: "lies strictly below the potential everywhere",
    }
}

/// The open set `{x : t(x) < g(x)}` as `(lower, upper)` with `None` for an
/// infinite end, or `None` when the tangent cuts nothing.
fn cut_region(
    g: &PLConcave,
    t: &Tangent,
    anchors: &[f64],
) -> Result<Option<(Option<f64>, Option<f64>)>> {
    let flat = |v: f64| if v.abs() <= SLOPE_EPS { 0.0 } else { v };
    // h = g - t is concave with these outer slopes.
    let hl = flat(g.left_slope() - t.slope);
    let hr = flat(g.right_slope() - t.slope);
    let kinks = g.kinks();
    let n = kinks.len();

    if n == 0 {
        let h0 = g.eval(0.0) - t.intercept;
        if hl == 0.0 {
            return if h0 > TAU {
                Err(whole_line(t))
            } else {
                Ok(None)
            };
        }
        let root = -h0 / hl;
        return Ok(Some(if hl < 0.0 {
            (None, Some(root))
        } else {
            (Some(root), None)
        }));
    }

    let h: Vec<f64> = (0..n).map(|i| g.level(i) - t.at(kinks[i].x)).collect();
    let left_open = hl < 0.0 || (hl == 0.0 && h[0] > TAU);
    let right_open = hr > 0.0 || (hr == 0.0 && h[n - 1] > TAU);
    let h_max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !left_open && !right_open && h_max <= TAU {
        return Ok(None);
    }
    if left_open && right_open {
        return Err(whole_line(t));
    }

    let x = |i: usize| kinks[i].x;
    let lower = if left_open {
        None
    } else {
        Some(match h.iter().position(|&v| v > 0.0) {
            Some(0) if hl > 0.0 => x(0) - h[0] / hl,
            Some(0) => x(0),
            Some(j) => x(j - 1) + (x(j) - x(j - 1)) * (-h[j - 1]) / (h[j] - h[j - 1]),
            // Only the right tail is cut.
            None => x(n - 1) - h[n - 1] / hr,
        })
    };
    let upper = if right_open {
        None
    } else {
        Some(match h.iter().rposition(|&v| v > 0.0) {
            Some(j) if j == n - 1 && hr < 0.0 => x(j) + h[j] / (-hr),
            Some(j) if j == n - 1 => x(j),
            Some(j) => x(j) + (x(j + 1) - x(j)) * h[j] / (h[j] - h[j + 1]),
            // Only the left tail is cut.
            None => x(0) - h[0] / hl,
        })
    };
    let lower = lower.map(|a| snap(a, g, anchors));
    let upper = upper.map(|b| snap(b, g, anchors));
    match (lower, upper) {
        (Some(a), Some(b)) if !(a < b) => Ok(None),
        other => Ok(Some(other)),
    }
}

/// Applies one tangent to the running state.
///
/// The cut interval runs between the outermost crossings of the tangent with
/// the running potential; the measure is swept off it and the potential
/// becomes the pointwise minimum. A half-line cut raises the level shift by
/// the swept first moment.
pub fn cw_step(state: &RunningState, f: Tangent) -> Result<StepOutcome> {
    let f = Tangent::new(f.slope, f.intercept)?;
    let Some((lower, upper)) = cut_region(&state.potential, &f, &state.anchors)? else {
        return Ok(StepOutcome::NoOp);
    };
    let interval = Interval::new(lower, upper)?;
    let measure_after = balayage(&state.measure, &interval)?;
    let shift_after = match interval.half() {
        Some((a, side)) => state.shift + delta_m(&state.measure, a, side),
        None => state.shift,
    };
    let potential_after = state
        .potential
        .min_with_line(f.slope, f.intercept, lower, upper);
    Ok(StepOutcome::Cut(Step {
        tangent: f,
        interval,
        measure_after,
        potential_after,
        shift_after,
    }))
}

pub(crate) fn assemble(
    mu0: &AtomicMeasure,
    target: &AtomicMeasure,
    c: f64,
    steps: Vec<Step>,
) -> EmbeddingPlan {
    let mut plan = EmbeddingPlan {
        mu0: mu0.clone(),
        target: target.clone(),
        c,
        steps,
        residual: 0.0,
    };
    plan.residual = plan
        .final_potential()
        .sup_difference(&plan.target_potential());
    plan
}

/// Folds [`cw_step`] over `tangents`, dropping tangents that cut nothing.
///
/// `c` must be at least the gap constant of `(mu0, target)`; the plan is
/// complete when the final potential equals `u_target - c`.
pub fn cw_run(
    mu0: &AtomicMeasure,
    tangents: &[Tangent],
    target: &AtomicMeasure,
    c: f64,
) -> Result<EmbeddingPlan> {
    mu0.require_probability()?;
    target.require_probability()?;
    let required = gap_c(mu0, target)?;
    if !c.is_finite() || c < required - TAU {
        return Err(Error::InadmissibleC { c, required });
    }
    let mut state = RunningState::towards(mu0, target);
    let mut steps = Vec::new();
    for &t in tangents {
        if let StepOutcome::Cut(step) = cw_step(&state, t)? {
            state = state.then(&step);
            steps.push(step);
        }
    }
    Ok(assemble(mu0, target, c, steps))
}

/// `E(L_T)` for the local time at zero: `u_{μ₀}(0) - g(0)` with `g` the
/// final potential.
pub fn expected_local_time_zero(plan: &EmbeddingPlan) -> Result<f64> {
    plan.require_complete()?;
    Ok(plan.initial_potential().eval(0.0) - plan.final_potential().eval(0.0))
}
