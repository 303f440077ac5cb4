//! ε-approximation of Vallois' embedding.
//!
//! Tangents to `c` alternate between lines of positive slope passing through
//! the running potential at `x = ε` (touching `c` to the left) and lines of
//! negative slope passing through it at `x = 0` (touching `c` to the right).
//! Once both anchor points have reached `c`, the remaining gap away from the
//! origin is closed with the Azema-Yor lines.

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::potential::PLConcave;
use crate::TAU;

use super::engine::{assemble, cw_step, RunningState, StepOutcome};
use super::sweeps::c_function;
use super::{EmbeddingPlan, Tangent};

/// Line through `(p, g(p))` tangent to `c` on the left of `p`.
fn left_touching(g: &PLConcave, c: &PLConcave, p: f64) -> Result<Option<Tangent>> {
    let gp = g.eval(p);
    if gp - c.eval(p) <= TAU {
        return Ok(None);
    }
    let slope = c
        .kinks()
        .iter()
        .enumerate()
        .filter(|(_, k)| k.x < p)
        .map(|(i, k)| (gp - c.level(i)) / (p - k.x))
        .fold(c.left_slope(), f64::min);
    Tangent::new(slope, gp - slope * p).map(Some)
}

/// Line through `(p, g(p))` tangent to `c` on the right of `p`.
fn right_touching(g: &PLConcave, c: &PLConcave, p: f64) -> Result<Option<Tangent>> {
    let gp = g.eval(p);
    if gp - c.eval(p) <= TAU {
        return Ok(None);
    }
    let slope = c
        .kinks()
        .iter()
        .enumerate()
        .filter(|(_, k)| k.x > p)
        .map(|(i, k)| (c.level(i) - gp) / (k.x - p))
        .fold(c.right_slope(), f64::max);
    Tangent::new(slope, gp - slope * p).map(Some)
}

/// Builds at most `max_steps` alternating steps. The plan is flagged
/// incomplete (residual above tolerance) when the budget runs out first.
pub fn vallois_eps_plan(
    mu0: &AtomicMeasure,
    target: &AtomicMeasure,
    eps: f64,
    max_steps: usize,
) -> Result<EmbeddingPlan> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    mu0.require_probability()?;
    target.require_probability()?;
    let (gap, c) = c_function(mu0, target)?;

    let mut state = RunningState::towards(mu0, target);
    let mut steps = Vec::new();
    let mut positive = true;
    let mut idle = 0;
    let mut push = |state: &mut RunningState, t: Tangent| -> Result<bool> {
        match cw_step(state, t)? {
            StepOutcome::Cut(step) => {
                *state = state.then(&step);
                steps.push(step);
                Ok(true)
            }
            StepOutcome::NoOp => Ok(false),
        }
    };

    let mut taken = 0;
    while taken < max_steps && idle < 2 {
        if state.potential.sup_difference(&c) <= TAU {
            break;
        }
        let tangent = if positive {
            left_touching(&state.potential, &c, eps)?
        } else {
            right_touching(&state.potential, &c, 0.0)?
        };
        positive = !positive;
        match tangent {
            Some(t) if push(&mut state, t)? => {
                taken += 1;
                idle = 0;
            }
            _ => idle += 1,
        }
    }
    if idle >= 2 {
        // The alternation has converged at 0 and ε; finish the rest of c.
        for seg in c.segments() {
            if taken >= max_steps {
                break;
            }
            if push(&mut state, Tangent::new(seg.slope, seg.intercept)?)? {
                taken += 1;
            }
        }
    }
    Ok(assemble(mu0, target, gap, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> AtomicMeasure {
        AtomicMeasure::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn first_two_steps_match_hand_computation() {
        let d0 = AtomicMeasure::dirac(0.0);
        let plan = vallois_eps_plan(&d0, &two_point(), 0.5, 2).unwrap();
        assert_eq!(plan.steps.len(), 2);
        let s0 = &plan.steps[0];
        assert!((s0.tangent.slope - 1.0 / 3.0).abs() < 1e-15);
        assert!((s0.interval.lo() + 1.0).abs() < 1e-12);
        assert_eq!(s0.interval.upper(), Some(0.5));
        let s1 = &plan.steps[1];
        assert!((s1.tangent.slope + 1.0 / 3.0).abs() < 1e-15);
        assert!(s1.interval.lo().abs() < 1e-12);
        assert!((s1.interval.hi() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_reports_initial_gap() {
        let plan = vallois_eps_plan(&AtomicMeasure::dirac(0.0), &two_point(), 0.5, 0).unwrap();
        assert!(plan.steps.is_empty());
        assert_eq!(plan.residual, 1.0);
        assert!(!plan.is_complete());
    }

    #[test]
    fn trivial_pair_is_empty() {
        let d0 = AtomicMeasure::dirac(0.0);
        let plan = vallois_eps_plan(&d0, &d0, 0.1, 10).unwrap();
        assert!(plan.steps.is_empty());
        assert_eq!(plan.residual, 0.0);
    }

    #[test]
    fn converges_on_two_point_target() {
        let plan = vallois_eps_plan(&AtomicMeasure::dirac(0.0), &two_point(), 0.5, 200).unwrap();
        assert!(plan.is_complete(), "residual {}", plan.residual);
        assert!(plan.final_measure().approx_eq(&two_point(), 1e-9, 1e-9));
    }

    #[test]
    fn completes_four_atom_target() {
        let four =
            AtomicMeasure::probability([(-2.0, 0.25), (-1.0, 0.25), (1.0, 0.25), (2.0, 0.25)])
                .unwrap();
        let plan = vallois_eps_plan(&AtomicMeasure::dirac(0.0), &four, 0.25, 400).unwrap();
        assert!(plan.is_complete(), "residual {}", plan.residual);
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let d0 = AtomicMeasure::dirac(0.0);
        assert!(vallois_eps_plan(&d0, &d0, 0.0, 1).is_err());
        assert!(vallois_eps_plan(&d0, &d0, -1.0, 1).is_err());
    }
}
