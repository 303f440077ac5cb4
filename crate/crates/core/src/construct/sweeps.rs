//! Tangent generators for the Azema-Yor family.
//!
//! For atomic targets the function `c = u_target - C` has finitely many
//! affine pieces, and the lines extending those pieces are exactly the
//! tangents needed: any ordering of them drives the running potential down
//! to `c`. The ordering decides which stopping time is realised.

use crate::error::Result;
use crate::measure::AtomicMeasure;
use crate::minimality::gap_c;
use crate::potential::{PLConcave, SLOPE_EPS};

use super::engine::{cw_run, cw_step, RunningState, StepOutcome};
use super::{EmbeddingPlan, Tangent};

/// The gap constant and `c(x) = u_target(x) - C`.
pub fn c_function(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<(f64, PLConcave)> {
    let c = gap_c(mu0, target)?;
    Ok((c, target.potential().shifted(-c)))
}

/// Lines through the affine pieces of `c`, left to right (slopes decreasing).
fn piece_lines(c: &PLConcave) -> Result<Vec<Tangent>> {
    c.segments()
        .into_iter()
        .map(|s| Tangent::new(s.slope, s.intercept))
        .collect()
}

/// Keeps the tangents that actually cut when applied in order.
fn effective(
    mu0: &AtomicMeasure,
    target: &AtomicMeasure,
    lines: impl IntoIterator<Item = Tangent>,
) -> Result<Vec<Tangent>> {
    let mut state = RunningState::towards(mu0, target);
    let mut kept = Vec::new();
    for t in lines {
        if let StepOutcome::Cut(step) = cw_step(&state, t)? {
            state = state.then(&step);
            kept.push(t);
        }
    }
    Ok(kept)
}

/// Azema-Yor tangent sequence: tangents to `c` with touching points moving
/// left to right, so slopes decrease from `+1` towards `-1`. Lines that cut
/// nothing are skipped.
///
/// With this ordering the stops of successive steps are the atoms of the
/// target from left to right and the resulting time stops the process when
/// it falls to the barycentre of its running maximum.
pub fn ay_sweep(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<Vec<Tangent>> {
    mu0.require_probability()?;
    target.require_probability()?;
    let (_, c) = c_function(mu0, target)?;
    effective(mu0, target, piece_lines(&c)?)
}

/// Mirror image of [`ay_sweep`]: touching points move right to left.
pub fn reversed_ay_sweep(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<Vec<Tangent>> {
    mu0.require_probability()?;
    target.require_probability()?;
    let (_, c) = c_function(mu0, target)?;
    effective(mu0, target, piece_lines(&c)?.into_iter().rev())
}

pub fn ay_plan(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<EmbeddingPlan> {
    let tangents = ay_sweep(mu0, target)?;
    cw_run(mu0, &tangents, target, gap_c(mu0, target)?)
}

pub fn reversed_ay_plan(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<EmbeddingPlan> {
    let tangents = reversed_ay_sweep(mu0, target)?;
    cw_run(mu0, &tangents, target, gap_c(mu0, target)?)
}

/// Jacka's construction: first the horizontal tangent to `c`, then the
/// Azema-Yor sweep over the decreasing pieces and the reversed sweep over
/// the increasing ones.
pub fn jacka_plan(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<EmbeddingPlan> {
    mu0.require_probability()?;
    target.require_probability()?;
    let (gap, c) = c_function(mu0, target)?;
    let lines = piece_lines(&c)?;
    let top = (0..c.kinks().len())
        .map(|i| c.level(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let first = Tangent::new(0.0, top)?;
    let upper = lines.iter().copied().filter(|t| t.slope < -SLOPE_EPS);
    let lower = lines.iter().rev().copied().filter(|t| t.slope > SLOPE_EPS);
    let tangents = effective(
        mu0,
        target,
        std::iter::once(first).chain(upper).chain(lower),
    )?;
    cw_run(mu0, &tangents, target, gap)
}
