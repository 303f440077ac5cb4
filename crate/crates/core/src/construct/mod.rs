//! Chacon-Walsh tangent constructions.
//!
//! An embedding is built by cutting the running potential with lines of
//! slope in `[-1, 1]`. Each cut is one balayage step of the running measure;
//! the pointwise minimum of the lines and the starting potential is the
//! potential of the embedded law, shifted down by a constant `C`.

mod barycentre;
mod engine;
mod sweeps;
mod vallois;

pub(crate) use barycentre::tangent_ratio_argmin;
pub use barycentre::{barycentre_phi, Minimizer};
pub use engine::{cw_run, cw_step, expected_local_time_zero, RunningState, StepOutcome};
pub use sweeps::{ay_plan, ay_sweep, c_function, jacka_plan, reversed_ay_plan, reversed_ay_sweep};
pub use vallois::vallois_eps_plan;

use serde::{Deserialize, Serialize};

use crate::balayage::Interval;
use crate::error::{Error, Result};
use crate::measure::{positions_match, AtomicMeasure};
use crate::potential::{PLConcave, SLOPE_EPS};
use crate::TAU;

/// The line `slope * x + intercept` with `|slope| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub slope: f64,
    pub intercept: f64,
}

impl Tangent {
    /// Slopes within `1e-12` of `±1` are snapped onto `±1`.
    pub fn new(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope.is_finite() && intercept.is_finite()) {
            return Err(Error::InvalidTangent {
                slope,
                intercept,
                reason: "non-finite coefficients",
            });
        }
        if slope.abs() > 1.0 + SLOPE_EPS {
            return Err(Error::InvalidTangent {
                slope,
                intercept,
                reason: "slope magnitude exceeds 1",
            });
        }
        let slope = if slope.abs() >= 1.0 - SLOPE_EPS {
            slope.signum()
        } else {
            slope
        };
        Ok(Tangent { slope, intercept })
    }

    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// One applied balayage step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub tangent: Tangent,
    /// Where the tangent lies strictly below the previous potential.
    pub interval: Interval,
    pub measure_after: AtomicMeasure,
    /// Previous potential ∧ tangent.
    pub potential_after: PLConcave,
    /// `Cₙ` with `potential_after = u(measure_after) - Cₙ`.
    pub shift_after: f64,
}

/// A complete or truncated tangent construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPlan {
    pub mu0: AtomicMeasure,
    pub target: AtomicMeasure,
    /// Level shift of the target potential the construction aims at.
    pub c: f64,
    pub steps: Vec<Step>,
    /// `sup |final potential - (u_target - C)|`.
    pub residual: f64,
}

impl EmbeddingPlan {
    pub fn is_complete(&self) -> bool {
        self.residual <= TAU
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompletePlan {
                residual: self.residual,
            })
        }
    }

    pub fn initial_potential(&self) -> PLConcave {
        self.mu0.potential()
    }

    pub fn final_potential(&self) -> PLConcave {
        self.steps
            .last()
            .map_or_else(|| self.mu0.potential(), |s| s.potential_after.clone())
    }

    pub fn final_measure(&self) -> &AtomicMeasure {
        self.steps.last().map_or(&self.mu0, |s| &s.measure_after)
    }

    /// `u_target - C`
    pub fn target_potential(&self) -> PLConcave {
        self.target.potential().shifted(-self.c)
    }

    pub fn tangents(&self) -> Vec<Tangent> {
        self.steps.iter().map(|s| s.tangent).collect()
    }

    /// Serialises to the plan file format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PlanFile::from(self)).expect("plan serialisation")
    }

    /// Reads a plan file and replays its tangents. Recorded intervals and
    /// measures must agree with the replay.
    pub fn from_json(s: &str) -> std::result::Result<Self, PlanParseError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let file: PlanFile = serde_path_to_error::deserialize(de).map_err(PlanParseError::Json)?;
        file.replay().map_err(PlanParseError::Plan)
    }
}

/// Failure to read a plan file.
#[derive(Debug, thiserror::Error)]
pub enum PlanParseError {
    #[error("{0}")]
    Json(serde_path_to_error::Error<serde_json::Error>),
    #[error(transparent)]
    Plan(Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepRecord {
    slope: f64,
    intercept: f64,
    interval: Interval,
    measure_after: AtomicMeasure,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlanFile {
    mu0: AtomicMeasure,
    target: AtomicMeasure,
    #[serde(rename = "C")]
    c: f64,
    residual: f64,
    complete: bool,
    steps: Vec<StepRecord>,
}

impl From<&EmbeddingPlan> for PlanFile {
    fn from(p: &EmbeddingPlan) -> Self {
        PlanFile {
            mu0: p.mu0.clone(),
            target: p.target.clone(),
            c: p.c,
            residual: p.residual,
            complete: p.is_complete(),
            steps: p
                .steps
                .iter()
                .map(|s| StepRecord {
                    slope: s.tangent.slope,
                    intercept: s.tangent.intercept,
                    interval: s.interval,
                    measure_after: s.measure_after.clone(),
                })
                .collect(),
        }
    }
}

impl PlanFile {
    fn replay(self) -> Result<EmbeddingPlan> {
        let tangents = self
            .steps
            .iter()
            .map(|s| Tangent::new(s.slope, s.intercept))
            .collect::<Result<Vec<_>>>()?;
        let plan = cw_run(&self.mu0, &tangents, &self.target, self.c)?;
        if plan.steps.len() != self.steps.len() {
            return Err(Error::PlanMismatch(format!(
                "{} recorded steps but {} tangents cut the potential",
                self.steps.len(),
                plan.steps.len()
            )));
        }
        for (i, (got, want)) in plan.steps.iter().zip(&self.steps).enumerate() {
            let same_end = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (None, None) => true,
                (Some(a), Some(b)) => positions_match(a, b),
                _ => false,
            };
            if !same_end(got.interval.lower(), want.interval.lower())
                || !same_end(got.interval.upper(), want.interval.upper())
            {
                return Err(Error::PlanMismatch(format!(
                    "step {i}: recorded interval {:?} but tangent cuts {:?}",
                    want.interval, got.interval
                )));
            }
            if !got.measure_after.approx_eq(&want.measure_after, TAU, TAU) {
                return Err(Error::PlanMismatch(format!(
                    "step {i}: recorded measure differs from replay"
                )));
            }
        }
        Ok(plan)
    }
}
