use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::minimality::max_law_bound;
use crate::potential::PLConcave;
use crate::TAU;

use super::sweeps::c_function;

/// Where `λ ↦ (u₀(x) - c(λ)) / (x - λ)` attains its infimum over `λ < x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Minimizer {
    /// Approached as `λ → -∞`.
    NegInfinity,
    /// At a kink of `c`.
    Kink(f64),
    /// Approached as `λ ↑ x`; only possible when `u₀(x) = c(x)`.
    UpToX,
}

/// Infimum of the tangent ratio and its largest minimiser.
///
/// On each affine piece of `c` the ratio is monotone in `λ`, so the
/// infimum is attained at a kink of `c` or in one of the two limits.
pub(crate) fn tangent_ratio_argmin(u0: &PLConcave, c: &PLConcave, x: f64) -> (f64, Minimizer) {
    let ux = u0.eval(x);
    let mut best = (f64::INFINITY, Minimizer::NegInfinity);
    let mut consider = |ratio: f64, at: Minimizer| {
        // Candidates arrive with decreasing λ; only a strict improvement
        // replaces, so ties keep the largest minimiser.
        if ratio < best.0 - 1e-12 * (1.0 + ratio.abs()) {
            best = (ratio, at);
        }
    };
    if ux - c.eval(x) <= TAU {
        consider(c.derivatives(x).0, Minimizer::UpToX);
    }
    for (i, k) in c.kinks().iter().enumerate().rev() {
        if k.x < x {
            consider((ux - c.level(i)) / (x - k.x), Minimizer::Kink(k.x));
        }
    }
    consider(c.left_slope(), Minimizer::NegInfinity);
    best
}

/// The barycentre function: the point below `x` where the tangent to `c`
/// through `(x, u₀(x))` touches `c`. `-∞` when the infimum is only
/// approached at `-∞`; `x` itself on the contact set.
pub fn barycentre_phi(mu0: &AtomicMeasure, target: &AtomicMeasure, x: f64) -> Result<f64> {
    if max_law_bound(mu0, target, x)? <= TAU {
        return Err(Error::UndefinedPhi { x });
    }
    let (_, c) = c_function(mu0, target)?;
    let (_, at) = tangent_ratio_argmin(&mu0.potential(), &c, x);
    Ok(match at {
        Minimizer::NegInfinity => f64::NEG_INFINITY,
        Minimizer::Kink(l) => l,
        Minimizer::UpToX => x,
    })
}
