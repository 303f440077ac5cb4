//! Minimality invariants: the gap constant `C`, the contact set 𝒜, the bound
//! on the law of the maximum and its Azema-Yor attainment.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::balayage::Side;
use crate::construct::{c_function, tangent_ratio_argmin, EmbeddingPlan, Minimizer};
use crate::error::Result;
use crate::measure::AtomicMeasure;
use crate::potential::{PLConcave, SLOPE_EPS};
use crate::simulate::tail_probability;
use crate::TAU;

/// Sorted union of the kink positions of two functions.
fn union_kinks(f: &PLConcave, g: &PLConcave) -> Vec<f64> {
    let mut xs: Vec<f64> = f.kinks().iter().chain(g.kinks()).map(|k| k.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// `C = sup_x (u_target(x) - u_{μ₀}(x))`.
///
/// The difference is affine between kinks and constant beyond the outermost
/// ones, where it equals `∓(mean(target) - mean(μ₀))`.
pub fn gap_c(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<f64> {
    mu0.require_probability()?;
    target.require_probability()?;
    let (u0, ut) = (mu0.potential(), target.potential());
    let tail = (target.mean() - mu0.mean()).abs();
    Ok(union_kinks(&u0, &ut)
        .into_iter()
        .map(|x| ut.eval(x) - u0.eval(x))
        .fold(tail, f64::max))
}

/// The contact set 𝒜 = {u_{μ₀} = u_target - C} in `[-∞, +∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionA {
    /// Disjoint closed intervals in increasing order; points are degenerate
    /// intervals and unbounded ends are `±∞`.
    pub components: Vec<(f64, f64)>,
    pub a_minus: f64,
    pub a_plus: f64,
}

impl RegionA {
    pub fn contains(&self, x: f64) -> bool {
        self.components.iter().any(|&(p, q)| p <= x && x <= q)
    }

    /// Whether some finite point of 𝒜 lies strictly inside `(lo, hi)`.
    pub fn meets_open(&self, lo: f64, hi: f64) -> bool {
        let tol = |x: f64| {
            if x.is_finite() {
                TAU * (1.0 + x.abs())
            } else {
                0.0
            }
        };
        self.components
            .iter()
            .any(|&(p, q)| p < hi - tol(hi) && q > lo + tol(lo))
    }

    pub fn is_everything(&self) -> bool {
        self.components == [(f64::NEG_INFINITY, f64::INFINITY)]
    }
}

fn ext(x: f64) -> serde_json::Value {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        x.into()
    }
}

/// Infinite ends are written as the strings `"-inf"` and `"+inf"`.
impl Serialize for RegionA {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let comps: Vec<[serde_json::Value; 2]> = self
            .components
            .iter()
            .map(|&(p, q)| [ext(p), ext(q)])
            .collect();
        let mut st = s.serialize_struct("RegionA", 3)?;
        st.serialize_field("components", &comps)?;
        st.serialize_field("a_minus", &ext(self.a_minus))?;
        st.serialize_field("a_plus", &ext(self.a_plus))?;
        st.end()
    }
}

pub fn region_a(mu0: &AtomicMeasure, target: &AtomicMeasure) -> Result<RegionA> {
    let (_, c) = c_function(mu0, target)?;
    let u0 = mu0.potential();
    let xs = union_kinks(&u0, &c);
    let zero: Vec<bool> = xs.iter().map(|&x| u0.eval(x) - c.eval(x) <= TAU).collect();

    // u₀ - c is affine between consecutive kinks and constant outside them,
    // so its zero set is read off from the kinks alone.
    let mut components: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        if !zero[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < xs.len() && zero[i + 1] {
            i += 1;
        }
        let lo = if start == 0 {
            f64::NEG_INFINITY
        } else {
            xs[start]
        };
        let hi = if i == xs.len() - 1 {
            f64::INFINITY
        } else {
            xs[i]
        };
        components.push((lo, hi));
        i += 1;
    }
    let a_minus = components.first().map_or(f64::INFINITY, |c| c.0);
    let a_plus = components.last().map_or(f64::NEG_INFINITY, |c| c.1);
    Ok(RegionA {
        components,
        a_minus,
        a_plus,
    })
}

/// Upper bound on `P(max_{t ≤ T} B_t ≥ x)` over minimal embeddings:
/// `inf_{λ<x} ½[1 + (u₀(x) - c(λ)) / (x - λ)]`, clamped to `[0, 1]`.
pub fn max_law_bound(mu0: &AtomicMeasure, target: &AtomicMeasure, x: f64) -> Result<f64> {
    let (_, c) = c_function(mu0, target)?;
    Ok(bound_with(&mu0.potential(), &c, x))
}

fn bound_with(u0: &PLConcave, c: &PLConcave, x: f64) -> f64 {
    let (ratio, _) = tangent_ratio_argmin(u0, c, x);
    (0.5 * (1.0 + ratio)).clamp(0.0, 1.0)
}

/// Points where the barycentre of the running maximum can jump: kinks of
/// `u₀` and `c`, and crossings of `u₀` with the lines extending the pieces
/// of `c`.
fn phi_breaks(u0: &PLConcave, c: &PLConcave) -> Vec<f64> {
    let mut out = union_kinks(u0, c);
    let pieces = u0.segments();
    for line in c.segments() {
        for p in &pieces {
            let ds = p.slope - line.slope;
            if ds.abs() <= SLOPE_EPS {
                continue;
            }
            let x = (line.intercept - p.intercept) / ds;
            if x >= p.from && x <= p.to {
                out.push(x);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|b, a| *b - *a <= close(*a));
    out
}

fn close(x: f64) -> f64 {
    TAU * (1.0 + x.abs())
}

/// Exact `P(max_{t ≤ T} B_t ≥ x)` for the Azema-Yor embedding.
///
/// From each starting atom the maximum climbs through the pieces on which
/// the barycentre `Φ` is constant; across a piece `[l, r]` it survives with
/// probability `(l - Φ) / (r - Φ)`.
pub fn ay_max_law(mu0: &AtomicMeasure, target: &AtomicMeasure, x: f64) -> Result<f64> {
    let (_, c) = c_function(mu0, target)?;
    let u0 = mu0.potential();
    let breaks = phi_breaks(&u0, &c);
    let mut total = 0.0;
    for atom in mu0.atoms() {
        let b0 = atom.position;
        if x <= b0 {
            total += atom.weight;
            continue;
        }
        let mut pts = vec![b0];
        // Roundoff can place a break a few ulps off an end, leaving a
        // sliver whose midpoint sits on the contact set.
        pts.extend(
            breaks
                .iter()
                .copied()
                .filter(|&p| p > b0 + close(b0) && p < x - close(x)),
        );
        pts.push(x);
        let mut survive = 1.0;
        for w in pts.windows(2) {
            let (l, r) = (w[0], w[1]);
            survive *= match tangent_ratio_argmin(&u0, &c, 0.5 * (l + r)).1 {
                Minimizer::NegInfinity => 1.0,
                Minimizer::Kink(phi) => ((l - phi) / (r - phi)).max(0.0),
                Minimizer::UpToX => 0.0,
            };
            if survive == 0.0 {
                break;
            }
        }
        total += atom.weight * survive;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Empirical tail estimates at one level, already multiplied by `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub gamma: f64,
    /// `γ·P(T > H_{-γ}, B₀ ≥ a₋)`
    pub below: f64,
    pub below_stderr: f64,
    /// `γ·P(T > H_{γ}, B₀ ≤ a₊)`
    pub above: f64,
    pub above_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    #[serde(rename = "C")]
    pub c: f64,
    pub region: RegionA,
    /// No step interval strictly contains a finite point of 𝒜.
    pub structural_ok: bool,
    /// Index of the first step that crosses 𝒜.
    pub crossing_step: Option<usize>,
    pub tail_estimates: Vec<TailEstimate>,
    /// `C = 0` and equal means.
    pub ui_embedding: bool,
}

pub fn minimality_report(
    plan: &EmbeddingPlan,
    n_paths: usize,
    gammas: &[f64],
    seed: u64,
) -> Result<MinimalityReport> {
    plan.require_complete()?;
    let c = gap_c(&plan.mu0, &plan.target)?;
    let region = region_a(&plan.mu0, &plan.target)?;
    let crossing_step = plan
        .steps
        .iter()
        .position(|s| region.meets_open(s.interval.lo(), s.interval.hi()));
    let mut tail_estimates = Vec::with_capacity(gammas.len());
    for (i, &gamma) in gammas.iter().enumerate() {
        // Separate substreams per level and side.
        let base = seed.wrapping_add(2 * i as u64);
        let (below, below_se) = tail_probability(plan, gamma, Side::Below, &region, n_paths, base)?;
        let (above, above_se) = tail_probability(
            plan,
            gamma,
            Side::Above,
            &region,
            n_paths,
            base.wrapping_add(1),
        )?;
        tail_estimates.push(TailEstimate {
            gamma,
            below: gamma * below,
            below_stderr: gamma * below_se,
            above: gamma * above,
            above_stderr: gamma * above_se,
        });
    }
    let means_equal = (plan.mu0.mean() - plan.target.mean()).abs() <= TAU;
    Ok(MinimalityReport {
        c,
        region,
        structural_ok: crossing_step.is_none(),
        crossing_step,
        tail_estimates,
        ui_embedding: c <= TAU && means_equal,
    })
}
