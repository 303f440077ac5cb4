//! Exact-exit Monte Carlo for embedding plans.
//!
//! Each step is realised by its two-point exit law; the running maximum and
//! minimum inside a step are drawn from their exact conditional laws given
//! the exit. Clock time is never simulated.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::balayage::{Interval, Side};
use crate::construct::EmbeddingPlan;
use crate::error::{Error, Result};
use crate::measure::{positions_match, AtomicMeasure};
use crate::minimality::RegionA;

/// One applied step along a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exit {
    pub step: usize,
    pub interval: Interval,
    pub from: f64,
    pub exit: f64,
    pub max: f64,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub start: f64,
    pub exits: Vec<Exit>,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub max: f64,
    pub min: f64,
}

/// Uniform on `(0, 1]`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn draw_start(m: &AtomicMeasure, u: f64) -> f64 {
    let mut acc = 0.0;
    for a in m.atoms() {
        acc += a.weight;
        if u < acc {
            return a.position;
        }
    }
    m.atoms().last().expect("non-empty measure").position
}

/// Maximum of a path from `x` that leaves `(a, b)` through `a`.
///
/// Inverts `P(max ≥ m | exit a) = (x-a)(b-m) / ((m-a)(b-x))` on `[x, b]`.
fn max_given_low_exit(x: f64, a: f64, b: f64, u: f64) -> f64 {
    let m = ((x - a) * b + u * a * (b - x)) / (u * (b - x) + (x - a));
    m.clamp(x, b)
}

/// Exits the step from `x`, or `None` if `x` is not inside the interval.
fn run_step(interval: &Interval, x: f64, rng: &mut ChaCha8Rng) -> Option<(f64, f64, f64)> {
    if !interval.contains(x) {
        return None;
    }
    Some(match (interval.lower(), interval.upper()) {
        (Some(a), Some(b)) => {
            if rng.gen::<f64>() < (b - x) / (b - a) {
                (a, max_given_low_exit(x, a, b, open_unit(rng)), a)
            } else {
                let min = -max_given_low_exit(-x, -b, -a, open_unit(rng));
                (b, b, min)
            }
        }
        // Collapse down onto a; P(max ≥ m) = (x-a)/(m-a).
        (Some(a), None) => (a, a + (x - a) / open_unit(rng), a),
        (None, Some(b)) => (b, b, b - (b - x) / open_unit(rng)),
        (None, None) => unreachable!("intervals have a finite end"),
    })
}

/// Simulates path `index` of the stream `seed`. Each `(seed, index)` pair
/// owns an independent ChaCha8 stream.
pub fn sample_path(plan: &EmbeddingPlan, seed: u64, index: u64) -> Result<PathSample> {
    plan.require_complete()?;
    Ok(sample_unchecked(plan, seed, index))
}

fn sample_unchecked(plan: &EmbeddingPlan, seed: u64, index: u64) -> PathSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let start = draw_start(&plan.mu0, rng.gen());
    let (mut x, mut max, mut min) = (start, start, start);
    let mut exits = Vec::new();
    for (step, s) in plan.steps.iter().enumerate() {
        if let Some((exit, hi, lo)) = run_step(&s.interval, x, &mut rng) {
            exits.push(Exit {
                step,
                interval: s.interval,
                from: x,
                exit,
                max: hi,
                min: lo,
            });
            x = exit;
            max = max.max(hi);
            min = min.min(lo);
        }
    }
    PathSample {
        start,
        exits,
        final_value: x,
        max,
        min,
    }
}

fn run_paths<T: Send>(
    plan: &EmbeddingPlan,
    n: usize,
    seed: u64,
    f: impl Fn(PathSample) -> T + Sync + Send,
) -> Result<Vec<T>> {
    plan.require_complete()?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "path count must be positive".into(),
        ));
    }
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| f(sample_unchecked(plan, seed, i)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalLaw {
    pub samples: usize,
    /// `(position, relative frequency)` sorted by position.
    pub atom_frequencies: Vec<(f64, f64)>,
    /// `(threshold, fraction of paths with max ≥ threshold)`.
    pub max_exceedance: Vec<(f64, f64)>,
}

impl EmpiricalLaw {
    pub fn mean(&self) -> f64 {
        self.atom_frequencies.iter().map(|(x, p)| x * p).sum()
    }
}

pub fn empirical_law(
    plan: &EmbeddingPlan,
    n: usize,
    seed: u64,
    thresholds: &[f64],
) -> Result<EmpiricalLaw> {
    let mut paths = run_paths(plan, n, seed, |p| (p.final_value, p.max))?;
    let max_exceedance = thresholds
        .iter()
        .map(|&t| {
            (
                t,
                paths.iter().filter(|p| p.1 >= t).count() as f64 / n as f64,
            )
        })
        .collect();
    paths.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut counts: Vec<(f64, usize)> = Vec::new();
    for (x, _) in paths {
        match counts.last_mut() {
            Some((y, k)) if positions_match(*y, x) => *k += 1,
            _ => counts.push((x, 1)),
        }
    }
    Ok(EmpiricalLaw {
        samples: n,
        atom_frequencies: counts
            .into_iter()
            .map(|(x, k)| (x, k as f64 / n as f64))
            .collect(),
        max_exceedance,
    })
}

/// Total variation distance, matching atoms by position.
pub fn tv_distance(law: &EmpiricalLaw, m: &AtomicMeasure) -> f64 {
    let (p, q) = (&law.atom_frequencies, m.atoms());
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    while i < p.len() || j < q.len() {
        match (p.get(i), q.get(j)) {
            (Some(&(x, w)), Some(a)) if positions_match(x, a.position) => {
                sum += (w - a.weight).abs();
                i += 1;
                j += 1;
            }
            (Some(&(x, w)), Some(a)) if x < a.position => {
                sum += w;
                i += 1;
            }
            (Some(&(_, w)), None) => {
                sum += w;
                i += 1;
            }
            (_, Some(a)) => {
                sum += a.weight;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    0.5 * sum
}

/// Whether the path visits `level` strictly before its final exit.
fn visits_before_end(p: &PathSample, level: f64) -> bool {
    let last = p.exits.len().wrapping_sub(1);
    if p.start == level && !p.exits.is_empty() {
        return true;
    }
    p.exits
        .iter()
        .enumerate()
        .any(|(k, e)| e.min <= level && level <= e.max && (e.exit != level || k != last))
}

/// Estimates `P(T > H_{-γ}, B₀ ≥ a₋)` (`Below`) or `P(T > H_γ, B₀ ≤ a₊)`
/// (`Above`) with its binomial standard error.
pub fn tail_probability(
    plan: &EmbeddingPlan,
    gamma: f64,
    side: Side,
    region: &RegionA,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let hits = run_paths(plan, n, seed, |p| match side {
        Side::Below => p.start >= region.a_minus && visits_before_end(&p, -gamma),
        Side::Above => p.start <= region.a_plus && visits_before_end(&p, gamma),
    })?;
    let p = hits.iter().filter(|&&h| h).count() as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}

/// One row of a tail table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub gamma: f64,
    pub side: Side,
    pub estimate: f64,
    pub stderr: f64,
}

pub fn write_law_csv<W: Write>(law: &EmpiricalLaw, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["atom", "frequency"])?;
    for &(x, p) in &law.atom_frequencies {
        out.serialize((x, p))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_tail_csv<W: Write>(rows: &[TailRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
