//! Acceptance criteria 1 to 8. Each prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use skorokhod::balayage::{balayage_finite, balayage_semi, delta_m};
use skorokhod::construct::{
    ay_plan, barycentre_phi, cw_run, cw_step, expected_local_time_zero, jacka_plan,
    reversed_ay_plan, vallois_eps_plan, RunningState, StepOutcome,
};
use skorokhod::measure::{potential_of, potential_value};
use skorokhod::minimality::{ay_max_law, gap_c, max_law_bound, minimality_report, region_a};
use skorokhod::simulate::{empirical_law, tail_probability, tv_distance};
use skorokhod::{AtomicMeasure, EmbeddingPlan, Side, Tangent};

// Pinned tolerances and budgets.
const EXACT: f64 = 1e-9;
const EXACT_TIGHT: f64 = 1e-12;
const Z: f64 = 3.0;
const BUDGET_1: f64 = 1.0;
const BUDGET_2: f64 = 5.0;
const BUDGET_3: f64 = 2.0;
const BUDGET_4: f64 = 10.0;
const BUDGET_6: f64 = 2.0;
const N_PATHS: usize = 100_000;
const N_ORACLE: usize = 10_000;
const ORACLE_STEP: f64 = 1e-3;
const VALLOIS_EPS: f64 = 0.25;
const VALLOIS_STEPS: usize = 200;
const VALLOIS_TARGET: f64 = 0.05;
const N_TAIL_PER_PLAN: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn two_point() -> AtomicMeasure {
    AtomicMeasure::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

fn random_measure(rng: &mut ChaCha8Rng, max_atoms: usize) -> AtomicMeasure {
    let k = rng.gen_range(1..=max_atoms);
    let atoms: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(-10.0..10.0), rng.gen_range(0.05..1.0)))
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    AtomicMeasure::probability(atoms.into_iter().map(|(x, w)| (x, w / total))).unwrap()
}

fn span(ms: &[&AtomicMeasure]) -> f64 {
    ms.iter()
        .flat_map(|m| m.positions())
        .fold(1.0, |s: f64, x| s.max(x.abs()))
}

/// The 100 random pairs shared by criteria 2, 7 and 8, each with its AY,
/// reversed AY and Jacka plans.
fn criterion_2_plans() -> Vec<(AtomicMeasure, AtomicMeasure, [EmbeddingPlan; 3])> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..100)
        .map(|_| {
            let m0 = random_measure(&mut rng, 5);
            let m = random_measure(&mut rng, 8);
            let plans = [
                ay_plan(&m0, &m).unwrap(),
                reversed_ay_plan(&m0, &m).unwrap(),
                jacka_plan(&m0, &m).unwrap(),
            ];
            (m0, m, plans)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = random_measure(&mut rng, 20);
        let probes: Vec<f64> = (0..40)
            .map(|_| rng.gen_range(-15.0..15.0))
            .chain(m.positions())
            .collect();
        let u = |x: f64| potential_value(&m, x);

        // Finite interval: below, equal off I, affine on the closure.
        let a = rng.gen_range(-12.0..12.0);
        let b = a + rng.gen_range(0.01..10.0);
        let mi = balayage_finite(&m, a, b).unwrap();
        let ui = |x: f64| potential_value(&mi, x);
        let chord = |x: f64| ui(a) + (ui(b) - ui(a)) * (x - a) / (b - a);
        for &x in probes
            .iter()
            .chain(potential_of(&mi).kinks().iter().map(|k| &k.x))
        {
            worst = worst.max(ui(x) - u(x));
            if x <= a || x >= b {
                worst = worst.max((ui(x) - u(x)).abs());
            } else {
                worst = worst.max((ui(x) - chord(x)).abs());
            }
        }

        // Half line: shifted by Δm off I, a tent through (a, u(a) + Δm) on I.
        let a = rng.gen_range(-12.0..12.0);
        let side = if rng.gen() { Side::Above } else { Side::Below };
        let inside = |x: f64| match side {
            Side::Above => x > a,
            Side::Below => x < a,
        };
        let dm: f64 = m
            .atoms()
            .iter()
            .filter(|x| inside(x.position))
            .map(|x| x.weight * (x.position - a).abs())
            .sum();
        worst = worst.max((dm - delta_m(&m, a, side)).abs());
        let ms = balayage_semi(&m, a, side);
        for &x in &probes {
            let want = if inside(x) {
                u(a) + dm - (a - x).abs()
            } else {
                u(x) + dm
            };
            worst = worst.max((potential_value(&ms, x) - want).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst <= EXACT && secs < BUDGET_1,
        format!("potential identities on 200 measures: max error {worst:.2e} (tol {EXACT:e}), {secs:.3} s (budget {BUDGET_1} s)"),
    )
}

fn criterion_2(pairs: &[(AtomicMeasure, AtomicMeasure, [EmbeddingPlan; 3])], secs: f64) -> Outcome {
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    for (m0, m, plans) in pairs {
        let c = gap_c(m0, m).unwrap();
        for p in plans {
            worst = worst.max(p.residual);
            if p.c != c || !p.final_measure().approx_eq(m, EXACT, EXACT) {
                mismatched += 1;
            }
        }
    }
    outcome(
        worst <= EXACT && mismatched == 0 && secs < BUDGET_2,
        format!("embedding exactness on 100 pairs x 3 sweeps: max residual {worst:.2e}, {mismatched} laws off target, {secs:.3} s (budget {BUDGET_2} s)"),
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let (m0, m) = (two_point(), AtomicMeasure::dirac(0.0));
    let c = gap_c(&m0, &m).unwrap();
    let region = region_a(&m0, &m).unwrap();
    let plan = ay_plan(&m0, &m).unwrap();
    let two_half_lines =
        plan.steps.len() == 2 && plan.steps.iter().all(|s| s.interval.half().is_some());
    let law = empirical_law(&plan, N_PATHS, 3, &[]).unwrap();
    let all_zero = law.atom_frequencies == [(0.0, 1.0)];
    let (below, _) = tail_probability(&plan, 2.0, Side::Below, &region, N_PATHS, 4).unwrap();
    let (above, _) = tail_probability(&plan, 2.0, Side::Above, &region, N_PATHS, 5).unwrap();
    let report = minimality_report(&plan, 1_000, &[2.0], 6).unwrap();

    let bad = [(0.0, -2.0), (1.0, -2.0), (-1.0, -2.0)].map(|(s, i)| Tangent::new(s, i).unwrap());
    let bad_plan = cw_run(&m0, &bad, &m, 2.0).unwrap();
    let bad_report = minimality_report(&bad_plan, 1_000, &[], 7).unwrap();
    let secs = t.elapsed().as_secs_f64();

    let pass = c == 1.0
        && region.components == [(0.0, 0.0)]
        && two_half_lines
        && all_zero
        && below == 0.0
        && above == 0.0
        && report.structural_ok
        && !bad_report.structural_ok
        && secs < BUDGET_3;
    outcome(
        pass,
        format!(
            "worked example: C = {c}, A = {:?}, {} half-line steps, finals = {:?}, tails at 2 = ({below}, {above}), structural {} / bad plan {}, {secs:.3} s (budget {BUDGET_3} s)",
            region.components,
            plan.steps.len(),
            law.atom_frequencies,
            report.structural_ok,
            bad_report.structural_ok,
        ),
    )
}

/// Lattice walk with step `h` stopped by the Azema-Yor rule `X ≤ Φ(max)`.
/// Below the running maximum it jumps straight to the exit of the largest
/// symmetric lattice interval that neither reaches the maximum nor the
/// floor, which a simple walk leaves at either end with probability ½.
/// Returns the running maximum at stopping, in lattice units.
fn oracle_max(phi: &[i64], seed: u64, index: u64) -> i64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let (mut x, mut m) = (0i64, 0i64);
    loop {
        let floor = phi[m as usize];
        if x <= floor {
            return m;
        }
        let r = if x == m { 1 } else { (x - floor).min(m - x) };
        if rng.gen::<bool>() {
            x += r;
        } else {
            x -= r;
        }
        m = m.max(x);
    }
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let (m0, m) = (AtomicMeasure::dirac(0.0), two_point());
    let closed = |x: f64| 1.0 / (1.0 + x);
    let mut worst = 0.0f64;
    for k in 1..=1000 {
        let x = k as f64 / 1000.0;
        let b = max_law_bound(&m0, &m, x).unwrap();
        let ay = ay_max_law(&m0, &m, x).unwrap();
        worst = worst.max((b - closed(x)).abs()).max((ay - closed(x)).abs());
    }

    // Random-walk oracle; Φ is tabulated on the lattice, rounded down.
    let top = (1.0 / ORACLE_STEP).round() as i64;
    let phi: Vec<i64> = (0..=top)
        .map(|k| {
            let f = barycentre_phi(&m0, &m, k as f64 * ORACLE_STEP).unwrap();
            (f / ORACLE_STEP + 1e-9).floor() as i64
        })
        .collect();
    let maxima: Vec<i64> = (0..N_ORACLE as u64)
        .into_par_iter()
        .map(|i| oracle_max(&phi, 40, i))
        .collect();
    let mut oracle_ok = true;
    let mut oracle_txt = Vec::new();
    for x in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let level = (x / ORACLE_STEP).round() as i64;
        let p_hat = maxima.iter().filter(|&&v| v >= level).count() as f64 / N_ORACLE as f64;
        let p = closed(x);
        let se = (p * (1.0 - p) / N_ORACLE as f64).sqrt();
        oracle_ok &= (p_hat - p).abs() <= Z * se;
        oracle_txt.push(format!("{x}: {p_hat:.4}/{p:.4}"));
    }

    let plan = ay_plan(&m0, &m).unwrap();
    let law = empirical_law(&plan, N_PATHS, 41, &[0.5]).unwrap();
    let mc = law.max_exceedance[0].1;
    let se = ((2.0 / 9.0) / N_PATHS as f64).sqrt();
    let mc_ok = (mc - 2.0 / 3.0).abs() <= Z * se;
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst <= EXACT_TIGHT && oracle_ok && mc_ok && secs < BUDGET_4,
        format!(
            "max-law attainment: |bound - 1/(1+x)|, |AY - 1/(1+x)| <= {worst:.2e} on (0,1]; walk oracle (oracle/exact) {}; exact-exit P(max >= 0.5) = {mc:.4} vs 2/3 ({:.2} SE); {secs:.3} s (budget {BUDGET_4} s)",
            oracle_txt.join(", "),
            (mc - 2.0 / 3.0).abs() / se,
        ),
    )
}

fn criterion_5() -> Outcome {
    let one = cw_run(
        &AtomicMeasure::dirac(0.0),
        &[Tangent::new(0.0, -1.0).unwrap()],
        &two_point(),
        0.0,
    )
    .unwrap();
    let single = expected_local_time_zero(&one).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 50 {
        let m0 = random_measure(&mut rng, 8);
        let u0 = m0.potential();
        let p = rng.gen_range(-10.0..10.0);
        let slope = rng.gen_range(-0.99..0.99);
        let f = Tangent::new(slope, u0.eval(p) - rng.gen_range(0.01..3.0) - slope * p).unwrap();
        let Ok(StepOutcome::Cut(step)) = cw_step(&RunningState::start(&m0), f) else {
            continue;
        };
        let plan = cw_run(&m0, &[f], &step.measure_after, 0.0).unwrap();
        let lt = expected_local_time_zero(&plan).unwrap();
        let formula = u0.eval(0.0) - f.at(0.0).min(u0.eval(0.0));
        // Tanaka: E L_T = E|B_T| - E|B_0|.
        let tanaka = potential_value(&m0, 0.0) - potential_value(plan.final_measure(), 0.0);
        worst = worst.max((lt - formula).abs()).max((lt - tanaka).abs());
        done += 1;
    }
    outcome(
        single == 1.0 && worst <= EXACT_TIGHT,
        format!("local time: single flat step gives {single}; 50 random finite steps within {worst:.2e} of u0(0) - f(0) ^ u0(0) and of E|B_T| - E|B_0|"),
    )
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let (d0, two) = (AtomicMeasure::dirac(0.0), two_point());
    let curve: Vec<f64> = (0..=VALLOIS_STEPS)
        .map(|n| {
            vallois_eps_plan(&d0, &two, VALLOIS_EPS, n)
                .unwrap()
                .residual
        })
        .collect();
    let secs = t.elapsed().as_secs_f64();
    let monotone = curve.windows(2).all(|w| w[1] <= w[0] + EXACT_TIGHT);
    let first_below = curve.iter().position(|&r| r < VALLOIS_TARGET);
    let shown: Vec<String> = [0, 1, 2, 3, 4, 5, 10, 20, 50, 100, 200]
        .iter()
        .map(|&n| format!("{n}:{:.4}", curve[n]))
        .collect();
    outcome(
        monotone && first_below.is_some() && secs < BUDGET_6,
        format!(
            "Vallois convergence at eps = {VALLOIS_EPS}: non-increasing {monotone}, first below {VALLOIS_TARGET} at {first_below:?} steps; residual curve {}; {secs:.3} s (budget {BUDGET_6} s)",
            shown.join(" ")
        ),
    )
}

fn criterion_7(pairs: &[(AtomicMeasure, AtomicMeasure, [EmbeddingPlan; 3])]) -> Outcome {
    let mut nonzero = Vec::new();
    for (i, (m0, m, plans)) in pairs.iter().enumerate() {
        let gamma = span(&[m0, m]) + 1.0;
        let region = region_a(m0, m).unwrap();
        for (j, p) in plans.iter().enumerate() {
            for (k, side) in [Side::Below, Side::Above].into_iter().enumerate() {
                let seed = 700 + (6 * i + 2 * j + k) as u64;
                let (est, _) =
                    tail_probability(p, gamma, side, &region, N_TAIL_PER_PLAN, seed).unwrap();
                if est != 0.0 {
                    nonzero.push(format!("pair {i} sweep {j} {side:?}: {est}"));
                }
            }
        }
    }

    let (m0, m) = (
        AtomicMeasure::dirac(0.0),
        AtomicMeasure::probability([(-1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)]).unwrap(),
    );
    let report = minimality_report(&ay_plan(&m0, &m).unwrap(), N_PATHS, &[4.0, 8.0], 77).unwrap();
    let asym_ok = report
        .tail_estimates
        .iter()
        .all(|t| t.below <= Z * t.below_stderr && t.above <= Z * t.above_stderr);
    let est: Vec<String> = report
        .tail_estimates
        .iter()
        .map(|t| format!("{}: ({}, {})", t.gamma, t.below, t.above))
        .collect();
    outcome(
        nonzero.is_empty() && asym_ok,
        format!(
            "tail estimators: {} of 600 plan/side estimates beyond the hull nonzero{}; asymmetric AY pair gamma*P at {}",
            nonzero.len(),
            if nonzero.is_empty() { String::new() } else { format!(" ({})", nonzero.join("; ")) },
            est.join(", ")
        ),
    )
}

fn criterion_8(pairs: &[(AtomicMeasure, AtomicMeasure, [EmbeddingPlan; 3])]) -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut failures = 0;
    for (i, (_, m, plans)) in pairs.iter().enumerate() {
        let limit = 4.0 * (m.len() as f64 / N_PATHS as f64).sqrt();
        for (j, p) in plans.iter().enumerate() {
            let law = empirical_law(p, N_PATHS, 800 + (3 * i + j) as u64, &[]).unwrap();
            let tv = tv_distance(&law, m);
            worst_ratio = worst_ratio.max(tv / limit);
            failures += (tv >= limit) as usize;
        }
    }
    outcome(
        failures == 0,
        format!("law agreement: {failures} of 300 plans at or above 4 sqrt(k/n); worst tv / limit = {worst_ratio:.3}"),
    )
}

#[test]
fn acceptance_criteria() {
    let t = Instant::now();
    let pairs = criterion_2_plans();
    let build_secs = t.elapsed().as_secs_f64();

    let results = [
        criterion_1(),
        criterion_2(&pairs, build_secs),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(&pairs),
        criterion_8(&pairs),
    ];
    // Written past the test harness's output capture so the lines always
    // show up in the log.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (i, r) in results.iter().enumerate() {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {}: {tag}  {}", i + 1, r.detail).unwrap();
    }
    out.flush().unwrap();
    let failed: Vec<usize> = (1..=8).filter(|i| !results[i - 1].pass).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
