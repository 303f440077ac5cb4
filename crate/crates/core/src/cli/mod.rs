//! Command-line front end.
//!
//! Exit status: 0 success, 1 output could not be written, 2 unreadable or
//! malformed input, 3 inadmissible or truncated construction, 4 failed
//! verification.

pub mod spec;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::balayage::Side;
use crate::construct::{EmbeddingPlan, PlanParseError};
use crate::error::Error;
use crate::minimality::{
    gap_c, max_law_bound, minimality_report, region_a, MinimalityReport, RegionA,
};
use crate::potential::PLConcave;
use crate::simulate::{
    empirical_law, tv_distance, write_law_csv, write_tail_csv, EmpiricalLaw, TailRow,
};
use crate::TAU;

pub use spec::{Construction, ParseError, ProblemSpec, Simulation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "skorokhod",
    version,
    about = "Chacon-Walsh embeddings and minimality checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write here instead of stdout. With `--format csv` on `verify` this is
    /// a directory receiving `law.csv` and `tails.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gap constant, contact set and max-law bound of a problem.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Build the plan described by a problem and write it as JSON.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a plan structurally and by simulation.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Number of simulated paths (overrides the spec).
        #[arg(long)]
        paths: Option<usize>,
        /// Random seed (overrides the spec).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Draw the potentials and tangents of a plan as SVG.
    Diagram {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failed command with its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn construction_failure(e: Error) -> Failure {
    let code = match e {
        Error::InadmissibleC { .. }
        | Error::InvalidTangent { .. }
        | Error::IncompletePlan { .. }
        | Error::InvalidParameter(_) => EXIT_INADMISSIBLE,
        Error::PlanMismatch(_) => EXIT_VERIFY,
        _ => EXIT_PARSE,
    };
    Failure::new(code, e.to_string())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<ProblemSpec, Failure> {
    ProblemSpec::parse(&read_input(path)?)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn read_plan(path: &Path) -> Result<EmbeddingPlan, Failure> {
    EmbeddingPlan::from_json(&read_input(path)?).map_err(|e| match e {
        PlanParseError::Json(j) => {
            let path_in_file = j.path().to_string();
            let inner = j.into_inner();
            Failure::new(
                EXIT_PARSE,
                format!(
                    "{}: line {}, column {}, at `{path_in_file}`: {inner}",
                    path.display(),
                    inner.line(),
                    inner.column()
                ),
            )
        }
        PlanParseError::Plan(e) => {
            let f = construction_failure(e);
            Failure::new(f.code, format!("{}: {}", path.display(), f.message))
        }
    })
}

fn check_match(spec: &ProblemSpec, plan: &EmbeddingPlan) -> Result<(), Failure> {
    if !plan.mu0.approx_eq(&spec.mu0, TAU, TAU) || !plan.target.approx_eq(&spec.mu, TAU, TAU) {
        return Err(Failure::new(
            EXIT_VERIFY,
            "plan measures do not match the problem specification",
        ));
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn csv_string(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).expect("in-memory csv");
    String::from_utf8(buf).expect("utf-8 csv")
}

fn fmt_ext(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn format_region(r: &RegionA) -> String {
    let parts: Vec<String> = r
        .components
        .iter()
        .map(|&(p, q)| {
            if p == q {
                format!("{{{}}}", fmt_ext(p))
            } else {
                format!("[{}, {}]", fmt_ext(p), fmt_ext(q))
            }
        })
        .collect();
    parts.join(" ∪ ")
}

fn format_breakpoints(f: &PLConcave) -> String {
    f.kinks()
        .iter()
        .enumerate()
        .map(|(i, k)| format!("({}, {})", k.x, f.level(i)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct Analysis {
    #[serde(rename = "C")]
    c: f64,
    region: RegionA,
    mu0_potential: PLConcave,
    mu_potential: PLConcave,
    /// `(x, bound)`
    max_law_bound: Vec<(f64, f64)>,
}

/// Thresholds from the spec, or `{¼, ½, ¾, 1}·span`.
fn thresholds(spec: &ProblemSpec) -> Vec<f64> {
    if spec.simulation.thresholds.is_empty() {
        [0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|t| t * spec.span())
            .collect()
    } else {
        spec.simulation.thresholds.clone()
    }
}

fn analyze(spec: &ProblemSpec, output: &Output) -> Result<(), Failure> {
    let fail = |e: Error| Failure::new(EXIT_PARSE, e.to_string());
    let c = gap_c(&spec.mu0, &spec.mu).map_err(fail)?;
    let region = region_a(&spec.mu0, &spec.mu).map_err(fail)?;
    let bound = thresholds(spec)
        .into_iter()
        .map(|x| max_law_bound(&spec.mu0, &spec.mu, x).map(|b| (x, b)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    let a = Analysis {
        c,
        region,
        mu0_potential: spec.mu0.potential(),
        mu_potential: spec.mu.potential(),
        max_law_bound: bound,
    };
    let text = match output.format {
        Format::Json => to_json(&a),
        Format::Csv => {
            let mut s = String::from("threshold,bound\n");
            for (x, b) in &a.max_law_bound {
                writeln!(s, "{x},{b}").unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "C        {}", a.c).unwrap();
            writeln!(s, "A        {}", format_region(&a.region)).unwrap();
            writeln!(s, "a-       {}", fmt_ext(a.region.a_minus)).unwrap();
            writeln!(s, "a+       {}", fmt_ext(a.region.a_plus)).unwrap();
            writeln!(s, "u_mu0    {}", format_breakpoints(&a.mu0_potential)).unwrap();
            writeln!(s, "u_mu     {}", format_breakpoints(&a.mu_potential)).unwrap();
            writeln!(s, "\n{:>12}  {:>10}", "x", "bound").unwrap();
            for (x, b) in &a.max_law_bound {
                writeln!(s, "{x:>12.6}  {b:>10.6}").unwrap();
            }
            s
        }
    };
    emit(output.out.as_deref(), &text)
}

fn build(spec: &ProblemSpec, out: Option<&Path>) -> Result<(), Failure> {
    let plan = spec.build().map_err(construction_failure)?;
    emit(out, &(plan.to_json() + "\n"))?;
    if !plan.is_complete() {
        return Err(Failure::new(
            EXIT_INADMISSIBLE,
            format!("construction truncated with residual {}", plan.residual),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct Verification {
    report: MinimalityReport,
    law: EmpiricalLaw,
    tv_distance: f64,
    tv_threshold: f64,
    /// Every tail estimate within 3 standard errors of 0.
    tail_rule_ok: bool,
    passed: bool,
}

fn verify(
    spec: &ProblemSpec,
    plan: &EmbeddingPlan,
    n: usize,
    seed: u64,
    output: &Output,
) -> Result<bool, Failure> {
    check_match(spec, plan)?;
    let verr = |e: Error| Failure::new(EXIT_VERIFY, e.to_string());
    let report = minimality_report(plan, n, &spec.gammas(), seed.wrapping_add(1)).map_err(verr)?;
    let law = empirical_law(plan, n, seed, &thresholds(spec)).map_err(verr)?;
    let tv = tv_distance(&law, &plan.target);
    let tv_threshold = 4.0 * (plan.target.len() as f64 / n as f64).sqrt();
    let tail_rule_ok = report
        .tail_estimates
        .iter()
        .all(|t| t.below <= 3.0 * t.below_stderr && t.above <= 3.0 * t.above_stderr);
    let passed = report.structural_ok && tv <= tv_threshold;
    let v = Verification {
        report,
        law,
        tv_distance: tv,
        tv_threshold,
        tail_rule_ok,
        passed,
    };
    match output.format {
        Format::Json => emit(output.out.as_deref(), &to_json(&v))?,
        Format::Csv => {
            let law_csv = csv_string(|b| write_law_csv(&v.law, b));
            let rows: Vec<TailRow> = v
                .report
                .tail_estimates
                .iter()
                .flat_map(|t| {
                    [
                        TailRow {
                            gamma: t.gamma,
                            side: Side::Below,
                            estimate: t.below,
                            stderr: t.below_stderr,
                        },
                        TailRow {
                            gamma: t.gamma,
                            side: Side::Above,
                            estimate: t.above,
                            stderr: t.above_stderr,
                        },
                    ]
                })
                .collect();
            let tail_csv = csv_string(|b| write_tail_csv(&rows, b));
            match &output.out {
                Some(dir) => {
                    let io = |e: std::io::Error| {
                        Failure::new(EXIT_IO, format!("{}: {e}", dir.display()))
                    };
                    std::fs::create_dir_all(dir).map_err(io)?;
                    std::fs::write(dir.join("law.csv"), law_csv).map_err(io)?;
                    std::fs::write(dir.join("tails.csv"), tail_csv).map_err(io)?;
                }
                None => print!("{law_csv}\n{tail_csv}"),
            }
        }
        Format::Text => emit(output.out.as_deref(), &verification_text(spec, &v))?,
    }
    Ok(v.passed)
}

fn verification_text(spec: &ProblemSpec, v: &Verification) -> String {
    let r = &v.report;
    let mut s = String::new();
    let yes = |b: bool| if b { "yes" } else { "no" };
    writeln!(s, "C              {}", r.c).unwrap();
    writeln!(s, "A              {}", format_region(&r.region)).unwrap();
    writeln!(
        s,
        "a-, a+         {}, {}",
        fmt_ext(r.region.a_minus),
        fmt_ext(r.region.a_plus)
    )
    .unwrap();
    match r.crossing_step {
        None => writeln!(s, "structural     ok").unwrap(),
        Some(k) => writeln!(s, "structural     FAILED (step {k} crosses A)").unwrap(),
    }
    writeln!(s, "UI embedding   {}", yes(r.ui_embedding)).unwrap();
    writeln!(
        s,
        "\n{:>10}  {:>12}  {:>10}  {:>12}  {:>10}",
        "gamma", "below", "se", "above", "se"
    )
    .unwrap();
    for t in &r.tail_estimates {
        writeln!(
            s,
            "{:>10.4}  {:>12.6}  {:>10.6}  {:>12.6}  {:>10.6}",
            t.gamma, t.below, t.below_stderr, t.above, t.above_stderr
        )
        .unwrap();
    }
    writeln!(
        s,
        "tail rule      {}",
        if v.tail_rule_ok { "ok" } else { "not met" }
    )
    .unwrap();
    writeln!(s, "\n{:>12}  {:>10}  {:>10}", "atom", "empirical", "target").unwrap();
    for &(x, p) in &v.law.atom_frequencies {
        writeln!(s, "{x:>12.6}  {p:>10.6}  {:>10.6}", spec.mu.weight_at(x)).unwrap();
    }
    writeln!(
        s,
        "tv distance    {:.6} (threshold {:.6})",
        v.tv_distance, v.tv_threshold
    )
    .unwrap();
    if !v.law.max_exceedance.is_empty() {
        writeln!(s, "\n{:>12}  {:>12}  {:>10}", "x", "P(max >= x)", "bound").unwrap();
        for &(x, p) in &v.law.max_exceedance {
            let b = max_law_bound(&spec.mu0, &spec.mu, x).unwrap_or(f64::NAN);
            writeln!(s, "{x:>12.6}  {p:>12.6}  {b:>10.6}").unwrap();
        }
    }
    writeln!(s, "\n{}", if v.passed { "PASSED" } else { "FAILED" }).unwrap();
    s
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Analyze { spec, output } => {
            analyze(&read_spec(&spec)?, &output)?;
            Ok(EXIT_OK)
        }
        Command::Build { spec, out } => {
            build(&read_spec(&spec)?, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            spec,
            plan,
            paths,
            seed,
            output,
        } => {
            let spec = read_spec(&spec)?;
            let plan = read_plan(&plan)?;
            plan.require_complete().map_err(construction_failure)?;
            let n = paths.unwrap_or(spec.simulation.n_paths);
            let seed = seed.unwrap_or(spec.simulation.seed);
            let passed = verify(&spec, &plan, n, seed, &output)?;
            Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Diagram { spec, plan, out } => {
            let plan = read_plan(&plan)?;
            if let Some(spec) = spec {
                check_match(&read_spec(&spec)?, &plan)?;
            }
            emit(Some(&out), &svg::render(&plan))?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
