//! Command-line front end. `run` does all the work and returns the text
//! destined for stdout/stderr together with the exit code, so tests can
//! drive it without spawning a process.
//!
//! Exit codes: 0 success, 1 invalid input, 2 mathematical failure
//! (singular system, colliding points, failed verdict or reproduction),
//! 3 internal inconsistency.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::dinvariant::{check_d_invariance, span_dimension, DInvariance};
use crate::error::{Error, Result};
use crate::example5::{reproduce, Reproduction};
use crate::functionals::SubspaceSpec;
use crate::linalg;
use crate::problem::{load_problem, rational_strings, Problem, EXAMPLE5_JSON};
use crate::projector::{
    convergence_study, hermite_interpolant, hermite_matrix, lagrange_interpolant,
    ConvergenceReport, Interpolant, StudyOutcome, Verdict, DECAY_SLACK,
};
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "hermite-limit",
    version,
    about = "Exact Hermite projectors as limits of Lagrange projectors"
)]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a problem file.
    Check { problem: PathBuf },
    /// Print the subspace basis constructed at each site.
    Basis { problem: PathBuf },
    /// Solve for the Hermite or the Lagrange interpolant of `f`.
    Interpolate {
        problem: PathBuf,
        #[arg(value_enum, default_value_t = Mode::Hermite)]
        mode: Mode,
        /// Perturbation parameter for the Lagrange solve.
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
    },
    /// Compare Lagrange interpolants with the Hermite one along h values.
    Converge {
        problem: PathBuf,
        /// Overrides the file's h_values (comma separated or repeated).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        h: Vec<String>,
    },
    /// Coordinates of every perturbed point at each t, as CSV.
    Trajectories {
        problem: PathBuf,
        #[arg(
            long,
            required = true,
            allow_hyphen_values = true,
            value_delimiter = ','
        )]
        t: Vec<String>,
    },
    /// Recompute the bundled three-variable example and compare every
    /// artifact with the stored values.
    #[command(name = "reproduce-example5")]
    ReproduceExample5 {
        /// Use this problem file instead of the bundled one.
        #[arg(long)]
        problem: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Hermite,
    Lagrange,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Rendered result of a command that ran to completion.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

fn read_problem(path: &PathBuf) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    load_problem(&text)
}

fn approx(r: &Rational) -> String {
    match r.to_f64() {
        Some(x) => format!("{x:.3e}"),
        None => format_rational(r),
    }
}

fn cmd_check(problem: &Problem) -> Result<Report> {
    let scheme = &problem.scheme;
    let mut text = format!(
        "problem: d = {}, {} sites, s = {}\n",
        scheme.dim(),
        scheme.entries().len(),
        scheme.size()
    );
    let mut sites = Vec::new();
    for (k, e) in scheme.entries().iter().enumerate() {
        let kind = match &e.spec {
            SubspaceSpec::ClassOne { .. } => "class one".to_string(),
            SubspaceSpec::ClassTwo { ladder, .. } => {
                format!("class two, a = {:?}", ladder.values())
            }
        };
        let invariant = check_d_invariance(&e.basis.polys)?;
        let span = span_dimension(&e.basis.polys);
        if let DInvariance::NotInvariant {
            element, variable, ..
        } = &invariant
        {
            return Err(Error::Inconsistent(format!(
                "site {}: derivative of basis element {} in x{} leaves the span",
                k + 1,
                element + 1,
                variable + 1
            )));
        }
        if span != e.basis.len() {
            return Err(Error::Inconsistent(format!(
                "site {}: basis of {} elements spans dimension {span}",
                k + 1,
                e.basis.len()
            )));
        }
        let _ = writeln!(
            text,
            "site {} at ({}): {kind}, {} functionals, D-invariant, span dimension {span}",
            k + 1,
            rational_strings(&e.site).join(", "),
            e.basis.len()
        );
        sites.push(json!({
            "site": rational_strings(&e.site),
            "kind": kind,
            "functionals": e.basis.len(),
            "d_invariant": true,
            "span_dimension": span,
        }));
    }
    let det = linalg::determinant(&hermite_matrix(scheme, &problem.basis)?);
    let _ = writeln!(
        text,
        "det(lambda^T q) = {}: nonsingular",
        format_rational(&det)
    );
    text.push_str("check passed\n");
    Ok(Report {
        text,
        json: json!({
            "passed": true,
            "dimension": scheme.dim(),
            "s": scheme.size(),
            "sites": sites,
            "gram_determinant": format_rational(&det),
        }),
        code: 0,
    })
}

fn cmd_basis(problem: &Problem) -> Report {
    let mut text = String::new();
    let mut sites = Vec::new();
    for (k, e) in problem.scheme.entries().iter().enumerate() {
        let kind = match e.spec {
            SubspaceSpec::ClassOne { .. } => "classOne",
            SubspaceSpec::ClassTwo { .. } => "classTwo",
        };
        let _ = writeln!(text, "site {} ({kind}):", k + 1);
        let mut elements = Vec::new();
        for (index, q) in e.spec.indices().iter().zip(&e.basis.polys) {
            let _ = writeln!(text, "  {index}: {q}");
            elements.push(json!({"index": index.to_string(), "polynomial": q.to_string()}));
        }
        sites.push(json!({"site": rational_strings(&e.site), "type": kind, "basis": elements}));
    }
    Report {
        text,
        json: json!({ "sites": sites }),
        code: 0,
    }
}

fn interpolant_json(mode: &str, h: Option<&Rational>, p: &Interpolant) -> Value {
    json!({
        "mode": mode,
        "h": h.map(format_rational),
        "coefficients": rational_strings(&p.coefficients),
        "polynomial": p.polynomial.to_string(),
        "terms": p.polynomial.to_records(),
    })
}

fn cmd_interpolate(problem: &Problem, mode: Mode, h: Option<&str>) -> Result<Report> {
    let (p, h) = match (mode, h) {
        (Mode::Hermite, None) => (
            hermite_interpolant(&problem.scheme, &problem.basis, &problem.f)?,
            None,
        ),
        (Mode::Hermite, Some(_)) => {
            return Err(Error::InvalidArgument(
                "--h only applies to lagrange mode".into(),
            ))
        }
        (Mode::Lagrange, None) => {
            return Err(Error::InvalidArgument("lagrange mode needs --h".into()))
        }
        (Mode::Lagrange, Some(s)) => {
            let h0 = parse_rational(s).map_err(|e| e.at("--h"))?;
            let p = lagrange_interpolant(&problem.scheme, &problem.basis, &problem.f, &h0)?;
            (p, Some(h0))
        }
    };
    let name = if h.is_some() { "lagrange" } else { "hermite" };
    Ok(Report {
        text: format!("{}\n", p.polynomial),
        json: interpolant_json(name, h.as_ref(), &p),
        code: 0,
    })
}

fn convergence_text(report: &ConvergenceReport, basis_len: usize) -> String {
    let mut text = String::new();
    let _ = writeln!(
        text,
        "limit coefficients: {}",
        rational_strings(&report.limit).join(", ")
    );
    let header: Vec<String> = (1..=basis_len).map(|j| format!("q{j}")).collect();
    let _ = writeln!(
        text,
        "gaps |x_j(h) - x_j(0)| (approximate; exact values in --json):"
    );
    let _ = writeln!(text, "  {:<12} {}", "h", header.join(" "));
    for row in &report.rows {
        let h = format_rational(&row.h);
        match &row.outcome {
            StudyOutcome::Solved { gaps, .. } => {
                let g: Vec<String> = gaps.iter().map(approx).collect();
                let _ = writeln!(text, "  {h:<12} {}", g.join(" "));
            }
            StudyOutcome::Singular { rank } => {
                let _ = writeln!(text, "  {h:<12} singular gram matrix (rank {rank})");
            }
            StudyOutcome::Collision { first, second } => {
                let _ = writeln!(
                    text,
                    "  {h:<12} points {} and {} coincide",
                    first + 1,
                    second + 1
                );
            }
        }
    }
    let _ = writeln!(text, "gap ratios between consecutive solved rows:");
    for r in &report.ratios {
        let v: Vec<String> = r
            .ratios
            .iter()
            .map(|x| x.as_ref().map_or_else(|| "-".to_string(), approx))
            .collect();
        let _ = writeln!(
            text,
            "  {} -> {}: {}",
            format_rational(&r.from),
            format_rational(&r.to),
            v.join(" ")
        );
    }
    match &report.verdict {
        Verdict::Pass => {
            let _ = writeln!(
                text,
                "verdict: pass (linear decay with C = {DECAY_SLACK}, first pair skipped)"
            );
        }
        Verdict::Inconclusive => {
            let _ = writeln!(
                text,
                "verdict: inconclusive (need at least three solvable h values)"
            );
        }
        Verdict::Fail {
            coefficient,
            from,
            to,
        } => {
            let _ = writeln!(
                text,
                "verdict: FAIL at q{} between h = {} and h = {}",
                coefficient + 1,
                format_rational(from),
                format_rational(to)
            );
        }
    }
    text
}

fn cmd_converge(problem: &Problem, h: &[String]) -> Result<Report> {
    let hs = if h.is_empty() {
        problem.h_values.clone()
    } else {
        h.iter()
            .enumerate()
            .map(|(i, s)| parse_rational(s).map_err(|e| e.at(format!("--h[{i}]"))))
            .collect::<Result<_>>()?
    };
    if hs.is_empty() {
        return Err(Error::InvalidArgument(
            "no h values: give --h or h_values in the problem file".into(),
        ));
    }
    let report = convergence_study(&problem.scheme, &problem.basis, &problem.f, &hs)?;
    Ok(Report {
        text: convergence_text(&report, problem.basis.len()),
        json: report.to_json(),
        code: if report.passed() { 0 } else { 2 },
    })
}

fn cmd_trajectories(problem: &Problem, t: &[String]) -> Result<Report> {
    let ts = t
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| e.at(format!("--t[{i}]"))))
        .collect::<Result<Vec<_>>>()?;
    let d = problem.dim();
    let mut text = String::from("t");
    for i in 1..=d {
        let _ = write!(text, ",x{i}");
    }
    text.push('\n');
    let mut rows = Vec::new();
    for (t, points) in problem.scheme.trajectories(&ts) {
        for p in points {
            let coords = rational_strings(&p);
            let _ = writeln!(text, "{},{}", format_rational(&t), coords.join(","));
            rows.push(json!({"t": format_rational(&t), "point": coords}));
        }
    }
    Ok(Report {
        text,
        json: json!({ "rows": rows }),
        code: 0,
    })
}

fn reproduction_report(r: &Reproduction) -> Report {
    Report {
        text: r.to_text(),
        json: r.to_json(),
        code: if r.passed() { 0 } else { 2 },
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check { problem } => cmd_check(&read_problem(problem)?),
        Command::Basis { problem } => Ok(cmd_basis(&read_problem(problem)?)),
        Command::Interpolate { problem, mode, h } => {
            cmd_interpolate(&read_problem(problem)?, *mode, h.as_deref())
        }
        Command::Converge { problem, h } => cmd_converge(&read_problem(problem)?, h),
        Command::Trajectories { problem, t } => cmd_trajectories(&read_problem(problem)?, t),
        Command::ReproduceExample5 { problem } => {
            let p = match problem {
                Some(path) => read_problem(path)?,
                None => load_problem(EXAMPLE5_JSON)?,
            };
            Ok(reproduction_report(&reproduce(&p)))
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: rendered,
                    code: 1,
                }
            } else {
                Outcome {
                    stdout: rendered,
                    stderr: String::new(),
                    code: 0,
                }
            };
        }
    };
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            let stdout = if cli.json {
                let v = json!({"error": e.to_string(), "exit_code": e.exit_code()});
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&v).expect("json values serialize")
                )
            } else {
                String::new()
            };
            return Outcome {
                stdout,
                stderr: format!("error: {e}\n"),
                code: e.exit_code(),
            };
        }
    };
    let body = if cli.json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&report.json).expect("json values serialize")
        )
    } else {
        report.text
    };
    match &cli.output {
        None => Outcome {
            stdout: body,
            stderr: String::new(),
            code: report.code,
        },
        Some(path) => match std::fs::write(path, body) {
            Ok(()) => Outcome {
                stdout: String::new(),
                stderr: String::new(),
                code: report.code,
            },
            Err(e) => Outcome {
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
                code: 1,
            },
        },
    }
}
