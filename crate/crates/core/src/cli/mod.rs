//! The `qjorg` command line.
//!
//! Exit codes: 0 inconclusive or informational, 10 obstruction, 11 extremal,
//! 12 not extreme, 2 usage, parse or shape errors, 3 singular input.

pub mod io;

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{self, ConvergenceConfig, Mode};
use crate::ineq::{self, JltVariant, Shape, TestConfig, TestReport, Verdict};
use crate::moebius;
use crate::qmat::MatH2;
use crate::quat::DEFAULT_TOL;
use io::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Selector {
    Auto,
    Jss,
    Jss2,
    Jssc2,
    Jh,
    Jg,
    Rez,
    Eta,
    Wat,
    Jlt,
    Tau,
    Extreme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JltArg {
    B,
    PrintedC,
}

#[derive(Debug, Parser)]
#[command(name = "qjorg", version, about = "Quaternionic Möbius pairs: invariants, Jørgensen-type tests, iteration")]
pub struct Cli {
    /// Tolerance for Σ membership, shape and real-part checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Tolerance on |lhs − threshold| for equality.
    #[arg(long, global = true, default_value_t = ineq::DEFAULT_EXTREMAL_TOL)]
    pub extremal_tol: f64,
    /// Output format (default: csv for iterate, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Scale non-Σ input by 1/√det before use.
    #[arg(long, global = true)]
    pub normalize: bool,
    /// Emit entry coordinates in trace CSV.
    #[arg(long, global = true)]
    pub full: bool,
    /// Treat INPUT as a JSON-lines file, one record per line.
    #[arg(long, global = true)]
    pub batch: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print α, β, γ, δ, σ, τ, det and Σ membership of a matrix.
    Invariants { input: String },
    /// Classify a triangular normal form and list its fixed points.
    Classify { input: String },
    /// Run one inequality test on a pair {"S", "T"}.
    Test {
        input: String,
        #[arg(long = "test", value_enum, default_value = "auto")]
        selector: Selector,
        /// Gate the diagonal tests on λ not similar to μ.
        #[arg(long)]
        strict_similarity: bool,
        /// Left-hand side used by the lower-triangular test.
        #[arg(long, value_enum, default_value = "b")]
        jlt_variant: JltArg,
    },
    /// Iterate S ↦ S T S⁻¹ and print the trace.
    Iterate {
        input: String,
        #[arg(long, default_value_t = 25)]
        steps: usize,
        /// Write the trace here instead of stdout.
        #[arg(long, short)]
        output: Option<String>,
    },
    /// Pointwise extremality criteria plus invariance along the iteration.
    Extreme {
        input: String,
        #[arg(long, default_value_t = 25)]
        steps: usize,
    },
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Inconclusive => 0,
        Verdict::Obstruction => 10,
        Verdict::Extremal => 11,
        Verdict::NotExtreme => 12,
    }
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn test_config(cli: &Cli) -> TestConfig {
    let mut cfg = TestConfig { tol: cli.tol, extremal_tol: cli.extremal_tol, ..Default::default() };
    if let Command::Test { strict_similarity, jlt_variant, .. } = &cli.command {
        cfg.require_non_similar = *strict_similarity;
        cfg.jlt_variant = match jlt_variant {
            JltArg::B => JltVariant::B,
            JltArg::PrintedC => JltVariant::PrintedC,
        };
    }
    cfg
}

fn prepare(m: MatH2, name: &str, cli: &Cli, err: &mut dyn Write) -> Result<MatH2, CliError> {
    let det = m.det();
    if !(det > crate::quat::ZERO_TOL) {
        return Err(CliError::Singular(format!("{name} is singular (det = {det:e})")));
    }
    if (det - 1.0).abs() <= cli.tol {
        return Ok(m);
    }
    if cli.normalize {
        let _ = writeln!(err, "warning: {name} has det {det}; normalized to Σ");
        Ok(m.normalize_to_sigma()?)
    } else {
        let _ = writeln!(err, "warning: {name} has det {det}, not in Σ (use --normalize)");
        Ok(m)
    }
}

fn load_pair(text: &str, cli: &Cli, err: &mut dyn Write) -> Result<(MatH2, MatH2), CliError> {
    let (s, t) = io::parse_pair(text)?;
    Ok((prepare(s, "S", cli, err)?, prepare(t, "T", cli, err)?))
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let input = match &cli.command {
        Command::Invariants { input }
        | Command::Classify { input }
        | Command::Test { input, .. }
        | Command::Iterate { input, .. }
        | Command::Extreme { input, .. } => input,
    };
    let text = io::read_source(input)?;
    if cli.batch {
        return run_batch(cli, &text, out);
    }
    match &cli.command {
        Command::Invariants { .. } => {
            let m = prepare(io::parse_matrix(&text)?, "M", cli, err)?;
            emit_value(cli, out, &invariants_value(&m, cli.tol))?;
            Ok(0)
        }
        Command::Classify { .. } => {
            let m = prepare(io::parse_matrix(&text)?, "M", cli, err)?;
            emit_value(cli, out, &classify_value(&m, cli.tol)?)?;
            Ok(0)
        }
        Command::Test { selector, .. } => {
            let (s, t) = load_pair(&text, cli, err)?;
            let r = run_test(&s, &t, *selector, &test_config(cli))?;
            emit_reports(cli, out, std::slice::from_ref(&r))?;
            Ok(verdict_code(r.verdict))
        }
        Command::Iterate { steps, output, .. } => {
            let (s, t) = load_pair(&text, cli, err)?;
            cmd_iterate(cli, &s, &t, *steps, output.as_deref(), out, err)
        }
        Command::Extreme { steps, .. } => {
            let (s, t) = load_pair(&text, cli, err)?;
            let (verdict, reports) = run_extreme(&s, &t, *steps, &test_config(cli))?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => io::write_json(out, &json!({ "verdict": verdict, "reports": reports }))?,
                Format::Csv => io::write_report_csv(out, &reports)?,
                Format::Text => {
                    writeln!(out, "verdict {verdict}")?;
                    for r in &reports {
                        writeln!(out)?;
                        io::write_report_text(out, r)?;
                    }
                }
            }
            Ok(verdict_code(verdict))
        }
    }
}

fn emit_value(cli: &Cli, out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => io::write_json(out, v)?,
        Format::Text | Format::Csv => {
            let sep = if cli.format == Some(Format::Csv) { "," } else { " " };
            if cli.format == Some(Format::Csv) {
                writeln!(out, "key,value")?;
            }
            if let Value::Object(map) = v {
                for (k, val) in map {
                    let s = match val {
                        Value::Array(xs) => xs.iter().map(Value::to_string).collect::<Vec<_>>().join(" "),
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    writeln!(out, "{k}{sep}{s}")?;
                }
            }
        }
    }
    Ok(())
}

fn emit_reports(cli: &Cli, out: &mut dyn Write, reports: &[TestReport]) -> Result<(), CliError> {
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            for r in reports {
                io::write_json(out, r)?;
            }
        }
        Format::Csv => io::write_report_csv(out, reports)?,
        Format::Text => {
            for r in reports {
                io::write_report_text(out, r)?;
            }
        }
    }
    Ok(())
}

pub fn invariants_value(m: &MatH2, tol: f64) -> Value {
    let inv = m.invariants();
    json!({
        "alpha": inv.alpha,
        "beta": inv.beta,
        "gamma": inv.gamma,
        "delta": inv.delta,
        "sigma": inv.sigma,
        "tau": inv.tau,
        "det": m.det(),
        "in_sigma": m.in_sigma(tol),
    })
}

pub fn classify_value(m: &MatH2, tol: f64) -> Result<Value, CliError> {
    if !(m.is_upper_triangular(tol) || m.is_lower_triangular(tol)) {
        return Err(CliError::Shape("classification needs a triangular normal form".into()));
    }
    // A lower-triangular form is conjugated to upper form by Z ↦ 1/Z.
    let lower = !m.is_upper_triangular(tol);
    let nf = if lower { MatH2::new(m.d, m.c, m.b, m.a) } else { *m };
    let class = moebius::classify_normal_form(&nf, tol);
    let mut v = json!({ "class": class, "normal_form": if lower { "lower" } else { "upper" } });
    if !lower {
        v["fixed_points"] = serde_json::to_value(moebius::fixed_points_normal_form(&nf, tol)?)
            .map_err(|e| CliError::Parse(e.to_string()))?;
    }
    Ok(v)
}

fn require(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Shape(format!("T does not match the selector: {what}")))
    }
}

/// Runs the selected test. For `jh` the pair is read as `A = T`, `B = S`.
pub fn run_test(s: &MatH2, t: &MatH2, sel: Selector, cfg: &TestConfig) -> Result<TestReport, CliError> {
    let shape = Shape::of(t, cfg.tol);
    let upper = t.is_upper_triangular(cfg.tol);
    let lower = t.is_lower_triangular(cfg.tol);
    let diag = shape == Shape::Diagonal;
    Ok(match sel {
        Selector::Auto => match shape {
            Shape::Diagonal => ineq::jss_test(s, t, cfg),
            Shape::Upper if t.a.re().abs() > cfg.tol => ineq::jg_test(s, t, cfg),
            Shape::Upper => ineq::rez_test(s, t, cfg),
            Shape::Lower => ineq::jlt_test(s, t, cfg),
            Shape::General => return Err(CliError::Shape("T matches no shape gate".into())),
        },
        Selector::Jss => {
            require(diag, "diagonal")?;
            ineq::jss_test(s, t, cfg)
        }
        Selector::Jss2 => {
            require(diag, "diagonal")?;
            ineq::jss2_test(s, t, cfg)
        }
        Selector::Jssc2 => {
            require(diag, "diagonal")?;
            ineq::jssc2_test(s, t, cfg)
        }
        Selector::Extreme => {
            require(diag, "diagonal")?;
            ineq::extremality_criteria(s, t, cfg)
        }
        Selector::Jh => {
            require(diag, "diagonal")?;
            ineq::hyperbolic_commutator_test(t, s, cfg)
        }
        Selector::Jg => {
            require(upper, "upper-triangular")?;
            ineq::jg_test(s, t, cfg)
        }
        Selector::Rez => {
            require(upper, "upper-triangular")?;
            ineq::rez_test(s, t, cfg)
        }
        Selector::Eta => {
            require(upper, "upper-triangular")?;
            ineq::eta_normalized_test(s, t, cfg)?
        }
        Selector::Wat => {
            require(upper, "upper-triangular")?;
            ineq::waterman_test(s, t, cfg)
        }
        Selector::Jlt => {
            require(lower, "lower-triangular")?;
            ineq::jlt_test(s, t, cfg)
        }
        Selector::Tau => match shape {
            Shape::Upper | Shape::Lower => ineq::non_extreme_tau_test(s, t, shape, cfg)?,
            _ => return Err(CliError::Shape("T must be strictly upper- or lower-triangular".into())),
        },
    })
}

/// Pointwise criteria, the triangular non-extremality test where it
/// applies, and invariance along the iteration. The overall verdict is
/// Obstruction if the pointwise test says so, NotExtreme if any report does,
/// Extremal if the invariance check holds, Inconclusive otherwise.
pub fn run_extreme(
    s: &MatH2,
    t: &MatH2,
    steps: usize,
    cfg: &TestConfig,
) -> Result<(Verdict, Vec<TestReport>), CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let shape = Shape::of(t, cfg.tol);
    let mut reports = match shape {
        Shape::Diagonal => vec![ineq::extremality_criteria(s, t, cfg)],
        Shape::Upper | Shape::Lower => vec![
            run_test(s, t, Selector::Auto, cfg)?,
            ineq::non_extreme_tau_test(s, t, shape, cfg)?,
        ],
        Shape::General => return Err(CliError::Shape("T matches no shape gate".into())),
    };
    let inv = dynamics::extremal_invariance_check(s, t, steps, cfg)?;
    let invariant = inv.verdict == Verdict::Extremal;
    reports.push(inv);
    let verdict = if reports[0].verdict == Verdict::Obstruction {
        Verdict::Obstruction
    } else if reports.iter().any(|r| r.verdict == Verdict::NotExtreme) {
        Verdict::NotExtreme
    } else if invariant {
        Verdict::Extremal
    } else {
        Verdict::Inconclusive
    };
    Ok((verdict, reports))
}

#[derive(Serialize)]
struct TraceOutput<'a> {
    trace: &'a dynamics::IterationTrace,
    convergence: dynamics::ConvergenceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    recurrence: Option<dynamics::RecurrenceCheck>,
}

fn cmd_iterate(
    cli: &Cli,
    s: &MatH2,
    t: &MatH2,
    steps: usize,
    output: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let mode = Mode::detect(t, cli.tol)
        .ok_or_else(|| CliError::Shape("T is neither diagonal nor triangular".into()))?;
    let trace = dynamics::iterate(s, t, steps, mode)?;
    let conv = dynamics::classify_convergence(&trace, &ConvergenceConfig::default());
    let recurrence = match mode {
        Mode::Diagonal => Some(dynamics::verify_recurrence(&trace, t)?),
        _ => None,
    };

    let mut file;
    let sink: &mut dyn Write = match output {
        Some(path) => {
            file = File::create(path)?;
            &mut file
        }
        None => out,
    };
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => io::write_trace_csv(sink, &trace, cli.full)?,
        Format::Json => io::write_json(sink, &TraceOutput { trace: &trace, convergence: conv, recurrence })?,
        Format::Text => {
            writeln!(sink, "{:>4} {:>14} {:>14} {:>14} {:>14}", "n", "bc_norm", "extremal_lhs", "det", "|c|")?;
            for st in &trace.steps {
                writeln!(
                    sink,
                    "{:>4} {:>14.6e} {:>14.10} {:>14.10} {:>14.6e}",
                    st.n, st.bc_norm, st.extremal_lhs, st.det, st.s.c.norm()
                )?;
            }
        }
    }

    let rate = conv.rate.map_or("n/a".to_string(), |r| format!("{r:.6}"));
    let _ = write!(
        err,
        "convergence: {} rate={} tail_bc_norm={:e}",
        serde_json::to_value(conv.verdict).map(|v| v.as_str().unwrap_or("").to_owned()).unwrap_or_default(),
        rate,
        conv.tail_bc_norm
    );
    if let Some(rc) = recurrence {
        let _ = write!(err, " recurrence_max_dev={:e}", rc.max_deviation);
    }
    if let Some(why) = &trace.truncated {
        let _ = write!(err, " truncated=\"{why}\"");
    }
    let _ = writeln!(err);
    Ok(0)
}

fn batch_record(cli: &Cli, line: &str) -> Result<Value, CliError> {
    let cfg = test_config(cli);
    let to_value = |r: &TestReport| serde_json::to_value(r).map_err(|e| CliError::Parse(e.to_string()));
    let mut sink = std::io::sink();
    match &cli.command {
        Command::Invariants { .. } => {
            let m = prepare(io::parse_matrix(line)?, "M", cli, &mut sink)?;
            Ok(invariants_value(&m, cli.tol))
        }
        Command::Classify { .. } => {
            let m = prepare(io::parse_matrix(line)?, "M", cli, &mut sink)?;
            classify_value(&m, cli.tol)
        }
        Command::Test { selector, .. } => {
            let (s, t) = load_pair(line, cli, &mut sink)?;
            to_value(&run_test(&s, &t, *selector, &cfg)?)
        }
        Command::Extreme { steps, .. } => {
            let (s, t) = load_pair(line, cli, &mut sink)?;
            let (verdict, reports) = run_extreme(&s, &t, *steps, &cfg)?;
            Ok(json!({ "verdict": verdict, "reports": reports }))
        }
        Command::Iterate { .. } => Err(CliError::Usage("iterate does not support --batch".into())),
    }
}

/// One JSON object per non-empty input line, in input order. Failed lines
/// produce `{"line": n, "error": …}` and make the exit code 2.
fn run_batch(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    if matches!(cli.command, Command::Iterate { .. }) {
        return Err(CliError::Usage("iterate does not support --batch".into()));
    }
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let results: Vec<Result<Value, (usize, String)>> = lines
        .par_iter()
        .map(|&(n, l)| batch_record(cli, l).map_err(|e| (n, e.to_string())))
        .collect();
    let mut code = 0;
    for r in results {
        match r {
            Ok(v) => io::write_json(out, &v)?,
            Err((n, e)) => {
                code = 2;
                io::write_json(out, &json!({ "line": n, "error": e }))?;
            }
        }
    }
    Ok(code)
}
