//! Input parsing and output writers.

use std::fs;
use std::io::{self, Read, Write};

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::dynamics::IterationTrace;
use crate::ineq::TestReport;
use crate::qmat::MatH2;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read input: {0}")]
    Io(#[from] io::Error),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Singular(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Singular(_) => 3,
            _ => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::SingularMatrix { .. } | E::NonInvertibleQuaternion => Self::Singular(e.to_string()),
            _ => Self::Shape(e.to_string()),
        }
    }
}

/// Reads `arg` as inline JSON if it looks like JSON, stdin if it is `-`,
/// and a file path otherwise.
pub fn read_source(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_owned());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    Ok(fs::read_to_string(arg)?)
}

fn check_version(v: &Value) -> Result<(), CliError> {
    match v.get("v") {
        None => Ok(()),
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(CliError::Parse(format!("unsupported schema version {other}"))),
    }
}

fn matrix_from(v: Value) -> Result<MatH2, CliError> {
    let m = MatH2::deserialize(v).map_err(|e| CliError::Parse(e.to_string()))?;
    if !m.is_finite() {
        return Err(CliError::Parse("non-finite matrix entry".into()));
    }
    Ok(m)
}

/// A matrix `{"a":…,"b":…,"c":…,"d":…}`, optionally wrapped as
/// `{"v":1,"M":{…}}`.
pub fn parse_matrix(text: &str) -> Result<MatH2, CliError> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    check_version(&v)?;
    if let Some(inner) = v.get_mut("M") {
        return matrix_from(inner.take());
    }
    matrix_from(v)
}

/// A pair `{"v":1,"S":{…},"T":{…}}`.
pub fn parse_pair(text: &str) -> Result<(MatH2, MatH2), CliError> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    check_version(&v)?;
    let mut take = |k: &str| {
        v.get_mut(k)
            .map(Value::take)
            .ok_or_else(|| CliError::Parse(format!("pair is missing field `{k}`")))
    };
    let s = take("S")?;
    let t = take("T")?;
    Ok((matrix_from(s)?, matrix_from(t)?))
}

pub fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

pub fn write_report_text(out: &mut dyn Write, r: &TestReport) -> io::Result<()> {
    writeln!(out, "test              {}", r.test_name)?;
    writeln!(out, "lhs               {}", r.lhs)?;
    writeln!(out, "threshold         {}", r.threshold)?;
    writeln!(out, "margin            {}", r.margin)?;
    writeln!(out, "verdict           {}", r.verdict)?;
    writeln!(out, "preconditions_met {}", r.preconditions_met)?;
    for (k, v) in &r.diagnostics {
        writeln!(out, "  {k:<16} {v}")?;
    }
    for n in &r.notes {
        writeln!(out, "  note: {n}")?;
    }
    Ok(())
}

pub fn write_report_csv(out: &mut dyn Write, reports: &[TestReport]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
    w.write_record(["test", "lhs", "threshold", "margin", "verdict", "preconditions_met"])
        .map_err(io_err)?;
    for r in reports {
        w.write_record([
            r.test_name.clone(),
            r.lhs.to_string(),
            r.threshold.to_string(),
            r.margin.to_string(),
            r.verdict.to_string(),
            r.preconditions_met.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

pub const TRACE_COLUMNS: [&str; 10] = [
    "n", "abs_a", "abs_b", "abs_c", "abs_d", "bc_norm", "tau_c", "t_c", "extremal_lhs", "det",
];

/// Per-step CSV. With `full` the sixteen entry coordinates follow.
pub fn write_trace_csv(out: &mut dyn Write, trace: &IterationTrace, full: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
    let mut header: Vec<String> = TRACE_COLUMNS.iter().map(|s| s.to_string()).collect();
    if full {
        for e in ["a", "b", "c", "d"] {
            for c in ["w", "x", "y", "z"] {
                header.push(format!("{e}_{c}"));
            }
        }
    }
    w.write_record(&header).map_err(io_err)?;
    for st in &trace.steps {
        let m = &st.s;
        let mut row = vec![
            st.n.to_string(),
            m.a.norm().to_string(),
            m.b.norm().to_string(),
            m.c.norm().to_string(),
            m.d.norm().to_string(),
            st.bc_norm.to_string(),
            st.tau_c.to_string(),
            st.t_c.to_string(),
            st.extremal_lhs.to_string(),
            st.det.to_string(),
        ];
        if full {
            for q in m.entries() {
                row.extend([q.w, q.x, q.y, q.z].iter().map(f64::to_string));
            }
        }
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}
