//! The Shimizu–Leutbecher sequence `S₀ = S`, `S_{n+1} = S_n T S_n⁻¹`.
//!
//! Matrix products are the source of truth; the closed recurrences are only
//! used to cross-check them in [`verify_recurrence`].
//!
//! Near an extremal orbit rounding errors roughly double every step, so the
//! step uses [`MatH2::inverse_adjoint`], whose only division is by `α`.

use serde::{Deserialize, Serialize};

use crate::ineq::{self, Shape, TestConfig, TestReport, Verdict};
use crate::qmat::MatH2;
use crate::quat::{Quaternion as Q, DEFAULT_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Diagonal,
    Upper,
    Lower,
}

impl Mode {
    /// Mode matching the shape of `t`, if any.
    pub fn detect(t: &MatH2, tol: f64) -> Option<Self> {
        match Shape::of(t, tol) {
            Shape::Diagonal => Some(Self::Diagonal),
            Shape::Upper => Some(Self::Upper),
            Shape::Lower => Some(Self::Lower),
            Shape::General => None,
        }
    }

    fn matches(self, t: &MatH2, tol: f64) -> bool {
        match self {
            Self::Diagonal => t.is_diagonal(tol),
            Self::Upper => t.is_upper_triangular(tol),
            Self::Lower => t.is_lower_triangular(tol),
        }
    }
}

/// Statistics of one iterate `S_n`.
///
/// In lower mode `tau_c` and `t_c` are taken against `|b_n|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub n: usize,
    pub s: MatH2,
    pub bc_norm: f64,
    pub det: f64,
    pub tau: Option<Q>,
    pub t: Option<Q>,
    pub tau_c: f64,
    pub t_c: f64,
    pub extremal_lhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub mode: Mode,
    pub t: MatH2,
    /// `K` for diagonal `T`, `S(λ, μ)` otherwise.
    pub k_value: Option<f64>,
    pub s_value: Option<f64>,
    pub steps: Vec<StepRecord>,
    pub truncated: Option<String>,
}

pub const COMMON_FIXED_POINT: &str = "common fixed point reached";
pub const PRECISION_LOST: &str = "precision lost";

/// Largest `|det S_n − 1|` accepted before the trace is cut.
pub const DET_DRIFT_TOL: f64 = 1e-6;

fn record(n: usize, s: &MatH2, t: &MatH2, mode: Mode) -> StepRecord {
    let bc_norm = s.b.norm() * s.c.norm();
    let mut rec = StepRecord {
        n,
        s: *s,
        bc_norm,
        det: s.det(),
        tau: None,
        t: None,
        tau_c: f64::NAN,
        t_c: f64::NAN,
        extremal_lhs: f64::NAN,
    };
    match mode {
        Mode::Diagonal => {
            rec.extremal_lhs = ineq::k_value(t.a, t.d) * (1.0 + bc_norm);
        }
        Mode::Upper | Mode::Lower => {
            let (pair, e) = if mode == Mode::Upper {
                (ineq::tau0_t0_upper(s, t), s.c.norm())
            } else {
                (ineq::tau0_t0_lower(s, t), s.b.norm())
            };
            if let Ok((tau, t0)) = pair {
                rec.tau = Some(tau);
                rec.t = Some(t0);
                rec.tau_c = tau.norm() * e;
                rec.t_c = t0.norm() * e;
                rec.extremal_lhs = e * (tau.norm() * t0.norm()).sqrt();
            }
        }
    }
    rec
}

/// Runs `n_steps` conjugations and records `S₀, …, S_{n_steps}`.
///
/// In triangular mode the trace stops early once the off-diagonal entry
/// that the displacements divide by is exactly zero. In any mode it stops
/// before an iterate whose determinant drifts from one by more than
/// [`DET_DRIFT_TOL`]: on expanding orbits cancellation destroys all digits
/// long before the entries overflow.
pub fn iterate(s: &MatH2, t: &MatH2, n_steps: usize, mode: Mode) -> Result<IterationTrace> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    for m in [s, t] {
        if !m.in_sigma(DEFAULT_TOL) {
            return Err(Error::NotInSigma { det: m.det() });
        }
    }
    if !mode.matches(t, DEFAULT_TOL) {
        return Err(Error::InvalidArgument(format!("T does not have {mode:?} shape")));
    }
    let mut trace = IterationTrace {
        mode,
        t: *t,
        k_value: (mode == Mode::Diagonal).then(|| ineq::k_value(t.a, t.d)),
        s_value: (mode != Mode::Diagonal).then(|| ineq::s_value(t.a, t.d)),
        steps: Vec::with_capacity(n_steps + 1),
        truncated: None,
    };
    let mut cur = *s;
    for n in 0..=n_steps {
        trace.steps.push(record(n, &cur, t, mode));
        let pivot = match mode {
            Mode::Diagonal => None,
            Mode::Upper => Some(cur.c),
            Mode::Lower => Some(cur.b),
        };
        if pivot.is_some_and(|p| p.norm() == 0.0) {
            trace.truncated = Some(COMMON_FIXED_POINT.into());
            break;
        }
        if n == n_steps {
            break;
        }
        let next = match cur.inverse_adjoint() {
            Ok(inv) => cur * *t * inv,
            Err(_) => {
                trace.truncated = Some("singular iterate".into());
                break;
            }
        };
        if !next.is_finite() {
            trace.truncated = Some("non-finite entries".into());
            break;
        }
        if (next.det() - 1.0).abs() > DET_DRIFT_TOL {
            trace.truncated = Some(PRECISION_LOST.into());
            break;
        }
        cur = next;
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceCheck {
    pub ok: bool,
    pub max_deviation: f64,
    pub steps_checked: usize,
}

/// Recomputes each `S_{n+1}` of a trace from `S_n` through the closed
/// recurrences
///
/// `a' = a λ d̃ − b μ c̃`, `b' = −a λ b̃ + b μ ã`,
/// `c' = c λ d̃ − d μ c̃`, `d' = −c λ b̃ + d μ ã`,
///
/// where `x̃` are the tilde quantities of `S_n`, and compares with the
/// product values. Deviations are relative to `1 + max |entry|`.
pub fn verify_recurrence(trace: &IterationTrace, t: &MatH2) -> Result<RecurrenceCheck> {
    if !t.is_diagonal(DEFAULT_TOL) {
        return Err(Error::InvalidArgument("recurrences need diagonal T".into()));
    }
    let (lambda, mu) = (t.a, t.d);
    let mut max_dev: f64 = 0.0;
    let mut checked = 0;
    for w in trace.steps.windows(2) {
        let (s, next) = (&w[0].s, &w[1].s);
        let ts = s.tilde_set()?;
        let rec = MatH2::new(
            s.a * lambda * ts.d_t - s.b * mu * ts.c_t,
            -(s.a * lambda * ts.b_t) + s.b * mu * ts.a_t,
            s.c * lambda * ts.d_t - s.d * mu * ts.c_t,
            -(s.c * lambda * ts.b_t) + s.d * mu * ts.a_t,
        );
        max_dev = max_dev.max(rec.dist(next) / (1.0 + next.max_norm()));
        checked += 1;
    }
    Ok(RecurrenceCheck { ok: max_dev < 1e-7, max_deviation: max_dev, steps_checked: checked })
}

/// Runs the pointwise equality test for `T`'s shape, then checks that the
/// extremal quantity stays at the threshold along `n_steps` iterates within
/// `extremal_tol·(1 + n)`.
///
/// A positive answer only says the trace is consistent with an extreme group
/// over the horizon. It is not a proof of discreteness.
pub fn extremal_invariance_check(
    s: &MatH2,
    t: &MatH2,
    n_steps: usize,
    cfg: &TestConfig,
) -> Result<TestReport> {
    let Some(mode) = Mode::detect(t, cfg.tol) else {
        return Err(Error::InvalidArgument("T is neither diagonal nor triangular".into()));
    };
    let point = match mode {
        Mode::Diagonal => ineq::jss_test(s, t, cfg),
        Mode::Upper if t.a.re().abs() > cfg.tol => ineq::jg_test(s, t, cfg),
        Mode::Upper => ineq::rez_test(s, t, cfg),
        Mode::Lower => {
            let c = TestConfig { jlt_variant: ineq::JltVariant::B, ..*cfg };
            ineq::jlt_test(s, t, &c)
        }
    };
    let mut r = TestReport::new("invariance");
    r.diagnostics = point.diagnostics.clone();
    r.notes = point.notes.clone();
    r.preconditions_met = point.preconditions_met;
    r.lhs = point.lhs;
    r.threshold = point.threshold;
    r.margin = point.margin;
    r.note(format!("pointwise test: {} ({})", point.test_name, point.verdict));
    if point.verdict != Verdict::Extremal {
        r.gate(false, "pointwise equality does not hold");
        return Ok(r);
    }

    let trace = iterate(s, t, n_steps, mode)?;
    if let Some(why) = &trace.truncated {
        r.gate(false, format!("trace truncated: {why}"));
    }
    let mut max_dev: f64 = 0.0;
    let mut first_violation = None;
    for st in &trace.steps {
        let dev = (st.extremal_lhs - point.threshold).abs();
        if !(dev <= cfg.extremal_tol * (1.0 + st.n as f64)) && first_violation.is_none() {
            first_violation = Some(st.n);
        }
        max_dev = max_dev.max(dev);
    }
    let last = trace.steps.last().map_or(f64::NAN, |st| st.extremal_lhs);
    r.diag("max_deviation", max_dev).diag("steps", trace.steps.len() as f64 - 1.0);
    r.lhs = last;
    r.margin = last - point.threshold;
    r.verdict = match first_violation {
        None if r.preconditions_met => {
            r.note(format!(
                "extremal quantity constant over {} steps; consistent with an extreme group, \
                 not a proof of discreteness",
                trace.steps.len() - 1
            ));
            Verdict::Extremal
        }
        None => Verdict::Inconclusive,
        Some(n) => {
            r.diag("first_violation", n as f64);
            Verdict::Inconclusive
        }
    };
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceVerdict {
    ConvergesToElementary,
    Stationary,
    Diverges,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceConfig {
    pub elementary_cutoff: f64,
    pub divergence_cutoff: f64,
    pub stationary_tol: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { elementary_cutoff: 1e-10, divergence_cutoff: 1e8, stationary_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub verdict: ConvergenceVerdict,
    /// Geometric mean of `bc_{n+1}/bc_n` over the last ten steps.
    pub rate: Option<f64>,
    pub tail_bc_norm: f64,
    /// `K(1 + bc_n)` at the tail in diagonal mode. Below one it certifies
    /// strict decrease from there on.
    pub certificate: Option<f64>,
}

/// Classifies the tail behaviour of a trace.
pub fn classify_convergence(trace: &IterationTrace, cfg: &ConvergenceConfig) -> ConvergenceReport {
    let steps = &trace.steps;
    let tail = steps.last().map_or(f64::NAN, |s| s.bc_norm);
    let ratios: Vec<f64> = steps
        .windows(2)
        .rev()
        .take(10)
        .filter(|w| w[0].bc_norm > 0.0 && w[1].bc_norm > 0.0)
        .map(|w| w[1].bc_norm / w[0].bc_norm)
        .collect();
    let rate = (!ratios.is_empty())
        .then(|| (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp());
    let certificate = trace.k_value.map(|k| k * (1.0 + tail));
    let report = |verdict| ConvergenceReport { verdict, rate, tail_bc_norm: tail, certificate };

    if trace.truncated.as_deref() == Some(COMMON_FIXED_POINT) {
        return report(ConvergenceVerdict::ConvergesToElementary);
    }
    let growing = rate.is_some_and(|r| r > 1.0);
    let blown = steps.iter().any(|s| s.s.max_norm() > cfg.divergence_cutoff)
        || (trace.truncated.is_some() && growing);
    if blown {
        return report(ConvergenceVerdict::Diverges);
    }
    if trace.truncated.is_some() {
        return report(ConvergenceVerdict::Undetermined);
    }
    if steps.len() < 5 {
        return report(ConvergenceVerdict::Undetermined);
    }
    let vals: Vec<f64> = steps.iter().map(|s| s.extremal_lhs).filter(|v| v.is_finite()).collect();
    if vals.len() == steps.len() {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= cfg.stationary_tol {
            return report(ConvergenceVerdict::Stationary);
        }
    }
    let decaying = rate.is_some_and(|r| r < 1.0);
    if decaying && (tail < cfg.elementary_cutoff || certificate.is_some_and(|c| c < 1.0)) {
        return report(ConvergenceVerdict::ConvergesToElementary);
    }
    report(ConvergenceVerdict::Undetermined)
}
