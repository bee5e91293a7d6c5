//! Jørgensen-type inequality evaluators.
//!
//! Every theorem here has the shape "if ⟨S, T⟩ is discrete and
//! non-elementary then `lhs ≥ threshold`". An evaluator can therefore only
//! ever certify the contrapositive ([`Verdict::Obstruction`]: the pair cannot
//! generate a discrete non-elementary group) or detect the equality case
//! ([`Verdict::Extremal`]). Anything else is [`Verdict::Inconclusive`]; it
//! never means the group is discrete.
//!
//! The non-extremality criteria produce [`Verdict::NotExtreme`]: under the
//! theorem's hypotheses the pair cannot be an extreme group.

mod semisimple;
mod triangular;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qmat::MatH2;
use crate::quat::DEFAULT_TOL;

pub use semisimple::{
    beta_t, extremality_criteria, hyperbolic_commutator_test, jss2_test, jss_test, jssc2_test,
    k_value, kellerhals_form,
};
pub use triangular::{
    eta_normalized_test, jg_test, jlt_test, non_extreme_tau_test, rez_test, s_value,
    tau0_t0_lower, tau0_t0_upper, waterman_test, EPS_NONZERO_RE, EPS_ZERO_RE,
};

/// Default tolerance on `|lhs − threshold|` for the equality case.
pub const DEFAULT_EXTREMAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Obstruction,
    Inconclusive,
    Extremal,
    NotExtreme,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Obstruction => "obstruction",
            Self::Inconclusive => "inconclusive",
            Self::Extremal => "extremal",
            Self::NotExtreme => "not_extreme",
        })
    }
}

/// Which left-hand side the lower-triangular test reports as primary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JltVariant {
    /// `|b|·√(|τ₀||t₀|)`, the mirror image of the upper-triangular test.
    #[default]
    B,
    /// `|c|·√(|τ₀||t₀|)` as the theorem is printed.
    PrintedC,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    /// Σ-membership, shape and equal-real-part checks.
    pub tol: f64,
    /// `|margin|` at or below this is the equality case.
    pub extremal_tol: f64,
    /// Gate the semisimple test on `λ` not similar to `μ`.
    pub require_non_similar: bool,
    pub jlt_variant: JltVariant,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            extremal_tol: DEFAULT_EXTREMAL_TOL,
            require_non_similar: false,
            jlt_variant: JltVariant::B,
        }
    }
}

/// One inequality evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub test_name: String,
    pub lhs: f64,
    pub threshold: f64,
    /// `lhs − threshold`.
    pub margin: f64,
    pub verdict: Verdict,
    pub preconditions_met: bool,
    pub diagnostics: BTreeMap<String, f64>,
    /// Failed gates, unverifiable hypotheses and other remarks.
    pub notes: Vec<String>,
}

impl TestReport {
    pub(crate) fn new(test_name: &str) -> Self {
        Self {
            test_name: test_name.to_owned(),
            lhs: f64::NAN,
            threshold: f64::NAN,
            margin: f64::NAN,
            verdict: Verdict::Inconclusive,
            preconditions_met: true,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn diag(&mut self, key: &str, value: f64) -> &mut Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }

    pub(crate) fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.diag(key, if value { 1.0 } else { 0.0 })
    }

    pub(crate) fn note(&mut self, msg: impl Into<String>) -> &mut Self {
        self.notes.push(msg.into());
        self
    }

    /// Records a failed precondition.
    pub(crate) fn gate(&mut self, ok: bool, msg: impl Into<String>) -> bool {
        if !ok {
            self.preconditions_met = false;
            self.notes.push(msg.into());
        }
        ok
    }

    /// Sets lhs/threshold and derives margin and the inequality verdict.
    pub(crate) fn conclude(&mut self, lhs: f64, threshold: f64, extremal_tol: f64) {
        self.lhs = lhs;
        self.threshold = threshold;
        self.margin = lhs - threshold;
        self.verdict = inequality_verdict(self.preconditions_met, self.margin, extremal_tol);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }
}

/// Obstruction when the inequality fails by more than `tol`, Extremal when it
/// holds with equality up to `tol`.
pub fn inequality_verdict(preconditions_met: bool, margin: f64, tol: f64) -> Verdict {
    if !preconditions_met || !margin.is_finite() {
        Verdict::Inconclusive
    } else if margin < -tol {
        Verdict::Obstruction
    } else if margin.abs() <= tol {
        Verdict::Extremal
    } else {
        Verdict::Inconclusive
    }
}

/// Shape of the fixed generator `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Diagonal,
    /// `c = 0`, `b ≠ 0`.
    Upper,
    /// `b = 0`, `c ≠ 0`.
    Lower,
    General,
}

impl Shape {
    pub fn of(t: &MatH2, tol: f64) -> Self {
        match (t.b.is_zero(tol), t.c.is_zero(tol)) {
            (true, true) => Self::Diagonal,
            (false, true) => Self::Upper,
            (true, false) => Self::Lower,
            (false, false) => Self::General,
        }
    }
}

pub(crate) fn check_sigma(report: &mut TestReport, name: &str, m: &MatH2, tol: f64) -> bool {
    let det = m.det();
    report.diag(&format!("det_{name}"), det);
    report.gate(
        (det - 1.0).abs() <= tol,
        format!("{name} is not in Σ (det = {det})"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(inequality_verdict(true, -0.5, 1e-7), Verdict::Obstruction);
        assert_eq!(inequality_verdict(true, 5e-8, 1e-7), Verdict::Extremal);
        assert_eq!(inequality_verdict(true, -5e-8, 1e-7), Verdict::Extremal);
        assert_eq!(inequality_verdict(true, 0.3, 1e-7), Verdict::Inconclusive);
        assert_eq!(inequality_verdict(false, -0.5, 1e-7), Verdict::Inconclusive);
        assert_eq!(inequality_verdict(true, f64::NAN, 1e-7), Verdict::Inconclusive);
    }

    #[test]
    fn shapes() {
        use crate::quat::Quaternion as Q;
        assert_eq!(Shape::of(&MatH2::IDENTITY, 1e-9), Shape::Diagonal);
        assert_eq!(Shape::of(&MatH2::upper(Q::ONE, Q::J, Q::ONE), 1e-9), Shape::Upper);
        assert_eq!(Shape::of(&MatH2::lower(Q::ONE, Q::J, Q::ONE), 1e-9), Shape::Lower);
        assert_eq!(Shape::of(&MatH2::from_real(1., 1., 1., 2.), 1e-9), Shape::General);
    }
}
