//! Tests for a triangular generator `T` with equal real parts on the
//! diagonal.

use std::f64::consts::SQRT_2;

use super::{check_sigma, JltVariant, Shape, TestConfig, TestReport, Verdict};
use crate::moebius::{apply, ExtQuaternion};
use crate::qmat::MatH2;
use crate::quat::{Quaternion as Q, ZERO_TOL};
use crate::{Error, Result};

/// `ε` when `Re λ = Re μ ≠ 0`.
pub const EPS_NONZERO_RE: f64 = 1.0 / (4.0 * SQRT_2);
/// `ε` when `Re λ = Re μ = 0`.
pub const EPS_ZERO_RE: f64 = 0.25;

/// `S(λ, μ) = |μ|(|Im λ| + |Im μ|)` with `|μ|` the larger norm.
pub fn s_value(lambda: Q, mu: Q) -> f64 {
    lambda.norm().max(mu.norm()) * (lambda.im_norm() + mu.im_norm())
}

/// `(τ₀, t₀)` for upper-triangular `T = [[λ, η], [0, μ]]`:
/// `τ₀ = λ(−c⁻¹d) + η + (c⁻¹d)μ`, `t₀ = λ(ac⁻¹) + η − (ac⁻¹)μ`.
pub fn tau0_t0_upper(s: &MatH2, t: &MatH2) -> Result<(Q, Q)> {
    if s.c.norm() <= ZERO_TOL {
        return Err(Error::VanishingEntry {
            entry: "c",
            reason: "S and T share the fixed point ∞; pair is elementary-suspect",
        });
    }
    let (lambda, eta, mu) = (t.a, t.b, t.d);
    let ci = s.c.inverse()?;
    let x = ci * s.d;
    let y = s.a * ci;
    Ok((lambda * (-x) + eta + x * mu, lambda * y + eta - y * mu))
}

/// `(τ₀, t₀)` for lower-triangular `T = [[λ, 0], [η, μ]]`:
/// `τ₀ = μ(−b⁻¹a) + η + (b⁻¹a)λ`, `t₀ = μ(db⁻¹) + η − (db⁻¹)λ`.
pub fn tau0_t0_lower(s: &MatH2, t: &MatH2) -> Result<(Q, Q)> {
    if s.b.norm() <= ZERO_TOL {
        return Err(Error::VanishingEntry {
            entry: "b",
            reason: "S and T share the fixed point 0; pair is elementary-suspect",
        });
    }
    let (lambda, eta, mu) = (t.a, t.c, t.d);
    let bi = s.b.inverse()?;
    let x = bi * s.a;
    let y = s.d * bi;
    Ok((mu * (-x) + eta + x * lambda, mu * y + eta - y * lambda))
}

/// `(1 + √(1 − S/ε))/2`, clamped at the discriminant.
fn kappa(s: f64, eps: f64) -> f64 {
    (1.0 + (1.0 - s / eps).max(0.0).sqrt()) / 2.0
}

/// Gates shared by every triangular test. Records `S(λ, μ)` and returns it.
fn triangular_gates(
    r: &mut TestReport,
    s: &MatH2,
    t: &MatH2,
    shape: Shape,
    cfg: &TestConfig,
) -> Option<f64> {
    check_sigma(r, "S", s, cfg.tol);
    check_sigma(r, "T", t, cfg.tol);
    let ok = match shape {
        Shape::Upper => t.is_upper_triangular(cfg.tol),
        _ => t.is_lower_triangular(cfg.tol),
    };
    let name = if shape == Shape::Upper { "upper" } else { "lower" };
    if !r.gate(ok, format!("T is not {name}-triangular")) {
        return None;
    }
    let (lambda, mu) = (t.a, t.d);
    r.diag("re_lambda", lambda.re())
        .diag("re_mu", mu.re())
        .diag("lambda_norm", lambda.norm())
        .diag("mu_norm", mu.norm());
    r.gate((lambda.re() - mu.re()).abs() <= cfg.tol, "Re λ ≠ Re μ");
    r.gate(
        lambda.norm() <= 1.0 + cfg.tol && mu.norm() >= 1.0 - cfg.tol,
        "ordering |λ| ≤ 1 ≤ |μ| violated; evaluate the pair with the diagonal entries exchanged",
    );
    let sv = s_value(lambda, mu);
    r.diag("S", sv);
    Some(sv)
}

fn displacement_diags(r: &mut TestReport, tau0: Q, t0: Q, entry: f64) {
    r.diag("tau0_norm", tau0.norm())
        .diag("t0_norm", t0.norm())
        .diag("tau_c", tau0.norm() * entry)
        .diag("t_c", t0.norm() * entry);
}

fn upper_displacements(r: &mut TestReport, s: &MatH2, t: &MatH2) -> Option<(Q, Q)> {
    match tau0_t0_upper(s, t) {
        Ok(v) => Some(v),
        Err(e) => {
            r.gate(false, e.to_string());
            None
        }
    }
}

fn lower_displacements(r: &mut TestReport, s: &MatH2, t: &MatH2) -> Option<(Q, Q)> {
    match tau0_t0_lower(s, t) {
        Ok(v) => Some(v),
        Err(e) => {
            r.gate(false, e.to_string());
            None
        }
    }
}

fn upper_lhs(s: &MatH2, tau0: Q, t0: Q) -> f64 {
    s.c.norm() * (tau0.norm() * t0.norm()).sqrt()
}

/// `|c|√(|τ₀||t₀|) ≥ (1 + √(1 − 4√2·S))/2` for `Re λ = Re μ ≠ 0`.
pub fn jg_test(s: &MatH2, t: &MatH2, cfg: &TestConfig) -> TestReport {
    let mut r = TestReport::new("jg");
    let Some(sv) = triangular_gates(&mut r, s, t, Shape::Upper, cfg) else {
        return r;
    };
    r.gate(t.a.re().abs() > cfg.tol, "Re λ = 0; use the zero-real-part test");
    r.gate(sv <= EPS_NONZERO_RE + cfg.tol, "S(λ, μ) exceeds 1/(4√2)");
    if let Some((tau0, t0)) = upper_displacements(&mut r, s, t) {
        displacement_diags(&mut r, tau0, t0, s.c.norm());
        r.conclude(upper_lhs(s, tau0, t0), kappa(sv, EPS_NONZERO_RE), cfg.extremal_tol);
    }
    r
}

/// `|c|√(|τ₀||t₀|) ≥ (1 + √(1 − 4S))/2` for `Re λ = Re μ = 0`, or for
/// real `λ = μ` where `S = 0`.
pub fn rez_test(s: &MatH2, t: &MatH2, cfg: &TestConfig) -> TestReport {
    let mut r = TestReport::new("rez");
    let Some(sv) = triangular_gates(&mut r, s, t, Shape::Upper, cfg) else {
        return r;
    };
    let zero_re = t.a.re().abs() <= cfg.tol && t.d.re().abs() <= cfg.tol;
    let real_case = sv <= cfg.tol;
    if real_case && !zero_re {
        r.note("Re λ ≠ 0 accepted through the S = 0 limit");
    }
    r.gate(zero_re || real_case, "Re λ ≠ 0 and S(λ, μ) ≠ 0");
    r.gate(sv <= EPS_ZERO_RE + cfg.tol, "S(λ, μ) exceeds 1/4");
    if let Some((tau0, t0)) = upper_displacements(&mut r, s, t) {
        displacement_diags(&mut r, tau0, t0, s.c.norm());
        r.conclude(upper_lhs(s, tau0, t0), kappa(sv, EPS_ZERO_RE), cfg.extremal_tol);
    }
    r
}

/// The upper-triangular test with `η` scaled out:
/// `|c|√(|τ₀η⁻¹||t₀η⁻¹|) ≥ (1 + √(1 − 4√2|η|²S′))/(2|η|)`,
/// `S′ = S/|η|²`.
pub fn eta_normalized_test(s: &MatH2, t: &MatH2, cfg: &TestConfig) -> Result<TestReport> {
    let eta = t.b;
    if eta.norm() <= ZERO_TOL {
        return Err(Error::VanishingEntry { entry: "η", reason: "normalization needs η ≠ 0" });
    }
    let mut r = TestReport::new("eta");
    let Some(sv) = triangular_gates(&mut r, s, t, Shape::Upper, cfg) else {
        return Ok(r);
    };
    let en = eta.norm();
    let s_prime = sv / (en * en);
    r.diag("eta_norm", en).diag("S_prime", s_prime);
    r.gate(t.a.re().abs() > cfg.tol, "Re λ = 0");
    r.gate(sv <= EPS_NONZERO_RE + cfg.tol, "|η|²S′ exceeds 1/(4√2)");
    if let Some((tau0, t0)) = upper_displacements(&mut r, s, t) {
        let ei = eta.inverse()?;
        let (tp, sp) = (tau0 * ei, t0 * ei);
        displacement_diags(&mut r, tau0, t0, s.c.norm());
        r.diag("tau0_prime_norm", tp.norm()).diag("t0_prime_norm", sp.norm());
        let threshold = kappa(en * en * s_prime, EPS_NONZERO_RE) / en;
        r.conclude(upper_lhs(s, tp, sp), threshold, cfg.extremal_tol);
    }
    Ok(r)
}

/// `|c|·√|T(ac⁻¹) − ac⁻¹|·√|T(−c⁻¹d) + c⁻¹d| ≥ (1 + √(1 − 8|Im λ|))/2`
/// for `T = [[λ, 1], [0, λ]]`, `|λ| = 1`.
pub fn waterman_test(s: &MatH2, t: &MatH2, cfg: &TestConfig) -> TestReport {
    let mut r = TestReport::new("wat");
    check_sigma(&mut r, "S", s, cfg.tol);
    check_sigma(&mut r, "T", t, cfg.tol);
    let shape = t.c.is_zero(cfg.tol) && (t.b - Q::ONE).is_zero(cfg.tol) && (t.a - t.d).is_zero(cfg.tol);
    if !r.gate(shape, "T is not of the form [[λ, 1], [0, λ]]") {
        return r;
    }
    let lambda = t.a;
    let im = lambda.im_norm();
    r.diag("lambda_norm", lambda.norm()).diag("im_lambda", im);
    r.gate((lambda.norm() - 1.0).abs() <= cfg.tol, "|λ| ≠ 1");
    r.gate(im <= 0.125 + cfg.tol, "|Im λ| exceeds 1/8");
    if !r.gate(s.c.norm() > ZERO_TOL, "S has c = 0 and shares the fixed point ∞ with T") {
        return r;
    }
    let ci = match s.c.inverse() {
        Ok(v) => v,
        Err(e) => {
            r.gate(false, e.to_string());
            return r;
        }
    };
    let x = s.a * ci;
    let y = -(ci * s.d);
    let disp = |z: Q| match apply(t, ExtQuaternion::Finite(z)) {
        Ok(ExtQuaternion::Finite(w)) => (w - z).norm(),
        _ => f64::INFINITY,
    };
    let (dx, dy) = (disp(x), disp(y));
    r.diag("disp_a_cinv", dx).diag("disp_cinv_d", dy);
    let threshold = (1.0 + (1.0 - 8.0 * im).max(0.0).sqrt()) / 2.0;
    r.conclude(s.c.norm() * dx.sqrt() * dy.sqrt(), threshold, cfg.extremal_tol);
    r
}

/// Lower-triangular analogue with `ε = 1/(4√2)` if `Re λ ≠ 0`, else `1/4`.
///
/// The primary left-hand side follows [`TestConfig::jlt_variant`]; both the
/// `|b|` and `|c|` forms are reported as `lhs_b` and `lhs_c`.
pub fn jlt_test(s: &MatH2, t: &MatH2, cfg: &TestConfig) -> TestReport {
    let mut r = TestReport::new("jlt");
    let Some(sv) = triangular_gates(&mut r, s, t, Shape::Lower, cfg) else {
        return r;
    };
    let eps = if t.a.re().abs() > cfg.tol { EPS_NONZERO_RE } else { EPS_ZERO_RE };
    r.diag("epsilon", eps);
    r.gate(sv <= eps + cfg.tol, "S(λ, μ) exceeds ε");
    if let Some((tau0, t0)) = lower_displacements(&mut r, s, t) {
        displacement_diags(&mut r, tau0, t0, s.b.norm());
        let root = (tau0.norm() * t0.norm()).sqrt();
        let (lhs_b, lhs_c) = (s.b.norm() * root, s.c.norm() * root);
        r.diag("lhs_b", lhs_b).diag("lhs_c", lhs_c);
        let lhs = match cfg.jlt_variant {
            JltVariant::B => lhs_b,
            JltVariant::PrintedC => lhs_c,
        };
        r.conclude(lhs, kappa(sv, eps), cfg.extremal_tol);
    }
    r
}

/// `|τ₀ − t₀|/(|τ₀||t₀|) > |c̄d + ac̄|` (upper) or `> |b̄d + ab̄|` (lower)
/// rules out an extreme group.
pub fn non_extreme_tau_test(s: &MatH2, t: &MatH2, side: Shape, cfg: &TestConfig) -> Result<TestReport> {
    let upper = match side {
        Shape::Upper => true,
        Shape::Lower => false,
        _ => return Err(Error::InvalidArgument("side must be upper or lower".into())),
    };
    let mut r = TestReport::new(if upper { "tau_upper" } else { "tau_lower" });
    let Some(sv) = triangular_gates(&mut r, s, t, side, cfg) else {
        return Ok(r);
    };
    let eps = if t.a.re().abs() > cfg.tol { EPS_NONZERO_RE } else { EPS_ZERO_RE };
    r.gate(sv <= eps + cfg.tol, "S(λ, μ) exceeds ε");
    let pair = if upper {
        upper_displacements(&mut r, s, t)
    } else {
        lower_displacements(&mut r, s, t)
    };
    let Some((tau0, t0)) = pair else {
        return Ok(r);
    };
    let e = if upper { s.c } else { s.b };
    displacement_diags(&mut r, tau0, t0, e.norm());
    let rhs = (e.conj() * s.d + s.a * e.conj()).norm();
    let denom = tau0.norm() * t0.norm();
    if denom <= ZERO_TOL {
        r.gate(false, "degenerate displacement");
        r.threshold = rhs;
        return Ok(r);
    }
    let lhs = (tau0 - t0).norm() / denom;
    r.lhs = lhs;
    r.threshold = rhs;
    r.margin = lhs - rhs;
    r.verdict = if r.preconditions_met && r.margin > cfg.extremal_tol {
        Verdict::NotExtreme
    } else {
        Verdict::Inconclusive
    };
    Ok(r)
}
