mod common;

use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use quat_jorgensen::dynamics::{self, Mode};
use quat_jorgensen::ineq::{self, Shape, TestConfig, TestReport, Verdict};
use quat_jorgensen::moebius::{apply, ExtQuaternion};
use quat_jorgensen::{MatH2, Quaternion as Q};

fn quat() -> impl Strategy<Value = Q> {
    [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64].prop_map(|[w, x, y, z]| Q::new(w, x, y, z))
}

fn nonzero_quat() -> impl Strategy<Value = Q> {
    quat().prop_filter("nonzero", |q| q.norm() > 0.1)
}

fn unit_imag() -> impl Strategy<Value = Q> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
        .prop_map(|[x, y, z]| {
            let n = (x * x + y * y + z * z).sqrt();
            Q::new(0.0, x / n, y / n, z / n)
        })
}

fn sigma() -> impl Strategy<Value = MatH2> {
    (quat(), quat(), quat(), quat())
        .prop_map(|(a, b, c, d)| MatH2::new(a, b, c, d))
        .prop_filter("well-conditioned", |m| m.det() > 0.2 && m.max_norm() < 2.0 * m.det().sqrt() + 2.0)
        .prop_map(|m| m.normalize_to_sigma().unwrap())
}

/// `diag(r·e^{uα}, r⁻¹·e^{vβ})`.
fn diagonal_t() -> impl Strategy<Value = MatH2> {
    (unit_imag(), unit_imag(), 0.0..3.1f64, 0.0..3.1f64, -0.5..0.5f64).prop_map(|(u, v, a, b, lr)| {
        let r = f64::exp(lr);
        let l = (Q::real(a.cos()) + u.scale(a.sin())).scale(r);
        let m = (Q::real(b.cos()) + v.scale(b.sin())).scale(1.0 / r);
        MatH2::diag(l, m)
    })
}

/// Upper-triangular `T ∈ Σ` with `Re λ = Re μ` and `|λ| ≤ 1 ≤ |μ|`.
fn upper_t() -> impl Strategy<Value = MatH2> {
    (unit_imag(), unit_imag(), -0.9..0.9f64, 0.0..0.3f64, quat()).prop_map(|(u, v, re, lr, eta)| {
        let r = f64::exp(lr);
        let il = (1.0 / (r * r) - re * re).max(0.0).sqrt();
        let lambda = Q::real(re) + u.scale(il);
        let lambda = lambda.scale(1.0 / (r * lambda.norm()));
        let im = (r * r - lambda.re() * lambda.re()).max(0.0).sqrt();
        let mu = Q::real(lambda.re()) + v.scale(im);
        MatH2::upper(lambda, eta, mu)
    })
}

fn check_verdict(r: &TestReport, tol: f64) -> Result<(), TestCaseError> {
    match r.verdict {
        Verdict::Obstruction => {
            prop_assert!(r.preconditions_met && r.margin < -tol, "{r:?}")
        }
        Verdict::Extremal => prop_assert!(r.preconditions_met && r.margin.abs() <= tol, "{r:?}"),
        _ => {}
    }
    if !r.preconditions_met {
        prop_assert!(r.verdict == Verdict::Inconclusive, "{r:?}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_multiplicative(p in quat(), q in quat()) {
        let np = p.norm() * q.norm();
        prop_assert!(((p * q).norm() - np).abs() <= 1e-12 * (1.0 + np));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        prop_assert!(((p * q).conj() - q.conj() * p.conj()).norm() <= 1e-12 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn product_matches_matrix_oracle(p in quat(), q in quat()) {
        prop_assert!((p * q - common::product_oracle(p, q)).norm() <= 1e-13 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn reals_are_central(x in -5.0..5.0f64, q in quat()) {
        prop_assert_eq!(Q::real(x) * q, q * Q::real(x));
    }

    #[test]
    fn similar_quaternions_share_argument_and_representative(p in nonzero_quat(), c in nonzero_quat()) {
        let q = c.inverse().unwrap() * p * c;
        prop_assert!(p.similar(q, 1e-9));
        let tol = 2e-9 / p.norm().max(1.0);
        prop_assert!((p.arg().unwrap() - q.arg().unwrap()).abs() <= tol);
        let (a, b) = (p.complex_representative(), q.complex_representative());
        prop_assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        let k = p.conjugator_to(q, 1e-9).unwrap();
        prop_assert!((k.inverse().unwrap() * p * k - q).norm() < 1e-9);
    }

    #[test]
    fn determinant_matches_complex_image(m in sigma(), n in sigma()) {
        prop_assert!((m.det() - common::study_det(&m).sqrt()).abs() < 1e-9);
        prop_assert!(((m * n).det() - m.det() * n.det()).abs() < 1e-9);
    }

    #[test]
    fn determinant_equalities(m in sigma()) {
        prop_assume!(m.a.norm() > 0.05);
        let schur = (m.a * m.d - m.a * m.c * m.a.inverse().unwrap() * m.b).norm();
        let (sigma, _) = m.parker_short();
        prop_assert!((m.det() - schur).abs() < 1e-9);
        prop_assert!((m.det() - sigma.norm()).abs() < 1e-9);
    }

    #[test]
    fn cofactor_norms_equal_sqrt_alpha(m in sigma()) {
        let sa = m.alpha().sqrt();
        for l in m.cofactors().all() {
            prop_assert!((l.norm() - sa).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_forms_agree(m in sigma()) {
        let l = m.inverse().unwrap();
        prop_assert!((m * l).dist(&MatH2::IDENTITY) < 1e-9);
        prop_assert!(l.dist(&m.inverse_r_form().unwrap()) < 1e-9);
        prop_assert!(l.dist(&m.inverse_adjoint().unwrap()) < 1e-9);
    }

    #[test]
    fn foreman_invariants_are_conjugacy_invariant(m in sigma(), g in sigma()) {
        let c = g.conjugate(&m).unwrap();
        let (f, h) = (m.foreman_invariants(), c.foreman_invariants());
        prop_assert!((f.beta - h.beta).abs() < 1e-7, "{} {}", f.beta, h.beta);
        prop_assert!((f.gamma - h.gamma).abs() < 1e-7, "{} {}", f.gamma, h.gamma);
        prop_assert!((f.delta - h.delta).abs() < 1e-7);
    }

    #[test]
    fn action_is_a_group_action(m in sigma(), n in sigma(), z in quat()) {
        let z = ExtQuaternion::Finite(z);
        let inner = apply(&n, z).unwrap();
        let lhs = apply(&(m * n), z).unwrap();
        let rhs = apply(&m, inner).unwrap();
        let (ExtQuaternion::Finite(a), ExtQuaternion::Finite(b), ExtQuaternion::Finite(w)) = (lhs, rhs, inner) else {
            return Ok(());
        };
        prop_assume!(a.norm() < 1e3 && w.norm() < 1e3);
        prop_assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
        let back = apply(&m.inverse().unwrap(), apply(&m, z).unwrap()).unwrap();
        prop_assert!(back.dist(z) < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn k_forms_agree(t in diagonal_t()) {
        let k = ineq::k_value(t.a, t.d);
        prop_assert!((k - ineq::kellerhals_form(t.a, t.d).unwrap()).abs() < 1e-9);
        prop_assert_eq!(k, ineq::beta_t(t.a, t.d));
    }

    #[test]
    fn semisimple_chain(s in sigma(), t in diagonal_t()) {
        let cfg = TestConfig::default();
        let a = ineq::jss_test(&s, &t, &cfg);
        let b = ineq::jssc2_test(&s, &t, &cfg);
        let c = ineq::jss2_test(&s, &t, &cfg);
        prop_assert!((a.lhs - b.lhs).abs() < 1e-9);
        prop_assert!(c.lhs >= a.lhs);
        for r in [&a, &b, &c, &ineq::extremality_criteria(&s, &t, &cfg)] {
            check_verdict(r, cfg.extremal_tol)?;
        }
    }

    #[test]
    fn commutator_delta_identity(b in sigma(), k in 1.2..3.0f64) {
        prop_assume!(b.c.norm() > 0.05);
        let a = MatH2::diag(Q::real(k), Q::real(1.0 / k));
        let r = ineq::hyperbolic_commutator_test(&a, &b, &TestConfig::default());
        let lhs = r.get("delta_commutator").unwrap() - 2.0;
        let rhs = -(k - 1.0 / k).powi(2) * r.get("re_b_sigma_c").unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()));
        check_verdict(&r, 1e-7)?;
    }

    #[test]
    fn triangular_reports_are_consistent(s in sigma(), t in upper_t()) {
        prop_assume!(s.c.norm() > 0.05);
        let cfg = TestConfig::default();
        let jg = ineq::jg_test(&s, &t, &cfg);
        for r in [&jg, &ineq::rez_test(&s, &t, &cfg), &ineq::non_extreme_tau_test(&s, &t, Shape::Upper, &cfg).unwrap()] {
            check_verdict(r, cfg.extremal_tol)?;
        }
        prop_assume!(t.b.norm() > 0.05);
        let eta = ineq::eta_normalized_test(&s, &t, &cfg).unwrap();
        prop_assert!((eta.lhs / eta.threshold - jg.lhs / jg.threshold).abs() < 1e-9 * (1.0 + jg.lhs / jg.threshold));
    }

    #[test]
    fn waterman_matches_rez(s in sigma(), u in unit_imag(), th in 0.0..3.1f64) {
        prop_assume!(s.c.norm() > 0.05);
        let lambda = Q::real(th.cos()) + u.scale(th.sin());
        let t = MatH2::upper(lambda, Q::ONE, lambda);
        let cfg = TestConfig::default();
        let w = ineq::waterman_test(&s, &t, &cfg);
        let r = ineq::rez_test(&s, &t, &cfg);
        prop_assert!((w.lhs - r.lhs).abs() < 1e-9 * (1.0 + r.lhs));
    }

    #[test]
    fn diagonal_iteration_bounds(s in sigma(), t in diagonal_t()) {
        let k = ineq::k_value(t.a, t.d);
        let tr = dynamics::iterate(&s, &t, 50, Mode::Diagonal).unwrap();
        for st in &tr.steps {
            prop_assert!((st.det - 1.0).abs() <= 1e-6);
        }
        for w in tr.steps.windows(2) {
            let (x, y) = (w[0].bc_norm, w[1].bc_norm);
            // bc = 0 is not preserved exactly; the rounding noise scales with the entries
            let floor = 1e-10 * (1.0 + w[0].s.max_norm().max(w[1].s.max_norm())).powi(2);
            prop_assert!(y <= k * x * (1.0 + x) + 1e-9 * (1.0 + y) + floor);
            if k * (1.0 + x) < 1.0 - 1e-9 && x > floor {
                prop_assert!(y < x);
            }
        }
    }

    #[test]
    fn triangular_iteration_recurrences(s in sigma(), t in upper_t()) {
        prop_assume!(s.c.norm() > 0.05);
        let sv = ineq::s_value(t.a, t.d);
        let tr = dynamics::iterate(&s, &t, 8, Mode::Upper).unwrap();
        for w in tr.steps.windows(2) {
            let (p, n) = (&w[0], &w[1]);
            let (cp, cn) = (p.s.c.norm(), n.s.c.norm());
            prop_assert!((cn - p.tau_c * cp).abs() <= 1e-7 * (1.0 + cn));
            if n.tau_c.is_finite() {
                prop_assert!(n.tau_c <= p.tau_c * p.t_c + SQRT_2 * sv + 1e-7 * (1.0 + n.tau_c));
            }
        }
    }

    #[test]
    fn json_round_trip(a in quat(), b in quat(), c in quat(), d in quat()) {
        let m = MatH2::new(a, b, c, d);
        let s = serde_json::to_string(&m).unwrap();
        let back: MatH2 = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(m, back);
    }
}
