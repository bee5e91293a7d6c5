//! 2×2 matrices over the quaternions.
//!
//! The Dieudonné determinant of `[[a, b], [c, d]]` is the non-negative real
//! `√α` with `α = |a|²|d|² + |b|²|c|² − 2 Re(a c̄ d b̄)`; it is total (no
//! inverse of `a` needed) and multiplicative. Σ is the group of matrices
//! with determinant one.
//!
//! Inversion follows the Kellerhals form `M⁻¹ = [[l₁₁⁻¹d, −l₁₂⁻¹b],
//! [−l₂₁⁻¹c, l₂₂⁻¹a]]` with the eight quantities `l_ij`, `r_ij`, each of norm
//! `√α`. Their defining formulas conjugate by one entry (`l₁₁` contains
//! `d b d⁻¹`, and so on). When that entry vanishes the conjugation is replaced
//! by the identity, the limit along the real axis. This keeps `|l_ij| = √α`,
//! and the tilde quantity built from the same entry is zero either way.

use std::fmt;
use std::ops::{Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{Quaternion, ZERO_TOL};

type Q = Quaternion;

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatH2 {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

/// The eight Kellerhals quantities `l_ij`, `r_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cofactors {
    pub l11: Quaternion,
    pub l12: Quaternion,
    pub l21: Quaternion,
    pub l22: Quaternion,
    pub r11: Quaternion,
    pub r12: Quaternion,
    pub r21: Quaternion,
    pub r22: Quaternion,
}

impl Cofactors {
    pub fn all(&self) -> [Quaternion; 8] {
        [
            self.l11, self.l12, self.l21, self.l22, self.r11, self.r12, self.r21, self.r22,
        ]
    }
}

/// Left tilde values `ã = l₂₂⁻¹a, b̃ = l₁₂⁻¹b, c̃ = l₂₁⁻¹c, d̃ = l₁₁⁻¹d` (the
/// `*_t` fields) and right ones `a_∼ = a r₂₂⁻¹, …` (the `*_s` fields).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TildeSet {
    pub a_t: Quaternion,
    pub b_t: Quaternion,
    pub c_t: Quaternion,
    pub d_t: Quaternion,
    pub a_s: Quaternion,
    pub b_s: Quaternion,
    pub c_s: Quaternion,
    pub d_s: Quaternion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForemanInvariants {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Every conjugacy invariant the tests use, gathered in one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantSet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sigma: Quaternion,
    pub tau: Quaternion,
}

/// `p q p⁻¹`, or `q` when `p` vanishes.
fn conj_by(p: Q, q: Q) -> Q {
    if p.is_zero(ZERO_TOL) {
        q
    } else {
        p * q * inv(p)
    }
}

/// `p⁻¹ q p`, or `q` when `p` vanishes.
fn conj_inv_by(p: Q, q: Q) -> Q {
    if p.is_zero(ZERO_TOL) {
        q
    } else {
        inv(p) * q * p
    }
}

/// Inverse for arguments already checked nonzero.
fn inv(q: Q) -> Q {
    q.conj().scale(1.0 / q.norm_sqr())
}

/// `l⁻¹ x`, zero when `x` is.
fn left_div(l: Q, x: Q) -> Q {
    if x.is_zero(ZERO_TOL) {
        Q::ZERO
    } else {
        inv(l) * x
    }
}

/// `x r⁻¹`, zero when `x` is.
fn right_div(x: Q, r: Q) -> Q {
    if x.is_zero(ZERO_TOL) {
        Q::ZERO
    } else {
        x * inv(r)
    }
}

impl MatH2 {
    pub const IDENTITY: Self = Self {
        a: Q::ONE,
        b: Q::ZERO,
        c: Q::ZERO,
        d: Q::ONE,
    };

    pub const fn new(a: Q, b: Q, c: Q, d: Q) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(Q::real(a), Q::real(b), Q::real(c), Q::real(d))
    }

    pub fn diag(lambda: Q, mu: Q) -> Self {
        Self::new(lambda, Q::ZERO, Q::ZERO, mu)
    }

    /// `[[λ, η], [0, μ]]`.
    pub fn upper(lambda: Q, eta: Q, mu: Q) -> Self {
        Self::new(lambda, eta, Q::ZERO, mu)
    }

    /// `[[λ, 0], [η, μ]]`.
    pub fn lower(lambda: Q, eta: Q, mu: Q) -> Self {
        Self::new(lambda, Q::ZERO, eta, mu)
    }

    pub fn entries(&self) -> [Quaternion; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|q| q.is_finite())
    }

    /// Largest entry norm.
    pub fn max_norm(&self) -> f64 {
        self.entries().iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-norm of `self − other`.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).max_norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        self.c.is_zero(tol)
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        self.b.is_zero(tol)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.is_upper_triangular(tol) && self.is_lower_triangular(tol)
    }

    /// `α = |a|²|d|² + |b|²|c|² − 2 Re(a c̄ d b̄)`, clamped at zero.
    pub fn alpha(&self) -> f64 {
        let Self { a, b, c, d } = *self;
        let raw = a.norm_sqr() * d.norm_sqr() + b.norm_sqr() * c.norm_sqr()
            - 2.0 * (a * c.conj() * d * b.conj()).re();
        raw.max(0.0)
    }

    /// Dieudonné determinant `√α`.
    pub fn det(&self) -> f64 {
        self.alpha().sqrt()
    }

    /// `|det − 1| <= tol`.
    pub fn in_sigma(&self, tol: f64) -> bool {
        (self.det() - 1.0).abs() <= tol
    }

    fn check_invertible(&self) -> Result<f64> {
        let det = self.det();
        if !(det > ZERO_TOL) || !self.is_finite() {
            return Err(Error::SingularMatrix { det });
        }
        Ok(det)
    }

    /// The Kellerhals quantities, with vanishing-entry fallbacks.
    pub fn cofactors(&self) -> Cofactors {
        let Self { a, b, c, d } = *self;
        Cofactors {
            l11: d * a - conj_by(d, b) * c,
            l12: conj_by(b, d) * a - b * c,
            l21: conj_by(c, a) * d - c * b,
            l22: a * d - conj_by(a, c) * b,
            r11: a * d - b * conj_inv_by(d, c),
            r12: d * conj_inv_by(b, a) - c * b,
            r21: a * conj_inv_by(c, d) - b * c,
            r22: d * a - c * conj_inv_by(a, b),
        }
    }

    pub fn tilde_set(&self) -> Result<TildeSet> {
        self.check_invertible()?;
        let Self { a, b, c, d } = *self;
        let k = self.cofactors();
        Ok(TildeSet {
            a_t: left_div(k.l22, a),
            b_t: left_div(k.l12, b),
            c_t: left_div(k.l21, c),
            d_t: left_div(k.l11, d),
            a_s: right_div(a, k.r22),
            b_s: right_div(b, k.r12),
            c_s: right_div(c, k.r21),
            d_s: right_div(d, k.r11),
        })
    }

    /// Inverse via the left Kellerhals form.
    pub fn inverse(&self) -> Result<Self> {
        let t = self.tilde_set()?;
        Ok(Self::new(t.d_t, -t.b_t, -t.c_t, t.a_t))
    }

    /// Inverse via the right Kellerhals form; agrees with [`inverse`](Self::inverse).
    pub fn inverse_r_form(&self) -> Result<Self> {
        let t = self.tilde_set()?;
        Ok(Self::new(t.d_s, -t.b_s, -t.c_s, t.a_s))
    }

    /// Inverse as `(M*M)⁻¹M*` with `M*` the conjugate transpose. `M*M` is
    /// Hermitian with determinant `α`, so the only division is by `α` and
    /// matrices with integer coordinates and `α = 1` invert exactly.
    pub fn inverse_adjoint(&self) -> Result<Self> {
        self.check_invertible()?;
        let Self { a, b, c, d } = *self;
        let p = a.norm_sqr() + c.norm_sqr();
        let r = b.norm_sqr() + d.norm_sqr();
        let q = a.conj() * b + c.conj() * d;
        let (qc, s) = (q.conj(), 1.0 / self.alpha());
        Ok(Self::new(
            (a.conj().scale(r) - q * b.conj()).scale(s),
            (c.conj().scale(r) - q * d.conj()).scale(s),
            (b.conj().scale(p) - qc * a.conj()).scale(s),
            (d.conj().scale(p) - qc * c.conj()).scale(s),
        ))
    }

    /// Conjugacy invariants of Σ. `β` is evaluated as
    /// `Re[(ad − bc)ā + (da − cb)d̄]`, whose last term is `Re(cb d̄)`; the
    /// variant with `Re(bc d̄)` agrees only when `b` and `c` commute and is
    /// not invariant.
    pub fn foreman_invariants(&self) -> ForemanInvariants {
        let Self { a, b, c, d } = *self;
        let bc = b * c;
        ForemanInvariants {
            beta: d.norm_sqr() * a.re() + a.norm_sqr() * d.re()
                - (a.conj() * bc).re()
                - (c * b * d.conj()).re(),
            gamma: (a + d).norm_sqr() + 2.0 * (a * d - bc).re(),
            delta: a.re() + d.re(),
        }
    }

    /// Parker–Short `(σ, τ)` with the four-way case split on which of `c`,
    /// `b`, `d − a` is nonzero.
    pub fn parker_short(&self) -> (Quaternion, Quaternion) {
        let Self { a, b, c, d } = *self;
        if !c.is_zero(ZERO_TOL) {
            let cac = c * a * inv(c);
            (cac * d - c * b, cac + d)
        } else if !b.is_zero(ZERO_TOL) {
            let bdb = b * d * inv(b);
            (bdb * a, bdb + a)
        } else if !(d - a).is_zero(ZERO_TOL) {
            let e = d - a;
            let eae = e * a * inv(e);
            (eae * d, eae + d)
        } else {
            (a * a.conj(), a + a.conj())
        }
    }

    pub fn invariants(&self) -> InvariantSet {
        let f = self.foreman_invariants();
        let (sigma, tau) = self.parker_short();
        InvariantSet {
            alpha: self.alpha(),
            beta: f.beta,
            gamma: f.gamma,
            delta: f.delta,
            sigma,
            tau,
        }
    }

    /// Scales by the positive real `1/√det` so the result lies in Σ.
    pub fn normalize_to_sigma(&self) -> Result<Self> {
        let det = self.check_invertible()?;
        Ok(self.scale(1.0 / det.sqrt()))
    }

    /// `A B A⁻¹ B⁻¹`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let a_inv = self.inverse()?;
        let b_inv = other.inverse()?;
        Ok(*self * *other * a_inv * b_inv)
    }

    /// `S T S⁻¹`.
    pub fn conjugate(&self, t: &Self) -> Result<Self> {
        Ok(*self * *t * self.inverse()?)
    }
}

impl Mul for MatH2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Sub for MatH2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for MatH2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Debug for MatH2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatH2")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("d", &self.d)
            .finish()
    }
}
