//! The action of Σ on the extended quaternions `H ∪ {∞}` and the
//! classification of upper-triangular normal forms.
//!
//! General elements are not classified: that needs a conjugation into
//! triangular form, which this crate does not attempt. Non-triangular input
//! yields [`IsometryClass::Unclassified`].

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qmat::MatH2;
use crate::quat::{cross, Quaternion, ZERO_TOL};

type Q = Quaternion;

/// Relative threshold on `|cZ + d|` below which the image is `∞`.
pub const POLE_TOL: f64 = 1e-12;

/// A point of `H ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtQuaternion {
    Finite(Quaternion),
    Infinity,
}

impl ExtQuaternion {
    pub fn finite(self) -> Option<Quaternion> {
        match self {
            Self::Finite(q) => Some(q),
            Self::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, Self::Infinity)
    }

    /// Distance between finite points; `0` for two infinities, `∞` otherwise.
    pub fn dist(self, other: Self) -> f64 {
        match (self, other) {
            (Self::Finite(p), Self::Finite(q)) => (p - q).norm(),
            (Self::Infinity, Self::Infinity) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

impl From<Quaternion> for ExtQuaternion {
    fn from(q: Quaternion) -> Self {
        Self::Finite(q)
    }
}

impl fmt::Display for ExtQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtQuaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(q) => q.serialize(s),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtQuaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Point(Quaternion),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Point(q) => Ok(Self::Finite(q)),
            Repr::Tag(t) if t == "inf" => Ok(Self::Infinity),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected \"inf\" or a 4-array, got {t:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    /// Conjugate to a real diagonal non-identity matrix. A refinement of
    /// `Hyperbolic`.
    StrictlyHyperbolic,
    Identity,
    Unclassified,
}

impl IsometryClass {
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, Self::Hyperbolic | Self::StrictlyHyperbolic)
    }
}

impl fmt::Display for IsometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Fixed points of a triangular normal form.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPoints {
    /// The identity fixes everything.
    All,
    /// Distinguished fixed points. Elliptic maps whose diagonal entries are
    /// similar fix a whole 2-plane through the listed finite point as well.
    Points(Vec<ExtQuaternion>),
}

/// `Z ↦ (aZ + b)(cZ + d)⁻¹`.
pub fn apply(m: &MatH2, z: ExtQuaternion) -> Result<ExtQuaternion> {
    let det = m.det();
    if !(det > ZERO_TOL) {
        return Err(Error::SingularMatrix { det });
    }
    let MatH2 { a, b, c, d } = *m;
    Ok(match z {
        ExtQuaternion::Finite(z) => {
            let den = c * z + d;
            if den.norm() <= POLE_TOL * (1.0 + z.norm()) {
                ExtQuaternion::Infinity
            } else {
                ExtQuaternion::Finite((a * z + b) * den.inverse()?)
            }
        }
        ExtQuaternion::Infinity => {
            if c.is_zero(ZERO_TOL) {
                ExtQuaternion::Infinity
            } else {
                ExtQuaternion::Finite(a * c.inverse()?)
            }
        }
    })
}

/// Solves `λ x − x μ = rhs` for `λ` not similar to `μ`.
///
/// Uses `(λ² − 2Re(μ)λ + |μ|²) x = λ rhs − rhs μ̄`; the scalar-like factor on
/// the left is invertible exactly when `λ` and `μ` are not similar.
pub fn solve_sylvester(lambda: Q, mu: Q, rhs: Q) -> Result<Q> {
    let factor = lambda * lambda - lambda.scale(2.0 * mu.re()) + Q::real(mu.norm_sqr());
    if factor.is_zero(ZERO_TOL) {
        return Err(Error::InvalidArgument(
            "λ is similar to μ; λx − xμ = rhs has no unique solution".into(),
        ));
    }
    Ok(factor.inverse()? * (lambda * rhs - rhs * mu.conj()))
}

/// For `λ ~ μ` the map `x ↦ λx − xμ` has a 2-dimensional image. Returns a
/// preimage of `rhs` when `rhs` lies in it (within `tol`).
fn sylvester_preimage_similar(lambda: Q, mu: Q, rhs: Q, tol: f64) -> Option<Q> {
    let c = lambda.conjugator_to(mu, tol.max(1e-9))?;
    let slack = tol * (1.0 + rhs.norm());
    let u = lambda.im();
    if u.norm() <= tol {
        return rhs.is_zero(slack).then_some(Q::ZERO);
    }
    // image = {(λy − yλ)c} = {2(u × y) c}
    let w = rhs * c.conj();
    let u_hat = u.scale(1.0 / u.norm());
    if w.re().abs() > slack || w.dot(u_hat).abs() > slack {
        return None;
    }
    let y = cross(w, u).scale(0.5 / u.norm_sqr());
    Some(y * c)
}

fn is_identity(m: &MatH2, tol: f64) -> bool {
    m.dist(&MatH2::IDENTITY) <= tol || m.dist(&-MatH2::IDENTITY) <= tol
}

/// Classifies an upper-triangular element of Σ.
///
/// The diagonal entries `λ, μ` determine the class unless they are similar
/// and `b ≠ 0`; then the matrix is parabolic exactly when `b` is outside the
/// image of `x ↦ λx − xμ` (otherwise it is conjugate to `diag(λ, μ)`).
pub fn classify_normal_form(m: &MatH2, tol: f64) -> IsometryClass {
    if !m.in_sigma(tol) || !m.is_upper_triangular(tol) {
        return IsometryClass::Unclassified;
    }
    if is_identity(m, tol) {
        return IsometryClass::Identity;
    }
    let (lambda, mu) = (m.a, m.d);
    let diagonalizable = m.b.is_zero(tol)
        || !lambda.similar(mu, tol)
        || sylvester_preimage_similar(lambda, mu, m.b, tol).is_some();
    if !diagonalizable {
        return IsometryClass::Parabolic;
    }
    if (lambda.norm() - 1.0).abs() <= tol && (mu.norm() - 1.0).abs() <= tol {
        IsometryClass::Elliptic
    } else if lambda.is_real(tol) && mu.is_real(tol) {
        IsometryClass::StrictlyHyperbolic
    } else {
        IsometryClass::Hyperbolic
    }
}

/// Fixed points on `H ∪ {∞}` of an upper-triangular element of Σ.
pub fn fixed_points_normal_form(m: &MatH2, tol: f64) -> Result<FixedPoints> {
    if !m.is_upper_triangular(tol) {
        return Err(Error::NotTriangular { c_norm: m.c.norm() });
    }
    if !m.in_sigma(tol) {
        return Err(Error::NotInSigma { det: m.det() });
    }
    let inf = ExtQuaternion::Infinity;
    match classify_normal_form(m, tol) {
        IsometryClass::Identity => return Ok(FixedPoints::All),
        IsometryClass::Parabolic => return Ok(FixedPoints::Points(vec![inf])),
        _ => {}
    }
    if m.b.is_zero(tol) {
        return Ok(FixedPoints::Points(vec![Q::ZERO.into(), inf]));
    }
    // λZ + b = Zμ
    let (lambda, mu) = (m.a, m.d);
    let z = if lambda.similar(mu, tol) {
        sylvester_preimage_similar(lambda, mu, -m.b, tol).ok_or_else(|| {
            Error::InvalidArgument("parabolic element reached the diagonalizable branch".into())
        })?
    } else {
        solve_sylvester(lambda, mu, -m.b)?
    };
    Ok(FixedPoints::Points(vec![z.into(), inf]))
}
