//! Real quaternions over `f64`.
//!
//! `Quaternion { w, x, y, z }` is `w + x i + y j + z k` with the Hamilton
//! relations `i² = j² = k² = ijk = -1`. Besides the ring operations this
//! module carries the similarity machinery used everywhere downstream:
//! two quaternions are similar (conjugate by a nonzero quaternion) exactly
//! when they share real part and norm, so every similarity class has a
//! complex representative `re + i|im|` and a well defined argument in
//! `[0, π]`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for predicates on unit-scale data.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Threshold below which a quaternion is treated as zero when dispatching
/// between formula cases.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Embeds a real number as a scalar quaternion.
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// The complex number `re + im·i` viewed inside the quaternions.
    pub const fn complex(re: f64, im: f64) -> Self {
        Self::new(re, im, 0.0, 0.0)
    }

    /// `r·e^{iθ}` on the complex line spanned by `1, i`.
    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::complex(r * theta.cos(), r * theta.sin())
    }

    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part `x i + y j + z k` as a quaternion with zero scalar part.
    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|im(q)|`.
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// True when `|q| <= tol`.
    pub fn is_zero(self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// True when the imaginary part is within `tol` of zero.
    pub fn is_real(self, tol: f64) -> bool {
        self.im_norm() <= tol
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse `conj(q)/|q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::NonInvertibleQuaternion);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Euclidean inner product of the coordinate vectors, `Re(p q̄)`.
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Tolerance similarity test: equal real parts and equal norms, each
    /// within `tol`. Exact similarity is not decidable in floating point.
    pub fn similar(self, other: Self, tol: f64) -> bool {
        (self.re() - other.re()).abs() <= tol && (self.norm() - other.norm()).abs() <= tol
    }

    /// The argument `θ ∈ [0, π]` of the similarity class: `cos θ = re/|q|`,
    /// `sin θ = |im|/|q|`.
    pub fn arg(self) -> Result<f64> {
        if self.norm_sqr() == 0.0 {
            return Err(Error::ZeroArgument);
        }
        Ok(self.im_norm().atan2(self.w))
    }

    /// `(re(q), |im(q)|)`, the complex representative of the similarity
    /// class with non-negative imaginary part.
    pub fn complex_representative(self) -> (f64, f64) {
        (self.re(), self.im_norm())
    }

    /// Returns a unit quaternion `c` with `c⁻¹·self·c ≈ other`, or `None`
    /// when the two are not similar within `tol`.
    pub fn conjugator_to(self, other: Self, tol: f64) -> Option<Self> {
        if !self.similar(other, tol) {
            return None;
        }
        let (su, ou) = (self.im_norm(), other.im_norm());
        if su <= tol || ou <= tol {
            return Some(Self::ONE);
        }
        let u = self.im().scale(1.0 / su);
        let v = other.im().scale(1.0 / ou);
        // q u q⁻¹ = v for q = 1 - v u, unless v = -u.
        let q = Self::ONE - v * u;
        let q = if q.norm() <= 1e-8 {
            orthogonal_unit(u)
        } else {
            q.scale(1.0 / q.norm())
        };
        // c⁻¹ = q, c = q̄ for unit q.
        Some(q.conj())
    }
}

/// A unit pure-imaginary quaternion orthogonal to the pure-imaginary unit `u`.
fn orthogonal_unit(u: Quaternion) -> Quaternion {
    let axis = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Quaternion::I
    } else if u.y.abs() <= u.z.abs() {
        Quaternion::J
    } else {
        Quaternion::K
    };
    let w = cross(u, axis);
    w.scale(1.0 / w.norm())
}

/// Cross product of the imaginary parts, returned as a pure quaternion.
pub fn cross(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        0.0,
        p.y * q.z - p.z * q.y,
        p.z * q.x - p.x * q.z,
        p.x * q.y - p.y * q.x,
    )
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[{:?}, {:?}, {:?}, {:?}]", self.w, self.x, self.y, self.z)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |v: f64| if v.is_sign_negative() { '-' } else { '+' };
        write!(
            f,
            "{} {} {}i {} {}j {} {}k",
            self.w,
            sign(self.x),
            self.x.abs(),
            sign(self.y),
            self.y.abs(),
            sign(self.z),
            self.z.abs()
        )
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{rand_quat, rng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn close(p: Quaternion, q: Quaternion, tol: f64) -> bool {
        (p - q).norm() <= tol
    }

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * j, -i);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn complex_times_j_flips_to_conjugate() {
        let z = Quaternion::complex(2.0, 3.0);
        let lhs = z * Quaternion::J;
        assert_eq!(lhs, Quaternion::new(0.0, 0.0, 2.0, 3.0));
        assert_eq!(lhs, Quaternion::J * z.conj());
    }

    #[test]
    fn identity_and_inverse() {
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(Quaternion::ONE.inverse().unwrap(), Quaternion::ONE);
        assert_eq!(
            Quaternion::new(0.0, 2.0, 0.0, 0.0).inverse().unwrap(),
            Quaternion::new(0.0, -0.5, 0.0, 0.0)
        );
        assert_eq!(Quaternion::ZERO.inverse(), Err(Error::NonInvertibleQuaternion));
    }

    #[test]
    fn random_inverse_multiplies_to_one() {
        let mut r = rng(1);
        for _ in 0..1000 {
            let q = rand_quat(&mut r);
            let inv = q.inverse().unwrap();
            assert!(close(q * inv, Quaternion::ONE, 1e-12));
            assert!(close(inv * q, Quaternion::ONE, 1e-12));
        }
    }

    #[test]
    fn similarity_examples() {
        assert!(Quaternion::I.similar(Quaternion::J, DEFAULT_TOL));
        let q = Quaternion::new(0.5, 0.1, -0.2, 0.9);
        assert!(q.similar(q, 0.0));
        assert!(!Quaternion::I.similar(Quaternion::ONE, DEFAULT_TOL));
        let mut r = rng(2);
        for _ in 0..200 {
            let q = rand_quat(&mut r);
            let c = rand_quat(&mut r);
            let conj = c.inverse().unwrap() * q * c;
            assert!(conj.similar(q, 1e-12));
        }
    }

    #[test]
    fn argument_values() {
        assert_eq!(Quaternion::ONE.arg().unwrap(), 0.0);
        assert!((Quaternion::I.arg().unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((Quaternion::new(1.0, 1.0, 1.0, 1.0).arg().unwrap() - FRAC_PI_3).abs() < 1e-15);
        assert!((Quaternion::real(-3.0).arg().unwrap() - PI).abs() < 1e-15);
        assert_eq!(Quaternion::ZERO.arg(), Err(Error::ZeroArgument));
    }

    #[test]
    fn complex_representatives() {
        let (re, im) = Quaternion::new(1.0, 1.0, 1.0, 1.0).complex_representative();
        assert_eq!(re, 1.0);
        assert!((im - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(Quaternion::real(5.0).complex_representative(), (5.0, 0.0));
        assert_eq!(Quaternion::J.complex_representative(), (0.0, 1.0));
    }

    #[test]
    fn conjugator_maps_between_similar_quaternions() {
        let mut r = rng(3);
        for _ in 0..200 {
            let p = rand_quat(&mut r);
            let g = rand_quat(&mut r);
            let q = g.inverse().unwrap() * p * g;
            let c = p.conjugator_to(q, 1e-10).unwrap();
            assert!(close(c.inverse().unwrap() * p * c, q, 1e-10));
        }
        // antipodal imaginary parts
        let c = Quaternion::I.conjugator_to(-Quaternion::I, 1e-12).unwrap();
        assert!(close(c.inverse().unwrap() * Quaternion::I * c, -Quaternion::I, 1e-12));
        assert!(Quaternion::I.conjugator_to(Quaternion::ONE, 1e-9).is_none());
    }

    #[test]
    fn json_is_a_four_array() {
        let q = Quaternion::new(1.0, -2.5, 0.0, 1e-300);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, "[1.0,-2.5,0.0,1e-300]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }
}
