//! Seeded random generators shared by the unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qmat::MatH2;
use crate::quat::Quaternion;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_quat(r: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
    )
}

pub fn rand_unit_imag(r: &mut impl Rng) -> Quaternion {
    loop {
        let q = rand_quat(r).im();
        let n = q.norm();
        if n > 0.1 && n <= 1.0 {
            return q.scale(1.0 / n);
        }
    }
}

/// Random matrix with determinant bounded away from zero.
pub fn rand_invertible(r: &mut impl Rng) -> MatH2 {
    loop {
        let m = MatH2::new(rand_quat(r), rand_quat(r), rand_quat(r), rand_quat(r));
        if m.det() > 0.1 {
            return m;
        }
    }
}

pub fn rand_sigma(r: &mut impl Rng) -> MatH2 {
    rand_invertible(r).normalize_to_sigma().unwrap()
}
