//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use quat_jorgensen::{MatH2, Quaternion as Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_quat(r: &mut impl Rng) -> Q {
    Q::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn rand_unit_imag(r: &mut impl Rng) -> Q {
    loop {
        let v: [f64; 3] = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return Q::new(0.0, v[0] / n, v[1] / n, v[2] / n);
        }
    }
}

/// `cos θ + u sin θ` for a random unit imaginary `u`.
pub fn rand_rotation(r: &mut impl Rng, theta: f64) -> Q {
    Q::real(theta.cos()) + rand_unit_imag(r).scale(theta.sin())
}

/// Random matrix with `det ≥ 0.1`, scaled into Σ.
pub fn rand_sigma(r: &mut impl Rng) -> MatH2 {
    loop {
        let m = MatH2::new(rand_quat(r), rand_quat(r), rand_quat(r), rand_quat(r));
        if m.det() > 0.1 {
            return m.normalize_to_sigma().unwrap();
        }
    }
}

pub fn rand_invertible(r: &mut impl Rng) -> MatH2 {
    loop {
        let m = MatH2::new(rand_quat(r), rand_quat(r), rand_quat(r), rand_quat(r));
        if m.det() > 0.1 {
            return m;
        }
    }
}

pub fn cis(theta: f64) -> Q {
    Q::new(theta.cos(), theta.sin(), 0.0, 0.0)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Hamilton product through the left-multiplication matrix of `p`.
pub fn product_oracle(p: Q, q: Q) -> Q {
    let l = [
        [p.w, -p.x, -p.y, -p.z],
        [p.x, p.w, -p.z, p.y],
        [p.y, p.z, p.w, -p.x],
        [p.z, -p.y, p.x, p.w],
    ];
    let v = [q.w, q.x, q.y, q.z];
    let o: Vec<f64> = l.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
    Q::new(o[0], o[1], o[2], o[3])
}

/// `q = z₁ + z₂ j` as `[[z₁, z₂], [−z̄₂, z̄₁]]`.
fn complex_block(q: Q) -> [[C; 2]; 2] {
    let z1 = C::new(q.w, q.x);
    let z2 = C::new(q.y, q.z);
    [[z1, z2], [-z2.conj(), z1.conj()]]
}

/// Determinant of the 4×4 complex image of `m` by Gaussian elimination.
/// It equals `α`, the square of the Dieudonné determinant.
pub fn study_det(m: &MatH2) -> f64 {
    let blocks = [[complex_block(m.a), complex_block(m.b)], [complex_block(m.c), complex_block(m.d)]];
    let mut a = [[C::new(0.0, 0.0); 4]; 4];
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    a[2 * bi + i][2 * bj + j] = blk[i][j];
                }
            }
        }
    }
    let mut det = C::new(1.0, 0.0);
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        if a[piv][col].norm() == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det.re
}

/// Largest `|(λ − eμe⁻¹)(λ − fμf⁻¹)|` over `n` random `e` and `n` random
/// `f`, i.e. over all `n²` combinations.
pub fn beta_monte_carlo(lambda: Q, mu: Q, n: usize, r: &mut impl Rng) -> f64 {
    let mut factor_sup = || {
        let mut best = 0.0_f64;
        for _ in 0..n {
            let e = rand_quat(r);
            if e.norm() < 1e-3 {
                continue;
            }
            let conj = e * mu * e.inverse().unwrap();
            best = best.max((lambda - conj).norm());
        }
        best
    };
    factor_sup() * factor_sup()
}
