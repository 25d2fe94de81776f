#![allow(dead_code)]

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use translative::geom::{Polytope, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hull of `n` uniform points in `[-1, 1]^d` shifted by `center`.
pub fn random_polytope(d: usize, n: usize, center: Vec3, rng: &mut ChaCha8Rng) -> Polytope {
    loop {
        let pts: Vec<Vec3> = (0..n)
            .map(|_| {
                let mut p = center;
                for i in 0..d {
                    p[i] += rng.random_range(-1.0..1.0);
                }
                p
            })
            .collect();
        let p = Polytope::from_points(&pts, d).unwrap();
        if p.is_full_dimensional() && p.volume() > 0.05 {
            return p;
        }
    }
}

pub fn unit_square() -> Polytope {
    Polytope::unit_cube(2).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
