//! Haar-uniform random rotations.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion, Vector3};
use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

/// Uniform rotation of `R^d` (`d` in {2, 3}); planar rotations act on the
/// first two coordinates.
pub fn random_rotation<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix3<f64> {
    if d == 2 {
        let t = rng.random::<f64>() * 2.0 * PI;
        Rotation3::from_axis_angle(&Vector3::z_axis(), t).into_inner()
    } else {
        let mut q = [0.0f64; 4];
        loop {
            for c in &mut q {
                *c = StandardNormal.sample(rng);
            }
            if q.iter().map(|c| c * c).sum::<f64>() > 1e-12 {
                break;
            }
        }
        UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]))
            .to_rotation_matrix()
            .into_inner()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2, 3] {
            for _ in 0..20 {
                let r = random_rotation(d, &mut rng);
                assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-12);
                assert!((r.determinant() - 1.0).abs() < 1e-12);
                if d == 2 {
                    assert_eq!(r[(2, 2)], 1.0);
                }
            }
        }
    }

    #[test]
    fn uniform_directions_have_zero_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 20000;
        let mut m = Vector3::zeros();
        for _ in 0..n {
            m += random_rotation(3, &mut rng) * Vector3::x();
        }
        m /= n as f64;
        // Each coordinate has standard deviation 1/sqrt(3n).
        assert!(m.amax() < 4.0 / (3.0 * n as f64).sqrt());
    }
}
