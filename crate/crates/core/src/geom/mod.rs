//! Convex polytope geometry in the plane and in space.
//!
//! Points and directions are stored as [`Vec3`]; planar objects live in the
//! `z = 0` plane and every routine takes the ambient dimension `d` explicitly
//! so orthogonal complements are taken inside `R^d`.

mod determinant;
mod hull;
pub mod io;
mod polytope;
mod region;

pub(crate) use determinant::check_index;
pub use determinant::{face_determinant, subspace_determinant, two_subspace_determinant};
pub use polytope::{Face, FaceRef, Halfspace, Polytope};
pub use region::{face_measure_restricted, translation_support, AaBox, Region};

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Incidence tolerance in length units.
pub const EPS_GEOM: f64 = 1e-9;
/// Relative tolerance for numeric identities.
pub const EPS_NUM: f64 = 1e-9;

pub fn check_dim(d: usize) -> crate::Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(crate::Error::UnsupportedDimension(d))
    }
}

/// Unit vector `e_i`.
pub(crate) fn axis(i: usize) -> Vec3 {
    let mut v = Vec3::zeros();
    v[i] = 1.0;
    v
}

/// Gram-Schmidt with re-orthogonalisation. Vectors whose residual norm is at
/// most `tol` are dropped.
pub fn orthonormal_basis<I: IntoIterator<Item = Vec3>>(vs: I, tol: f64) -> Vec<Vec3> {
    let mut basis: Vec<Vec3> = Vec::new();
    for v in vs {
        let mut r = v;
        for _ in 0..2 {
            for b in &basis {
                r -= b * b.dot(&r);
            }
        }
        let n = r.norm();
        if n > tol {
            basis.push(r / n);
        }
        if basis.len() == 3 {
            break;
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in `R^d`.
/// `basis` must be orthonormal.
pub fn complement(basis: &[Vec3], d: usize) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(d.saturating_sub(basis.len()));
    for i in 0..d {
        if out.len() + basis.len() == d {
            break;
        }
        let mut r = axis(i);
        for _ in 0..2 {
            for b in basis.iter().chain(out.iter()) {
                r -= b * b.dot(&r);
            }
        }
        let n = r.norm();
        if n > 1e-6 {
            out.push(r / n);
        }
    }
    out
}

/// Square root of the Gram determinant of `vs`: the volume of the
/// parallelepiped they span.
pub fn gram_volume(vs: &[Vec3]) -> f64 {
    let k = vs.len();
    if k == 0 {
        return 1.0;
    }
    let g = nalgebra::DMatrix::from_fn(k, k, |a, b| vs[a].dot(&vs[b]));
    g.determinant().max(0.0).sqrt()
}

/// Ordering of planar points (given in 2D coordinates) on their convex hull,
/// counter-clockwise, collinear points removed. Returns indices.
pub fn hull_2d(pts: &[(f64, f64)], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].0.total_cmp(&pts[b].0).then(pts[a].1.total_cmp(&pts[b].1)));
    idx.dedup_by(|a, b| (pts[*a].0 - pts[*b].0).abs() <= tol && (pts[*a].1 - pts[*b].1).abs() <= tol);
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        (pts[a].0 - pts[o].0) * (pts[b].1 - pts[o].1) - (pts[a].1 - pts[o].1) * (pts[b].0 - pts[o].0)
    };
    // Scale the collinearity test by edge length so it is a distance test.
    let turn = |o: usize, a: usize, b: usize| {
        let l = ((pts[b].0 - pts[o].0).powi(2) + (pts[b].1 - pts[o].1).powi(2)).sqrt();
        if l == 0.0 {
            0.0
        } else {
            cross(o, a, b) / l
        }
    };
    let mut lower: Vec<usize> = Vec::new();
    for &p in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &p in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_line_in_plane() {
        let l = [Vec3::new(1.0, 1.0, 0.0).normalize()];
        let c = complement(&l, 2);
        assert_eq!(c.len(), 1);
        assert!(c[0].dot(&l[0]).abs() < 1e-12);
        assert!(c[0].z.abs() < 1e-12);
    }

    #[test]
    fn hull_drops_collinear_points() {
        let pts = [
            (0.0, 0.0),
            (0.5, 0.0),
            (1.0, 0.0),
            (1.0, 1.0),
            (0.0, 1.0),
            (0.5, 0.5),
        ];
        let h = hull_2d(&pts, 1e-12);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&1) && !h.contains(&5));
    }

    #[test]
    fn gram_volume_of_orthonormal_set_is_one() {
        let v = [axis(0), axis(1), axis(2)];
        assert!((gram_volume(&v) - 1.0).abs() < 1e-14);
    }
}
