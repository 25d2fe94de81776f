//! Generalised sines of linear subspaces.

use super::polytope::FaceRef;
use super::{complement, gram_volume, orthonormal_basis, Vec3};
use crate::{Error, Result};

/// `[L, M]` for two subspaces given by orthonormal bases. When
/// `dim L + dim M >= d` this is the volume spanned by orthonormal bases of the
/// orthogonal complements; otherwise the volume spanned by the bases
/// themselves. Both readings agree when the dimensions add up to `d`.
pub fn two_subspace_determinant(l: &[Vec3], m: &[Vec3], d: usize) -> f64 {
    if l.len() + m.len() >= d {
        let mut vs = complement(l, d);
        vs.extend(complement(m, d));
        gram_volume(&vs)
    } else {
        let mut vs = l.to_vec();
        vs.extend_from_slice(m);
        gram_volume(&vs)
    }
}

/// `[L_1, ..., L_k]` through the recursion
/// `[L_1..L_k] = [L_1..L_{k-1}] * [L_1 ∩ ... ∩ L_{k-1}, L_k]`.
/// Dimensions must satisfy `sum dim L_i = (k-1) d + j` with `0 <= j <= d`.
pub fn subspace_determinant(bases: &[&[Vec3]], d: usize) -> Result<f64> {
    check_index(&bases.iter().map(|b| b.len()).collect::<Vec<_>>(), d)?;
    Ok(recurse(bases, d))
}

fn recurse(bases: &[&[Vec3]], d: usize) -> f64 {
    let k = bases.len();
    if k == 1 {
        return 1.0;
    }
    let head = recurse(&bases[..k - 1], d);
    if head <= 1e-14 {
        return 0.0;
    }
    // Complement of the common intersection of the first k-1 subspaces.
    let joint = orthonormal_basis(bases[..k - 1].iter().flat_map(|b| complement(b, d)), 1e-12);
    let mut vs = joint;
    vs.extend(complement(bases[k - 1], d));
    head * gram_volume(&vs)
}

pub(crate) fn check_index(dims: &[usize], d: usize) -> Result<usize> {
    let k = dims.len();
    let s: usize = dims.iter().sum();
    let err = || Error::IndexConstraint {
        dims: dims.to_vec(),
        d,
    };
    if k < 2 || dims.iter().any(|&m| m > d) || s < (k - 1) * d || s - (k - 1) * d > d {
        return Err(err());
    }
    Ok(s - (k - 1) * d)
}

/// `[F_1, ..., F_k]`: the determinant of the direction spaces of the faces.
pub fn face_determinant(faces: &[FaceRef<'_>]) -> Result<f64> {
    let d = faces.first().map_or(0, |f| f.parent.dim());
    if let Some(f) = faces.iter().find(|f| f.parent.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.parent.dim(),
        });
    }
    let bases: Vec<&[Vec3]> = faces.iter().map(|f| f.basis()).collect();
    subspace_determinant(&bases, d)
}
