use super::family::{Family, FunctionKind};
use crate::geom::{face_measure_restricted, FaceRef, Polytope, Region};
use crate::spherical::{normal_cone, sphere_section};
use crate::{Error, Result};

/// `f_j(n(P, F))` for a `j`-face `F` with `j < d`.
pub fn face_weight(f: &Family, face: &FaceRef<'_>) -> Result<f64> {
    if let FunctionKind::Constant(c) = f.f(face.dim()) {
        return Ok(*c);
    }
    let cone = normal_cone(face)?;
    let p = sphere_section(&cone)?;
    f.f(face.dim()).eval(&p)
}

fn check(f: &Family, j: usize, p: &Polytope) -> Result<()> {
    if f.d != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            found: p.dim(),
        });
    }
    if j > f.d {
        return Err(Error::FaceDimension { j, max: f.d });
    }
    Ok(())
}

/// `φ^(j)(P) = Σ_{F ∈ F_j(P)} f_j(n(P,F)) V_j(F)`, and `c_d V_d(P)` for `j = d`.
pub fn phi_homogeneous(f: &Family, j: usize, p: &Polytope) -> Result<f64> {
    check(f, j, p)?;
    if j == f.d {
        return Ok(f.c_d * p.volume());
    }
    let mut s = 0.0;
    for face in p.faces(j)? {
        s += face_weight(f, &face)? * face.volume();
    }
    Ok(s)
}

/// `[φ^(0)(P), ..., φ^(d)(P)]`.
pub fn phi_degrees(f: &Family, p: &Polytope) -> Result<Vec<f64>> {
    (0..=f.d).map(|j| phi_homogeneous(f, j, p)).collect()
}

/// `φ(P)`, the sum of all homogeneous parts.
pub fn phi_total(f: &Family, p: &Polytope) -> Result<f64> {
    Ok(phi_degrees(f, p)?.iter().sum())
}

/// `Φ^(j)(P, A) = Σ_{F ∈ F_j(P)} f_j(n(P,F)) λ_F(A)`; `c_d λ(P ∩ A)` for
/// `j = d`.
pub fn extension_measure(f: &Family, j: usize, p: &Polytope, a: &Region) -> Result<f64> {
    check(f, j, p)?;
    if j == f.d {
        if !p.is_full_dimensional() {
            return Ok(0.0);
        }
        return Ok(f.c_d * face_measure_restricted(&p.whole(), a));
    }
    let mut s = 0.0;
    for face in p.faces(j)? {
        let m = face_measure_restricted(&face, a);
        if m != 0.0 {
            s += face_weight(f, &face)? * m;
        }
    }
    Ok(s)
}

/// `Φ(P, A)` summed over all degrees.
pub fn extension_total(f: &Family, p: &Polytope, a: &Region) -> Result<f64> {
    (0..=f.d).map(|j| extension_measure(f, j, p, a)).sum()
}
