use std::collections::HashMap;

use serde::Serialize;

use super::family::{Family, FunctionKind};
use crate::geom::{
    check_index, complement, face_measure_restricted, subspace_determinant, FaceRef, Polytope, Region, Vec3,
};
use crate::spherical::{sphere_section, Cone};
use crate::{Error, Result};

/// `φ^(j)_{m_1..m_k}(P_1, ..., P_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedFunctionalValue {
    pub j: usize,
    pub m: Vec<usize>,
    pub value: f64,
}

/// Face of a factor with its normal-cone generators.
struct Slot<'a> {
    face: FaceRef<'a>,
    gens: Vec<Vec3>,
    lin: Vec<Vec3>,
}

fn slots<'a>(p: &'a Polytope, m: usize) -> Result<Vec<Slot<'a>>> {
    let lin = complement(p.aff_basis(), p.dim());
    Ok(p.faces(m)?
        .into_iter()
        .map(|face| Slot {
            gens: face
                .facet_ids()
                .iter()
                .map(|&i| p.halfspaces()[i].normal)
                .collect(),
            lin: lin.clone(),
            face,
        })
        .collect())
}

fn validate(f: &Family, j: usize, polys: &[&Polytope], m: &[usize]) -> Result<()> {
    if polys.len() != m.len() {
        return Err(Error::InvalidArgument(format!(
            "{} polytopes but {} indices",
            polys.len(),
            m.len()
        )));
    }
    if let Some(p) = polys.iter().find(|p| p.dim() != f.d) {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            found: p.dim(),
        });
    }
    if check_index(m, f.d)? != j {
        return Err(Error::IndexConstraint {
            dims: m.to_vec(),
            d: f.d,
        });
    }
    Ok(())
}

/// Face-tuple sum with per-face weights `w(i, F_i)` in place of `V_{m_i}(F_i)`.
pub(crate) fn mixed_sum(
    f: &Family,
    j: usize,
    polys: &[&Polytope],
    m: &[usize],
    w: &dyn Fn(usize, &FaceRef<'_>) -> f64,
) -> Result<f64> {
    validate(f, j, polys, m)?;
    let d = f.d;
    if j == d {
        let mut prod = f.c_d;
        for (i, p) in polys.iter().enumerate() {
            if !p.is_full_dimensional() {
                return Ok(0.0);
            }
            prod *= w(i, &p.whole());
        }
        return Ok(prod);
    }
    let lists: Vec<Vec<Slot<'_>>> = polys
        .iter()
        .zip(m)
        .map(|(p, &mi)| slots(p, mi))
        .collect::<Result<_>>()?;
    let weights: Vec<Vec<f64>> = lists
        .iter()
        .enumerate()
        .map(|(i, l)| l.iter().map(|s| w(i, &s.face)).collect())
        .collect();
    if lists.iter().any(Vec::is_empty) {
        return Ok(0.0);
    }
    let k = polys.len();
    let fj = f.f(j);
    let mut cache: HashMap<Vec<i64>, f64> = HashMap::new();
    let mut idx = vec![0usize; k];
    let mut total = 0.0;
    loop {
        let mut prod = 1.0;
        for i in 0..k {
            prod *= weights[i][idx[i]];
        }
        if prod != 0.0 {
            let bases: Vec<&[Vec3]> = (0..k).map(|i| lists[i][idx[i]].face.basis()).collect();
            let det = subspace_determinant(&bases, d)?;
            if det > 1e-12 {
                if let FunctionKind::Constant(c) = fj {
                    total += c * det * prod;
                } else {
                    let mut gens = Vec::new();
                    let mut lin = Vec::new();
                    for i in 0..k {
                        let s = &lists[i][idx[i]];
                        gens.extend_from_slice(&s.gens);
                        lin.extend_from_slice(&s.lin);
                    }
                    let cone = Cone::new(d, &gens, &lin)?;
                    let key = cone.key();
                    let val = match cache.get(&key) {
                        Some(v) => *v,
                        None => {
                            let v = fj.eval(&sphere_section(&cone)?)?;
                            cache.insert(key, v);
                            v
                        }
                    };
                    total += val * det * prod;
                }
            }
        }
        if !advance(&mut idx, &lists) {
            break;
        }
    }
    Ok(total)
}

/// Odometer step; false once every tuple has been visited.
fn advance(idx: &mut [usize], lists: &[Vec<Slot<'_>>]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < lists[i].len() {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// `φ^(j)_{m_1..m_k}(P_1..P_k) = Σ f_j(n(P_1..P_k; F_1..F_k)) [F_1..F_k] Π V_{m_i}(F_i)`
/// over `F_i ∈ F_{m_i}(P_i)`, with `Σ m_i = (k-1) d + j`.
pub fn mixed_functional(
    f: &Family,
    j: usize,
    polys: &[&Polytope],
    m: &[usize],
) -> Result<MixedFunctionalValue> {
    let value = mixed_sum(f, j, polys, m, &|_, face| face.volume())?;
    Ok(MixedFunctionalValue {
        j,
        m: m.to_vec(),
        value,
    })
}

/// The mixed measure of `A_1 × ... × A_k`: `V_{m_i}(F_i)` replaced by
/// `λ_{F_i}(A_i)`.
pub fn mixed_measure(
    f: &Family,
    j: usize,
    polys: &[&Polytope],
    m: &[usize],
    regions: &[&Region],
) -> Result<f64> {
    if regions.len() != polys.len() {
        return Err(Error::InvalidArgument(format!(
            "{} polytopes but {} regions",
            polys.len(),
            regions.len()
        )));
    }
    mixed_sum(f, j, polys, m, &|i, face| {
        face_measure_restricted(face, regions[i])
    })
}

/// Every `(m_1..m_k)` with `j <= m_i <= d` and `Σ m_i = (k-1) d + j`, in
/// lexicographic order.
pub fn index_vectors(k: usize, d: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, d: usize, j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for m in j..=d {
            if m <= left {
                cur.push(m);
                rec(k, d, j, left - m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, d, j, (k - 1) * d + j, &mut Vec::new(), &mut out);
    out
}

/// Right side of the iterated translative formula: `Σ_m` mixed measures.
pub fn translative_rhs(f: &Family, j: usize, polys: &[&Polytope], regions: &[&Region]) -> Result<f64> {
    let mut s = 0.0;
    for m in index_vectors(polys.len(), f.d, j) {
        s += mixed_measure(f, j, polys, &m, regions)?;
    }
    Ok(s)
}
