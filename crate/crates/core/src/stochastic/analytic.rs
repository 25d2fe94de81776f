use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::Matrix3;
use serde::Serialize;

use super::grains::{GrainDistribution, RotationMode, Shape};
use super::simulate::Intensity;
use crate::functionals::montecarlo::mc_mean;
use crate::functionals::{face_weight, index_vectors, mixed_functional, mixed_sum, Family};
use crate::geom::{check_index, FaceRef, Polytope, Vec3};
use crate::rotation::random_rotation;
use crate::{Error, Result};

/// An analytic value; `stderr` is nonzero when rotations are averaged by
/// Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticValue {
    pub value: f64,
    pub stderr: f64,
}

impl AnalyticValue {
    pub fn exact(value: f64) -> AnalyticValue {
        AnalyticValue { value, stderr: 0.0 }
    }
}

/// Monte Carlo rotation averaging for isotropic grains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationAverage {
    pub samples: usize,
    pub seed: u64,
}

impl Default for RotationAverage {
    fn default() -> Self {
        RotationAverage {
            samples: 20_000,
            seed: 0,
        }
    }
}

impl RotationAverage {
    fn with_seed_offset(self, k: u64) -> RotationAverage {
        RotationAverage {
            seed: self.seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..self
        }
    }
}

/// `Σ Π_i w_{s_i} σ_i g(ϑ_1 P_1, ..., ϑ_k P_k)` over `k`-tuples of shapes and
/// their signed inclusion-exclusion pieces.
fn mixture_sum<G>(q: &GrainDistribution, rots: &[Matrix3<f64>], g: &G) -> Result<f64>
where
    G: Fn(&[&Polytope]) -> Result<f64>,
{
    let k = rots.len();
    let mut lists: Vec<Vec<(f64, Polytope)>> = Vec::with_capacity(k);
    for r in rots {
        let mut l = Vec::new();
        for (shape, w) in &q.shapes {
            if *w == 0.0 {
                continue;
            }
            for (s, p) in shape.signed_pieces()? {
                l.push((w * s, p.rotate(r)));
            }
        }
        lists.push(l);
    }
    let mut idx = vec![0usize; k];
    let mut total = 0.0;
    'outer: loop {
        let coef: f64 = (0..k).map(|i| lists[i][idx[i]].0).product();
        let polys: Vec<&Polytope> = (0..k).map(|i| &lists[i][idx[i]].1).collect();
        total += coef * g(&polys)?;
        for i in (0..k).rev() {
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    Ok(total)
}

/// Mixture average of `g` over `k` factors, with independent uniform
/// rotations per factor in isotropic mode.
fn rotation_mean<G>(q: &GrainDistribution, k: usize, rot: &RotationAverage, g: G) -> Result<AnalyticValue>
where
    G: Fn(&[&Polytope]) -> Result<f64> + Sync,
{
    match q.rotation {
        RotationMode::Fixed => Ok(AnalyticValue::exact(mixture_sum(
            q,
            &vec![Matrix3::identity(); k],
            &g,
        )?)),
        RotationMode::Isotropic => {
            let e = mc_mean(rot.samples, rot.seed, |rng| {
                let rots: Vec<Matrix3<f64>> = (0..k).map(|_| random_rotation(q.d, rng)).collect();
                mixture_sum(q, &rots, &g)
            })?;
            Ok(AnalyticValue {
                value: e.mean,
                stderr: e.stderr,
            })
        }
    }
}

fn check_family(f: &Family, q: &GrainDistribution) -> Result<()> {
    if f.d != q.d {
        return Err(Error::DimensionMismatch {
            expected: q.d,
            found: f.d,
        });
    }
    Ok(())
}

/// `φ̄^(j)(X) = γ ∫ φ^(j)(P) Q(dP)`. Exact unless the grains are isotropic
/// and `f` is not rotation invariant.
#[allow(non_snake_case)]
pub fn analytic_density_X(
    f: &Family,
    j: usize,
    q: &GrainDistribution,
    gamma: f64,
    rot: &RotationAverage,
) -> Result<AnalyticValue> {
    check_family(f, q)?;
    if j > f.d {
        return Err(Error::FaceDimension { j, max: f.d });
    }
    if q.rotation == RotationMode::Fixed || f.rotation_invariant() {
        return Ok(AnalyticValue::exact(gamma * q.mean(|s| s.phi(f, j))?));
    }
    let v = rotation_mean(q, 1, rot, |p| crate::functionals::phi_homogeneous(f, j, p[0]))?;
    Ok(AnalyticValue {
        value: gamma * v.value,
        stderr: gamma * v.stderr,
    })
}

/// Volume density `V̄_d(X) = γ E V_d`.
pub fn volume_density(q: &GrainDistribution, gamma: f64) -> Result<f64> {
    Ok(gamma * q.mean(Shape::volume)?)
}

/// `φ̄^(j)_{m_1..m_k}(X, ..., X) = γ^k ∫..∫ φ^(j)_{m_1..m_k}(P_1..P_k) Q^k`.
pub fn analytic_mixed_density(
    f: &Family,
    j: usize,
    m: &[usize],
    q: &GrainDistribution,
    gamma: f64,
    rot: &RotationAverage,
) -> Result<AnalyticValue> {
    check_family(f, q)?;
    if m.is_empty() || check_index(m, f.d)? != j {
        return Err(Error::IndexConstraint {
            dims: m.to_vec(),
            d: f.d,
        });
    }
    let k = m.len();
    let v = rotation_mean(q, k, rot, |ps| Ok(mixed_functional(f, j, ps, m)?.value))?;
    let g = gamma.powi(k as i32);
    Ok(AnalyticValue {
        value: g * v.value,
        stderr: g * v.stderr,
    })
}

/// Index vectors of the mixed terms with all entries in `j..=d-1`.
fn inner_indices(s: usize, d: usize, j: usize) -> Vec<Vec<usize>> {
    index_vectors(s, d, j)
        .into_iter()
        .filter(|m| m.iter().all(|&mi| mi < d))
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Density `φ̄^(j)(X_k)` of the process of `k`-fold intersections.
pub fn intersection_density(
    f: &Family,
    j: usize,
    k: usize,
    q: &GrainDistribution,
    gamma: f64,
    rot: &RotationAverage,
) -> Result<AnalyticValue> {
    check_family(f, q)?;
    let d = f.d;
    if j > d {
        return Err(Error::FaceDimension { j, max: d });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let v = volume_density(q, gamma)?;
    if j == d {
        return Ok(AnalyticValue::exact(f.c_d * v.powi(k as i32) / factorial(k)));
    }
    let mut value = 0.0;
    let mut var = 0.0;
    for s in 1..=(d - j).min(k) {
        let tail = v.powi((k - s) as i32) / factorial(k - s) / factorial(s);
        let terms = if s == 1 {
            vec![analytic_density_X(f, j, q, gamma, rot)?]
        } else {
            inner_indices(s, d, j)
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    analytic_mixed_density(f, j, m, q, gamma, &rot.with_seed_offset((s * 64 + i) as u64))
                })
                .collect::<Result<Vec<_>>>()?
        };
        for t in terms {
            value += tail * t.value;
            var += (tail * t.stderr).powi(2);
        }
    }
    Ok(AnalyticValue {
        value,
        stderr: var.sqrt(),
    })
}

/// `φ̄^(j)(Z)` of the stationary Boolean model from the densities of `X`:
/// `c_d (1 - e^{-V̄})` for `j = d`, `e^{-V̄} φ̄^(d-1)(X)` for `j = d - 1`, and
/// `e^{-V̄} (φ̄^(j)(X) - Σ_{s>=2} (-1)^s / s! Σ_m φ̄^(j)_m(X..X))` below.
pub fn boolean_density_formula(
    f: &Family,
    j: usize,
    q: &GrainDistribution,
    gamma: f64,
    rot: &RotationAverage,
) -> Result<AnalyticValue> {
    check_family(f, q)?;
    let d = f.d;
    if j > d {
        return Err(Error::FaceDimension { j, max: d });
    }
    let v = volume_density(q, gamma)?;
    let e = (-v).exp();
    if j == d {
        return Ok(AnalyticValue::exact(f.c_d * (1.0 - e)));
    }
    let x = analytic_density_X(f, j, q, gamma, rot)?;
    let mut value = x.value;
    let mut var = x.stderr.powi(2);
    for s in 2..=(d - j) {
        let c = if s % 2 == 0 { -1.0 } else { 1.0 } / factorial(s);
        for (i, m) in inner_indices(s, d, j).iter().enumerate() {
            let t = analytic_mixed_density(f, j, m, q, gamma, &rot.with_seed_offset((s * 64 + i) as u64))?;
            value += c * t.value;
            var += (c * t.stderr).powi(2);
        }
    }
    Ok(AnalyticValue {
        value: e * value,
        stderr: e * var.sqrt(),
    })
}

/// Densities of `X` and `Z` for the skeleton measures by the classical
/// closed forms: in the plane area `A`, boundary length `L` and vertex
/// number `N_0`, in space volume `V`, surface area `S`, edge length `L_1` and
/// `N_0`. Index `j` of `x`, `z` is the degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkeletonReport {
    pub d: usize,
    pub gamma: f64,
    pub names: Vec<&'static str>,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

/// Closed-form skeleton densities of an isotropic Boolean model:
///
/// ```text
/// d = 2:  A(Z) = 1 - e^{-A},  L(Z) = e^{-A} L,  N0(Z) = e^{-A} (N0 - L^2 / (4π))
/// d = 3:  V(Z) = 1 - e^{-V},  S(Z) = e^{-V} S,
///         L1(Z) = e^{-V} (L1 - π^2/32 S^2),
///         N0(Z) = e^{-V} (N0 - L1 S / (4π) + π/384 S^3)
/// ```
///
/// with the densities of `X` on the right. Compare
/// [`boolean_density_formula`] with the skeleton family, which evaluates the
/// rotation averages of the mixed terms directly.
pub fn skeleton_density_report(d: usize, q: &GrainDistribution, gamma: f64) -> Result<SkeletonReport> {
    if !(d == 2 || d == 3) {
        return Err(Error::UnsupportedDimension(d));
    }
    if q.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: q.d,
        });
    }
    let f = Family::skeleton(d)?;
    let x: Vec<f64> = (0..=d)
        .map(|j| Ok(gamma * q.mean(|s| s.phi(&f, j))?))
        .collect::<Result<_>>()?;
    let e = (-x[d]).exp();
    let (names, z) = if d == 2 {
        (
            vec!["N0", "L", "A"],
            vec![e * (x[0] - x[1].powi(2) / (4.0 * PI)), e * x[1], 1.0 - e],
        )
    } else {
        (
            vec!["N0", "L1", "S", "V"],
            vec![
                e * (x[0] - x[1] * x[2] / (4.0 * PI) + PI / 384.0 * x[2].powi(3)),
                e * (x[1] - PI * PI / 32.0 * x[2].powi(2)),
                e * x[2],
                1.0 - e,
            ],
        )
    };
    Ok(SkeletonReport {
        d,
        gamma,
        names,
        x,
        z,
    })
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn unit_rule(order: usize) -> Vec<(f64, f64)> {
    let n = std::num::NonZeroUsize::new(order.max(1)).unwrap();
    GaussLegendre::new(n)
        .iter()
        .map(|&(x, w)| ((x + 1.0) / 2.0, w / 2.0))
        .collect()
}

fn integrate_triangle(a: Vec3, b: Vec3, c: Vec3, rule: &[(f64, f64)], g: &dyn Fn(&Vec3) -> f64) -> f64 {
    let area2 = (b - a).cross(&(c - a)).norm();
    let mut s = 0.0;
    for &(u, wu) in rule {
        for &(v, wv) in rule {
            let p = a + (b - a) * u + (c - b) * (u * v);
            s += wu * wv * u * g(&p);
        }
    }
    s * area2
}

fn integrate_tetra(
    a: Vec3,
    b: Vec3,
    c: Vec3,
    dd: Vec3,
    rule: &[(f64, f64)],
    g: &dyn Fn(&Vec3) -> f64,
) -> f64 {
    let vol6 = (b - a).cross(&(c - a)).dot(&(dd - a)).abs();
    let mut s = 0.0;
    for &(u, wu) in rule {
        for &(v, wv) in rule {
            for &(t, wt) in rule {
                let p = a + (b - a) * u + (c - b) * (u * v) + (dd - c) * (u * v * t);
                s += wu * wv * wt * u * u * v * g(&p);
            }
        }
    }
    s * vol6
}

/// Vertices of a 2-face in cyclic order.
fn ring(face: &FaceRef<'_>) -> Vec<Vec3> {
    let c = face.centroid();
    let b = face.basis();
    let mut vs: Vec<Vec3> = face.vertices().collect();
    vs.sort_by(|p, q| {
        let ap = (p - c).dot(&b[1]).atan2((p - c).dot(&b[0]));
        let aq = (q - c).dot(&b[1]).atan2((q - c).dot(&b[0]));
        ap.total_cmp(&aq)
    });
    vs
}

/// `∫_F g dλ_F` by product Gauss rules on a triangulation of `F`.
pub fn integrate_face(face: &FaceRef<'_>, order: usize, g: &dyn Fn(&Vec3) -> f64) -> f64 {
    let rule = unit_rule(order);
    match face.dim() {
        0 => g(&face.vertices().next().unwrap()),
        1 => {
            let mut it = face.vertices();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            let len = (b - a).norm();
            rule.iter().map(|&(t, w)| w * g(&(a + (b - a) * t))).sum::<f64>() * len
        }
        2 => {
            let r = ring(face);
            (1..r.len() - 1)
                .map(|i| integrate_triangle(r[0], r[i], r[i + 1], &rule, g))
                .sum()
        }
        _ => {
            let p = face.parent;
            let apex = p.centroid_of_vertices();
            let mut s = 0.0;
            for facet in p.faces(2).unwrap_or_default() {
                let r = ring(&facet);
                for i in 1..r.len() - 1 {
                    s += integrate_tetra(apex, r[0], r[i], r[i + 1], &rule, g);
                }
            }
            s
        }
    }
}

/// Spatial density of the mixed functionals for an inhomogeneous process:
/// `Σ_{F_1..F_k} f_j(n(..)) [F_1..F_k] Π_i ∫_{F_i} η(z_i - x) dλ_{F_i}(x)`,
/// averaged over the grain mixture, for `k = m.len() ∈ {1, 2}`.
#[allow(clippy::too_many_arguments)]
pub fn density_field(
    f: &Family,
    j: usize,
    m: &[usize],
    q: &GrainDistribution,
    eta: &Intensity,
    z: &[Vec3],
    order: usize,
    rot: &RotationAverage,
) -> Result<AnalyticValue> {
    check_family(f, q)?;
    let k = m.len();
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidArgument(format!(
            "density fields are evaluated for one or two factors, got {k}"
        )));
    }
    if z.len() != k {
        return Err(Error::InvalidArgument(format!(
            "{k} factors but {} locations",
            z.len()
        )));
    }
    let valid = if k == 1 {
        m[0] == j
    } else {
        check_index(m, f.d).ok() == Some(j)
    };
    if !valid {
        return Err(Error::IndexConstraint {
            dims: m.to_vec(),
            d: f.d,
        });
    }
    let weight = |i: usize, face: &FaceRef<'_>| integrate_face(face, order, &|x| eta.at(&(z[i] - x)));
    rotation_mean(q, k, rot, |ps| {
        if k == 2 {
            return mixed_sum(f, j, ps, m, &weight);
        }
        let p = ps[0];
        if j == f.d {
            return Ok(f.c_d * weight(0, &p.whole()));
        }
        let mut s = 0.0;
        for face in p.faces(j)? {
            s += face_weight(f, &face)? * weight(0, &face);
        }
        Ok(s)
    })
}
