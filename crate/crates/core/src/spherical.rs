//! Polyhedral cones in `R^2` and `R^3`, their unit-sphere sections, spherical
//! measures and first moments.

use std::f64::consts::PI;

use crate::geom::{complement, hull_2d, orthonormal_basis, FaceRef, Vec3};
use crate::{Error, Result};

const EPS_CONE: f64 = 1e-9;

/// Closed polyhedral cone `lin + cone(rays)` with `rays` orthogonal to the
/// lineality space `lin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    pub d: usize,
    /// Orthonormal basis of the lineality space.
    pub lineality: Vec<Vec3>,
    /// Unit extreme rays of the pointed part. Three-dimensional pointed
    /// cones list them counter-clockwise seen from outside.
    pub rays: Vec<Vec3>,
    /// Unit normals `a` of supporting halfspaces `<a, u> <= 0`.
    pub supporting: Vec<Vec3>,
    /// Dimension of the linear hull.
    pub lin_dim: usize,
    /// A unit vector in the relative interior of the pointed part, or zero.
    interior: Vec3,
}

/// Shape of a sphere section, parametrised for integration.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    /// Finite point set on `S^0`-type sections.
    Points(Vec<Vec3>),
    /// `cos t * start + sin t * perp` for `t` in `[0, angle]`.
    Arc { start: Vec3, perp: Vec3, angle: f64 },
    /// Convex spherical polygon, vertices counter-clockwise seen from outside.
    Polygon(Vec<Vec3>),
    /// `{cos a * w(t) + sin a * axis}` with `w(t) = cos t * start + sin t *
    /// perp`, `t` in `[0, angle]`, `a` in `[-pi/2, pi/2]`.
    Lune {
        axis: Vec3,
        start: Vec3,
        perp: Vec3,
        angle: f64,
    },
    /// The whole of `S^2`.
    Sphere,
}

/// Intersection of a cone with the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPolytope {
    pub cone: Cone,
    pub sph_dim: usize,
    pub section: Section,
}

fn dedup_units(vs: Vec<Vec3>) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(vs.len());
    for v in vs {
        if !out.iter().any(|w| (v - w).amax() < 1e-9) {
            out.push(v);
        }
    }
    out
}

fn push_unit(out: &mut Vec<Vec3>, v: Vec3) {
    let n = v.norm();
    if n > 1e-9 {
        out.push(v / n);
        out.push(-v / n);
    }
}

impl Cone {
    /// `lin(lineality) + cone(generators)` in `R^d`; `generators` need not be
    /// extreme or orthogonal to `lineality`.
    pub fn new(d: usize, generators: &[Vec3], lineality: &[Vec3]) -> Result<Cone> {
        crate::geom::check_dim(d)?;
        let mut vs: Vec<Vec3> = Vec::new();
        for g in generators {
            let n = g.norm();
            if n > 1e-12 {
                vs.push(g / n);
            }
        }
        for l in lineality {
            let n = l.norm();
            if n > 1e-12 {
                vs.push(l / n);
                vs.push(-l / n);
            }
        }
        if vs.is_empty() {
            return Ok(Cone::zero(d));
        }
        let span = orthonormal_basis(vs.iter().copied(), EPS_CONE);
        let comp = complement(&span, d);

        // Candidate extreme rays of the polar cone.
        let mut cand = Vec::new();
        for n in &comp {
            push_unit(&mut cand, *n);
        }
        for (i, v) in vs.iter().enumerate() {
            push_unit(&mut cand, *v);
            if d == 2 {
                push_unit(&mut cand, Vec3::new(-v.y, v.x, 0.0));
            } else {
                for w in &vs[i + 1..] {
                    push_unit(&mut cand, v.cross(w));
                }
                for n in &comp {
                    push_unit(&mut cand, n.cross(v));
                }
            }
        }
        let polar: Vec<Vec3> = dedup_units(
            cand.into_iter()
                .filter(|a| vs.iter().all(|v| a.dot(v) <= EPS_CONE))
                .collect(),
        );
        let polar_span = orthonormal_basis(polar.iter().copied(), EPS_CONE);
        let lin = complement(&polar_span, d);
        let project = |v: &Vec3| {
            let mut r = *v;
            for e in &lin {
                r -= e * e.dot(v);
            }
            r
        };
        let proj: Vec<Vec3> = vs
            .iter()
            .map(project)
            .filter(|p| p.norm() > EPS_CONE)
            .map(|p| p.normalize())
            .collect();
        let w_basis = orthonormal_basis(proj.iter().copied(), EPS_CONE);
        let w = w_basis.len();
        let lin_dim = lin.len() + w;

        let mut interior = Vec3::zeros();
        if w > 0 {
            for a in &polar {
                let mut pa = Vec3::zeros();
                for b in &w_basis {
                    pa += b * b.dot(a);
                }
                interior -= pa;
            }
            if interior.norm() < 1e-9 {
                interior = proj.iter().sum();
            }
            interior = interior.normalize();
        }
        let rays = match w {
            0 => vec![],
            1 => vec![interior],
            2 => {
                let c = interior;
                let cp = w_basis
                    .iter()
                    .map(|b| b - c * c.dot(b))
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .unwrap()
                    .normalize();
                let ang = |g: &Vec3| g.dot(&cp).atan2(g.dot(&c));
                let lo = proj.iter().min_by(|a, b| ang(a).total_cmp(&ang(b))).unwrap();
                let hi = proj.iter().max_by(|a, b| ang(a).total_cmp(&ang(b))).unwrap();
                if (ang(hi) - ang(lo)).abs() < 1e-12 {
                    vec![*lo]
                } else {
                    vec![*lo, *hi]
                }
            }
            _ => {
                let c = interior;
                let seed = if c.x.abs() < 0.6 { Vec3::x() } else { Vec3::y() };
                let u = (seed - c * c.dot(&seed)).normalize();
                let v = c.cross(&u);
                let coords: Vec<(f64, f64)> = proj
                    .iter()
                    .map(|g| {
                        let s = g / g.dot(&c);
                        (s.dot(&u), s.dot(&v))
                    })
                    .collect();
                hull_2d(&coords, 1e-12).into_iter().map(|i| proj[i]).collect()
            }
        };
        Ok(Cone {
            d,
            lineality: lin,
            rays,
            supporting: polar,
            lin_dim,
            interior,
        })
    }

    /// The cone `{0}`.
    pub fn zero(d: usize) -> Cone {
        Cone {
            d,
            lineality: vec![],
            rays: vec![],
            supporting: vec![],
            lin_dim: 0,
            interior: Vec3::zeros(),
        }
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn generators(&self) -> Vec<Vec3> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(*l);
            g.push(-*l);
        }
        g
    }

    /// Whether `u` lies in the cone.
    pub fn contains(&self, u: &Vec3) -> bool {
        let s = u.norm().max(1.0);
        self.supporting.iter().all(|a| a.dot(u) <= 1e-9 * s)
    }

    /// Key identifying the cone up to rounding, for caches.
    pub fn key(&self) -> Vec<i64> {
        let r = |x: f64| (x * 1e12).round() as i64;
        let mut rays: Vec<[i64; 3]> = self.rays.iter().map(|v| [r(v.x), r(v.y), r(v.z)]).collect();
        rays.sort_unstable();
        let mut key = vec![self.d as i64, self.lin_dim as i64, self.lineality.len() as i64];
        for v in rays {
            key.extend_from_slice(&v);
        }
        // The lineality projector is basis independent.
        for a in 0..3 {
            for b in a..3 {
                let p: f64 = self.lineality.iter().map(|e| e[a] * e[b]).sum();
                key.push(r(p));
            }
        }
        key
    }
}

/// `N(P, F)`: the cone of outer normals of `P` along the face `F`.
pub fn normal_cone(f: &FaceRef<'_>) -> Result<Cone> {
    let p = f.parent;
    if f.dim() == p.dim() {
        return Err(Error::ImproperFace);
    }
    let gens: Vec<Vec3> = f.facet_ids().iter().map(|&i| p.halfspaces()[i].normal).collect();
    let lin = complement(p.aff_basis(), p.dim());
    Cone::new(p.dim(), &gens, &lin)
}

/// Minkowski sum of two cones; errors when the sum is not pointed.
pub fn cone_sum(a: &Cone, b: &Cone) -> Result<Cone> {
    let c = cone_sum_general(a, b)?;
    if c.is_pointed() {
        Ok(c)
    } else {
        Err(Error::NonPointedCone)
    }
}

/// Minkowski sum allowing a lineality space in the result.
pub fn cone_sum_general(a: &Cone, b: &Cone) -> Result<Cone> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch {
            expected: a.d,
            found: b.d,
        });
    }
    let mut gens = a.generators();
    gens.extend(b.generators());
    Cone::new(a.d, &gens, &[])
}

/// `C ∩ S^{d-1}`. Cones with a lineality space are accepted (their sections
/// are half-circles, lunes, hemispheres or full spheres).
pub fn sphere_section(c: &Cone) -> Result<SphericalPolytope> {
    if c.lin_dim == 0 {
        return Err(Error::ZeroCone);
    }
    let l = c.lineality.len();
    let section = match (c.lin_dim, l) {
        (1, 0) => Section::Points(vec![c.rays[0]]),
        (1, _) => Section::Points(vec![c.lineality[0], -c.lineality[0]]),
        (2, 0) => {
            let (a, b) = (c.rays[0], c.rays[c.rays.len() - 1]);
            let perp = (b - a * a.dot(&b)).normalize();
            Section::Arc {
                start: a,
                perp,
                angle: a.dot(&b).clamp(-1.0, 1.0).acos(),
            }
        }
        (2, 1) => Section::Arc {
            start: c.lineality[0],
            perp: c.rays[0],
            angle: PI,
        },
        (2, _) => Section::Arc {
            start: c.lineality[0],
            perp: c.lineality[1],
            angle: 2.0 * PI,
        },
        (3, 0) => Section::Polygon(c.rays.clone()),
        (3, 1) => {
            let (a, b) = (c.rays[0], c.rays[c.rays.len() - 1]);
            let (start, perp, angle) = if c.rays.len() == 1 {
                (a, c.lineality[0].cross(&a), 0.0)
            } else {
                (
                    a,
                    (b - a * a.dot(&b)).normalize(),
                    a.dot(&b).clamp(-1.0, 1.0).acos(),
                )
            };
            Section::Lune {
                axis: c.lineality[0],
                start,
                perp,
                angle,
            }
        }
        (3, 2) => Section::Lune {
            axis: c.lineality[0],
            start: c.lineality[1],
            perp: c.rays[0],
            angle: PI,
        },
        _ => Section::Sphere,
    };
    Ok(SphericalPolytope {
        cone: c.clone(),
        sph_dim: c.lin_dim - 1,
        section,
    })
}

/// Interior angle of a convex spherical polygon at `b` between `a` and `c`.
fn vertex_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let ta = (a - b * b.dot(a)).normalize();
    let tc = (c - b * b.dot(c)).normalize();
    ta.dot(&tc).clamp(-1.0, 1.0).acos()
}

/// Area of a convex spherical polygon by the angle excess.
pub fn polygon_area(vs: &[Vec3]) -> f64 {
    let n = vs.len();
    if n < 3 {
        return 0.0;
    }
    let s: f64 = (0..n)
        .map(|i| vertex_angle(&vs[(i + n - 1) % n], &vs[i], &vs[(i + 1) % n]))
        .sum();
    (s - (n as f64 - 2.0) * PI).max(0.0)
}

/// Spherical Lebesgue measure; points carry unit mass.
pub fn spherical_measure(p: &SphericalPolytope) -> Result<f64> {
    if p.sph_dim > 2 {
        return Err(Error::SphericalDimension(p.sph_dim));
    }
    Ok(match &p.section {
        Section::Points(v) => v.len() as f64,
        Section::Arc { angle, .. } => *angle,
        Section::Polygon(v) => polygon_area(v),
        Section::Lune { angle, .. } => 2.0 * angle,
        Section::Sphere => 4.0 * PI,
    })
}

/// Total measure of the unit sphere `S^k`, `k <= 2`.
pub fn sphere_total(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Spherical measure normalised by that of the whole sphere of equal
/// dimension.
pub fn external_angle(p: &SphericalPolytope) -> Result<f64> {
    Ok(spherical_measure(p)? / sphere_total(p.sph_dim))
}

/// `∫_p u dω(u)`.
pub fn first_moment(p: &SphericalPolytope) -> Result<Vec3> {
    if p.sph_dim > 2 {
        return Err(Error::SphericalDimension(p.sph_dim));
    }
    Ok(match &p.section {
        Section::Points(v) => v.iter().sum(),
        Section::Arc { start, perp, angle } => start * angle.sin() + perp * (1.0 - angle.cos()),
        Section::Polygon(v) => {
            let n = v.len();
            let mut m = Vec3::zeros();
            for i in 0..n {
                let a = v[i];
                let b = v[(i + 1) % n];
                let c = a.cross(&b);
                let s = c.norm();
                if s > 0.0 {
                    m += c / s * s.atan2(a.dot(&b));
                }
            }
            m * 0.5
        }
        Section::Lune {
            start, perp, angle, ..
        } => (start * angle.sin() + perp * (1.0 - angle.cos())) * (PI / 2.0),
        Section::Sphere => Vec3::zeros(),
    })
}

/// `∫_p <u, x0> dω(u)`.
pub fn linear_moment(p: &SphericalPolytope, x0: &Vec3) -> Result<f64> {
    Ok(first_moment(p)?.dot(x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polytope;

    fn e(i: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        v[i] = 1.0;
        v
    }

    /// Van Oosterom-Strackee fan triangulation, an independent area route.
    fn fan_area(vs: &[Vec3]) -> f64 {
        let c = vs.iter().sum::<Vec3>().normalize();
        let n = vs.len();
        (0..n)
            .map(|i| {
                let (a, b) = (vs[i], vs[(i + 1) % n]);
                let num = c.dot(&a.cross(&b)).abs();
                let den = 1.0 + c.dot(&a) + a.dot(&b) + b.dot(&c);
                2.0 * num.atan2(den)
            })
            .sum()
    }

    #[test]
    fn square_vertex_cone() {
        let s = Polytope::unit_cube(2).unwrap();
        let v = s
            .faces(0)
            .unwrap()
            .into_iter()
            .find(|f| f.centroid() == Vec3::zeros())
            .unwrap();
        let c = normal_cone(&v).unwrap();
        assert_eq!(c.lin_dim, 2);
        assert_eq!(c.rays.len(), 2);
        assert!(c.rays.iter().any(|r| (r + e(0)).norm() < 1e-12));
        assert!(c.rays.iter().any(|r| (r + e(1)).norm() < 1e-12));
        let p = sphere_section(&c).unwrap();
        assert!((spherical_measure(&p).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((external_angle(&p).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn edge_cone_is_ray() {
        let s = Polytope::unit_cube(2).unwrap();
        let bottom = s
            .faces(1)
            .unwrap()
            .into_iter()
            .find(|f| f.vertices().all(|v| v.y == 0.0))
            .unwrap();
        let c = normal_cone(&bottom).unwrap();
        assert_eq!(c.rays, vec![-e(1)]);
        let p = sphere_section(&c).unwrap();
        assert_eq!(p.sph_dim, 0);
        assert_eq!(spherical_measure(&p).unwrap(), 1.0);
        assert_eq!(external_angle(&p).unwrap(), 0.5);
    }

    #[test]
    fn cube_vertex_is_octant() {
        let c = Polytope::unit_cube(3).unwrap();
        let v = c
            .faces(0)
            .unwrap()
            .into_iter()
            .find(|f| f.centroid() == Vec3::zeros())
            .unwrap();
        let k = normal_cone(&v).unwrap();
        assert_eq!(k.rays.len(), 3);
        let p = sphere_section(&k).unwrap();
        assert!((spherical_measure(&p).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((external_angle(&p).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn improper_face_rejected() {
        let s = Polytope::unit_cube(2).unwrap();
        assert_eq!(normal_cone(&s.whole()).unwrap_err(), Error::ImproperFace);
    }

    #[test]
    fn cone_sums() {
        let a = Cone::new(2, &[-e(1)], &[]).unwrap();
        let b = Cone::new(2, &[-e(0)], &[]).unwrap();
        let s = sphere_section(&cone_sum(&a, &b).unwrap()).unwrap();
        assert!((spherical_measure(&s).unwrap() - PI / 2.0).abs() < 1e-12);
        let u = Cone::new(2, &[e(0)], &[]).unwrap();
        let v = Cone::new(2, &[-e(0)], &[]).unwrap();
        assert_eq!(cone_sum(&u, &v).unwrap_err(), Error::NonPointedCone);
        let z = Cone::zero(2);
        assert_eq!(cone_sum(&a, &z).unwrap().rays, a.rays);
        assert_eq!(sphere_section(&z).unwrap_err(), Error::ZeroCone);
    }

    #[test]
    fn lineality_sections() {
        let half = Cone::new(2, &[e(1)], &[e(0)]).unwrap();
        let s = sphere_section(&half).unwrap();
        assert!((spherical_measure(&s).unwrap() - PI).abs() < 1e-12);
        let line = Cone::new(2, &[e(0), -e(0)], &[]).unwrap();
        assert_eq!(line.lineality.len(), 1);
        assert_eq!(spherical_measure(&sphere_section(&line).unwrap()).unwrap(), 2.0);
        let lune = Cone::new(3, &[e(0), e(1)], &[e(2)]).unwrap();
        let s = sphere_section(&lune).unwrap();
        assert!((spherical_measure(&s).unwrap() - PI).abs() < 1e-12);
        let whole = Cone::new(3, &[e(0), e(1), e(2), -e(0) - e(1) - e(2)], &[]).unwrap();
        assert_eq!(whole.lineality.len(), 3);
        let s = sphere_section(&whole).unwrap();
        assert!((spherical_measure(&s).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn redundant_generators_dropped() {
        let c = Cone::new(3, &[e(0), e(1), e(2), Vec3::new(1.0, 1.0, 1.0)], &[]).unwrap();
        assert_eq!(c.rays.len(), 3);
        let c = Cone::new(2, &[e(0), e(1), Vec3::new(1.0, 1.0, 0.0)], &[]).unwrap();
        assert_eq!(c.rays.len(), 2);
    }

    #[test]
    fn polygon_area_matches_fan() {
        let vs: Vec<Vec3> = [
            Vec3::new(1.0, 0.2, 0.3),
            Vec3::new(0.1, 1.0, 0.4),
            Vec3::new(-0.2, 0.3, 1.0),
            Vec3::new(0.5, -0.3, 1.0),
        ]
        .iter()
        .map(|v| v.normalize())
        .collect();
        let c = Cone::new(3, &vs, &[]).unwrap();
        let s = sphere_section(&c).unwrap();
        let Section::Polygon(rays) = &s.section else {
            panic!()
        };
        let a = spherical_measure(&s).unwrap();
        assert!((a - fan_area(rays)).abs() < 1e-12);
    }

    /// First moment by recursive midpoint subdivision with Richardson
    /// extrapolation between two refinement levels.
    fn quadrature_moment(vs: &[Vec3]) -> Vec3 {
        fn tri(a: Vec3, b: Vec3, c: Vec3, depth: u32) -> Vec3 {
            if depth == 0 {
                let num = a.dot(&b.cross(&c)).abs();
                let den = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
                return (a + b + c).normalize() * 2.0 * num.atan2(den);
            }
            let ab = (a + b).normalize();
            let bc = (b + c).normalize();
            let ca = (c + a).normalize();
            tri(a, ab, ca, depth - 1)
                + tri(ab, b, bc, depth - 1)
                + tri(ca, bc, c, depth - 1)
                + tri(ab, bc, ca, depth - 1)
        }
        let level = |depth| {
            let n = vs.len();
            (1..n - 1)
                .map(|i| tri(vs[0], vs[i], vs[i + 1], depth))
                .sum::<Vec3>()
        };
        (level(7) * 4.0 - level(6)) / 3.0
    }

    #[test]
    fn polygon_moment_matches_quadrature() {
        let vs: Vec<Vec3> = [
            Vec3::new(1.0, 0.2, 0.3),
            Vec3::new(0.1, 1.0, 0.4),
            Vec3::new(-0.2, 0.3, 1.0),
            Vec3::new(0.5, -0.3, 1.0),
        ]
        .iter()
        .map(|v| v.normalize())
        .collect();
        let s = sphere_section(&Cone::new(3, &vs, &[]).unwrap()).unwrap();
        let Section::Polygon(rays) = &s.section else {
            panic!()
        };
        let exact = first_moment(&s).unwrap();
        let q = quadrature_moment(rays);
        assert!((exact - q).norm() <= 1e-7 * q.norm(), "{exact} vs {q}");
        let oct = sphere_section(&Cone::new(3, &[e(0), e(1), e(2)], &[]).unwrap()).unwrap();
        // Each coordinate of the octant moment is pi/4.
        assert!((first_moment(&oct).unwrap() - Vec3::repeat(PI / 4.0)).norm() < 1e-12);
    }

    #[test]
    fn lune_moment_matches_polygon_split() {
        // The lune between e0 and e1 around e2 is two octant triangles.
        let lune = sphere_section(&Cone::new(3, &[e(0), e(1)], &[e(2)]).unwrap()).unwrap();
        let up = sphere_section(&Cone::new(3, &[e(0), e(1), e(2)], &[]).unwrap()).unwrap();
        let down = sphere_section(&Cone::new(3, &[e(0), e(1), -e(2)], &[]).unwrap()).unwrap();
        let sum = first_moment(&up).unwrap() + first_moment(&down).unwrap();
        assert!((first_moment(&lune).unwrap() - sum).norm() < 1e-12);
    }

    #[test]
    fn moments() {
        let p = sphere_section(&Cone::new(2, &[-e(0)], &[]).unwrap()).unwrap();
        assert!((linear_moment(&p, &Vec3::new(0.1, 0.0, 0.0)).unwrap() + 0.1).abs() < 1e-15);
        let circle = sphere_section(&Cone::new(2, &[], &[e(0), e(1)]).unwrap()).unwrap();
        assert!(linear_moment(&circle, &Vec3::new(0.3, -0.7, 0.0)).unwrap().abs() < 1e-15);
        let quarter = sphere_section(&Cone::new(2, &[e(0), e(1)], &[]).unwrap()).unwrap();
        assert!((linear_moment(&quarter, &e(0)).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(linear_moment(&quarter, &Vec3::zeros()).unwrap(), 0.0);
    }
}
