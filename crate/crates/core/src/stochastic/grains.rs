use nalgebra::Matrix3;
use rand::{Rng, RngExt};

use crate::functionals::{phi_homogeneous, Family};
use crate::geom::{Polytope, Vec3};
use crate::gp_union::{gp_phi_degree, GpUnion};
use crate::{Error, Result};

/// A grain shape: a convex polytope or a GP-union of polytopes.
#[derive(Debug, Clone)]
pub enum Shape {
    Convex(Polytope),
    Union(GpUnion),
}

impl Shape {
    /// Reads a polytope or `part`-block union file.
    pub fn from_parts(mut parts: Vec<Polytope>) -> Result<Shape> {
        if parts.len() == 1 {
            return Ok(Shape::Convex(parts.pop().unwrap()));
        }
        let (u, cert) = GpUnion::new(parts)?;
        if !cert.passed {
            return Err(Error::CertificationFailed(format!("{:?}", cert.violation)));
        }
        Ok(Shape::Union(u))
    }

    pub fn parts(&self) -> &[Polytope] {
        match self {
            Shape::Convex(p) => std::slice::from_ref(p),
            Shape::Union(u) => &u.parts,
        }
    }

    pub fn dim(&self) -> usize {
        self.parts()[0].dim()
    }

    fn map(&self, g: impl Fn(&Polytope) -> Polytope) -> Shape {
        match self {
            Shape::Convex(p) => Shape::Convex(g(p)),
            Shape::Union(u) => Shape::Union(GpUnion {
                parts: u.parts.iter().map(g).collect(),
                ..u.clone()
            }),
        }
    }

    /// `ϑ S + x`.
    pub fn place(&self, rot: &Matrix3<f64>, x: &Vec3) -> Shape {
        self.map(|p| p.rotate(rot).translate(x))
    }

    pub fn translate(&self, x: &Vec3) -> Shape {
        self.map(|p| p.translate(x))
    }

    /// `φ^(j)` of the shape, GP-extended for unions.
    pub fn phi(&self, f: &Family, j: usize) -> Result<f64> {
        match self {
            Shape::Convex(p) => phi_homogeneous(f, j, p),
            Shape::Union(u) => gp_phi_degree(f, j, u),
        }
    }

    /// Volume of the shape.
    pub fn volume(&self) -> Result<f64> {
        match self {
            Shape::Convex(p) => Ok(p.volume()),
            Shape::Union(u) => u.volume(),
        }
    }

    /// Signed inclusion-exclusion pieces `((-1)^{|S|-1}, P_S)`.
    pub fn signed_pieces(&self) -> Result<Vec<(f64, Polytope)>> {
        match self {
            Shape::Convex(p) => Ok(vec![(1.0, p.clone())]),
            Shape::Union(u) => crate::gp_union::signed_pieces(u),
        }
    }

    /// Smallest ball containing all vertices.
    pub fn circumball(&self) -> (Vec3, f64) {
        let pts: Vec<Vec3> = self
            .parts()
            .iter()
            .flat_map(|p| p.vertices().iter().copied())
            .collect();
        min_ball(&pts)
    }
}

fn ball_of(r: &[Vec3]) -> (Vec3, f64) {
    match r.len() {
        0 => (Vec3::zeros(), -1.0),
        1 => (r[0], 0.0),
        2 => {
            let c = (r[0] + r[1]) / 2.0;
            (c, (r[0] - c).norm())
        }
        3 => {
            let a = r[1] - r[0];
            let b = r[2] - r[0];
            let n = a.cross(&b);
            let nn = n.norm_squared();
            if nn < 1e-24 {
                return farthest_pair(r);
            }
            let off = (b * a.norm_squared() - a * b.norm_squared()).cross(&n) / (2.0 * nn);
            (r[0] + off, off.norm())
        }
        _ => {
            let m = Matrix3::from_rows(&[
                (r[1] - r[0]).transpose(),
                (r[2] - r[0]).transpose(),
                (r[3] - r[0]).transpose(),
            ]);
            let rhs = Vec3::new(
                (r[1] - r[0]).norm_squared(),
                (r[2] - r[0]).norm_squared(),
                (r[3] - r[0]).norm_squared(),
            ) / 2.0;
            match m.lu().solve(&rhs) {
                Some(off) if off.iter().all(|x| x.is_finite()) => (r[0] + off, off.norm()),
                _ => farthest_pair(r),
            }
        }
    }
}

fn farthest_pair(r: &[Vec3]) -> (Vec3, f64) {
    let mut best = (r[0], 0.0);
    for a in r {
        for b in r {
            let c = (a + b) / 2.0;
            let rad = (a - c).norm();
            if rad > best.1 {
                best = (c, rad);
            }
        }
    }
    best
}

/// Welzl's recursion on the prefix `p[..n]` with boundary set `r`.
fn welzl(p: &[Vec3], n: usize, r: &mut Vec<Vec3>) -> (Vec3, f64) {
    if n == 0 || r.len() == 4 {
        return ball_of(r);
    }
    let q = p[n - 1];
    let (c, rad) = welzl(p, n - 1, r);
    if rad >= 0.0 && (q - c).norm() <= rad * (1.0 + 1e-12) + 1e-12 {
        return (c, rad);
    }
    r.push(q);
    let out = welzl(p, n - 1, r);
    r.pop();
    out
}

/// Minimal enclosing ball of a point set.
pub fn min_ball(points: &[Vec3]) -> (Vec3, f64) {
    let (c, r) = welzl(points, points.len(), &mut Vec::with_capacity(4));
    (c, r.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMode {
    Fixed,
    Isotropic,
}

/// Finite mixture of grain shapes, each stored with circumcenter at the
/// origin.
#[derive(Debug, Clone)]
pub struct GrainDistribution {
    pub d: usize,
    pub shapes: Vec<(Shape, f64)>,
    pub rotation: RotationMode,
    radii: Vec<f64>,
}

impl GrainDistribution {
    pub fn new(shapes: Vec<(Shape, f64)>, rotation: RotationMode) -> Result<GrainDistribution> {
        let Some(d) = shapes.first().map(|s| s.0.dim()) else {
            return Err(Error::InvalidArgument("no grain shapes".into()));
        };
        let total: f64 = shapes.iter().map(|s| s.1).sum();
        if shapes.iter().any(|s| !(s.1 >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "grain weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        let mut out = Vec::with_capacity(shapes.len());
        let mut radii = Vec::with_capacity(shapes.len());
        for (s, w) in shapes {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
            if s.parts().iter().any(|p| !p.is_full_dimensional()) {
                return Err(Error::InvalidArgument(
                    "grain shapes must be full-dimensional".into(),
                ));
            }
            let (c, r) = s.circumball();
            out.push((s.translate(&-c), w));
            radii.push(r);
        }
        Ok(GrainDistribution {
            d,
            shapes: out,
            rotation,
            radii,
        })
    }

    /// A single shape.
    pub fn single(shape: Shape, rotation: RotationMode) -> Result<GrainDistribution> {
        GrainDistribution::new(vec![(shape, 1.0)], rotation)
    }

    /// Circumradius of shape `i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    /// Largest circumradius over the mixture.
    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ w_s g(S_s)`.
    pub fn mean<G: Fn(&Shape) -> Result<f64>>(&self, g: G) -> Result<f64> {
        let mut s = 0.0;
        for (shape, w) in &self.shapes {
            if *w > 0.0 {
                s += w * g(shape)?;
            }
        }
        Ok(s)
    }

    pub(crate) fn rotation_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix3<f64> {
        match self.rotation {
            RotationMode::Fixed => Matrix3::identity(),
            RotationMode::Isotropic => crate::rotation::random_rotation(self.d, rng),
        }
    }
}

pub(crate) fn uniform_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec3 {
    loop {
        let mut v = Vec3::zeros();
        for i in 0..d {
            v[i] = rng.random_range(-1.0..1.0);
        }
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}
