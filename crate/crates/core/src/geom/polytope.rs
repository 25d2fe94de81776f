use nalgebra::Matrix3;
use smallvec::SmallVec;

use super::{check_dim, hull, Vec3, EPS_GEOM};
use crate::{Error, Result};

/// Closed halfspace `{x : <normal, x> <= offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    pub normal: Vec3,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec3, offset: f64) -> Self {
        let n = normal.norm();
        Halfspace {
            normal: normal / n,
            offset: offset / n,
        }
    }

    /// Signed distance, positive outside.
    pub fn excess(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.excess(p) <= tol
    }
}

pub type Ids = SmallVec<[usize; 4]>;
pub type Basis = SmallVec<[Vec3; 3]>;

/// One face of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Vertex indices. Two-faces keep them in cyclic order, counter-clockwise
    /// seen from the outward normal; other faces keep them sorted.
    pub vertex_ids: Ids,
    /// Relative facets of the parent containing this face.
    pub facet_ids: Ids,
    /// Orthonormal basis of the direction space.
    pub basis: Basis,
}

/// Convex polytope in `R^2` or `R^3`, possibly lower-dimensional.
///
/// `facets` are the relative facets: halfspaces whose normals lie in the
/// direction space of the affine hull. For a full-dimensional polytope they
/// form its irredundant H-description.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub(crate) dim: usize,
    pub(crate) vertices: Vec<Vec3>,
    pub(crate) facets: Vec<Halfspace>,
    pub(crate) aff_basis: Basis,
    pub(crate) faces: Vec<Vec<Face>>,
}

/// Borrowed handle to a face of a polytope.
#[derive(Debug, Clone, Copy)]
pub struct FaceRef<'a> {
    pub parent: &'a Polytope,
    pub j: usize,
    pub index: usize,
}

impl Polytope {
    /// Convex hull of `points` in `R^d`. Points closer than the geometric
    /// tolerance are merged. Planar input in `d = 2` must have `z = 0`.
    pub fn from_points(points: &[Vec3], d: usize) -> Result<Self> {
        check_dim(d)?;
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite);
        }
        hull::build(points, d, None)
    }

    /// Convenience constructor from coordinate slices of length `d`.
    pub fn from_coords(coords: &[Vec<f64>], d: usize) -> Result<Self> {
        check_dim(d)?;
        let mut pts = Vec::with_capacity(coords.len());
        for c in coords {
            if c.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.len(),
                });
            }
            let mut p = Vec3::zeros();
            for (i, x) in c.iter().enumerate() {
                p[i] = *x;
            }
            pts.push(p);
        }
        Self::from_points(&pts, d)
    }

    /// The box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let d = lo.len();
        check_dim(d)?;
        if hi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: hi.len(),
            });
        }
        let mut pts = Vec::new();
        for mask in 0..(1usize << d) {
            let mut p = Vec3::zeros();
            for i in 0..d {
                p[i] = if mask >> i & 1 == 1 { hi[i] } else { lo[i] };
            }
            pts.push(p);
        }
        Self::from_points(&pts, d)
    }

    /// `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Result<Self> {
        Self::cuboid(&vec![0.0; d], &vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull.
    pub fn aff_dim(&self) -> usize {
        self.aff_basis.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.aff_dim() == self.dim
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Orthonormal basis of the direction space of the affine hull.
    pub fn aff_basis(&self) -> &[Vec3] {
        &self.aff_basis
    }

    pub fn face_count(&self, j: usize) -> usize {
        self.faces.get(j).map_or(0, Vec::len)
    }

    /// The `j`-faces; empty for `aff_dim < j <= d`.
    pub fn faces(&self, j: usize) -> Result<Vec<FaceRef<'_>>> {
        if j > self.dim {
            return Err(Error::FaceDimension { j, max: self.dim });
        }
        Ok((0..self.face_count(j))
            .map(|index| FaceRef {
                parent: self,
                j,
                index,
            })
            .collect())
    }

    pub(crate) fn face_ref(&self, j: usize, index: usize) -> FaceRef<'_> {
        FaceRef {
            parent: self,
            j,
            index,
        }
    }

    /// The polytope viewed as its own top face.
    pub fn whole(&self) -> FaceRef<'_> {
        self.face_ref(self.aff_dim(), 0)
    }

    /// Lebesgue content in the affine hull.
    pub fn content(&self) -> f64 {
        self.whole().volume()
    }

    /// `d`-dimensional volume; zero for lower-dimensional polytopes.
    pub fn volume(&self) -> f64 {
        if self.is_full_dimensional() {
            self.content()
        } else {
            0.0
        }
    }

    pub fn centroid_of_vertices(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// Componentwise minimum and maximum of the vertices.
    pub fn bbox(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        for i in self.dim..3 {
            lo[i] = 0.0;
            hi[i] = 0.0;
        }
        (lo, hi)
    }

    /// Equality constraints of the affine hull as (normal, offset) pairs.
    pub(crate) fn aff_equalities(&self) -> Vec<(Vec3, f64)> {
        let p0 = self.vertices[0];
        super::complement(&self.aff_basis, self.dim)
            .into_iter()
            .map(|n| (n, n.dot(&p0)))
            .collect()
    }

    /// Full H-description: relative facets plus both sides of every affine
    /// equality.
    pub fn h_description(&self) -> Vec<Halfspace> {
        let mut hs = self.facets.clone();
        for (n, b) in self.aff_equalities() {
            hs.push(Halfspace { normal: n, offset: b });
            hs.push(Halfspace {
                normal: -n,
                offset: -b,
            });
        }
        hs
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.facets.iter().all(|h| h.contains(p, tol))
            && self
                .aff_equalities()
                .iter()
                .all(|(n, b)| (n.dot(p) - b).abs() <= tol)
    }

    pub fn translate(&self, x: &Vec3) -> Polytope {
        let mut x = *x;
        for i in self.dim..3 {
            x[i] = 0.0;
        }
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v += x;
        }
        for h in &mut out.facets {
            h.offset += h.normal.dot(&x);
        }
        out
    }

    pub fn scale(&self, alpha: f64) -> Result<Polytope> {
        if !(alpha >= 0.0) {
            return Err(Error::NegativeScale(alpha));
        }
        if alpha * self.diameter() <= EPS_GEOM {
            return Self::from_points(&[Vec3::zeros()], self.dim);
        }
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v *= alpha;
        }
        for h in &mut out.facets {
            h.offset *= alpha;
        }
        Ok(out)
    }

    /// Image under the linear map `r`, which must be orthogonal. In the plane
    /// only the upper-left 2x2 block is used.
    pub fn rotate(&self, r: &Matrix3<f64>) -> Polytope {
        let mut r = *r;
        if self.dim == 2 {
            r[(0, 2)] = 0.0;
            r[(1, 2)] = 0.0;
            r[(2, 0)] = 0.0;
            r[(2, 1)] = 0.0;
            r[(2, 2)] = 1.0;
        }
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = r * *v;
        }
        for h in &mut out.facets {
            h.normal = r * h.normal;
        }
        out.aff_basis = out.aff_basis.iter().map(|b| r * b).collect();
        for level in &mut out.faces {
            for f in level {
                f.basis = f.basis.iter().map(|b| r * b).collect();
            }
        }
        // A reflection would reverse the cyclic orientation of two-faces.
        if self.dim == 3 && r.determinant() < 0.0 {
            if let Some(level) = out.faces.get_mut(2) {
                for f in level {
                    f.vertex_ids.reverse();
                }
            }
        }
        out
    }

    pub fn diameter(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                m = m.max((a - b).norm());
            }
        }
        m
    }

    /// `P ∩ Q`, or `None` when the intersection is empty.
    pub fn intersect(&self, other: &Polytope) -> Result<Option<Polytope>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (alo, ahi) = self.bbox();
        let (blo, bhi) = other.bbox();
        for i in 0..self.dim {
            if alo[i] > bhi[i] + EPS_GEOM || blo[i] > ahi[i] + EPS_GEOM {
                return Ok(None);
            }
        }
        if self.dim == 2 && self.is_full_dimensional() && other.is_full_dimensional() {
            return hull::intersect_polygons(self, other);
        }
        if self.dim == 3 && self.is_full_dimensional() && other.is_full_dimensional() {
            return hull::intersect_solids(self, other);
        }
        let mut hs = self.h_description();
        hs.extend(other.h_description());
        hull::from_halfspaces(&hs, self.dim)
    }

    /// Intersection with an arbitrary list of closed halfspaces.
    pub fn clip(&self, hs: &[Halfspace]) -> Result<Option<Polytope>> {
        if hs.is_empty() {
            return Ok(Some(self.clone()));
        }
        if self.dim == 2 && self.is_full_dimensional() {
            return hull::clip_polygon(self, hs);
        }
        let mut all = self.h_description();
        all.extend_from_slice(hs);
        hull::from_halfspaces(&all, self.dim)
    }
}

impl<'a> FaceRef<'a> {
    pub fn face(&self) -> &'a Face {
        &self.parent.faces[self.j][self.index]
    }

    pub fn dim(&self) -> usize {
        self.j
    }

    pub fn vertex_ids(&self) -> &'a [usize] {
        &self.face().vertex_ids
    }

    pub fn basis(&self) -> &'a [Vec3] {
        &self.face().basis
    }

    pub fn facet_ids(&self) -> &'a [usize] {
        &self.face().facet_ids
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vec3> + 'a {
        let p = self.parent;
        self.face().vertex_ids.iter().map(move |&i| p.vertices[i])
    }

    /// Average of the vertices, a point of the relative interior.
    pub fn centroid(&self) -> Vec3 {
        let ids = self.vertex_ids();
        self.vertices().sum::<Vec3>() / ids.len() as f64
    }

    /// `j`-dimensional Lebesgue content.
    pub fn volume(&self) -> f64 {
        let v = &self.parent.vertices;
        let ids = self.vertex_ids();
        match self.j {
            0 => 1.0,
            1 => (v[ids[1]] - v[ids[0]]).norm(),
            2 => polygon_area(ids.iter().map(|&i| v[i])),
            _ => solid_volume(self.parent),
        }
    }

    /// Whether `self` is contained in `other` (same parent).
    pub fn is_subface_of(&self, other: &FaceRef<'_>) -> bool {
        self.vertex_ids().iter().all(|i| other.vertex_ids().contains(i))
    }
}

/// Area of a planar polygon given in cyclic order.
pub(crate) fn polygon_area<I: IntoIterator<Item = Vec3>>(pts: I) -> f64 {
    let pts: Vec<Vec3> = pts.into_iter().collect();
    if pts.len() < 3 {
        return 0.0;
    }
    let o = pts[0];
    let mut s = Vec3::zeros();
    for w in pts[1..].windows(2) {
        s += (w[0] - o).cross(&(w[1] - o));
    }
    0.5 * s.norm()
}

fn solid_volume(p: &Polytope) -> f64 {
    let c = p.centroid_of_vertices();
    let mut vol = 0.0;
    for (f, h) in p.faces[2].iter().zip(&p.facets) {
        let area = polygon_area(f.vertex_ids.iter().map(|&i| p.vertices[i]));
        vol += area * (h.offset - h.normal.dot(&c)) / 3.0;
    }
    vol
}
