use super::hull::clip_planar_ring;
use super::polytope::{polygon_area, FaceRef, Halfspace, Polytope};
use super::{axis, Vec3, EPS_GEOM};

/// Axis-aligned box in `R^d`; unused coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AaBox {
    pub d: usize,
    pub lo: Vec3,
    pub hi: Vec3,
}

impl AaBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Self {
        let d = lo.len();
        let mut a = Vec3::zeros();
        let mut b = Vec3::zeros();
        for i in 0..d {
            a[i] = lo[i];
            b[i] = hi[i];
        }
        AaBox { d, lo: a, hi: b }
    }

    /// `[-s/2, s/2]^d`.
    pub fn centered_cube(d: usize, side: f64) -> Self {
        AaBox::new(&vec![-side / 2.0; d], &vec![side / 2.0; d])
    }

    pub fn volume(&self) -> f64 {
        (0..self.d).map(|i| (self.hi[i] - self.lo[i]).max(0.0)).product()
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..self.d).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    /// Box grown by `r` on every side (shrunk for negative `r`).
    pub fn dilate(&self, r: f64) -> Self {
        let mut out = *self;
        for i in 0..self.d {
            out.lo[i] -= r;
            out.hi[i] += r;
        }
        out
    }

    pub fn to_region(&self) -> Region {
        let mut hs = Vec::with_capacity(2 * self.d);
        for i in 0..self.d {
            hs.push(Halfspace {
                normal: axis(i),
                offset: self.hi[i],
            });
            hs.push(Halfspace {
                normal: -axis(i),
                offset: -self.lo[i],
            });
        }
        Region {
            d: self.d,
            halfspaces: hs,
        }
    }

    pub fn to_polytope(&self) -> crate::Result<Polytope> {
        Polytope::cuboid(&self.lo.as_slice()[..self.d], &self.hi.as_slice()[..self.d])
    }
}

/// Closed convex region given as a finite intersection of halfspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub d: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl Region {
    /// `{x : <normal, x> <= offset}`.
    pub fn halfspace(d: usize, normal: Vec3, offset: f64) -> Self {
        Region {
            d,
            halfspaces: vec![Halfspace::new(normal, offset)],
        }
    }

    pub fn from_box(b: &AaBox) -> Self {
        b.to_region()
    }

    pub fn from_polytope(p: &Polytope) -> Self {
        Region {
            d: p.dim(),
            halfspaces: p.h_description(),
        }
    }

    /// A box containing every operand with unit margin, standing in for `R^d`.
    pub fn covering(polytopes: &[&Polytope]) -> Self {
        let d = polytopes.first().map_or(2, |p| p.dim());
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in polytopes {
            let (a, b) = p.bbox();
            lo = lo.inf(&a);
            hi = hi.sup(&b);
        }
        let b = AaBox { d, lo, hi }.dilate(1.0);
        b.to_region()
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let mut hs = self.halfspaces.clone();
        hs.extend_from_slice(&other.halfspaces);
        Region {
            d: self.d,
            halfspaces: hs,
        }
    }

    pub fn translate(&self, x: &Vec3) -> Region {
        Region {
            d: self.d,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: h.normal,
                    offset: h.offset + h.normal.dot(x),
                })
                .collect(),
        }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p, EPS_GEOM))
    }
}

/// `lambda_F(A)`: the `j`-content of `F ∩ A` for a `j`-face `F`.
pub fn face_measure_restricted(f: &FaceRef<'_>, a: &Region) -> f64 {
    let hs = &a.halfspaces;
    match f.dim() {
        0 => {
            if a.contains(&f.centroid()) {
                1.0
            } else {
                0.0
            }
        }
        1 => {
            let mut it = f.vertices();
            let p = it.next().unwrap();
            let q = it.next().unwrap();
            let (mut t0, mut t1) = (0.0f64, 1.0f64);
            for h in hs {
                let a0 = h.excess(&p);
                let a1 = h.excess(&q);
                if a0 > EPS_GEOM && a1 > EPS_GEOM {
                    return 0.0;
                }
                if a0 > EPS_GEOM {
                    t0 = t0.max(a0 / (a0 - a1));
                } else if a1 > EPS_GEOM {
                    t1 = t1.min(a0 / (a0 - a1));
                }
            }
            (t1 - t0).max(0.0) * (q - p).norm()
        }
        2 => {
            let ring: Vec<Vec3> = f.vertices().collect();
            polygon_area(clip_planar_ring(&ring, hs))
        }
        _ => match f.parent.clip(hs) {
            Ok(Some(c)) => c.volume(),
            _ => 0.0,
        },
    }
}

/// Bounding box of `P - Q = {x : P ∩ (Q + x) ≠ ∅}`.
pub fn translation_support(p: &Polytope, q: &Polytope) -> AaBox {
    let (plo, phi) = p.bbox();
    let (qlo, qhi) = q.bbox();
    AaBox {
        d: p.dim(),
        lo: plo - qhi,
        hi: phi - qlo,
    }
}
