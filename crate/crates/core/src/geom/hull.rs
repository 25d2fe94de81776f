//! Hull construction and vertex enumeration.

use std::collections::BTreeMap;

use smallvec::{smallvec, SmallVec};

use super::polytope::{Face, Halfspace, Polytope};
use super::{axis, hull_2d, orthonormal_basis, Vec3, EPS_GEOM};
use crate::Result;

/// Tolerance for "point lies on plane" during facet detection.
const ON_PLANE: f64 = 1e-9;
/// Feasibility slack for candidate vertices and supporting planes.
const FEASIBLE: f64 = 1e-9;

fn dedup(points: &[Vec3]) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (p - q).amax() <= EPS_GEOM) {
            out.push(*p);
        }
    }
    out
}

fn empty_levels(d: usize) -> Vec<Vec<Face>> {
    (0..=d).map(|_| Vec::new()).collect()
}

/// Builds the polytope `conv(points)`. `candidates` are planes known to
/// contain every facet (used for intersections); without them facets are
/// found by scanning point triples.
pub(crate) fn build(points: &[Vec3], d: usize, candidates: Option<&[Halfspace]>) -> Result<Polytope> {
    let pts = dedup(points);
    let p0 = pts[0];
    let mut diffs: Vec<Vec3> = pts.iter().map(|p| p - p0).collect();
    diffs.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let aff = orthonormal_basis(diffs, EPS_GEOM);
    match aff.len() {
        0 => Ok(point(p0, d)),
        1 => Ok(segment(&pts, aff[0], d)),
        2 => {
            let (u, v) = if d == 2 {
                (axis(0), axis(1))
            } else {
                (aff[0], aff[1])
            };
            Ok(polygon(&pts, u, v, d))
        }
        _ => Ok(solid(&pts, candidates)),
    }
}

fn point(p: Vec3, d: usize) -> Polytope {
    let mut faces = empty_levels(d);
    faces[0].push(Face {
        vertex_ids: smallvec![0],
        facet_ids: smallvec![],
        basis: smallvec![],
    });
    Polytope {
        dim: d,
        vertices: vec![p],
        facets: vec![],
        aff_basis: smallvec![],
        faces,
    }
}

fn segment(pts: &[Vec3], u: Vec3, d: usize) -> Polytope {
    let t = |p: &Vec3| u.dot(p);
    let lo = *pts.iter().min_by(|a, b| t(a).total_cmp(&t(b))).unwrap();
    let hi = *pts.iter().max_by(|a, b| t(a).total_cmp(&t(b))).unwrap();
    let u = (hi - lo).normalize();
    let mut faces = empty_levels(d);
    for k in 0..2 {
        faces[0].push(Face {
            vertex_ids: smallvec![k],
            facet_ids: smallvec![k],
            basis: smallvec![],
        });
    }
    faces[1].push(Face {
        vertex_ids: smallvec![0, 1],
        facet_ids: smallvec![],
        basis: smallvec![u],
    });
    Polytope {
        dim: d,
        vertices: vec![lo, hi],
        facets: vec![
            Halfspace {
                normal: -u,
                offset: -u.dot(&lo),
            },
            Halfspace {
                normal: u,
                offset: u.dot(&hi),
            },
        ],
        aff_basis: smallvec![u],
        faces,
    }
}

/// Polygon with orthonormal in-plane basis `u, v`; vertices are ordered
/// counter-clockwise with respect to `u x v`.
fn polygon(pts: &[Vec3], u: Vec3, v: Vec3, d: usize) -> Polytope {
    let p0 = pts[0];
    let coords: Vec<(f64, f64)> = pts.iter().map(|p| (u.dot(&(p - p0)), v.dot(&(p - p0)))).collect();
    let order = hull_2d(&coords, EPS_GEOM);
    if order.len() < 3 {
        // Numerically flat: fall back to the longest segment.
        let sub: Vec<Vec3> = order.iter().map(|&i| pts[i]).collect();
        let w = (sub[sub.len() - 1] - sub[0]).normalize();
        return segment(&sub, w, d);
    }
    let vertices: Vec<Vec3> = order.iter().map(|&i| pts[i]).collect();
    let n = vertices.len();
    let normal = u.cross(&v);
    let mut facets = Vec::with_capacity(n);
    let mut faces = empty_levels(d);
    for k in 0..n {
        let a = vertices[k];
        let b = vertices[(k + 1) % n];
        let e = (b - a).normalize();
        let out = e.cross(&normal);
        facets.push(Halfspace {
            normal: out,
            offset: out.dot(&a),
        });
        let mut ids = vec![k, (k + 1) % n];
        ids.sort_unstable();
        faces[1].push(Face {
            vertex_ids: SmallVec::from_vec(ids),
            facet_ids: smallvec![k],
            basis: smallvec![e],
        });
    }
    for k in 0..n {
        let mut f = vec![(k + n - 1) % n, k];
        f.sort_unstable();
        faces[0].push(Face {
            vertex_ids: smallvec![k],
            facet_ids: SmallVec::from_vec(f),
            basis: smallvec![],
        });
    }
    faces[2].push(Face {
        vertex_ids: (0..n).collect(),
        facet_ids: smallvec![],
        basis: smallvec![u, v],
    });
    Polytope {
        dim: d,
        vertices,
        facets,
        aff_basis: smallvec![u, v],
        faces,
    }
}

fn in_plane_basis(n: &Vec3) -> (Vec3, Vec3) {
    let seed = if n.x.abs() < 0.6 { axis(0) } else { axis(1) };
    let u = (seed - n * n.dot(&seed)).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Facet candidate: the points on the plane ordered counter-clockwise seen
/// from outside, with a refitted plane. `None` if the contact is not
/// two-dimensional.
fn facet_on_plane(pts: &[Vec3], n: Vec3, b: f64) -> Option<(Halfspace, Vec<usize>)> {
    let on: Vec<usize> = (0..pts.len())
        .filter(|&i| (n.dot(&pts[i]) - b).abs() <= ON_PLANE)
        .collect();
    if on.len() < 3 {
        return None;
    }
    let (u, v) = in_plane_basis(&n);
    let o = pts[on[0]];
    let coords: Vec<(f64, f64)> = on
        .iter()
        .map(|&i| (u.dot(&(pts[i] - o)), v.dot(&(pts[i] - o))))
        .collect();
    let order = hull_2d(&coords, EPS_GEOM);
    if order.len() < 3 {
        return None;
    }
    let ring: Vec<usize> = order.iter().map(|&k| on[k]).collect();
    // Newell normal of the ordered ring.
    let mut nn = Vec3::zeros();
    for k in 0..ring.len() {
        let a = pts[ring[k]];
        let c = pts[ring[(k + 1) % ring.len()]];
        nn += Vec3::new(
            (a.y - c.y) * (a.z + c.z),
            (a.z - c.z) * (a.x + c.x),
            (a.x - c.x) * (a.y + c.y),
        );
    }
    let nn = nn.normalize();
    let nn = if nn.dot(&n) < 0.0 { -nn } else { nn };
    let off = ring.iter().map(|&i| nn.dot(&pts[i])).sum::<f64>() / ring.len() as f64;
    Some((
        Halfspace {
            normal: nn,
            offset: off,
        },
        ring,
    ))
}

fn supporting(pts: &[Vec3], n: &Vec3, b: f64) -> bool {
    pts.iter().all(|p| n.dot(p) - b <= FEASIBLE)
}

fn solid(pts: &[Vec3], candidates: Option<&[Halfspace]>) -> Polytope {
    let mut planes: Vec<(Halfspace, Vec<usize>)> = Vec::new();
    let consider = |n: Vec3, b: f64, planes: &mut Vec<(Halfspace, Vec<usize>)>| {
        if planes
            .iter()
            .any(|(h, _)| (h.normal - n).amax() < 1e-7 && (h.offset - b).abs() < 1e-7)
        {
            return;
        }
        if !supporting(pts, &n, b) {
            return;
        }
        if let Some((h, ring)) = facet_on_plane(pts, n, b) {
            if !planes
                .iter()
                .any(|(g, _)| (g.normal - h.normal).amax() < 1e-7 && (g.offset - h.offset).abs() < 1e-7)
            {
                planes.push((h, ring));
            }
        }
    };
    match candidates {
        Some(hs) => {
            for h in hs {
                consider(h.normal, h.offset, &mut planes);
            }
        }
        None => {
            let n = pts.len();
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let a = pts[j] - pts[i];
                        let c = pts[k] - pts[i];
                        let cr = a.cross(&c);
                        let len = cr.norm();
                        if len <= 1e-9 * a.norm().max(c.norm()) {
                            continue;
                        }
                        let nn = cr / len;
                        let b = nn.dot(&pts[i]);
                        if supporting(pts, &nn, b) {
                            consider(nn, b, &mut planes);
                        } else if supporting(pts, &-nn, -b) {
                            consider(-nn, -b, &mut planes);
                        }
                    }
                }
            }
        }
    }

    // Compact the vertex set to points used by some facet ring.
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    for (_, ring) in &planes {
        for &i in ring {
            remap.insert(i, 0);
        }
    }
    for (k, v) in remap.values_mut().enumerate() {
        *v = k;
    }
    let vertices: Vec<Vec3> = remap.keys().map(|&i| pts[i]).collect();

    let mut faces = empty_levels(3);
    let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vertex_facets: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    let mut facets = Vec::with_capacity(planes.len());
    for (fi, (h, ring)) in planes.iter().enumerate() {
        let ring: Vec<usize> = ring.iter().map(|i| remap[i]).collect();
        for k in 0..ring.len() {
            let a = ring[k];
            let b = ring[(k + 1) % ring.len()];
            let key = (a.min(b), a.max(b));
            let idx = *edge_index.entry(key).or_insert_with(|| {
                faces[1].push(Face {
                    vertex_ids: smallvec![key.0, key.1],
                    facet_ids: smallvec![],
                    basis: smallvec![(vertices[key.1] - vertices[key.0]).normalize()],
                });
                faces[1].len() - 1
            });
            faces[1][idx].facet_ids.push(fi);
            vertex_facets[a].push(fi);
        }
        let (u, v) = in_plane_basis(&h.normal);
        faces[2].push(Face {
            vertex_ids: SmallVec::from_vec(ring),
            facet_ids: smallvec![fi],
            basis: smallvec![u, v],
        });
        facets.push(*h);
    }
    for (i, mut fs) in vertex_facets.into_iter().enumerate() {
        fs.sort_unstable();
        fs.dedup();
        faces[0].push(Face {
            vertex_ids: smallvec![i],
            facet_ids: SmallVec::from_vec(fs),
            basis: smallvec![],
        });
    }
    for e in &mut faces[1] {
        e.facet_ids.sort_unstable();
    }
    faces[3].push(Face {
        vertex_ids: (0..vertices.len()).collect(),
        facet_ids: smallvec![],
        basis: smallvec![axis(0), axis(1), axis(2)],
    });
    Polytope {
        dim: 3,
        vertices,
        facets,
        aff_basis: smallvec![axis(0), axis(1), axis(2)],
        faces,
    }
}

/// Polytope described by the closed halfspaces `hs`, assumed bounded.
pub(crate) fn from_halfspaces(hs: &[Halfspace], d: usize) -> Result<Option<Polytope>> {
    let feasible = |p: &Vec3| hs.iter().all(|h| h.excess(p) <= FEASIBLE);
    let mut pts = Vec::new();
    let n = hs.len();
    if d == 2 {
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (hs[i].normal, hs[j].normal);
                let det = a.x * b.y - a.y * b.x;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (hs[i].offset * b.y - hs[j].offset * a.y) / det;
                let y = (a.x * hs[j].offset - b.x * hs[i].offset) / det;
                let p = Vec3::new(x, y, 0.0);
                if feasible(&p) {
                    pts.push(p);
                }
            }
        }
    } else {
        for i in 0..n {
            for j in i + 1..n {
                let c12 = hs[i].normal.cross(&hs[j].normal);
                if c12.norm() < 1e-12 {
                    continue;
                }
                for k in j + 1..n {
                    let det = c12.dot(&hs[k].normal);
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let p = (hs[i].offset * hs[j].normal.cross(&hs[k].normal)
                        + hs[j].offset * hs[k].normal.cross(&hs[i].normal)
                        + hs[k].offset * c12)
                        / det;
                    if feasible(&p) {
                        pts.push(p);
                    }
                }
            }
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    build(&pts, d, Some(hs)).map(Some)
}

/// Intersection of two full-dimensional polyhedra. Every vertex of `P ∩ Q` is
/// a vertex of one operand or the crossing of an edge of one operand with a
/// facet plane of the other.
pub(crate) fn intersect_solids(p: &Polytope, q: &Polytope) -> Result<Option<Polytope>> {
    let mut pts: Vec<Vec3> = Vec::new();
    for (a, b) in [(p, q), (q, p)] {
        for v in &a.vertices {
            if b.facets.iter().all(|h| h.excess(v) <= FEASIBLE) {
                pts.push(*v);
            }
        }
        for e in &a.faces[1] {
            let s = a.vertices[e.vertex_ids[0]];
            let t = a.vertices[e.vertex_ids[1]];
            for (k, h) in b.facets.iter().enumerate() {
                let ds = h.excess(&s);
                let dt = h.excess(&t);
                if (ds > 0.0) == (dt > 0.0) || ds == dt {
                    continue;
                }
                let x = s + (t - s) * (ds / (ds - dt));
                if b.facets
                    .iter()
                    .enumerate()
                    .all(|(i, g)| i == k || g.excess(&x) <= FEASIBLE)
                {
                    pts.push(x);
                }
            }
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    let mut planes = p.facets.clone();
    planes.extend_from_slice(&q.facets);
    build(&pts, 3, Some(&planes)).map(Some)
}

fn clip_ring(ring: &[Vec3], h: &Halfspace) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(ring.len() + 1);
    let n = ring.len();
    for k in 0..n {
        let s = ring[(k + n - 1) % n];
        let e = ring[k];
        let ds = h.excess(&s);
        let de = h.excess(&e);
        let s_in = ds <= EPS_GEOM;
        let e_in = de <= EPS_GEOM;
        if e_in {
            if !s_in {
                out.push(s + (e - s) * (ds / (ds - de)));
            }
            out.push(e);
        } else if s_in {
            out.push(s + (e - s) * (ds / (ds - de)));
        }
    }
    out
}

/// Sutherland-Hodgman clipping of a full-dimensional polygon.
pub(crate) fn clip_polygon(p: &Polytope, hs: &[Halfspace]) -> Result<Option<Polytope>> {
    let mut ring: Vec<Vec3> = p.vertices.clone();
    for h in hs {
        ring = clip_ring(&ring, h);
        if ring.is_empty() {
            return Ok(None);
        }
    }
    build(&ring, 2, None).map(Some)
}

pub(crate) fn intersect_polygons(p: &Polytope, q: &Polytope) -> Result<Option<Polytope>> {
    clip_polygon(p, &q.facets)
}

/// Sutherland-Hodgman clipping of a planar ring lying in `R^3`; returns the
/// clipped ring.
pub(crate) fn clip_planar_ring(ring: &[Vec3], hs: &[Halfspace]) -> Vec<Vec3> {
    let mut ring = ring.to_vec();
    for h in hs {
        if ring.is_empty() {
            break;
        }
        ring = clip_ring(&ring, h);
    }
    ring
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octahedron_from_points() {
        let mut pts = Vec::new();
        for i in 0..3 {
            pts.push(axis(i));
            pts.push(-axis(i));
        }
        let p = build(&pts, 3, None).unwrap();
        assert_eq!(p.face_count(0), 6);
        assert_eq!(p.face_count(1), 12);
        assert_eq!(p.face_count(2), 8);
        assert!((p.volume() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn interior_and_edge_points_are_not_vertices() {
        let mut pts: Vec<Vec3> = Vec::new();
        for m in 0..8 {
            pts.push(Vec3::new(
                (m & 1) as f64,
                (m >> 1 & 1) as f64,
                (m >> 2 & 1) as f64,
            ));
        }
        pts.push(Vec3::new(0.5, 0.5, 0.5));
        pts.push(Vec3::new(0.5, 0.0, 0.0));
        pts.push(Vec3::new(0.5, 0.5, 0.0));
        let p = build(&pts, 3, None).unwrap();
        assert_eq!(p.face_count(0), 8);
        assert_eq!(p.face_count(1), 12);
    }

    #[test]
    fn cube_from_halfspaces() {
        let mut hs = Vec::new();
        for i in 0..3 {
            hs.push(Halfspace::new(axis(i), 1.0));
            hs.push(Halfspace::new(-axis(i), 0.0));
        }
        // A redundant plane.
        hs.push(Halfspace::new(Vec3::new(1.0, 1.0, 1.0), 5.0));
        let p = from_halfspaces(&hs, 3).unwrap().unwrap();
        assert_eq!(p.face_count(2), 6);
        assert!((p.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planar_polygon_in_space() {
        let pts = [
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        ];
        let p = build(&pts, 3, None).unwrap();
        assert_eq!(p.aff_dim(), 2);
        assert_eq!(p.face_count(1), 4);
        assert_eq!(p.face_count(3), 0);
        assert!((p.content() - 1.0).abs() < 1e-12);
        assert_eq!(p.volume(), 0.0);
    }
}
