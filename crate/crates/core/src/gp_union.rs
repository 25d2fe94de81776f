//! Finite unions of polytopes in mutual general position: certification,
//! inclusion-exclusion extensions, reduced representations and signed
//! boundary features.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::functionals::{extension_measure, mixed_measure, phi_homogeneous, Family};
use crate::geom::{orthonormal_basis, FaceRef, Halfspace, Polytope, Region, Vec3, EPS_GEOM};
use crate::{Error, Result};

/// Distance below which a point counts as lying on a facet plane during
/// general-position certification.
pub const EPS_GP: f64 = 1e-7;

/// A configuration violating mutual general position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// The single part.
    pub part: usize,
    /// Indices `J` of the intersected group.
    pub group: Vec<usize>,
    /// Dimension of the offending face of `P_i ∩ P_J`.
    pub face_dim: usize,
    /// A relative-interior point of that face.
    pub point: [f64; 3],
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub passed: bool,
    pub pairs_checked: usize,
    pub violation: Option<Violation>,
}

/// Union of convex polytopes with its chosen representation.
#[derive(Debug, Clone)]
pub struct GpUnion {
    pub d: usize,
    pub parts: Vec<Polytope>,
    pub certified: bool,
    pub reduced: bool,
}

fn segment_distance(x: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let t = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

fn face_distance(p: &Polytope, face: &FaceRef<'_>, x: &Vec3) -> f64 {
    let vs: Vec<Vec3> = face.vertices().collect();
    match face.dim() {
        0 => (x - vs[0]).norm(),
        1 => segment_distance(x, &vs[0], &vs[1]),
        _ => {
            // A facet of a solid: plane distance if the foot lies in the facet.
            let h = &p.halfspaces()[face.facet_ids()[0]];
            let e = h.excess(x);
            let foot = x - h.normal * e;
            if p.contains(&foot, 1e-12) {
                e.abs()
            } else {
                p.faces(1)
                    .unwrap_or_default()
                    .iter()
                    .filter(|g| g.is_subface_of(face))
                    .map(|g| {
                        let mut it = g.vertices();
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        segment_distance(x, &a, &b)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// The lowest-dimensional proper face of the full-dimensional `p` within
/// `EPS_GP` of `x`: its dimension and the normals of the facets containing
/// it. Interior points give `(d, [])`.
fn carrier(p: &Polytope, x: &Vec3) -> Result<(usize, Vec<Vec3>)> {
    for j in 0..p.dim() {
        for face in p.faces(j)? {
            if face_distance(p, &face, x) <= EPS_GP {
                let normals = face
                    .facet_ids()
                    .iter()
                    .map(|&i| p.halfspaces()[i].normal)
                    .collect();
                return Ok((j, normals));
            }
        }
    }
    Ok((p.dim(), Vec::new()))
}

/// Checks that every face of `P ∩ Q` is the closure of the intersection of
/// relative interiors of faces of complementary dimensions. Returns the
/// offending face dimension, point and reason.
fn pair_in_general_position(p: &Polytope, q: &Polytope) -> Result<Option<(usize, Vec3, String)>> {
    let Some(i) = p.intersect(q)? else {
        return Ok(None);
    };
    let d = p.dim();
    if !p.is_full_dimensional() || !q.is_full_dimensional() {
        return Ok(Some((
            i.aff_dim(),
            i.centroid_of_vertices(),
            "operand is not full-dimensional".into(),
        )));
    }
    if !i.is_full_dimensional() {
        return Ok(Some((
            i.aff_dim(),
            i.centroid_of_vertices(),
            "intersection is lower-dimensional".into(),
        )));
    }
    for j in 0..=d {
        for face in i.faces(j)? {
            let c = face.centroid();
            let (gp, np) = carrier(p, &c)?;
            let (gq, nq) = carrier(q, &c)?;
            if gp + gq != d + j {
                return Ok(Some((
                    j,
                    c,
                    format!("faces of dimensions {gp} and {gq} meet in a {j}-face"),
                )));
            }
            let joint = orthonormal_basis(np.iter().chain(&nq).copied(), EPS_GP).len();
            if joint != 2 * d - gp - gq {
                return Ok(Some((j, c, "faces meet non-transversally".into())));
            }
        }
    }
    Ok(None)
}

/// Pairs of parts whose bounding boxes and bodies meet.
fn adjacency(parts: &[Polytope]) -> Result<Vec<Vec<usize>>> {
    let n = parts.len();
    let boxes: Vec<(Vec3, Vec3)> = parts.iter().map(Polytope::bbox).collect();
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            let (alo, ahi) = boxes[a];
            let (blo, bhi) = boxes[b];
            if (0..3).any(|k| alo[k] > bhi[k] + EPS_GEOM || blo[k] > ahi[k] + EPS_GEOM) {
                continue;
            }
            if parts[a].intersect(&parts[b])?.is_some() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    Ok(adj)
}

/// Visits every index set `S` (increasing order) with nonempty `P_S`,
/// together with `P_S`. Sets are extended only by common neighbours, and
/// `prune(P_S)` stops descent below `S`.
fn for_each_intersection<V, Q>(parts: &[Polytope], prune: Q, mut visit: V) -> Result<()>
where
    V: FnMut(&[usize], &Polytope) -> Result<()>,
    Q: Fn(&Polytope) -> bool,
{
    let adj = adjacency(parts)?;
    fn rec<V: FnMut(&[usize], &Polytope) -> Result<()>, Q: Fn(&Polytope) -> bool>(
        parts: &[Polytope],
        adj: &[Vec<usize>],
        set: &mut Vec<usize>,
        cur: &Polytope,
        cands: &[usize],
        prune: &Q,
        visit: &mut V,
    ) -> Result<()> {
        visit(set, cur)?;
        for (k, &c) in cands.iter().enumerate() {
            if let Some(next) = cur.intersect(&parts[c])? {
                if prune(&next) {
                    continue;
                }
                let rest: Vec<usize> = cands[k + 1..]
                    .iter()
                    .copied()
                    .filter(|x| adj[c].contains(x))
                    .collect();
                set.push(c);
                rec(parts, adj, set, &next, &rest, prune, visit)?;
                set.pop();
            }
        }
        Ok(())
    }
    for i in 0..parts.len() {
        if prune(&parts[i]) {
            continue;
        }
        let cands: Vec<usize> = adj[i].iter().copied().filter(|&x| x > i).collect();
        let mut set = vec![i];
        rec(parts, &adj, &mut set, &parts[i], &cands, &prune, &mut visit)?;
    }
    Ok(())
}

fn sign(len: usize) -> f64 {
    if len % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Whether some halfspace of `a` separates it from `p`.
fn separated(p: &Polytope, a: &Region) -> bool {
    a.halfspaces
        .iter()
        .any(|h| p.vertices().iter().all(|v| h.excess(v) > EPS_GEOM))
}

/// Certifies that each part `P_i` and each nonempty `P_J` (`i ∉ J`) are in
/// mutual general position.
pub fn check_mutual_general_position(parts: &[Polytope]) -> Result<Certification> {
    if let Some(p) = parts.iter().find(|p| p.dim() != parts[0].dim()) {
        return Err(Error::DimensionMismatch {
            expected: parts[0].dim(),
            found: p.dim(),
        });
    }
    let mut cache: HashMap<Vec<usize>, Polytope> = HashMap::new();
    for_each_intersection(
        parts,
        |_| false,
        |s, p| {
            cache.insert(s.to_vec(), p.clone());
            Ok(())
        },
    )?;
    let mut keys: Vec<&Vec<usize>> = cache.keys().filter(|k| k.len() >= 2).collect();
    keys.sort();
    let mut checked = 0;
    for t in keys {
        for (pos, &i) in t.iter().enumerate() {
            let mut group = t.clone();
            group.remove(pos);
            let pj = &cache[&group];
            checked += 1;
            if let Some((face_dim, x, reason)) = pair_in_general_position(&parts[i], pj)? {
                return Ok(Certification {
                    passed: false,
                    pairs_checked: checked,
                    violation: Some(Violation {
                        part: i,
                        group,
                        face_dim,
                        point: [x.x, x.y, x.z],
                        reason,
                    }),
                });
            }
        }
    }
    // Full-dimensionality of single parts.
    for (i, p) in parts.iter().enumerate() {
        if !p.is_full_dimensional() {
            return Ok(Certification {
                passed: false,
                pairs_checked: checked,
                violation: Some(Violation {
                    part: i,
                    group: vec![],
                    face_dim: p.aff_dim(),
                    point: {
                        let c = p.centroid_of_vertices();
                        [c.x, c.y, c.z]
                    },
                    reason: "part is not full-dimensional".into(),
                }),
            });
        }
    }
    Ok(Certification {
        passed: true,
        pairs_checked: checked,
        violation: None,
    })
}

impl GpUnion {
    /// Union of `parts`, certified if they are in mutual general position.
    pub fn new(parts: Vec<Polytope>) -> Result<(GpUnion, Certification)> {
        let d = parts.first().map_or(2, Polytope::dim);
        let cert = check_mutual_general_position(&parts)?;
        Ok((
            GpUnion {
                d,
                certified: cert.passed,
                reduced: false,
                parts,
            },
            cert,
        ))
    }

    /// The empty union.
    pub fn empty(d: usize) -> GpUnion {
        GpUnion {
            d,
            parts: vec![],
            certified: true,
            reduced: true,
        }
    }

    fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(Error::NotCertified)
        }
    }

    /// `Σ (-1)^{|S|-1} g(P_S)` over nonempty intersections.
    fn inclusion_exclusion<G>(&self, g: G, skip: impl Fn(&Polytope) -> bool) -> Result<f64>
    where
        G: Fn(&Polytope) -> Result<f64>,
    {
        let mut total = 0.0;
        for_each_intersection(&self.parts, skip, |s, p| {
            total += sign(s.len()) * g(p)?;
            Ok(())
        })?;
        Ok(total)
    }

    /// Union volume.
    pub fn volume(&self) -> Result<f64> {
        self.inclusion_exclusion(|p| Ok(p.volume()), |_| false)
    }

    /// `Σ_i V_d(P_i ∩ ∪_{s≠i} P_s)` test: is part `i` covered by the others?
    fn covered(&self, i: usize, others: &[usize]) -> Result<bool> {
        let p = &self.parts[i];
        let mut pieces = Vec::new();
        for &s in others {
            if let Some(x) = p.intersect(&self.parts[s])? {
                if x.is_full_dimensional() {
                    pieces.push(x);
                }
            }
        }
        let sub = GpUnion {
            d: self.d,
            parts: pieces,
            certified: true,
            reduced: false,
        };
        let v = sub.volume()?;
        Ok((p.volume() - v).abs() <= 1e-9 * p.volume().max(1e-300))
    }
}

/// `φ(∪ P_i)` by inclusion-exclusion over the representation.
pub fn gp_phi(f: &Family, u: &GpUnion) -> Result<f64> {
    u.require_certified()?;
    u.inclusion_exclusion(|p| (0..=f.d).map(|j| phi_homogeneous(f, j, p)).sum(), |_| false)
}

/// `φ^(j)(∪ P_i)`.
pub fn gp_phi_degree(f: &Family, j: usize, u: &GpUnion) -> Result<f64> {
    u.require_certified()?;
    u.inclusion_exclusion(|p| phi_homogeneous(f, j, p), |_| false)
}

/// `Φ^(j)(∪ P_i, A)` by inclusion-exclusion. Intersections separated from
/// `A` are pruned together with their supersets.
pub fn gp_extension_measure(f: &Family, j: usize, u: &GpUnion, a: &Region) -> Result<f64> {
    u.require_certified()?;
    u.inclusion_exclusion(|p| extension_measure(f, j, p, a), |p| separated(p, a))
}

/// `Φ^(j)(∪ P_i, A)` for every degree `j = 0..=d` in one enumeration.
pub fn gp_extension_degrees(f: &Family, u: &GpUnion, a: &Region) -> Result<Vec<f64>> {
    u.require_certified()?;
    let mut out = vec![0.0; f.d + 1];
    for_each_intersection(
        &u.parts,
        |p| separated(p, a),
        |s, p| {
            for (j, o) in out.iter_mut().enumerate() {
                *o += sign(s.len()) * extension_measure(f, j, p, a)?;
            }
            Ok(())
        },
    )?;
    Ok(out)
}

/// Signed inclusion-exclusion pieces `((-1)^{|S|-1}, P_S)` of a union.
pub fn signed_pieces(u: &GpUnion) -> Result<Vec<(f64, Polytope)>> {
    let mut out = Vec::new();
    for_each_intersection(
        &u.parts,
        |_| false,
        |s, p| {
            out.push((sign(s.len()), p.clone()));
            Ok(())
        },
    )?;
    Ok(out)
}

/// Drops parts covered by the remaining ones, in index order.
pub fn reduce_representation(u: &GpUnion) -> Result<GpUnion> {
    u.require_certified()?;
    let mut keep: Vec<usize> = (0..u.parts.len()).collect();
    let mut k = 0;
    while k < keep.len() {
        let i = keep[k];
        let others: Vec<usize> = keep.iter().copied().filter(|&s| s != i).collect();
        if !others.is_empty() && u.covered(i, &others)? {
            keep.remove(k);
        } else {
            k += 1;
        }
    }
    Ok(GpUnion {
        d: u.d,
        parts: keep.iter().map(|&i| u.parts[i].clone()).collect(),
        certified: true,
        reduced: true,
    })
}

/// `Φ^(j)_{m, d-m+j}(∪P_i, ∪Q_k; A × B)` by double inclusion-exclusion.
pub fn gp_translative_mixed(
    f: &Family,
    j: usize,
    u: &GpUnion,
    v: &GpUnion,
    m: &[usize],
    a: &Region,
    b: &Region,
) -> Result<f64> {
    u.require_certified()?;
    v.require_certified()?;
    if m.len() != 2 {
        return Err(Error::IndexConstraint {
            dims: m.to_vec(),
            d: f.d,
        });
    }
    let mut left: Vec<(f64, Polytope)> = Vec::new();
    for_each_intersection(
        &u.parts,
        |p| separated(p, a),
        |s, p| {
            left.push((sign(s.len()), p.clone()));
            Ok(())
        },
    )?;
    let mut right: Vec<(f64, Polytope)> = Vec::new();
    for_each_intersection(
        &v.parts,
        |p| separated(p, b),
        |s, p| {
            right.push((sign(s.len()), p.clone()));
            Ok(())
        },
    )?;
    if left.is_empty() || right.is_empty() {
        // Still validate the index vector.
        let c = Polytope::unit_cube(f.d)?;
        mixed_measure(f, j, &[&c, &c], m, &[a, b])?;
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (sp, p) in &left {
        for (sq, q) in &right {
            total += sp * sq * mixed_measure(f, j, &[p, q], m, &[a, b])?;
        }
    }
    Ok(total)
}

/// Signed boundary features of a union.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeatureReport {
    pub d: usize,
    /// Uncovered vertices of parts.
    pub convex_vertices: usize,
    /// Plane: uncovered crossings of part edges. Space: uncovered points
    /// where facets of three different parts meet.
    pub concave_vertices: usize,
    /// Space only: uncovered crossings of a part edge with another part's
    /// facet.
    pub saddle_vertices: usize,
    /// Uncovered length of part edges (boundary length in the plane).
    pub convex_edge_length: f64,
    /// Space only: uncovered length of facet-facet intersection segments.
    pub concave_edge_length: f64,
}

impl FeatureReport {
    /// Signed vertex count.
    pub fn signed_vertices(&self) -> f64 {
        self.convex_vertices as f64 - self.saddle_vertices as f64
            + if self.d == 2 {
                -(self.concave_vertices as f64)
            } else {
                self.concave_vertices as f64
            }
    }

    /// Signed edge length (boundary length in the plane).
    pub fn signed_edge_length(&self) -> f64 {
        self.convex_edge_length - self.concave_edge_length
    }

    /// CSV with columns `feature_kind,sign,count_or_length`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut row = |k: &str, s: &str, v: String| {
            out.write_record([k, s, v.as_str()])
                .map_err(|e| Error::Io(e.to_string()))
        };
        row("feature_kind", "sign", "count_or_length".into())?;
        row("convex_vertex", "+", self.convex_vertices.to_string())?;
        if self.d == 2 {
            row("concave_vertex", "-", self.concave_vertices.to_string())?;
            row("boundary_length", "+", self.convex_edge_length.to_string())?;
        } else {
            row("saddle_vertex", "-", self.saddle_vertices.to_string())?;
            row("concave_vertex", "+", self.concave_vertices.to_string())?;
            row("convex_edge_length", "+", self.convex_edge_length.to_string())?;
            row("concave_edge_length", "-", self.concave_edge_length.to_string())?;
        }
        out.flush()?;
        Ok(())
    }
}

fn covered_by(parts: &[Polytope], skip: &[usize], x: &Vec3) -> bool {
    parts
        .iter()
        .enumerate()
        .any(|(k, p)| !skip.contains(&k) && p.contains(x, 0.0))
}

/// Length of the parts of segment `[s, t]` not inside any part outside
/// `skip`.
fn uncovered_length(parts: &[Polytope], skip: &[usize], s: Vec3, t: Vec3) -> f64 {
    let len = (t - s).norm();
    if len == 0.0 {
        return 0.0;
    }
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for (k, p) in parts.iter().enumerate() {
        if skip.contains(&k) {
            continue;
        }
        if let Some(r) = clip_segment(p.halfspaces(), s, t) {
            iv.push(r);
        }
    }
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut covered = 0.0;
    let mut end = f64::NEG_INFINITY;
    for (a, b) in iv {
        let a = a.max(end);
        if b > a {
            covered += b - a;
        }
        end = end.max(b);
    }
    (1.0 - covered).max(0.0) * len
}

/// Parameter interval of `s + τ (t - s)`, `τ ∈ [0,1]`, inside all halfspaces.
fn clip_segment(hs: &[Halfspace], s: Vec3, t: Vec3) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for h in hs {
        let a = h.excess(&s);
        let b = h.excess(&t);
        if a > 0.0 && b > 0.0 {
            return None;
        }
        if a > 0.0 {
            lo = lo.max(a / (a - b));
        } else if b > 0.0 {
            hi = hi.min(a / (a - b));
        }
    }
    (hi > lo).then_some((lo, hi))
}

/// Classifies the boundary of a certified union into signed vertex and edge
/// features.
pub fn classify_boundary_features(u: &GpUnion) -> Result<FeatureReport> {
    u.require_certified()?;
    let parts = &u.parts;
    let adj = adjacency(parts)?;
    let mut r = FeatureReport {
        d: u.d,
        ..Default::default()
    };
    for (i, p) in parts.iter().enumerate() {
        for v in p.vertices() {
            if !covered_by(parts, &[i], v) {
                r.convex_vertices += 1;
            }
        }
        for e in p.faces(1)? {
            let mut it = e.vertices();
            let (s, t) = (it.next().unwrap(), it.next().unwrap());
            r.convex_edge_length += uncovered_length(parts, &[i], s, t);
        }
    }
    for i in 0..parts.len() {
        for &k in &adj[i] {
            if u.d == 2 && k <= i {
                continue;
            }
            // Edges of part i against facets of part k.
            let (p, q) = (&parts[i], &parts[k]);
            for e in p.faces(1)? {
                let mut it = e.vertices();
                let (s, t) = (it.next().unwrap(), it.next().unwrap());
                for (fi, h) in q.halfspaces().iter().enumerate() {
                    let a = h.excess(&s);
                    let b = h.excess(&t);
                    if (a > 0.0) == (b > 0.0) || a == b {
                        continue;
                    }
                    let x = s + (t - s) * (a / (a - b));
                    let on_facet = q
                        .halfspaces()
                        .iter()
                        .enumerate()
                        .all(|(g, h2)| g == fi || h2.excess(&x) <= EPS_GEOM);
                    if on_facet && !covered_by(parts, &[i, k], &x) {
                        if u.d == 2 {
                            r.concave_vertices += 1;
                        } else {
                            r.saddle_vertices += 1;
                        }
                    }
                }
            }
        }
    }
    if u.d == 3 {
        let big = parts
            .iter()
            .map(|p| {
                let (lo, hi) = p.bbox();
                lo.amax().max(hi.amax())
            })
            .fold(1.0f64, f64::max)
            * 4.0;
        for i in 0..parts.len() {
            for &k in adj[i].iter().filter(|&&k| k > i) {
                let (p, q) = (&parts[i], &parts[k]);
                let mut hs: Vec<Halfspace> = p.halfspaces().to_vec();
                hs.extend_from_slice(q.halfspaces());
                for f in p.halfspaces() {
                    for g in q.halfspaces() {
                        let dir = f.normal.cross(&g.normal);
                        let n = dir.norm();
                        if n < 1e-12 {
                            continue;
                        }
                        let dir = dir / n;
                        // Point on both planes closest to the origin.
                        let x0 = (g.normal * f.offset - f.normal * g.offset).cross(&dir) / n;
                        let others: Vec<Halfspace> =
                            hs.iter().filter(|h| *h != f && *h != g).copied().collect();
                        let s = x0 - dir * big;
                        let t = x0 + dir * big;
                        if let Some((a, b)) = clip_segment(&others, s, t) {
                            let s2 = s + (t - s) * a;
                            let t2 = s + (t - s) * b;
                            r.concave_edge_length += uncovered_length(parts, &[i, k], s2, t2);
                        }
                    }
                }
                // Triple points with a third part.
                for &l in adj[k].iter().filter(|&&l| l > k && adj[i].contains(&l)) {
                    let w = &parts[l];
                    for f in p.halfspaces() {
                        for g in q.halfspaces() {
                            let c12 = f.normal.cross(&g.normal);
                            for h in w.halfspaces() {
                                let det = c12.dot(&h.normal);
                                if det.abs() < 1e-12 {
                                    continue;
                                }
                                let x = (f.offset * g.normal.cross(&h.normal)
                                    + g.offset * h.normal.cross(&f.normal)
                                    + h.offset * c12)
                                    / det;
                                if p.contains(&x, EPS_GEOM)
                                    && q.contains(&x, EPS_GEOM)
                                    && w.contains(&x, EPS_GEOM)
                                    && !covered_by(parts, &[i, k, l], &x)
                                {
                                    r.concave_vertices += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}
