use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use super::grains::{uniform_unit, GrainDistribution, RotationMode, Shape};
use crate::functionals::montecarlo::uniform_in;
use crate::functionals::{extension_measure, phi_homogeneous, Family, McEstimate};
use crate::geom::{AaBox, Polytope, Vec3};
use crate::gp_union::{check_mutual_general_position, gp_extension_degrees, GpUnion};
use crate::{Error, Result};

/// Observation window.
pub type Window = AaBox;

/// Jitter applied to a grain whose placement breaks general position.
pub const JITTER: f64 = 1e-6;
const MAX_JITTERS: usize = 100;

/// Intensity of the germs, constant or a bounded location function sampled
/// by thinning.
#[derive(Clone)]
pub enum Intensity {
    Constant(f64),
    Bounded {
        eta: Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>,
        bound: f64,
    },
}

impl fmt::Debug for Intensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intensity::Constant(g) => write!(f, "Constant({g})"),
            Intensity::Bounded { bound, .. } => write!(f, "Bounded {{ bound: {bound} }}"),
        }
    }
}

impl Intensity {
    pub fn bounded<F: Fn(&Vec3) -> f64 + Send + Sync + 'static>(eta: F, bound: f64) -> Intensity {
        Intensity::Bounded {
            eta: Arc::new(eta),
            bound,
        }
    }

    pub fn at(&self, x: &Vec3) -> f64 {
        match self {
            Intensity::Constant(g) => *g,
            Intensity::Bounded { eta, .. } => eta(x),
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            Intensity::Constant(g) => *g,
            Intensity::Bounded { bound, .. } => *bound,
        }
    }

    fn validate(&self) -> Result<()> {
        let b = self.bound();
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "intensity bound must be finite and nonnegative, got {b}"
            )));
        }
        Ok(())
    }
}

/// A grain `ϑ S + x` of the process.
#[derive(Debug, Clone)]
pub struct PlacedGrain {
    pub shape: usize,
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
    pub body: Shape,
}

/// Estimate aggregated over independent replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub replications: usize,
    pub seed: u64,
}

impl Estimate {
    pub fn from_values(xs: &[f64], seed: u64) -> Estimate {
        let e = McEstimate::from_values(xs);
        Estimate {
            mean: e.mean,
            stderr: e.stderr,
            replications: xs.len(),
            seed,
        }
    }
}

/// Random stream of replication `rep`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

fn check_window(q: &GrainDistribution, w: &Window) -> Result<()> {
    if w.d != q.d {
        return Err(Error::DimensionMismatch {
            expected: q.d,
            found: w.d,
        });
    }
    if !(w.volume() > 0.0) {
        return Err(Error::InvalidArgument("window must have positive volume".into()));
    }
    Ok(())
}

/// All grains of the process hitting `w`, drawn from `rng`.
pub fn sample_poisson_with<R: Rng + ?Sized>(
    q: &GrainDistribution,
    eta: &Intensity,
    w: &Window,
    rng: &mut R,
) -> Result<Vec<PlacedGrain>> {
    eta.validate()?;
    check_window(q, w)?;
    let bound = eta.bound();
    let wpoly = w.to_polytope()?;
    let mut out = Vec::new();
    for (i, (shape, weight)) in q.shapes.iter().enumerate() {
        let r = q.radius(i);
        let region = w.dilate(r);
        let mean = bound * weight * region.volume();
        if !(mean > 0.0) {
            continue;
        }
        let n = Poisson::new(mean)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(rng) as usize;
        let sure = w.dilate(-r);
        for _ in 0..n {
            let x = uniform_in(&region, rng);
            let rot = q.rotation_sample(rng);
            if let Intensity::Bounded { eta, .. } = eta {
                if rng.random::<f64>() * bound >= eta(&x) {
                    continue;
                }
            }
            let body = shape.place(&rot, &x);
            let inside = (0..q.d).all(|k| x[k] >= sure.lo[k] && x[k] <= sure.hi[k]);
            let mut hit = inside;
            if !hit {
                for p in body.parts() {
                    if p.intersect(&wpoly)?.is_some() {
                        hit = true;
                        break;
                    }
                }
            }
            if hit {
                out.push(PlacedGrain {
                    shape: i,
                    rotation: rot,
                    translation: x,
                    body,
                });
            }
        }
    }
    Ok(out)
}

/// All grains hitting `w` for the stream `(seed, 0)`.
pub fn sample_poisson(
    q: &GrainDistribution,
    eta: &Intensity,
    w: &Window,
    seed: u64,
) -> Result<Vec<PlacedGrain>> {
    sample_poisson_with(q, eta, w, &mut replication_rng(seed, 0))
}

/// Certified union of the grains. Grains involved in a general-position
/// violation are jittered by `JITTER` and the union is re-certified; the
/// number of jitters is returned.
pub fn boolean_union<R: Rng + ?Sized>(
    grains: &mut [PlacedGrain],
    d: usize,
    rng: &mut R,
) -> Result<(GpUnion, usize)> {
    if grains.is_empty() {
        return Ok((GpUnion::empty(d), 0));
    }
    let mut jitters = 0;
    loop {
        let mut parts = Vec::new();
        let mut owner = Vec::new();
        for (g, grain) in grains.iter().enumerate() {
            for p in grain.body.parts() {
                parts.push(p.clone());
                owner.push(g);
            }
        }
        let cert = check_mutual_general_position(&parts)?;
        if cert.passed {
            return Ok((
                GpUnion {
                    d,
                    parts,
                    certified: true,
                    reduced: false,
                },
                jitters,
            ));
        }
        if jitters == MAX_JITTERS {
            return Err(Error::CertificationFailed(format!(
                "still degenerate after {MAX_JITTERS} jitters: {:?}",
                cert.violation
            )));
        }
        let v = cert.violation.expect("failed certification names a violation");
        let g = owner[v.part];
        let dx = uniform_unit(d, rng) * JITTER;
        log::warn!(
            "grain {g} not in general position ({}); jittering by {:e}",
            v.reason,
            JITTER
        );
        grains[g].translation += dx;
        grains[g].body = grains[g].body.translate(&dx);
        jitters += 1;
    }
}

/// Per-replication estimates of one simulation.
#[derive(Debug, Clone, Serialize)]
pub struct Simulation {
    /// `φ̄^(j)(Z)` for `j = 0..=d`.
    pub z: Vec<Estimate>,
    /// `φ̄^(j)(X)` for `j = 0..=d`.
    pub x: Vec<Estimate>,
    /// Number of grains hitting the window.
    pub count: Estimate,
    /// Total jitters over all replications.
    pub jitters: usize,
    /// Side lengths of the eroded window.
    pub inner_window: Vec<f64>,
}

struct RepValues {
    z: Vec<f64>,
    x: Vec<f64>,
    count: f64,
    jitters: usize,
}

fn replicate(
    f: &Family,
    q: &GrainDistribution,
    eta: &Intensity,
    w: &Window,
    inner: &Window,
    seed: u64,
    rep: u64,
) -> Result<RepValues> {
    let mut rng = replication_rng(seed, rep);
    let mut grains = sample_poisson_with(q, eta, w, &mut rng)?;
    let (u, jitters) = boolean_union(&mut grains, q.d, &mut rng)?;
    let inner_region = inner.to_region();
    let z: Vec<f64> = gp_extension_degrees(f, &u, &inner_region)?
        .into_iter()
        .map(|v| v / inner.volume())
        .collect();
    let region = w.to_region();
    let mut x = vec![0.0; q.d + 1];
    for g in &grains {
        match &g.body {
            Shape::Convex(p) => {
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj += extension_measure(f, j, p, &region)?;
                }
            }
            Shape::Union(gu) => {
                for (xj, v) in x.iter_mut().zip(gp_extension_degrees(f, gu, &region)?) {
                    *xj += v;
                }
            }
        }
    }
    for xj in &mut x {
        *xj /= w.volume();
    }
    Ok(RepValues {
        z,
        x,
        count: grains.len() as f64,
        jitters,
    })
}

/// Runs `reps` independent replications of the stationary Boolean model and
/// estimates the densities of `Z` by minus sampling (window eroded by the
/// largest circumradius) and those of `X` from the extension measures of the
/// grains restricted to the window.
pub fn simulate(
    f: &Family,
    q: &GrainDistribution,
    gamma: f64,
    w: &Window,
    reps: usize,
    seed: u64,
) -> Result<Simulation> {
    if f.d != q.d {
        return Err(Error::DimensionMismatch {
            expected: q.d,
            found: f.d,
        });
    }
    if reps < 2 {
        return Err(Error::InvalidArgument(
            "at least two replications are needed for a standard error".into(),
        ));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "intensity must be nonnegative, got {gamma}"
        )));
    }
    check_window(q, w)?;
    let margin = q.max_radius();
    let inner = w.dilate(-margin);
    if (0..q.d).any(|k| inner.hi[k] <= inner.lo[k]) {
        return Err(Error::InvalidArgument(format!(
            "window is smaller than twice the erosion margin {margin}"
        )));
    }
    let eta = Intensity::Constant(gamma);
    let vals: Vec<Result<RepValues>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| replicate(f, q, &eta, w, &inner, seed, r))
        .collect();
    let vals: Vec<RepValues> = vals.into_iter().collect::<Result<_>>()?;
    let column = |g: &dyn Fn(&RepValues) -> f64| {
        let xs: Vec<f64> = vals.iter().map(g).collect();
        Estimate::from_values(&xs, seed)
    };
    Ok(Simulation {
        z: (0..=q.d).map(|j| column(&|v| v.z[j])).collect(),
        x: (0..=q.d).map(|j| column(&|v| v.x[j])).collect(),
        count: column(&|v| v.count),
        jitters: vals.iter().map(|v| v.jitters).sum(),
        inner_window: (0..q.d).map(|k| inner.hi[k] - inner.lo[k]).collect(),
    })
}

/// `φ̄^(j)(Z)` by minus sampling.
#[allow(non_snake_case)]
pub fn estimate_density_Z(
    f: &Family,
    j: usize,
    q: &GrainDistribution,
    gamma: f64,
    w: &Window,
    reps: usize,
    seed: u64,
) -> Result<Estimate> {
    if j > f.d {
        return Err(Error::FaceDimension { j, max: f.d });
    }
    Ok(simulate(f, q, gamma, w, reps, seed)?.z[j])
}

/// `φ̄^(j)(X)` from `Σ_P Φ^(j)(P, W) / V_d(W)`.
#[allow(non_snake_case)]
pub fn estimate_density_X(
    f: &Family,
    j: usize,
    q: &GrainDistribution,
    gamma: f64,
    w: &Window,
    reps: usize,
    seed: u64,
) -> Result<Estimate> {
    if j > f.d {
        return Err(Error::FaceDimension { j, max: f.d });
    }
    Ok(simulate(f, q, gamma, w, reps, seed)?.x[j])
}

fn kappa(i: usize) -> f64 {
    use std::f64::consts::PI;
    [1.0, 2.0, PI, 4.0 * PI / 3.0][i]
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Mean number of grains hitting `w` under constant intensity `gamma`:
/// `γ Σ_s w_s E V_d(W + ϑ(-S_s))`, by the rotation sum formula for
/// isotropic grains and by the exact Minkowski sum otherwise. Convex shapes
/// only.
pub fn expected_hit_count(q: &GrainDistribution, gamma: f64, w: &Window) -> Result<f64> {
    check_window(q, w)?;
    let d = q.d;
    let wpoly = w.to_polytope()?;
    let iv = Family::intrinsic_volumes(d)?;
    q.mean(|s| {
        let Shape::Convex(k) = s else {
            return Err(Error::InvalidArgument(
                "hitting means are available for convex shapes only".into(),
            ));
        };
        let v = match q.rotation {
            RotationMode::Isotropic => {
                let mut t = 0.0;
                for i in 0..=d {
                    let c = kappa(i) * kappa(d - i) / (binom(d, i) * kappa(d));
                    t += c * phi_homogeneous(&iv, i, &wpoly)? * phi_homogeneous(&iv, d - i, k)?;
                }
                t
            }
            RotationMode::Fixed => {
                let mut pts = Vec::new();
                for a in wpoly.vertices() {
                    for b in k.vertices() {
                        pts.push(a - b);
                    }
                }
                Polytope::from_points(&pts, d)?.volume()
            }
        };
        Ok(gamma * v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(mode: RotationMode) -> GrainDistribution {
        GrainDistribution::single(Shape::Convex(Polytope::unit_cube(2).unwrap()), mode).unwrap()
    }

    #[test]
    fn tiny_intensity_gives_no_grains() {
        let q = squares(RotationMode::Isotropic);
        let w = Window::centered_cube(2, 10.0);
        let g = sample_poisson(&q, &Intensity::Constant(1e-6), &w, 1).unwrap();
        assert!(g.is_empty());
        let (u, j) = boolean_union(&mut [], 2, &mut replication_rng(1, 0)).unwrap();
        assert!(u.parts.is_empty() && j == 0);
    }

    #[test]
    fn fixed_grains_are_translates() {
        let q = squares(RotationMode::Fixed);
        let w = Window::centered_cube(2, 10.0);
        let g = sample_poisson(&q, &Intensity::Constant(0.5), &w, 3).unwrap();
        assert!(!g.is_empty());
        for grain in &g {
            let p = &grain.body.parts()[0];
            let back = p.translate(&-grain.translation);
            assert_eq!(back.vertices().len(), 4);
            assert!((back.bbox().1 - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn thinning_respects_support() {
        let q = squares(RotationMode::Isotropic);
        let w = Window::centered_cube(2, 20.0);
        let eta = Intensity::bounded(|x: &Vec3| if x.x >= 0.0 { 1.0 } else { 0.0 }, 1.0);
        let g = sample_poisson(&q, &eta, &w, 4).unwrap();
        assert!(!g.is_empty());
        assert!(g.iter().all(|p| p.translation.x >= 0.0));
    }

    #[test]
    fn one_replication_is_rejected() {
        let q = squares(RotationMode::Isotropic);
        let f = Family::skeleton(2).unwrap();
        let w = Window::centered_cube(2, 10.0);
        assert!(simulate(&f, &q, 0.3, &w, 1, 1).is_err());
        assert!(simulate(&f, &q, 0.3, &Window::centered_cube(2, 1.0), 2, 1).is_err());
    }

    #[test]
    fn zero_intensity_gives_zero() {
        let q = squares(RotationMode::Isotropic);
        let f = Family::skeleton(2).unwrap();
        let s = simulate(&f, &q, 0.0, &Window::centered_cube(2, 10.0), 3, 1).unwrap();
        assert!(s.z.iter().chain(&s.x).all(|e| e.mean == 0.0 && e.stderr == 0.0));
    }

    #[test]
    fn hit_count_formula_matches_minkowski_sum() {
        // Fixed: W + (-K) is an 11 x 11 square. Isotropic: V_1(W) = 20, V_1(K) = 2.
        let w = Window::centered_cube(2, 10.0);
        let fixed = expected_hit_count(&squares(RotationMode::Fixed), 1.0, &w).unwrap();
        assert!((fixed - 121.0).abs() < 1e-9);
        let iso = expected_hit_count(&squares(RotationMode::Isotropic), 1.0, &w).unwrap();
        let want = 100.0 + 1.0 + 2.0 / std::f64::consts::PI * 20.0 * 2.0;
        assert!((iso - want).abs() < 1e-9);
    }
}
