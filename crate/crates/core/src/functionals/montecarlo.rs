//! Seeded, parallel Monte Carlo averages.
//!
//! Samples are split into fixed-size batches; batch `b` draws from ChaCha8
//! stream `b` of the master seed, and batch statistics are merged in batch
//! order, so results do not depend on the number of worker threads.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::family::Family;
use super::local::extension_measure;
use crate::geom::{translation_support, two_subspace_determinant, AaBox, FaceRef, Polytope, Region, Vec3};
use crate::rotation::random_rotation;
use crate::{Error, Result};

const BATCH: usize = 1024;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// From raw values (sample variance with `n - 1`).
    pub fn from_values(xs: &[f64]) -> McEstimate {
        let mut acc = Acc::default();
        for &x in xs {
            acc.push(x);
        }
        acc.estimate()
    }

    /// `(mean - target) / stderr`. A zero standard error gives zero when the
    /// difference is within rounding and infinity otherwise.
    pub fn z_score(&self, target: f64) -> f64 {
        z_score(self.mean, self.stderr, target)
    }
}

pub fn z_score(mean: f64, stderr: f64, target: f64) -> f64 {
    let diff = mean - target;
    if stderr > 0.0 && stderr.is_finite() {
        diff / stderr
    } else if diff.abs() <= 1e-9 * target.abs().max(1.0) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Acc {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Acc {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn merge(self, o: Acc) -> Acc {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Acc {
            n,
            mean: self.mean + delta * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + delta * delta * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    pub(crate) fn estimate(&self) -> McEstimate {
        let stderr = if self.n >= 2 {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            f64::INFINITY
        };
        McEstimate {
            mean: self.mean,
            stderr,
            samples: self.n,
        }
    }
}

/// Mean of `sample(rng)` over `n` draws.
pub fn mc_mean<F>(n: usize, seed: u64, sample: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let batches = n.div_ceil(BATCH);
    let parts: Vec<Result<Acc>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(n - b * BATCH);
            let mut acc = Acc::default();
            for _ in 0..count {
                acc.push(sample(&mut rng)?);
            }
            Ok(acc)
        })
        .collect();
    let mut acc = Acc::default();
    for p in parts {
        acc = acc.merge(p?);
    }
    Ok(acc.estimate())
}

/// Uniform point of the box.
pub fn uniform_in<R: rand::Rng + ?Sized>(b: &AaBox, rng: &mut R) -> Vec3 {
    let mut x = Vec3::zeros();
    for i in 0..b.d {
        x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * rng.random::<f64>();
    }
    x
}

/// Monte Carlo estimate of `∫ Φ^(j)(P ∩ (Q + x), A ∩ (B + x)) dx`.
#[allow(clippy::too_many_arguments)]
pub fn translative_lhs_mc(
    f: &Family,
    j: usize,
    p: &Polytope,
    q: &Polytope,
    a: &Region,
    b: &Region,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    iterated_lhs_mc(f, j, &[p, q], &[a, b], n, seed)
}

/// Monte Carlo estimate of
/// `∫ ... ∫ Φ^(j)(P_1 ∩ P_2^{x_2} ∩ ... ∩ P_k^{x_k}, A_1 ∩ A_2^{x_2} ∩ ...) dx_2 ... dx_k`,
/// with each `x_i` drawn uniformly from the box of translations for which
/// `P_1` and `P_i + x_i` can meet.
pub fn iterated_lhs_mc(
    f: &Family,
    j: usize,
    polys: &[&Polytope],
    regions: &[&Region],
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if polys.len() < 2 || regions.len() != polys.len() {
        return Err(Error::InvalidArgument(
            "need at least two polytopes and one region per polytope".into(),
        ));
    }
    if j > f.d {
        return Err(Error::FaceDimension { j, max: f.d });
    }
    if let Some(p) = polys.iter().find(|p| p.dim() != f.d) {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            found: p.dim(),
        });
    }
    let boxes: Vec<AaBox> = polys[1..]
        .iter()
        .map(|q| translation_support(polys[0], q))
        .collect();
    let scale: f64 = boxes.iter().map(AaBox::volume).product();
    if scale == 0.0 {
        return Ok(McEstimate {
            mean: 0.0,
            stderr: 0.0,
            samples: n,
        });
    }
    mc_mean(n, seed, |rng| {
        let mut cur: Option<Polytope> = None;
        let mut region = regions[0].clone();
        for (i, bx) in boxes.iter().enumerate() {
            let x = uniform_in(bx, rng);
            let moved = polys[i + 1].translate(&x);
            match cur.as_ref().unwrap_or(polys[0]).intersect(&moved)? {
                Some(c) => cur = Some(c),
                None => return Ok(0.0),
            }
            region.halfspaces.extend(regions[i + 1].translate(&x).halfspaces);
        }
        let cur = cur.expect("at least two factors");
        Ok(scale * extension_measure(f, j, &cur, &region)?)
    })
}

/// Average of `[F, ϑG]` over uniform rotations `ϑ`.
pub fn rotation_average_determinant(
    fa: &FaceRef<'_>,
    ga: &FaceRef<'_>,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    let d = fa.parent.dim();
    if ga.parent.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: ga.parent.dim(),
        });
    }
    let l = fa.basis().to_vec();
    let m = ga.basis().to_vec();
    mc_mean(n, seed, |rng| {
        let r = random_rotation(d, rng);
        let rm: Vec<Vec3> = m.iter().map(|v| r * v).collect();
        Ok(two_subspace_determinant(&l, &rm, d))
    })
}
