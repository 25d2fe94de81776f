//! Simulation configuration files (TOML).
//!
//! ```toml
//! dimension = 2
//! gamma = 0.3
//! window_size = 50.0
//! replications = 200
//! seed = 7
//! rotation_mode = "isotropic"
//!
//! [[grain]]
//! shape = "square.poly"   # relative to the config file
//! weight = 1.0
//!
//! [functional]
//! family = "skeleton"      # or "intrinsic", or "const:1,angle:1;cd=1"
//! x0 = [0.1, 0.0]          # optional perturbation
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::functionals::Family;
use crate::geom::{io, Vec3};
use crate::stochastic::{GrainDistribution, RotationAverage, RotationMode, Shape};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrainSpec {
    pub shape: PathBuf,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSpec {
    #[serde(default = "skeleton")]
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

fn skeleton() -> String {
    "skeleton".into()
}

impl Default for FunctionalSpec {
    fn default() -> Self {
        FunctionalSpec {
            family: skeleton(),
            x0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub dimension: usize,
    pub gamma: f64,
    pub window_size: f64,
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub rotation_mode: RotationMode,
    #[serde(default = "default_rotation_samples")]
    pub rotation_samples: usize,
    pub grain: Vec<GrainSpec>,
    #[serde(default)]
    pub functional: FunctionalSpec,
}

fn default_rotation_samples() -> usize {
    RotationAverage::default().samples
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl SimulationConfig {
    pub fn parse(text: &str) -> Result<SimulationConfig> {
        let cfg: SimulationConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SimulationConfig> {
        SimulationConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.dimension == 2 || self.dimension == 3) {
            return Err(Error::UnsupportedDimension(self.dimension));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!(
                "gamma must be finite and nonnegative, got {}",
                self.gamma
            ));
        }
        if !(self.window_size > 0.0 && self.window_size.is_finite()) {
            return bad(format!("window_size must be positive, got {}", self.window_size));
        }
        if self.replications < 2 {
            return bad("replications must be at least 2 for a standard error".into());
        }
        if self.rotation_samples == 0 {
            return bad("rotation_samples must be positive".into());
        }
        if self.grain.is_empty() {
            return bad("at least one [[grain]] is required".into());
        }
        if let Some(x0) = &self.functional.x0 {
            if x0.len() != self.dimension {
                return bad(format!(
                    "x0 has {} coordinates, expected {}",
                    x0.len(),
                    self.dimension
                ));
            }
        }
        Ok(())
    }

    /// The functional family, perturbed by `x0` when given.
    pub fn family(&self) -> Result<Family> {
        let f = Family::parse(self.dimension, &self.functional.family)?;
        Ok(match &self.functional.x0 {
            Some(x) => {
                let mut v = Vec3::zeros();
                for (i, c) in x.iter().enumerate() {
                    v[i] = *c;
                }
                f.perturbed(&v)
            }
            None => f,
        })
    }

    /// Grain mixture with shape files resolved against `base`.
    pub fn grains(&self, base: &Path) -> Result<GrainDistribution> {
        let mut shapes = Vec::new();
        for g in &self.grain {
            let path = base.join(&g.shape);
            let parts = io::read_parts(&path)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            if parts[0].dim() != self.dimension {
                return Err(Error::DimensionMismatch {
                    expected: self.dimension,
                    found: parts[0].dim(),
                });
            }
            shapes.push((Shape::from_parts(parts)?, g.weight));
        }
        GrainDistribution::new(shapes, self.rotation_mode)
    }

    pub fn rotation_average(&self) -> RotationAverage {
        RotationAverage {
            samples: self.rotation_samples,
            seed: self.seed.unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = "dimension = 2\ngamma = 0.3\nwindow_size = 10.0\nreplications = 4\nrotation_mode = \"fixed\"\n[[grain]]\nshape = \"a.poly\"\nweight = 1.0\n";

    #[test]
    fn parses_minimal_config() {
        let c = SimulationConfig::parse(MIN).unwrap();
        assert_eq!(c.functional.family, "skeleton");
        assert_eq!(c.seed, None);
        assert_eq!(c.rotation_mode, RotationMode::Fixed);
    }

    #[test]
    fn rejects_schema_violations() {
        let e = SimulationConfig::parse(&MIN.replace("replications = 4", "replications = 1"));
        assert!(matches!(e, Err(Error::InvalidArgument(_))));
        let e = SimulationConfig::parse(&format!("{MIN}colour = 3\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }), "{e:?}");
        let e = SimulationConfig::parse(&MIN.replace("gamma = 0.3", "gamma = \"x\"")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
    }
}
