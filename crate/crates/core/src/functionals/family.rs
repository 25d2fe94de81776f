use serde::{Deserialize, Serialize};

use crate::geom::{check_dim, Vec3};
use crate::spherical::{external_angle, linear_moment, SphericalPolytope};
use crate::{Error, Result};

/// One associated function `f_j`, evaluated on spherical polytopes of
/// dimension `d - j - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FunctionKind {
    /// `f(p) = c`.
    Constant(f64),
    /// `f(p) = c * (external angle of p)`.
    ExternalAngle(f64),
    /// `f(p) = base(p) + ∫_p <u, x0> dω(u)`.
    Perturbed { base: Box<FunctionKind>, x0: [f64; 3] },
}

impl FunctionKind {
    pub fn eval(&self, p: &SphericalPolytope) -> Result<f64> {
        match self {
            FunctionKind::Constant(c) => Ok(*c),
            FunctionKind::ExternalAngle(c) => Ok(c * external_angle(p)?),
            FunctionKind::Perturbed { base, x0 } => Ok(base.eval(p)? + linear_moment(p, &Vec3::from(*x0))?),
        }
    }

    /// Whether the function is invariant under rotations of its argument.
    pub fn rotation_invariant(&self) -> bool {
        !matches!(self, FunctionKind::Perturbed { x0, .. } if x0.iter().any(|c| *c != 0.0))
    }

    /// Parses `const:C`, `angle:C` (`C` defaults to 1).
    pub fn parse(s: &str) -> Result<FunctionKind> {
        let s = s.trim();
        let (name, c) = match s.split_once(':') {
            Some((n, c)) => (
                n.trim(),
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad constant in `{s}`")))?,
            ),
            None => (s, 1.0),
        };
        match name {
            "const" | "constant" | "one" => Ok(FunctionKind::Constant(c)),
            "angle" | "external_angle" => Ok(FunctionKind::ExternalAngle(c)),
            _ => Err(Error::InvalidArgument(format!("unknown function kind `{name}`"))),
        }
    }
}

/// The associated functions `f_0, ..., f_{d-1}` and the volume coefficient
/// `c_d` of a local functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub d: usize,
    pub kinds: Vec<FunctionKind>,
    pub c_d: f64,
}

impl Family {
    pub fn new(d: usize, kinds: Vec<FunctionKind>, c_d: f64) -> Result<Family> {
        check_dim(d)?;
        if kinds.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: kinds.len(),
            });
        }
        Ok(Family { d, kinds, c_d })
    }

    /// `f_j ≡ 1`, `c_d = 1`: total `j`-content of the `j`-skeleton.
    pub fn skeleton(d: usize) -> Result<Family> {
        Family::new(d, vec![FunctionKind::Constant(1.0); d], 1.0)
    }

    /// External angles, `c_d = 1`: the intrinsic volumes.
    pub fn intrinsic_volumes(d: usize) -> Result<Family> {
        Family::new(d, vec![FunctionKind::ExternalAngle(1.0); d], 1.0)
    }

    /// Same family with every `f_j` shifted by the first moment against `x0`.
    /// The global values are unchanged while the local extension differs.
    pub fn perturbed(&self, x0: &Vec3) -> Family {
        Family {
            d: self.d,
            kinds: self
                .kinds
                .iter()
                .map(|k| FunctionKind::Perturbed {
                    base: Box::new(k.clone()),
                    x0: [x0.x, x0.y, x0.z],
                })
                .collect(),
            c_d: self.c_d,
        }
    }

    /// Copy with every degree except `j` switched off.
    pub fn only_degree(&self, j: usize) -> Family {
        let mut out = self.clone();
        for (i, k) in out.kinds.iter_mut().enumerate() {
            if i != j {
                *k = FunctionKind::Constant(0.0);
            }
        }
        if j != self.d {
            out.c_d = 0.0;
        }
        out
    }

    pub fn rotation_invariant(&self) -> bool {
        self.kinds.iter().all(FunctionKind::rotation_invariant)
    }

    /// Parses `skeleton`, `intrinsic`, or a list such as
    /// `const:1,angle:2;cd=0.5`.
    pub fn parse(d: usize, s: &str) -> Result<Family> {
        match s.trim() {
            "skeleton" | "ones" => return Family::skeleton(d),
            "intrinsic" | "intrinsic_volumes" => return Family::intrinsic_volumes(d),
            _ => {}
        }
        let (list, cd) = match s.split_once(';') {
            Some((l, rest)) => {
                let v = rest
                    .trim()
                    .strip_prefix("cd=")
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("bad `cd=` in `{s}`")))?;
                (l, v)
            }
            None => (s, 1.0),
        };
        let kinds = list
            .split(',')
            .map(FunctionKind::parse)
            .collect::<Result<Vec<_>>>()?;
        Family::new(d, kinds, cd)
    }

    pub(crate) fn f(&self, j: usize) -> &FunctionKind {
        &self.kinds[j]
    }
}
