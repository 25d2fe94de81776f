//! Local functionals given by associated functions, their local extensions,
//! mixed functionals and Monte Carlo checks of the translative formulas.

mod family;
mod local;
mod mixed;
pub mod montecarlo;

pub use family::{Family, FunctionKind};
pub use local::{extension_measure, extension_total, face_weight, phi_degrees, phi_homogeneous, phi_total};
pub(crate) use mixed::mixed_sum;
pub use mixed::{index_vectors, mixed_functional, mixed_measure, translative_rhs, MixedFunctionalValue};
pub use montecarlo::{iterated_lhs_mc, rotation_average_determinant, translative_lhs_mc, McEstimate};
