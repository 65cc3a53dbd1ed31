//! Separatrix strips and right inverses for planar polynomial vector fields
//! `L = p(t)∂t + q(t)∂x`.

pub mod error;
pub mod field;
pub mod fit;
pub mod poly;
pub mod polysolve;
pub mod problem;
pub mod quad;
pub mod rhs;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{FieldModel, Strip, StripDecomposition, VectorField};
pub use poly::{PartialFractions, Pole, Poly};
pub use problem::{ProblemSpec, RhsSpec};
pub use rhs::{Builtin, GrowthMode, Rhs, SobolevParams};
pub use solver::{global_inverse, GlobalWeakSolution, StripSolution};
pub use spectral::{Perturbation, PicardConfig, Symbol};
