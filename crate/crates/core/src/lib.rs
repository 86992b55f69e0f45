//! Dependency systems, generalized Barthe scaling and Sylvester-Gallai type
//! dimension certificates for arrangements of low-dimensional subspaces.

pub mod arrangement;
pub mod certifier;
pub mod dependency;
pub mod linalg;
pub mod rational;
pub mod scalar;
pub mod scaling;

pub use arrangement::{Arrangement, Subspace};
pub use certifier::{certify, decompose_step, separated_certificate, CertifyError, CertifyOptions, Trace};
pub use dependency::{build_sg_system, validate_system, TripleSystem};
pub use linalg::{Matrix, Tolerance};
pub use rational::Rational;
pub use scalar::Real;
pub use scaling::{barthe_scale, optimize, sample_admissible, OptimizeOptions, ScalingMap};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Subspace64 = Subspace<f64>;
pub type Subspace32 = Subspace<f32>;
pub type Arrangement64 = Arrangement<f64>;
pub type Arrangement32 = Arrangement<f32>;
pub type Tolerance64 = Tolerance<f64>;
