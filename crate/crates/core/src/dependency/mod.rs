//! Dependent triples, special spaces and (alpha, delta)-systems.

mod detect;
mod family;
mod io;
mod system;
mod transform;

pub use detect::{dependent_triples, find_special_spaces, is_dependent_triple, SpecialSpace};
pub use family::build_triple_family;
pub use io::{parse_system, write_system};
pub use system::{build_sg_system, validate_system, DepSet, TripleSystem, ValidationReport, Violation};
pub use transform::{map_and_clean, prune_low_degree, Cleaned, Pruned};

use crate::arrangement::ArrangementError;
use crate::linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DependencyError {
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("zero-intersection precondition violated: spaces {0} and {1} intersect nontrivially")]
    IntersectingPair(usize, usize),
    #[error("space {index} has dimension {dim}, above the bound k = {k}")]
    NotKBounded { index: usize, dim: usize, k: usize },
    #[error("triple family needs r >= 3, got {0}")]
    FamilyTooSmall(usize),
    #[error("set {set} mentions index {index}, but n = {n}")]
    IndexOutOfRange { set: usize, index: usize, n: usize },
    #[error("set {set} repeats index {index}")]
    RepeatedIndex { set: usize, index: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerically inconsistent image: set {set} has {zeroed} of {size} members mapped to zero")]
    InconsistentImage { set: usize, zeroed: usize, size: usize },
    #[error("every space was mapped to zero")]
    AllAnnihilated,
    #[error("system failed validation: {0}")]
    Invalid(ValidationReport),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
