//! Linear solutions of generalized combination networks over finite fields,
//! covering Grassmannian codes, and bounds on the number of middle nodes.

pub mod bounds;
pub mod cli;
pub mod combnet;
pub mod ffield;
pub mod formats;
pub mod grassmann;
pub mod linalg;
pub mod rankmetric;

pub use combnet::{classify, LinearSolution, NetworkParams, SolvabilityClass};
pub use ffield::{FieldElement, FieldSpec};
pub use grassmann::CoveringCode;
pub use linalg::{Matrix, Subspace};
