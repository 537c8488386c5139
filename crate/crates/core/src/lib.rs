//! Architecture recovery and comparison.
//!
//! Facts about a system (entities, dependencies, per-entity token bags) are
//! extracted from source, fed to one of three recovery techniques, and the
//! resulting architectures are compared, checked for concern smells and put
//! through repeatable evaluation trials.

pub mod acdc;
pub mod arc;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod extract;
pub mod lda;
pub mod metrics;
pub mod model;
pub mod pkg;
pub mod rsf;
pub mod smells;
pub mod text;

pub use error::{Error, Result};
pub use model::{Architecture, DependencyGraph, Entity, EntitySet, TransformOps};
