//! Finite separation systems and tree sets: orientations, quotients by
//! selections, inverse limits, characterization checks and bipartition
//! representations.

pub mod characterize;
pub mod generators;
pub mod inverse;
pub mod orientation;
pub mod quotient;
pub mod represent;
pub mod system;

pub use system::{is_tree_set, SeparationSystem, SystemError, SystemMap, TreeSet, TreeSetFailure};
