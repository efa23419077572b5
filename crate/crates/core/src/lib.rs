//! Uniform spanning trees of dense graphs and their graphon limits.
//!
//! The crate covers multigraph primitives, electrical quantities, random
//! walks, UST sampling, step graphons, rooted-tree statistics, frequency
//! functionals, expander decompositions, the limiting branching process and
//! the extremal degree bounds, plus an experiment CLI.

pub mod branching;
pub mod cli;
pub mod decompose;
pub mod electric;
pub mod error;
pub mod extremal;
pub mod freq;
pub mod graph;
pub mod graphon;
pub mod rng;
pub mod trees;
pub mod ust;
pub mod walk;

pub use decompose::ExpanderDecomposition;
pub use error::{Error, ErrorClass, Result};
pub use graph::{Edge, MultiGraph};
pub use graphon::StepGraphon;
pub use trees::RootedTree;
pub use ust::SpanningTree;
