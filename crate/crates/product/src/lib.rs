//! Labelling scheme for subgraphs of `H ⊠ P`, where `H` has treewidth at
//! most `k` and `P` is a path.
//!
//! The witness places every vertex on a host vertex and a row; labels
//! combine a weight-balanced code for the row with a short path in a
//! per-row B-tree whose leaves are the row's vertices in interval order.

pub mod btree;
pub mod generate;
pub mod intervals;
pub mod rows;
pub mod scheme;
pub mod witness;

pub use scheme::{build_structure, ProductBudget, ProductScheme, ProductStructure, Splice};
pub use witness::{ProductWitness, ProductWitnessJson};
