//! Core building blocks for weighted mixed labelling schemes: bit codes,
//! graphs and weights, tree decompositions, and the scheme interface shared by
//! the product scheme and the combinators.

pub mod codes;
pub mod graph_model;
pub mod mls;
pub mod decomp;
