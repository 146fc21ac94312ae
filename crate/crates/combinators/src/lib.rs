//! Scheme combinators.
//!
//! Each combinator turns a weighted mixed labelling scheme for a base class
//! into one for a larger class: graphs with a few apex vertices
//! ([`Apex`]), disjoint unions ([`Union`]), graphs with a skinny rooted
//! decomposition ([`Skinny`]), graphs with a shallow rooted decomposition
//! ([`Short`]), and graphs with an arbitrary tree-decomposition of bounded
//! adhesion-width ([`Composed`]).  Testers dispatch on part counts and flag
//! bits of the labels only.

pub mod apex;
pub mod compose;
pub mod config;
pub mod short;
pub mod skinny;
pub mod union;
pub mod witness;

pub use apex::Apex;
pub use compose::{ComposeData, Composed};
pub use config::CombinatorConfig;
pub use short::{ForestData, Short};
pub use skinny::{LayerData, Skinny};
pub use union::Union;
pub use witness::{ApexWitness, DecompWitness, UnionWitness};
