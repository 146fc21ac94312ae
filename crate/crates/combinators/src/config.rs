//! Constants of the combinator budgets.
//!
//! Every combinator adds terms of the form `c · loglog n` (framing costs)
//! and terms that depend on its own parameters (apex count, skinniness,
//! adhesion width, height).  The constants were calibrated once against the
//! measured maxima of the seed corpus and of unit- and random-weight
//! instances up to 2¹⁴ vertices (every layer fits from 4 upwards) and are
//! frozen here at twice that value.

use serde::{Deserialize, Serialize};
use wmls_core::codes::lgg;

/// Named constants of the combinator budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CombinatorConfig {
    /// Multiplier of the `loglog n` term added by an apex layer.
    pub apex_c: f64,
    /// Multiplier of the `loglog n` term added by a disjoint union.
    pub union_c: f64,
    /// Multiplier of the `loglog n` terms added by a skinny decomposition.
    pub skinny_c: f64,
    /// Multiplier of the `loglog n` terms added per level of a short
    /// decomposition.
    pub short_c: f64,
    /// Multiplier of the final `loglog n` term of the full composition.
    pub compose_c: f64,
    /// The clique-label constant used to choose the skinniness
    /// `b(n) = 2^⌈√(compose_g3 · log n)⌉`.
    pub compose_g3: f64,
}

impl Default for CombinatorConfig {
    fn default() -> Self {
        CombinatorConfig {
            apex_c: 8.0,
            union_c: 8.0,
            skinny_c: 8.0,
            short_c: 8.0,
            compose_c: 0.0,
            compose_g3: 4.0,
        }
    }
}

/// `loglog n`, bounded below by 1.
pub fn loglog(n: usize) -> f64 {
    lgg(lgg(n as f64))
}

/// `⌈log₂(x + 1)⌉`: bits needed to write the integers `0..=x`.
pub fn width_of(x: usize) -> usize {
    (usize::BITS - x.leading_zeros()) as usize
}
