//! Per-vertex randomness for delayed recoloring.
//!
//! Each vertex `u` gets an initial color, a recoloring bit and a priority.
//! Ascending `(priority, u)` order is the random permutation in which the
//! offline algorithm visits vertices. All three are functions of
//! `(seed, u)` only, so offline and streaming runs see identical values no
//! matter when `u` first appears.

use std::collections::HashMap;

use crate::hypergraph::{Color, VertexId};
use crate::rng::{derive, unit_f64};

const TAG_COLOR: u64 = 1;
const TAG_RECOLOR: u64 = 2;
const TAG_PRIORITY: u64 = 3;

/// Source of the `(initial color, recoloring bit, priority)` triple per vertex.
pub trait Tape {
    fn initial_color(&self, u: VertexId) -> Color;
    /// The Bernoulli(`p`) recoloring bit.
    fn recolor_bit(&self, u: VertexId, p: f64) -> bool;
    fn priority(&self, u: VertexId) -> u64;

    /// Sort key realising the permutation; ties broken by vertex id.
    fn order_key(&self, u: VertexId) -> (u64, VertexId) {
        (self.priority(u), u)
    }
}

/// The seed-keyed tape used everywhere outside hand-built tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomTape {
    seed: u64,
}

impl RandomTape {
    pub fn new(seed: u64) -> Self {
        RandomTape { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Tape for RandomTape {
    fn initial_color(&self, u: VertexId) -> Color {
        if derive(self.seed, &[TAG_COLOR, u.0 as u64]) & 1 == 0 {
            Color::Red
        } else {
            Color::Blue
        }
    }

    fn recolor_bit(&self, u: VertexId, p: f64) -> bool {
        unit_f64(derive(self.seed, &[TAG_RECOLOR, u.0 as u64])) < p
    }

    fn priority(&self, u: VertexId) -> u64 {
        derive(self.seed, &[TAG_PRIORITY, u.0 as u64])
    }
}

/// An explicit table, for hand-traced scenarios. `p` is ignored.
///
/// Looking up a vertex that is not in the table panics.
#[derive(Clone, Debug, Default)]
pub struct FixedTape {
    entries: HashMap<VertexId, (Color, bool, u64)>,
}

impl FixedTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, u: u32, color: Color, recolor: bool, priority: u64) -> Self {
        self.entries.insert(VertexId(u), (color, recolor, priority));
        self
    }

    fn entry(&self, u: VertexId) -> (Color, bool, u64) {
        *self
            .entries
            .get(&u)
            .unwrap_or_else(|| panic!("vertex {u} missing from fixed tape"))
    }
}

impl Tape for FixedTape {
    fn initial_color(&self, u: VertexId) -> Color {
        self.entry(u).0
    }

    fn recolor_bit(&self, u: VertexId, _p: f64) -> bool {
        self.entry(u).1
    }

    fn priority(&self, u: VertexId) -> u64 {
        self.entry(u).2
    }
}
