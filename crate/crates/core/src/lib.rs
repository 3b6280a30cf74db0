//! Streaming two-coloring of `n`-uniform hypergraphs.
//!
//! Hyperedges arrive one at a time and the colorers keep only per-vertex
//! state (plus, for the certified variant, a few residual vertex sets capped
//! at `n` entries each). The crate is organised by algorithm family:
//!
//! * [`hypergraph`] and [`oracle`]: domain types, coloring validity and the
//!   exhaustive two-colorability oracle used by the test suites.
//! * [`stream_io`]: the `HGS1` edge-stream text format and random instance
//!   generators.
//! * [`recolor`]: delayed recoloring, both the offline form that sees the
//!   whole hypergraph and the one-pass streaming form. Given the same
//!   [`tape::RandomTape`] the two produce the same coloring.
//! * [`certified`]: streaming delayed recoloring that either returns a valid
//!   coloring or declares failure.
//! * [`sparse_vertex`]: balanced-split colorers for hypergraphs on few
//!   vertices, together with the monochromatic-probability and `m(n, t)`
//!   bounds that govern them.
//! * [`local_lemma`]: a multi-pass resampling colorer for hypergraphs whose
//!   edges meet few others.
//! * [`protocol`]: a toy-scale one-round two-player protocol built from
//!   random lists of colorings.
//! * [`bench`]: the Monte Carlo trial harness behind `hypercolor bench`.
//!
//! ```
//! use hypercolor::{certified, recolor, stream_io, tape::RandomTape};
//!
//! let (n, v, q) = (12, 144, 900);
//! let edges: Vec<_> = stream_io::gen_uniform_random(v, n, q, 7).unwrap().collect();
//! let p = recolor::p_default(n).unwrap();
//! let outcome = certified::certified_stream_color(&edges, &RandomTape::new(1), p, n);
//! if let Ok(coloring) = &outcome.result {
//!     let h = hypercolor::Hypergraph::from_edges(n, edges.iter().cloned()).unwrap();
//!     assert!(hypercolor::validate_coloring(&h, coloring).unwrap().is_empty());
//! }
//! ```

pub mod bench;
pub mod certified;
pub mod combinatorics;
mod error;
pub mod hypergraph;
pub mod local_lemma;
pub mod oracle;
mod outcome;
pub mod protocol;
pub mod recolor;
pub mod rng;
pub mod sparse_vertex;
pub mod stream_io;
pub mod tape;

pub use error::{Error, ParseErrorKind, Result};
pub use hypergraph::{
    is_monochromatic, max_edge_intersections, validate_coloring, Assignment, Color, Coloring,
    Hyperedge, Hypergraph, KColoring, VertexId, MIN_UNIFORMITY,
};
pub use oracle::brute_force_two_colorable;
pub use outcome::{ColorOutcome, Failure, RunStats};
