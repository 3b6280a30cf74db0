//! The guide's code listings, compiled and run as doctests.
//!
//! One module per chapter so a failing listing points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/streams.md")]
pub mod streams {}
#[doc = include_str!("../../../book/src/delayed_recoloring.md")]
pub mod delayed_recoloring {}
#[doc = include_str!("../../../book/src/certified.md")]
pub mod certified {}
#[doc = include_str!("../../../book/src/few_vertices.md")]
pub mod few_vertices {}
#[doc = include_str!("../../../book/src/local_lemma.md")]
pub mod local_lemma {}
#[doc = include_str!("../../../book/src/protocol.md")]
pub mod protocol {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
