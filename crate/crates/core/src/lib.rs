//! Distance estimation from hop counts in random geometric graphs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embed;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod hopdist;
pub mod io;
pub mod linkgraph;
pub mod mvu;

pub use error::{Error, Result};
