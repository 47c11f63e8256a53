// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod commands;
pub mod error;
pub mod graph;
pub mod io;
pub mod learn;
pub mod lp;
pub mod pocs;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
