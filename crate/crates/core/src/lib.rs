#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod manifold;
pub mod phase_space;
pub mod quantum;
pub mod rotor;
pub mod seeds;
pub mod semiclassics;

pub use error::{Error, Result};
