#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod geometry;
pub mod hajlasz;
pub mod hardy;
pub mod harness;
pub mod measure;
pub mod numerics;
pub mod potential;
pub mod ri_norms;

pub use error::{Error, Result};
pub use exec::Execution;
