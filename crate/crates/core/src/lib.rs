#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod census;
pub mod config;
pub mod constructor;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod map;
pub mod operators;
pub mod rational;
pub mod report;
pub mod spectral;
pub mod spinor;

pub use error::{Error, Result};
