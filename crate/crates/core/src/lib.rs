// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod capillary;
pub mod coupling;
pub mod eigen;
pub mod error;
pub mod field_io;
pub mod materials;
pub mod mesh;
pub mod metrics;
pub mod optical;
pub mod sparse;
pub mod sweep;

pub use error::{ConfigIssue, Error, Result};
