#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exec;
pub mod grid;
pub mod oracle;
pub mod response;
pub mod special;
pub mod sweep;
pub mod units;
