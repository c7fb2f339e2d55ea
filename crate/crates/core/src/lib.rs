// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod outage;
pub mod parking;
pub mod simulation;
pub mod specfun;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
