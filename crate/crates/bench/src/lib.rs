//! Front end for configuring, running and reporting solver benchmarks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
