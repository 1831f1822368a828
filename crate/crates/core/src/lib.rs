#![allow(clippy::needless_range_loop, clippy::result_large_err)]

pub mod classposet;
pub mod cli;
pub mod finspace;
pub mod fixtures;
pub mod funspec;
pub mod padic;
pub mod preserve;
pub mod rational;
pub mod reproduce;
