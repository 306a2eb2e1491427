//! Exact normal forms for real-analytic CR submanifolds of higher codimension.
#![no_std]

extern crate alloc;

pub mod appendix;
pub mod complexdef;
pub mod conditions;
pub mod conjugacy;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod fischer;
pub mod linalg;
pub mod quadric;
pub mod rat;
pub mod series;
#[cfg(feature = "testing")]
pub mod testing;

pub use error::{Error, Result};
