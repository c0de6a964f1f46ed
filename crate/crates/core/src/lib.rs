//! Smoothed elliptic gamma values attached to complex cubic fields, and a
//! numerical verification harness around them.

// 3x3 coordinate loops read better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod conegeom;
pub mod cubicfield;
pub mod ellgamma;
pub mod error;
pub mod ideallat;
pub mod linalg;
pub mod numeric;
pub mod report;
pub mod verify;
pub mod zetakl;

pub use error::{Error, Result};
