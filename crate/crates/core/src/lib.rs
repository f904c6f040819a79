//! Free resolutions of toric sheaves computed through compressed representations of finite posets.
#![allow(clippy::type_complexity, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod exactla;
pub mod globres;
pub mod grmod;
pub mod poset;
pub mod posrep;
pub mod reflexive;
pub mod toricfan;
pub mod zbar;

pub use error::{Error, Result};
