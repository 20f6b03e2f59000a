#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod evolution;
pub mod lattice;
pub mod mesh;
pub mod special;
pub mod symbol;

pub use error::{Error, Result};
