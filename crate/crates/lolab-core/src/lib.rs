//! Verification toolkit for the polymorphisms of the promise template
//! `(LO_2, LO_3)` together with the instance-level algorithms around it.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod aip;
pub mod error;
pub mod families;
pub mod hypergraph;
pub mod minors;
pub mod polymorph;
pub mod recolour;
pub mod sets;
pub mod structure;
pub mod templates;

pub use error::{Error, Result};
