//! Model structures on pro-categories of cofinite diagrams, made executable over two
//! finite base model categories.

pub mod axioms;
pub mod base;
pub mod cert;
pub mod cli;
pub mod document;
pub mod error;
pub mod gen;
pub mod gf2;
pub mod index;
pub mod par;
pub mod pro;
pub mod strict;
pub mod towers;
pub mod verify;

pub use error::{Error, Result};
