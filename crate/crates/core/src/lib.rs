//! Joint laws of dependent maxima and minima, and recovery of the component
//! distributions from them.

pub mod cli;
pub mod dependence;
pub mod dist;
pub mod empirics;
pub mod error;
pub mod forward;
pub mod reconstruct;

pub use error::{Error, Result};
