//! Random walks on symmetrically self-similar graphs: exact transfer
//! functions of the generating cell, the dynamics of the transition function
//! d, spectrum bounds, and Green functions continued beyond the unit disc.

pub mod cellmodel;
pub mod dynamics;
mod error;
pub mod green;
pub mod oracle;
pub mod ratfun;
pub mod transfer;
mod walk;

pub use error::{Error, ErrorKind};
