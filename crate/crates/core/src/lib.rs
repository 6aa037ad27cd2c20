//! Modes, generalized fluxes, gauge potentials and quantization constants of
//! coaxial and hollow cylindrical waveguides.

// `!(x > 0.0)` is how NaN inputs get rejected here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub mod expr;
pub mod model;
pub mod profiles;
pub mod emdyn;
pub mod gauge;
pub mod quantize;
pub mod verify;
