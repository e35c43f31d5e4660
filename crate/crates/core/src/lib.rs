//! Eigenfunction expansions for the three-dimensional Aharonov–Bohm
//! Hamiltonian and its radial reductions `−∂²_r + (κ² − 1/4)/r²`.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ab3d;
mod dd;
pub mod error;
pub mod measures;
pub mod quadrature;
pub mod special_fns;
pub mod transform1d;
pub mod verify;

pub use error::{Error, Result};
