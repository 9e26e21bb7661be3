//! Compiler, simulator and voltage optimizer for cascaded programmable
//! waveguide arrays.
//!
//! A section of the array is a tridiagonal Hamiltonian with strictly positive
//! propagation constants and couplings. The crate turns an arbitrary unitary
//! into a cascade of such sections analytically ([`planner::compile`]) or by
//! optimizing electrode voltages against a device model ([`optimize`]).

pub mod bench;
pub mod device;
pub mod error;
pub mod gates;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod optimize;
pub mod planner;
pub mod reck;
pub mod su2;

pub use error::{PwaError, Result};
pub use hamiltonian::TridiagonalHamiltonian;
pub use linalg::{CMatrix, CVector};
