//! Gross-Pitaevskii ground states of trapped dilute Bose gases, the
//! zero-energy scattering length, the Thomas-Fermi limit, and the numeric
//! upper/lower bounds that bracket the many-body ground state energy.
//!
//! Units throughout are ħ = 2m = 1, with the trap setting the length unit.
//!
//! The crate is organised by stage of the computation:
//!
//! - [`potentials`]: trap potentials `V(x)` and radial pair interactions `v(r)`.
//! - [`scattering`]: the zero-energy scattering equation, scattering length and
//!   its truncation certificates.
//! - [`gp`]: the GP energy functional, its constrained minimiser on radial and
//!   Cartesian grids, and the diagnostics built on a converged minimiser.
//! - [`tf`]: the Thomas-Fermi functional and the GP to TF convergence study.
//! - [`bounds`]: the Dyson-type upper bound, the chemical-potential bound and
//!   the box-assembled lower bound.
//! - [`cli`]: the batch front-end used by the `bosegp` binary.

// `!(x > 0.0)` is the NaN-rejecting form of every domain check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
mod error;
mod float;
pub mod gp;
pub mod interp;
pub mod potentials;
pub mod quad;
pub mod scattering;
pub mod tf;

pub use error::{Error, Result};
