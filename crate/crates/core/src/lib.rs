//! Numerics for weighted Liouville equations with collapsing singularities.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything here is a pure function of its inputs; file formats,
//! the command line and parallel drivers live in the `liouville-lab` crate.
//!
//! Modules:
//!
//! - [`radial`]: shooting for `-(r v')' = r K(r) e^v`, the mass functional
//!   `beta`, its derivative through the linearized equation, Kelvin inversion
//!   and zero-structure diagnostics.
//! - [`mass_curve`]: sweeps of `a -> beta(a)` for the weight `(1+r^2)^alpha`,
//!   minimizer search, multiplicity of radial solutions.
//! - [`collapse`]: the regularized-weight collapse experiment showing a local
//!   mass of exactly 4 (that is `8 pi`) forming at the origin.
//! - [`vortex`]: the unique blow-up point configuration from the symmetric
//!   function recurrence and its characteristic polynomial.
//! - [`relations`]: closed-form mass relations and the height formula.
//! - [`disk`]: a damped-Newton log-polar finite-difference solver on the unit
//!   disk and the height-scaling continuation.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod collapse;
pub mod disk;
mod error;
pub mod linalg;
pub mod mass_curve;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod radial;
pub mod relations;
pub mod roots;
pub mod units;
pub mod vortex;

pub use error::{Error, Result};
