//! Pseudo-spectral solver and verification toolkit for the incompressible
//! Navier–Stokes–Maxwell system on a periodic box.
//!
//! Every numerical type is generic over a [`Real`] scalar; the aliases at the
//! crate root fix it to `f64`, which is what the command-line tool and the
//! documented tolerances use.

pub mod dyadic;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod maxwell;
pub mod periodic;
pub mod physics;
pub mod scalar;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

/// Double-precision lattice handle.
pub type Lattice = spectral::LatticeRef<f64>;
/// Double-precision vector field.
pub type Field = spectral::SpectralField<f64>;
/// Double-precision scalar field.
pub type Scalar = spectral::ScalarField<f64>;
