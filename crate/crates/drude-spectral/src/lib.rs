//! Spectral toolkit for the TE Maxwell system at a vacuum/Drude interface.
//!
//! The crate builds the generalized Fourier transform that diagonalizes the
//! conservative Hamiltonian of a vacuum half-plane (x < 0) glued to a
//! non-dissipative Drude half-plane (x > 0), and uses it to compute spectral
//! densities, resolvents, limiting-absorption fields and long-time responses.
//! An independent Yee time-domain solver serves as an oracle.

// Negated comparisons are deliberate: `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops over parallel component arrays read closer to the stencils.
#![allow(clippy::needless_range_loop)]

pub mod density;
pub mod error;
pub mod fdtd_oracle;
pub mod fields;
mod linalg;
pub mod medium;
pub mod modes;
pub mod par;
pub mod quadrature;
pub mod resolvent_evolution;
pub mod spectral_geometry;
pub mod transform;

pub use error::{DrudeError, Result};
pub use medium::{MediumParams, Side};
pub use spectral_geometry::ZoneLabel;
