//! Microlocal solid–fluid interface wave theory.
//!
//! The crate is organised bottom-up:
//!
//! * [`media`]: material parameters, derived speeds and radially symmetric models.
//! * [`microlocal`]: boundary covectors, region classification and vertical wavenumbers.
//! * [`symbols`]: principal symbols of the acoustic DtN map and the elastic
//!   potential-to-trace (`U`) and potential-to-traction (`M`) maps.
//! * [`interface`]: the six reduced transmission systems, their closed-form
//!   determinants, controllability solvers and angle scans.
//! * [`scholte`]: the Scholte secular function, its root and the interface mode.
//! * [`rays`]: Hamiltonian ray tracing with interface branching and surface rays.
//! * [`inverse`]: travel-time tables and recovery of the fluid speed profile.
//!
//! All covector computations assume the metric is Euclidean at the evaluation
//! point, the interface is locally `x3 = 0` with the solid on `x3 > 0`, and
//! the unit normal points into the fluid.

pub mod error;
pub mod interface;
pub mod inverse;
pub mod linalg;
pub mod media;
pub mod microlocal;
pub mod rays;
pub mod sampling;
pub mod scholte;
pub mod selftest;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Canonical test material used across the crate: `(c_s, c_p, c_f) = (1, 2, 1.5)`.
pub fn canonical_material() -> media::MaterialPoint {
    media::MaterialPoint::new(
        media::SolidParams::new(2.0, 1.0, 1.0).expect("canonical solid"),
        media::FluidParams::new(2.25, 1.0).expect("canonical fluid"),
    )
}
