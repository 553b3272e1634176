//! Numerical engine for GKLS (Lindblad) dynamics of a free scalar field
//! quantized on a finite periodic momentum lattice with a per-mode
//! occupation cutoff.
//!
//! The crate is organized around the shared geometry of [`fockspace::ModeSet`]
//! (box length L, mode indices −J…J, mass m) and the truncated multimode
//! [`fockspace::FockBasis`]. On top of that sit:
//!
//! - [`generators`]: H, P, field operators, and the decay/decoherence
//!   dissipators with their GKLS actions,
//! - [`integrator`]: fixed-step RK4 evolution of density matrices with
//!   physicality monitors and trajectory recording,
//! - [`dilation`]: a repeated-interaction (collision) unitary dilation of
//!   the decay dissipator, used as an independent oracle,
//! - [`boostpde`]: exact finite-boost transformations of second-order
//!   constant-coefficient field equations.
//!
//! Everything is immutable after construction and pure in its inputs, so
//! values can be shared freely across threads for parameter sweeps.

pub mod boostpde;
pub mod dilation;
pub mod error;
pub mod fockspace;
pub mod generators;
pub mod integrator;
pub mod linalg;

pub use error::CoreError;

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;
