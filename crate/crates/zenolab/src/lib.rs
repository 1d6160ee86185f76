//! Numerical laboratory for the survival dynamics of decaying quantum
//! systems (`hbar = 1` throughout).
//!
//! The crate is organized around the chain of models that connects frequent
//! observation to decay suppression:
//!
//! * [`qdyn`] — dense complex propagators, survival amplitudes, Hamiltonian
//!   moments and the Zeno time of finite-dimensional systems;
//! * [`measurement`] — pulsed (projective) and continuous (absorptive)
//!   measurement schedules and their effective decay rates;
//! * [`continuum`] — a two-level system coupled to a flat boson continuum,
//!   integrated exactly and reduced to its non-Hermitian 2x2 dynamics;
//! * [`resolvent`] — form factors, self-energy functions with
//!   principal-value boundary values, continuation to the second Riemann
//!   sheet, resonance-pole search and the golden-rule width;
//! * [`inversion`] — reconstruction of the exact survival amplitude from the
//!   spectral density, pole/cut decomposition and the three decay regimes;
//! * [`nlevel`] — a brute-force N-level discretization used as an
//!   independent oracle for everything the spectral route produces.
//!
//! [`config`] and [`report`] carry the JSON/CSV surface consumed by the
//! command-line front end, and [`acceptance`] bundles the end-to-end checks
//! the CLI exposes as `zenolab acceptance`.

pub mod acceptance;
pub mod config;
pub mod continuum;
pub mod error;
pub mod inversion;
pub mod measurement;
pub mod nlevel;
pub mod qdyn;
pub mod quad;
pub mod report;
pub mod resolvent;

pub use error::{Error, Result};
