//! Doppler-shift physical-layer secret key generation for inter-spacecraft links.
//!
//! Two spacecraft that move relative to each other observe the same Doppler
//! shift on their reciprocal links. The random part of that motion is a shared
//! secret: each side transmits pilots, estimates the nominal power spectral
//! density sample (NPSDS) from the received power spectrum and quantizes it into
//! key symbols. An eavesdropper sees a different relative velocity and therefore
//! a different NPSDS.
//!
//! The crate is `no_std` (it needs `alloc`) and only does numerics:
//!
//! - [`geometry`]: mobility model, relative Doppler, eavesdropper observability,
//!   timing feasibility.
//! - [`signalchain`]: BPSK pilots and the baseband link (path loss, Doppler
//!   rotation, AWGN).
//! - [`spectrum`]: DFT, power spectrum, NPSDS laws and the ML estimator.
//! - [`keygen`]: quantizer, key streams, per-duration simulation, KDR and MSE.
//! - [`analytic`]: key rate, NPSDS and estimator densities, key matching
//!   probability.
//! - [`quadrature`], [`stats`], [`math`]: numerical support.
//!
//! Randomness is always passed in explicitly, so every function is
//! deterministic given its generator state.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
mod error;
pub mod geometry;
pub mod keygen;
pub mod math;
pub mod quadrature;
pub mod scenario;
pub mod signalchain;
pub mod spectrum;
pub mod stats;

pub use error::{Error, Result};
pub use scenario::Scenario;
