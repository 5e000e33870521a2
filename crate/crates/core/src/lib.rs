//! Quantum noise of multipixel linear measurements on multimode Gaussian light.
//!
//! Given a Gaussian state of the transverse field expressed in a basis of
//! sampled modes and a pixel layout with real gains, the crate finds the
//! detection mode that carries all the noise of the measurement, evaluates
//! the variance by two independent routes, classifies the multimode degree of
//! the state, and builds squeezing plans that beat the shot-noise limit for
//! one or several simultaneous measurements.
//!
//! All quantities are in photon-number units per exposure.

pub mod detection;
pub mod error;
pub mod linalg;
pub mod modes;
pub mod montecarlo;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
