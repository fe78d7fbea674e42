//! Cooperative spontaneous emission of small arrays of identical two-level
//! atoms sharing one transition dipole direction.
//!
//! The single-excitation amplitudes obey `dC/dt = -Γ C` with a complex
//! symmetric coupling matrix `Γ` built from two dimensionless pair kernels.
//! This crate assembles `Γ`, diagonalizes it (closed-form cubic for three
//! atoms, dense Schur otherwise), propagates amplitudes, and evaluates the
//! directional and angle-integrated emission spectra.
//!
//! Lengths are in units of the resonant wavelength, rates and detunings in
//! units of the single-atom decay rate, times in its inverse.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod modes;
pub mod output;
pub mod reproduce;
pub mod scenario;
pub mod spectrum;

pub use num_complex::Complex64;

pub use crate::dynamics::{AmplitudeTrajectory, InitialState, ModeDecomposition};
pub use crate::error::{Error, Result};
pub use crate::geometry::{AtomConfig, PairGeometry, Vec3};
pub use crate::modes::{CouplingMatrix, ModeSet, ModelParams};
pub use crate::spectrum::{DetectorDirection, DetuningGrid, Normalization, Peak, SpectrumSeries};
