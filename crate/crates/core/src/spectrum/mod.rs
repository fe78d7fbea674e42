//! Emission spectra of the photon left behind after complete decay.
//!
//! With `f_n(δ) = Σ_m a_m b_n^(m) / (Γ_m - iδ)` the spectrum seen by a far
//! detector in direction `R̂` is
//!
//! ```text
//! S_R(δ) = (1 - (R̂·d̂)²) |Σ_n e^{-i k0 R̂·r_n} f_n(δ)|²
//! ```
//!
//! and its integral over all directions is the Hermitian form
//! `S(δ) = Σ_mn f_n f_m* T_mn` with `T_nn = 8π/3` and
//! `T_mn = (8π/3) D(x_mn, η_mn)`.
//!
//! Phases use the resonant wavenumber `k0 = 2π`, and the slowly varying
//! frequency prefactor is dropped, so spectra are in arbitrary units.

mod peaks;
mod quadrature;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ModeDecomposition;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, AtomConfig, Vec3};
use crate::kernels::kernel_d;
use crate::modes::ModeSet;

pub use peaks::{find_peaks, Peak};
pub use quadrature::SphereQuadrature;

/// Angular weight of an atom with itself, `∫ (1 - (R̂·d̂)²) dΩ`.
pub const SELF_WEIGHT: f64 = 8.0 * PI / 3.0;

/// Detunings `δ = ω - ω_eg` in units of the single-atom rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningGrid {
    values: Vec<f64>,
}

impl DetuningGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("detuning grid is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("detuning grid must be finite"));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("detuning grid must be strictly ascending"));
        }
        Ok(DetuningGrid { values })
    }

    /// `points` equally spaced values from `min` to `max` inclusive.
    pub fn uniform(min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(max > min) {
            return Err(Error::domain(format!(
                "need max > min and at least 2 points, got [{min}, {max}] x {points}"
            )));
        }
        let step = (max - min) / (points - 1) as f64;
        Self::new((0..points).map(|k| min + step * k as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    None,
    Peak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub grid: DetuningGrid,
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl SpectrumSeries {
    /// Rescales so the maximum is one. An all-zero series is left as is.
    pub fn normalized(mut self) -> Self {
        let max = self.values.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= max);
        }
        self.normalization = Normalization::Peak;
        self
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn detunings(&self) -> &[f64] {
        self.grid.values()
    }
}

/// Unit vector from the atoms towards a far detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorDirection {
    unit: Vec3,
}

impl DetectorDirection {
    pub fn new(unit: Vec3) -> Result<Self> {
        let n = norm(&unit);
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(Error::domain(format!(
                "detector direction must be a unit vector, |R| = {n}"
            )));
        }
        Ok(DetectorDirection { unit })
    }

    /// Polar angle from +z and azimuth from +x, in radians.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        DetectorDirection {
            unit: [st * cp, st * sp, ct],
        }
    }

    pub fn unit(&self) -> Vec3 {
        self.unit
    }
}

fn check_consistent(config: &AtomConfig, modes: &ModeSet, decomp: &ModeDecomposition) -> Result<()> {
    if modes.len() != config.len() || decomp.coefficients.len() != config.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} atoms, {} modes, {} coefficients",
            config.len(),
            modes.len(),
            decomp.coefficients.len()
        )));
    }
    Ok(())
}

/// `f(δ)` for every atom at once.
pub fn lineshapes(modes: &ModeSet, decomp: &ModeDecomposition, delta: f64) -> DVector<Complex64> {
    let shift = Complex64::new(0.0, delta);
    let weights = DVector::from_iterator(
        modes.len(),
        modes
            .eigenvalues()
            .iter()
            .zip(&decomp.coefficients)
            .map(|(&g, &a)| a / (g - shift)),
    );
    modes.vectors() * weights
}

/// `f_n(δ) = Σ_m a_m b_n^(m) / (Γ_m - iδ)`.
pub fn mode_lineshape(modes: &ModeSet, decomp: &ModeDecomposition, n: usize, delta: f64) -> Result<Complex64> {
    if n >= modes.len() {
        return Err(Error::domain(format!(
            "atom index {n} out of range for {} atoms",
            modes.len()
        )));
    }
    if decomp.coefficients.len() != modes.len() {
        return Err(Error::domain("decomposition and mode set differ in dimension"));
    }
    Ok(lineshapes(modes, decomp, delta)[n])
}

/// Off-diagonal angular weight `T_mn = (8π/3) D(x, θ)`.
pub fn pair_weight(x: f64, theta: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!(
            "pair weight needs a positive separation, got {x}"
        )));
    }
    Ok(SELF_WEIGHT * kernel_d(x, theta)?)
}

/// The full real symmetric matrix `T`.
pub fn weight_matrix(config: &AtomConfig) -> Result<DMatrix<f64>> {
    let n = config.len();
    let mut t = DMatrix::from_diagonal_element(n, n, SELF_WEIGHT);
    for pair in config.pair_geometry() {
        let w = pair_weight(pair.x, pair.eta)?;
        t[(pair.m, pair.n)] = w;
        t[(pair.n, pair.m)] = w;
    }
    Ok(t)
}

/// Angle-integrated spectrum from the closed-form weights.
pub fn total_spectrum(
    config: &AtomConfig,
    modes: &ModeSet,
    decomp: &ModeDecomposition,
    grid: &DetuningGrid,
) -> Result<SpectrumSeries> {
    check_consistent(config, modes, decomp)?;
    let weights = weight_matrix(config)?;
    let n = config.len();
    let values = grid
        .values()
        .par_iter()
        .map(|&delta| {
            let f = lineshapes(modes, decomp, delta);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut magnitude = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let term = f[b] * f[a].conj() * weights[(a, b)];
                    sum += term;
                    magnitude += term.norm();
                }
            }
            if sum.im.abs() > 1e-10 * magnitude.max(f64::MIN_POSITIVE) {
                return Err(Error::InternalConsistency(format!(
                    "spectrum at δ = {delta} has imaginary residue {:e}",
                    sum.im
                )));
            }
            Ok(sum.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    finish(grid, values)
}

fn finish(grid: &DetuningGrid, mut values: Vec<f64>) -> Result<SpectrumSeries> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if let Some((k, v)) = values.iter().enumerate().find(|(_, &v)| v < -1e-9 * max) {
        return Err(Error::InternalConsistency(format!(
            "spectrum is negative ({v:e}) at δ = {}",
            grid.values()[k]
        )));
    }
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(SpectrumSeries {
        grid: grid.clone(),
        values,
        normalization: Normalization::None,
    })
}

/// Per-atom phase factors `e^{-i k0 R̂·r_n}` and the polarization factor.
fn direction_factors(config: &AtomConfig, unit: &Vec3) -> (Vec<Complex64>, f64) {
    let phases = config
        .positions()
        .iter()
        .map(|r| Complex64::from_polar(1.0, -TAU * dot(unit, r)))
        .collect();
    let c = dot(unit, &config.dipole());
    (phases, (1.0 - c * c).max(0.0))
}

fn directional_value(f: &DVector<Complex64>, phases: &[Complex64], polarization: f64) -> f64 {
    let amp: Complex64 = phases.iter().zip(f.iter()).map(|(p, fn_)| p * fn_).sum();
    polarization * amp.norm_sqr()
}

/// Spectrum in one detector direction.
pub fn directional_spectrum(
    config: &AtomConfig,
    modes: &ModeSet,
    decomp: &ModeDecomposition,
    direction: &DetectorDirection,
    grid: &DetuningGrid,
) -> Result<SpectrumSeries> {
    check_consistent(config, modes, decomp)?;
    let (phases, polarization) = direction_factors(config, &direction.unit);
    let values = grid
        .values()
        .par_iter()
        .map(|&delta| directional_value(&lineshapes(modes, decomp, delta), &phases, polarization))
        .collect();
    finish(grid, values)
}

/// Integrates the directional spectrum over the sphere with a product
/// Gauss-Legendre × trapezoid rule of the given order.
pub fn quadrature_total_spectrum(
    config: &AtomConfig,
    modes: &ModeSet,
    decomp: &ModeDecomposition,
    grid: &DetuningGrid,
    order: usize,
) -> Result<SpectrumSeries> {
    check_consistent(config, modes, decomp)?;
    let rule = SphereQuadrature::new(order)?;
    let factors: Vec<(Vec<Complex64>, f64, f64)> = rule
        .nodes()
        .iter()
        .map(|(unit, w)| {
            let (phases, pol) = direction_factors(config, unit);
            (phases, pol, *w)
        })
        .collect();
    let values = grid
        .values()
        .par_iter()
        .map(|&delta| {
            let f = lineshapes(modes, decomp, delta);
            factors
                .iter()
                .map(|(phases, pol, w)| w * directional_value(&f, phases, *pol))
                .sum()
        })
        .collect();
    finish(grid, values)
}
