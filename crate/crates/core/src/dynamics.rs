//! Single-excitation amplitude dynamics `C(t) = Σ_m a_m b^(m) e^{-Γ_m t}`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::{bilinear, ModeSet};

const NORM_TOL: f64 = 1e-12;
const MAX_CONDITION: f64 = 1e12;
const PROJECTION_TOL: f64 = 1e-10;

/// Amplitudes `C_n(0)` over the states `|e_n; 0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    amplitudes: DVector<Complex64>,
}

impl InitialState {
    /// Requires `Σ|C_n|² = 1` within `1e-12`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::unnormalized(amplitudes);
        let norm2 = state.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "initial state must be normalized, Σ|C|² = {norm2}"
            )));
        }
        Ok(state)
    }

    /// Any amplitude vector, e.g. a state part-way through a decay.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Self {
        InitialState {
            amplitudes: DVector::from_vec(amplitudes),
        }
    }

    /// Only atom `k` excited.
    pub fn excited(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::domain(format!("atom index {k} out of range for {n} atoms")));
        }
        Ok(Self::unnormalized(
            (0..n)
                .map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        ))
    }

    /// The symmetric state `Σ_n |e_n⟩ / √N`.
    pub fn dicke(n: usize) -> Self {
        Self::unnormalized(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }
}

/// Expansion coefficients `a_m` of a state in the eigenmode basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    pub coefficients: Vec<Complex64>,
}

/// Solves `[b^(1) … b^(N)] a = C(0)`.
///
/// For non-degenerate spectra the bilinear projections `b^(m)ᵀ C(0)` must
/// agree with the solve; a mismatch is an internal-consistency error.
pub fn decompose_initial(modes: &ModeSet, state: &InitialState) -> Result<ModeDecomposition> {
    let n = modes.len();
    if state.len() != n {
        return Err(Error::domain(format!(
            "state has {} amplitudes, modes have dimension {n}",
            state.len()
        )));
    }
    let basis = modes.vectors();
    let singular = basis.singular_values();
    let (smax, smin) = singular
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NonDiagonalizable { condition });
    }
    let solved = basis
        .clone()
        .lu()
        .solve(state.amplitudes())
        .ok_or(Error::NonDiagonalizable { condition })?;

    if !modes.is_degenerate() {
        let tol = PROJECTION_TOL * solved.norm().max(1.0);
        for m in 0..n {
            let projected = bilinear(&modes.eigenvector(m), state.amplitudes());
            if (projected - solved[m]).norm() > tol {
                return Err(Error::InternalConsistency(format!(
                    "mode {m}: projection {projected} disagrees with linear solve {}",
                    solved[m]
                )));
            }
        }
    }
    Ok(ModeDecomposition {
        coefficients: solved.iter().copied().collect(),
    })
}

/// Sampled amplitudes and survival probability `Σ_n |C_n(t)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<DVector<Complex64>>,
    pub survival: Vec<f64>,
}

/// Amplitudes at a single time.
pub fn amplitudes_at(modes: &ModeSet, decomp: &ModeDecomposition, t: f64) -> DVector<Complex64> {
    let weights = DVector::from_iterator(
        modes.len(),
        modes
            .eigenvalues()
            .iter()
            .zip(&decomp.coefficients)
            .map(|(&g, &a)| a * (-g * t).exp()),
    );
    modes.vectors() * weights
}

/// Evaluates the closed-form exponentials on a non-negative, non-decreasing
/// time grid.
pub fn evolve(modes: &ModeSet, decomp: &ModeDecomposition, times: &[f64]) -> Result<AmplitudeTrajectory> {
    if decomp.coefficients.len() != modes.len() {
        return Err(Error::domain("decomposition and mode set differ in dimension"));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::domain(format!("times must be finite and non-negative, got {t}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("times must be ascending"));
    }
    let amplitudes: Vec<_> = times.iter().map(|&t| amplitudes_at(modes, decomp, t)).collect();
    let survival = amplitudes.iter().map(|c| c.norm_squared()).collect();
    Ok(AmplitudeTrajectory {
        times: times.to_vec(),
        amplitudes,
        survival,
    })
}

/// `K + 1` equally spaced samples on `[0, t_max]`.
pub fn uniform_times(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0) || steps == 0 {
        return Err(Error::domain("need t_max > 0 and at least one step"));
    }
    Ok((0..=steps).map(|k| t_max * k as f64 / steps as f64).collect())
}
