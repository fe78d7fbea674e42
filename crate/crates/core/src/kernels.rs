//! Dimensionless pair kernels `D(x, η)` and `P(x, η)`.
//!
//! With `u = 2πx`,
//!
//! ```text
//! D = 3/2 [ sin²η · sin u / u      + (1 - 3cos²η)(cos u / u² - sin u / u³) ]
//! P = 3/2 [ -sin²η · cos u / u     + (1 - 3cos²η)(sin u / u² + cos u / u³) ]
//! ```
//!
//! `D` is the dissipative (decay-rate) coupling and `P` the dispersive
//! dipole-dipole shift, both in units of half the single-atom decay rate.
//! The near-field brackets lose about `u⁻²` relative precision to
//! cancellation, so below [`SERIES_THRESHOLD`] they are summed from their
//! Maclaurin series instead.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};

/// Crossover in `u = 2πx` between the Maclaurin series and the direct
/// trigonometric form.
pub const SERIES_THRESHOLD: f64 = 0.5;

const SERIES_CUTOFF: f64 = 1e-17;
const MAX_SERIES_TERMS: usize = 40;

/// Kernel pair evaluated at one `(x, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub x: f64,
    pub eta: f64,
    pub d: f64,
    pub p: f64,
}

/// Evaluates both kernels. Requires `x > 0`.
pub fn evaluate(x: f64, eta: f64) -> Result<KernelValue> {
    Ok(KernelValue {
        x,
        eta,
        d: kernel_d(x, eta)?,
        p: kernel_p(x, eta)?,
    })
}

/// Dissipative kernel `D(x, η)`; `D(0, η) = 1`.
pub fn kernel_d(x: f64, eta: f64) -> Result<f64> {
    check_x(x, true)?;
    let (sin2, aniso) = angular(eta)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let u = TAU * x;
    Ok(1.5 * (sin2 * sinc(u) + aniso * near_field_d(u)))
}

/// Dispersive kernel `P(x, η)`; diverges as `x⁻³`, so `x = 0` is rejected.
pub fn kernel_p(x: f64, eta: f64) -> Result<f64> {
    check_x(x, false)?;
    let (sin2, aniso) = angular(eta)?;
    let u = TAU * x;
    Ok(1.5 * (-sin2 * u.cos() / u + aniso * near_field_p(u)))
}

/// Leading near-field behaviour of `x³ P(x, η)` as `x → 0`.
pub fn p_small_x_limit(eta: f64) -> Result<f64> {
    let (_, aniso) = angular(eta)?;
    Ok(1.5 * aniso / TAU.powi(3))
}

fn check_x(x: f64, allow_zero: bool) -> Result<()> {
    if x.is_nan() || x < 0.0 || (!allow_zero && x == 0.0) {
        return Err(Error::domain(format!(
            "kernel separation must be {} 0, got {x}",
            if allow_zero { ">=" } else { ">" }
        )));
    }
    Ok(())
}

/// Returns `(sin²η, 1 - 3cos²η)` after folding `η ∈ [0, π]` onto `[0, π/2]`.
fn angular(eta: f64) -> Result<(f64, f64)> {
    if !(0.0..=PI).contains(&eta) {
        return Err(Error::domain(format!("eta must lie in [0, π], got {eta}")));
    }
    let folded = if eta > FRAC_PI_2 { PI - eta } else { eta };
    let c = folded.cos();
    let s = folded.sin();
    Ok((s * s, 1.0 - 3.0 * c * c))
}

fn sinc(u: f64) -> f64 {
    if u < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `cos u / u² - sin u / u³`, finite at `u = 0` with value `-1/3`.
pub(crate) fn near_field_d(u: f64) -> f64 {
    if u < SERIES_THRESHOLD {
        near_field_d_series(u)
    } else {
        near_field_d_direct(u)
    }
}

/// `sin u / u² + cos u / u³`.
pub(crate) fn near_field_p(u: f64) -> f64 {
    if u < SERIES_THRESHOLD {
        near_field_p_series(u)
    } else {
        near_field_p_direct(u)
    }
}

pub(crate) fn near_field_d_direct(u: f64) -> f64 {
    u.cos() / (u * u) - u.sin() / (u * u * u)
}

pub(crate) fn near_field_p_direct(u: f64) -> f64 {
    u.sin() / (u * u) + u.cos() / (u * u * u)
}

/// `Σ_{k≥1} (-1)^k 2k u^{2k-2} / (2k+1)!`
pub(crate) fn near_field_d_series(u: f64) -> f64 {
    let u2 = u * u;
    // power / (2k+1)! carried incrementally, starting at k = 1: 1/3!
    let mut scaled = 1.0 / 6.0;
    let mut sum = 0.0;
    for k in 1..=MAX_SERIES_TERMS {
        let kf = k as f64;
        let term = 2.0 * kf * scaled;
        sum += if k % 2 == 1 { -term } else { term };
        if term < SERIES_CUTOFF {
            break;
        }
        scaled *= u2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
    }
    sum
}

/// `u⁻³ + Σ_{j≥1} (-1)^j (1 - 2j) u^{2j-3} / (2j)!`
pub(crate) fn near_field_p_series(u: f64) -> f64 {
    let u2 = u * u;
    // u^{2j-3} / (2j)!, starting at j = 1: u⁻¹ / 2
    let mut scaled = 0.5 / u;
    let mut sum = 0.0;
    for j in 1..=MAX_SERIES_TERMS {
        let jf = j as f64;
        let term = (2.0 * jf - 1.0) * scaled;
        // (-1)^j (1 - 2j) = (-1)^{j+1} (2j - 1)
        sum += if j % 2 == 1 { term } else { -term };
        if term.abs() < SERIES_CUTOFF * (1.0 / (u2 * u)) {
            break;
        }
        scaled *= u2 / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
    }
    1.0 / (u2 * u) + sum
}
