use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use super::{build_coupling_matrix, eigenmodes_analytic, ModelParams};
use crate::error::{Error, Result};
use crate::geometry::collinear_config;
use crate::kernels::{kernel_d, kernel_p};

/// Rates and shifts of the equilateral triangle with the dipole normal to
/// its plane; mode `a` is the symmetric state, `b`/`c` the degenerate pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilateralRates {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// `δ_a - δ_b`.
    pub splitting: f64,
}

pub fn equilateral_closed_form(side: f64, params: &ModelParams) -> Result<EquilateralRates> {
    if !(side > 0.0) {
        return Err(Error::domain(format!("side must be positive, got {side}")));
    }
    let d = kernel_d(side, FRAC_PI_2)?;
    let p = kernel_p(side, FRAC_PI_2)?;
    let g = params.gamma_eg;
    let shift = params.delta_eg * g;
    Ok(EquilateralRates {
        gamma_a: g * (1.0 + 2.0 * d),
        gamma_b: g * (1.0 - d),
        delta_a: shift + g * p,
        delta_b: shift - g * p / 2.0,
        splitting: 1.5 * g * p,
    })
}

/// A one-parameter sweep: one row of values per axis point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub axis: String,
    pub values: Vec<f64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ScanResult {
    pub fn column(&self, index: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[index])
    }
}

/// Collinear sweep over the position of the third atom. Each row holds the
/// three decay rates sorted in descending order.
pub fn line_scan(x12: f64, x23_grid: &[f64], eta: f64, params: &ModelParams) -> Result<ScanResult> {
    if let Some(bad) = x23_grid.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::domain(format!("x23 grid values must be positive, got {bad}")));
    }
    if x23_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("x23 grid must be strictly ascending"));
    }
    let rows = x23_grid
        .par_iter()
        .map(|&x23| {
            let cfg = collinear_config(x12, x23, eta)?;
            let modes = eigenmodes_analytic(&build_coupling_matrix(&cfg, params)?)?;
            let mut rates = modes.rates();
            rates.sort_by(|a, b| b.total_cmp(a));
            Ok(rates)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        axis: "x23".into(),
        values: x23_grid.to_vec(),
        columns: vec!["gamma_1".into(), "gamma_2".into(), "gamma_3".into()],
        rows,
    })
}
