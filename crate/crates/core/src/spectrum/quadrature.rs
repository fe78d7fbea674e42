use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Product rule on the unit sphere: `order` Gauss-Legendre nodes in `cos θ`
/// times `2·order` equally spaced azimuths. Weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    nodes: Vec<(Vec3, f64)>,
}

impl SphereQuadrature {
    pub fn new(order: usize) -> Result<Self> {
        if order < 6 {
            return Err(Error::domain(format!(
                "quadrature order must be at least 6, got {order}"
            )));
        }
        let (xs, ws) = gauss_legendre(order);
        let n_phi = 2 * order;
        let dphi = TAU / n_phi as f64;
        let mut nodes = Vec::with_capacity(order * n_phi);
        for (&ct, &w) in xs.iter().zip(&ws) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..n_phi {
                let (sp, cp) = (dphi * k as f64).sin_cos();
                nodes.push(([st * cp, st * sp, ct], w * dphi));
            }
        }
        Ok(SphereQuadrature { nodes })
    }

    pub fn nodes(&self) -> &[(Vec3, f64)] {
        &self.nodes
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        self.nodes.iter().map(|(u, w)| w * f(u)).sum()
    }
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (xs, ws) = gauss_legendre(7);
        let total: f64 = ws.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // exact up to degree 13
        let x12: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(12)).sum();
        assert!((x12 - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_weights_and_moments() {
        let q = SphereQuadrature::new(8).unwrap();
        assert!((q.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-13);
        assert!((q.integrate(|u| u[0] * u[0]) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((q.integrate(|u| 1.0 - u[2] * u[2]) - 8.0 * PI / 3.0).abs() < 1e-13);
        assert!(SphereQuadrature::new(5).is_err());
    }
}
