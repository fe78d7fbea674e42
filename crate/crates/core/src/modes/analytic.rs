//! Closed-form eigenvalues of a 3×3 coupling matrix.
//!
//! Writing `λ = Γ_0 + t`, the characteristic polynomial is
//! `t³ - s t - 2p` with `s = Γ12² + Γ13² + Γ23²` and `p = Γ12 Γ13 Γ23`.
//! Its roots are
//!
//! ```text
//! t_a = (√s/√3)(cos θ/3 + √3 sin θ/3)
//! t_b = (√s/√3)(cos θ/3 - √3 sin θ/3)
//! t_c = -(2√s/√3) cos θ/3,        θ = arccos(-3√3 p / (√s)³)
//! ```
//!
//! with complex `s`, `p` and `θ`.

use num_complex::Complex64;

use super::{eigenmodes_numeric, CouplingMatrix, ModeSet, RESIDUAL_TOL};
use crate::error::{Error, Result};

/// Below this `|s| / |Γ_0|²` the trigonometric form is singular and the dense
/// solver is used instead.
const SINGULAR_S: f64 = 1e-14;

/// `|T ∓ 1|` below this is rounding noise around a double root; `T` is
/// snapped to `±1` so the degenerate pair does not split by `√ε`.
const SNAP_T: f64 = 64.0 * f64::EPSILON;

/// Eigenmodes of a three-atom matrix via the closed-form cubic roots.
pub fn eigenmodes_analytic(matrix: &CouplingMatrix) -> Result<ModeSet> {
    let roots = match analytic_roots(matrix)? {
        Some(roots) => roots,
        None => return eigenmodes_numeric(matrix),
    };
    ModeSet::assemble(matrix, roots.to_vec())
}

/// The three eigenvalues, or `None` when `s` is too small for the formula.
pub(crate) fn analytic_roots(matrix: &CouplingMatrix) -> Result<Option<[Complex64; 3]>> {
    if matrix.n() != 3 {
        return Err(Error::UnsupportedSize(format!(
            "closed-form eigenvalues need exactly 3 atoms, got {}",
            matrix.n()
        )));
    }
    let g0 = matrix.gamma0();
    let (g12, g13, g23) = (matrix.get(0, 1), matrix.get(0, 2), matrix.get(1, 2));
    let s = g12 * g12 + g13 * g13 + g23 * g23;
    if s.norm() < SINGULAR_S * g0.norm_sqr() {
        return Ok(None);
    }
    let p = g12 * g13 * g23;

    // Both square-root branches give the same multiset in exact arithmetic;
    // keep the one with the smaller worst residual.
    let root_s = s.sqrt();
    let best = [root_s, -root_s]
        .into_iter()
        .map(|q| {
            let roots = trig_roots(g0, q, p);
            let worst = roots
                .iter()
                .map(|&l| characteristic_residual(matrix, l))
                .fold(0.0, f64::max);
            (roots, worst)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(roots, _)| roots)
        .expect("two candidates");

    let polished = best.map(|l| polish(matrix, s, p, l));
    for (index, &l) in polished.iter().enumerate() {
        let residual = characteristic_residual(matrix, l);
        if residual > RESIDUAL_TOL {
            return Err(Error::InconsistentEigenvalue { index, residual });
        }
    }
    Ok(Some(polished))
}

fn trig_roots(g0: Complex64, q: Complex64, p: Complex64) -> [Complex64; 3] {
    let sqrt3 = 3f64.sqrt();
    let mut t = -3.0 * sqrt3 * p / (q * q * q);
    if (t - 1.0).norm() <= SNAP_T {
        t = Complex64::new(1.0, 0.0);
    } else if (t + 1.0).norm() <= SNAP_T {
        t = Complex64::new(-1.0, 0.0);
    }
    let third = t.acos() / 3.0;
    let (cos3, sin3) = (third.cos(), third.sin());
    let scale = q / sqrt3;
    [
        g0 + scale * (cos3 + sqrt3 * sin3),
        g0 + scale * (cos3 - sqrt3 * sin3),
        g0 - 2.0 * scale * cos3,
    ]
}

/// Newton steps on `t³ - s t - 2p`, kept only while the residual improves.
fn polish(matrix: &CouplingMatrix, s: Complex64, p: Complex64, lambda: Complex64) -> Complex64 {
    let g0 = matrix.gamma0();
    let mut best = lambda;
    let mut best_res = characteristic_residual(matrix, lambda);
    let mut t = lambda - g0;
    for _ in 0..4 {
        let f = t * t * t - s * t - 2.0 * p;
        let df = 3.0 * t * t - s;
        if df.norm() <= f64::EPSILON * s.norm() {
            break;
        }
        t -= f / df;
        let res = characteristic_residual(matrix, g0 + t);
        if res < best_res {
            best = g0 + t;
            best_res = res;
        } else {
            break;
        }
    }
    best
}

/// `|det(λI - Γ)| / ‖Γ‖³` evaluated from the trace, principal minors and
/// determinant of a 3×3 matrix.
pub fn characteristic_residual(matrix: &CouplingMatrix, lambda: Complex64) -> f64 {
    let a = matrix.entries();
    let c1 = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let c2 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let c3 = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
        - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
    let value = ((lambda - c1) * lambda + c2) * lambda - c3;
    let scale = matrix.norm().max(lambda.norm()).max(f64::MIN_POSITIVE);
    value.norm() / scale.powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn symmetric(g0: Complex64, g1: Complex64) -> CouplingMatrix {
        CouplingMatrix::from_couplings(g0, 3, &[(0, 1, g1), (0, 2, g1), (1, 2, g1)]).unwrap()
    }

    #[test]
    fn equal_real_couplings() {
        let g0 = c(0.5, 0.0);
        let g1 = c(0.3, 0.0);
        let modes = eigenmodes_analytic(&symmetric(g0, g1)).unwrap();
        let ev = modes.eigenvalues();
        assert!((ev[0] - (g0 + 2.0 * g1)).norm() < 1e-15);
        assert!((ev[1] - (g0 - g1)).norm() < 1e-15);
        assert!((ev[2] - (g0 - g1)).norm() < 1e-15);
        assert_eq!(modes.degeneracy_groups(), &[vec![0], vec![1, 2]]);
    }

    #[test]
    fn diagonal_matrix_falls_back() {
        let g0 = c(0.5, 0.1);
        let m = symmetric(g0, c(0.0, 0.0));
        assert!(analytic_roots(&m).unwrap().is_none());
        let modes = eigenmodes_analytic(&m).unwrap();
        assert!(modes.eigenvalues().iter().all(|&l| (l - g0).norm() < 1e-15));
    }

    #[test]
    fn wrong_size_is_rejected() {
        let m = CouplingMatrix::from_couplings(c(0.5, 0.0), 2, &[(0, 1, c(0.1, 0.2))]).unwrap();
        assert!(matches!(eigenmodes_analytic(&m), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn equilateral_reference_values() {
        let g1 = c(0.461_348_424_191_137_9, 2.597_093_873_725_705_7);
        let modes = eigenmodes_analytic(&symmetric(c(0.5, 0.0), g1)).unwrap();
        let ev = modes.eigenvalues();
        assert!((ev[0] - c(1.422_696_848_382_275_8, 5.194_187_747_451_411)).norm() < 1e-13);
        assert!((ev[1] - c(0.038_651_575_808_862_1, -2.597_093_873_725_705_7)).norm() < 1e-13);
        assert!((ev[1] - ev[2]).norm() < 1e-14);
    }

    #[test]
    fn residual_vanishes_at_roots() {
        let m = CouplingMatrix::from_couplings(
            c(0.5, 0.0),
            3,
            &[(0, 1, c(0.3, 40.0)), (0, 2, c(-0.1, 1.0)), (1, 2, c(0.2, -3.0))],
        )
        .unwrap();
        for l in analytic_roots(&m).unwrap().unwrap() {
            assert!(characteristic_residual(&m, l) < 1e-14);
        }
        assert!(characteristic_residual(&m, c(0.0, 0.0)) > 1e-6);
    }
}
