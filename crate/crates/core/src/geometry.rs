//! Atom configurations and the pairwise quantities derived from them.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const DIPOLE_NORM_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Positions of `N` identical atoms (in units of the resonant wavelength)
/// sharing a single unit dipole direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomConfig {
    positions: Vec<Vec3>,
    dipole: Vec3,
}

impl AtomConfig {
    /// Validates the configuration. The dipole must already be a unit vector.
    pub fn new(positions: Vec<Vec3>, dipole: Vec3) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::domain(format!(
                "at least two atoms are required, got {}",
                positions.len()
            )));
        }
        if positions.iter().flatten().chain(dipole.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite coordinate"));
        }
        let dn = norm(&dipole);
        if (dn - 1.0).abs() > DIPOLE_NORM_TOL {
            return Err(Error::domain(format!("dipole must be a unit vector, |d| = {dn}")));
        }
        for m in 0..positions.len() {
            for n in (m + 1)..positions.len() {
                if norm(&sub(&positions[n], &positions[m])) <= 0.0 {
                    return Err(Error::DegenerateGeometry { m, n });
                }
            }
        }
        Ok(AtomConfig { positions, dipole })
    }

    /// Like [`AtomConfig::new`] but rescales a dipole whose norm is within
    /// `tol` of one.
    pub fn with_normalized_dipole(positions: Vec<Vec3>, dipole: Vec3, tol: f64) -> Result<Self> {
        let dn = norm(&dipole);
        if !dn.is_finite() || (dn - 1.0).abs() > tol {
            return Err(Error::domain(format!("dipole norm {dn} is not within {tol:e} of one")));
        }
        if (dn - 1.0).abs() <= DIPOLE_NORM_TOL {
            return Self::new(positions, dipole);
        }
        Self::new(positions, [dipole[0] / dn, dipole[1] / dn, dipole[2] / dn])
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn dipole(&self) -> Vec3 {
        self.dipole
    }

    /// One entry per unordered pair `(m, n)` with `m < n`, in lexicographic
    /// order.
    pub fn pair_geometry(&self) -> Vec<PairGeometry> {
        let n_atoms = self.positions.len();
        let mut pairs = Vec::with_capacity(n_atoms * (n_atoms - 1) / 2);
        for m in 0..n_atoms {
            for n in (m + 1)..n_atoms {
                let r = sub(&self.positions[n], &self.positions[m]);
                let x = norm(&r);
                let cos_eta = (dot(&self.dipole, &r) / x).abs().min(1.0);
                pairs.push(PairGeometry {
                    m,
                    n,
                    x,
                    eta: cos_eta.acos(),
                });
            }
        }
        pairs
    }

    /// Same atoms listed in a different order; `order[k]` is the old index of
    /// new atom `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len()
            || order
                .iter()
                .any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::domain("order is not a permutation of the atom indices"));
        }
        Self::new(order.iter().map(|&i| self.positions[i]).collect(), self.dipole)
    }
}

/// Separation and folded dipole angle of one atom pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairGeometry {
    pub m: usize,
    pub n: usize,
    /// `|r_n - r_m|` in wavelengths.
    pub x: f64,
    /// `arccos(|d·r̂|)`, in `[0, π/2]`.
    pub eta: f64,
}

/// Free-function form of [`AtomConfig::pair_geometry`].
pub fn build_pair_geometry(config: &AtomConfig) -> Vec<PairGeometry> {
    config.pair_geometry()
}

/// Three atoms at the corners of an equilateral triangle of the given side in
/// the xy-plane, dipole along z.
pub fn equilateral_config(side: f64) -> Result<AtomConfig> {
    if !(side > 0.0) || !side.is_finite() {
        return Err(Error::domain(format!("side must be positive, got {side}")));
    }
    let h = side * 3f64.sqrt() / 2.0;
    AtomConfig::new(
        vec![[0.0, 0.0, 0.0], [side, 0.0, 0.0], [side / 2.0, h, 0.0]],
        [0.0, 0.0, 1.0],
    )
}

/// Three atoms on the x-axis with gaps `x12`, `x23`; the dipole lies in the
/// xz-plane at angle `eta` from the line.
pub fn collinear_config(x12: f64, x23: f64, eta: f64) -> Result<AtomConfig> {
    if !(x12 > 0.0) || !(x23 > 0.0) || !x12.is_finite() || !x23.is_finite() {
        return Err(Error::domain(format!(
            "gaps must be positive, got x12 = {x12}, x23 = {x23}"
        )));
    }
    if !(0.0..=FRAC_PI_2).contains(&eta) {
        return Err(Error::domain(format!("eta must lie in [0, π/2], got {eta}")));
    }
    AtomConfig::new(
        vec![[0.0, 0.0, 0.0], [x12, 0.0, 0.0], [x12 + x23, 0.0, 0.0]],
        [eta.cos(), 0.0, eta.sin()],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_pairs() {
        let cfg = equilateral_config(0.1).unwrap();
        let pairs = cfg.pair_geometry();
        assert_eq!(pairs.len(), 3);
        for p in &pairs {
            assert!((p.x - 0.1).abs() < 1e-15);
            assert!((p.eta - FRAC_PI_2).abs() < 1e-15);
        }
        for p in equilateral_config(0.07).unwrap().pair_geometry() {
            assert!((p.x - 0.07).abs() < 1e-15);
            assert!((p.eta - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn collinear_along_dipole() {
        let cfg = AtomConfig::new(vec![[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [0.3, 0.0, 0.0]], [1.0, 0.0, 0.0]).unwrap();
        let pairs = cfg.pair_geometry();
        let got: Vec<_> = pairs.iter().map(|p| (p.m, p.n, p.x, p.eta)).collect();
        assert_eq!((got[0].0, got[0].1), (0, 1));
        assert!((got[0].2 - 0.1).abs() < 1e-15);
        assert!((got[1].2 - 0.3).abs() < 1e-15);
        assert!((got[2].2 - 0.2).abs() < 1e-15);
        assert!(pairs.iter().all(|p| p.eta == 0.0));
    }

    #[test]
    fn collinear_presets() {
        let pairs = collinear_config(0.1, 0.2, FRAC_PI_2).unwrap().pair_geometry();
        let xs: Vec<f64> = pairs.iter().map(|p| p.x).collect();
        assert!((xs[0] - 0.1).abs() < 1e-15 && (xs[1] - 0.3).abs() < 1e-15 && (xs[2] - 0.2).abs() < 1e-15);
        assert!(pairs.iter().all(|p| (p.eta - FRAC_PI_2).abs() < 1e-15));

        let sym = collinear_config(0.05, 0.05, FRAC_PI_2).unwrap().pair_geometry();
        assert!((sym[1].x - 0.1).abs() < 1e-15);

        let end_fire = collinear_config(0.1, 0.2, 0.0).unwrap().pair_geometry();
        assert!(end_fire.iter().all(|p| p.eta == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let err = AtomConfig::new(vec![[0.0; 3], [0.0; 3]], [0.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry { m: 0, n: 1 }));
        assert!(AtomConfig::new(vec![[0.0; 3]], [0.0, 0.0, 1.0]).is_err());
        assert!(AtomConfig::new(vec![[0.0; 3], [1.0, 0.0, 0.0]], [0.0, 0.0, 1.1]).is_err());
        assert!(equilateral_config(0.0).is_err());
        assert!(equilateral_config(-1.0).is_err());
        assert!(collinear_config(0.0, 0.1, 0.0).is_err());
        assert!(collinear_config(0.1, -0.1, 0.0).is_err());
    }

    #[test]
    fn normalizes_near_unit_dipole() {
        let cfg =
            AtomConfig::with_normalized_dipole(vec![[0.0; 3], [1.0, 0.0, 0.0]], [0.0, 0.0, 1.0 + 5e-7], 1e-6).unwrap();
        assert_eq!(cfg.dipole(), [0.0, 0.0, 1.0]);
        assert!(AtomConfig::with_normalized_dipole(vec![[0.0; 3], [1.0, 0.0, 0.0]], [0.0, 0.0, 1.01], 1e-6).is_err());
    }

    #[test]
    fn eta_is_folded() {
        // dipole anti-parallel to the pair axis still gives eta = 0
        let cfg = AtomConfig::new(vec![[0.0; 3], [0.2, 0.0, 0.0]], [-1.0, 0.0, 0.0]).unwrap();
        assert_eq!(cfg.pair_geometry()[0].eta, 0.0);
    }
}
