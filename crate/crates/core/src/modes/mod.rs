//! Coupling matrix assembly and collective eigenmodes.
//!
//! The single-excitation amplitudes evolve as `dC/dt = -Γ C` where
//!
//! ```text
//! Γ_nn = γ/2 + iΔ
//! Γ_mn = γ/2 · (D(x_mn, η_mn) + i P(x_mn, η_mn))
//! ```
//!
//! `Γ` is complex symmetric but not Hermitian. Each eigenvalue splits as
//! `Γ_m = γ_m / 2 + i δ_m` into a collective decay rate and a collective
//! Lamb shift. Modes are always reported in descending rate order; the a/b/c
//! labels used for three atoms follow that order.

mod analytic;
mod numeric;
mod scan;
mod vectors;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AtomConfig;
use crate::kernels;

pub use analytic::{characteristic_residual, eigenmodes_analytic};
pub use numeric::eigenmodes_numeric;
pub use scan::{equilateral_closed_form, line_scan, EquilateralRates, ScanResult};
pub use vectors::eigenvectors;

/// Relative eigenpair residual `‖Γb - λb‖ / ‖Γ‖` accepted for any mode.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Eigenvalues closer than `DEGENERACY_TOL · max(1, |Γ_0|)` form one group.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Rate unit and single-atom dynamic shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma_eg: f64,
    /// Single-atom shift in units of `gamma_eg`.
    pub delta_eg: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            gamma_eg: 1.0,
            delta_eg: 0.0,
        }
    }
}

impl ModelParams {
    pub fn new(gamma_eg: f64, delta_eg: f64) -> Result<Self> {
        if !(gamma_eg > 0.0) || !gamma_eg.is_finite() {
            return Err(Error::domain(format!("gamma_eg must be positive, got {gamma_eg}")));
        }
        if !delta_eg.is_finite() {
            return Err(Error::domain("delta_eg must be finite"));
        }
        Ok(ModelParams { gamma_eg, delta_eg })
    }

    /// Diagonal element `γ/2 + iΔγ`.
    pub fn gamma0(&self) -> Complex64 {
        Complex64::new(self.gamma_eg / 2.0, self.delta_eg * self.gamma_eg)
    }
}

/// The complex-symmetric matrix `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: DMatrix<Complex64>,
    gamma0: Complex64,
}

impl CouplingMatrix {
    /// Builds a matrix from raw entries. Only symmetry, a constant diagonal
    /// and `N >= 2` are enforced; use [`build_coupling_matrix`] for physical
    /// matrices.
    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() {
            return Err(Error::domain(format!(
                "matrix must be square, got {}x{}",
                n,
                entries.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::domain(format!("matrix dimension must be at least 2, got {n}")));
        }
        let gamma0 = entries[(0, 0)];
        for m in 0..n {
            if entries[(m, m)] != gamma0 {
                return Err(Error::domain("diagonal entries must all be equal"));
            }
            for k in (m + 1)..n {
                if entries[(m, k)] != entries[(k, m)] {
                    return Err(Error::domain(format!("matrix is not symmetric at ({m}, {k})")));
                }
            }
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(CouplingMatrix { entries, gamma0 })
    }

    /// `Γ_0 I + offdiag`, with `offdiag[(m, n)]` for `m < n` mirrored.
    pub fn from_couplings(gamma0: Complex64, n: usize, couplings: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut entries = DMatrix::from_diagonal_element(n, n, gamma0);
        for &(m, k, g) in couplings {
            if m >= n || k >= n || m == k {
                return Err(Error::domain(format!("invalid coupling index ({m}, {k})")));
            }
            entries[(m, k)] = g;
            entries[(k, m)] = g;
        }
        Self::from_entries(entries)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn gamma0(&self) -> Complex64 {
        self.gamma0
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Off-diagonal entries `Γ_mn`, `m < n`, in lexicographic order.
    pub fn couplings(&self) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .flat_map(|m| ((m + 1)..n).map(move |k| (m, k)))
            .map(|(m, k)| self.entries[(m, k)])
            .collect()
    }

    /// Smallest eigenvalue of the Hermitian part `(Γ + Γᴴ)/2`, i.e. of the
    /// real symmetric matrix `Re Γ`.
    pub fn dissipative_min_eigenvalue(&self) -> f64 {
        let real = self.entries.map(|z| z.re);
        real.symmetric_eigenvalues().min()
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.entries * v
    }

    /// Relabels atoms: new index `k` is old index `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.n();
        if order.len() != n {
            return Err(Error::domain("permutation length mismatch"));
        }
        Self::from_entries(DMatrix::from_fn(n, n, |i, j| self.entries[(order[i], order[j])]))
    }
}

/// Assembles `Γ` for an atom configuration.
pub fn build_coupling_matrix(config: &AtomConfig, params: &ModelParams) -> Result<CouplingMatrix> {
    let half = params.gamma_eg / 2.0;
    let couplings = config
        .pair_geometry()
        .into_iter()
        .map(|pair| {
            let k = kernels::evaluate(pair.x, pair.eta)?;
            Ok((pair.m, pair.n, Complex64::new(half * k.d, half * k.p)))
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = CouplingMatrix::from_couplings(params.gamma0(), config.len(), &couplings)?;
    let floor = matrix.dissipative_min_eigenvalue();
    if floor < -1e-10 * params.gamma_eg {
        return Err(Error::InternalConsistency(format!(
            "dissipative part of the coupling matrix has negative eigenvalue {floor:e}"
        )));
    }
    Ok(matrix)
}

/// Closed-form path for three atoms, dense solver otherwise.
pub fn eigenmodes(matrix: &CouplingMatrix) -> Result<ModeSet> {
    if matrix.n() == 3 {
        eigenmodes_analytic(matrix)
    } else {
        eigenmodes_numeric(matrix)
    }
}

/// Eigenvalues, bilinear-normalized eigenvectors and derived rates/shifts.
#[derive(Debug, Clone)]
pub struct ModeSet {
    eigenvalues: Vec<Complex64>,
    /// Column `m` is `b^(m)`.
    vectors: DMatrix<Complex64>,
    groups: Vec<Vec<usize>>,
}

impl ModeSet {
    /// Orders the eigenvalues (descending real part, then ascending imaginary
    /// part), solves for eigenvectors and checks every residual.
    pub(crate) fn assemble(matrix: &CouplingMatrix, mut eigenvalues: Vec<Complex64>) -> Result<Self> {
        if eigenvalues.len() != matrix.n() {
            return Err(Error::InternalConsistency(format!(
                "{} eigenvalues for a {}x{} matrix",
                eigenvalues.len(),
                matrix.n(),
                matrix.n()
            )));
        }
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
        let vecs = eigenvectors(matrix, &eigenvalues)?;
        let vectors = DMatrix::from_columns(&vecs);
        let groups = degeneracy_groups(&eigenvalues, matrix.gamma0());
        Ok(ModeSet {
            eigenvalues,
            vectors,
            groups,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Matrix whose columns are the eigenvectors.
    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn eigenvector(&self, m: usize) -> DVector<Complex64> {
        self.vectors.column(m).into_owned()
    }

    /// `γ_m = 2 Re Γ_m`.
    pub fn rates(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| 2.0 * z.re).collect()
    }

    /// `δ_m = Im Γ_m`.
    pub fn shifts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.im).collect()
    }

    pub fn degeneracy_groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }
}

/// Partition of indices into clusters of eigenvalues connected by gaps of at
/// most `DEGENERACY_TOL · max(1, |Γ_0|)`. Groups are listed by their lowest
/// index.
pub(crate) fn degeneracy_groups(eigenvalues: &[Complex64], gamma0: Complex64) -> Vec<Vec<usize>> {
    let tol = DEGENERACY_TOL * gamma0.norm().max(1.0);
    let n = eigenvalues.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= tol {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// `vᵀ w` without conjugation.
pub fn bilinear(v: &DVector<Complex64>, w: &DVector<Complex64>) -> Complex64 {
    v.iter().zip(w.iter()).map(|(a, b)| a * b).sum()
}
