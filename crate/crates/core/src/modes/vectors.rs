//! Eigenvectors of complex-symmetric matrices under the bilinear form
//! `vᵀw` (no conjugation).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{bilinear, degeneracy_groups, CouplingMatrix, RESIDUAL_TOL};
use crate::error::{Error, Result};

const SYMMETRIC_TOL: f64 = 1e-12;

/// One eigenvector per entry of `eigenvalues`, normalized so `bᵀb = 1`.
///
/// Each cluster of (near-)equal eigenvalues gets a bilinear-orthonormal basis
/// of the matching null space. For three atoms with all couplings equal the
/// basis is the symmetric/antisymmetric set `(1,1,1)/√3`, `(0,1,-1)/√2`,
/// `(-2,1,1)/√6`; with all couplings zero it is the standard basis.
pub fn eigenvectors(matrix: &CouplingMatrix, eigenvalues: &[Complex64]) -> Result<Vec<DVector<Complex64>>> {
    let n = matrix.n();
    if eigenvalues.len() != n {
        return Err(Error::domain(format!(
            "expected {n} eigenvalues, got {}",
            eigenvalues.len()
        )));
    }
    let vectors = match special_basis(matrix, eigenvalues) {
        Some(v) => v,
        None => general_basis(matrix, eigenvalues)?,
    };
    let scale = matrix.norm().max(f64::MIN_POSITIVE);
    for (index, (v, &l)) in vectors.iter().zip(eigenvalues).enumerate() {
        let residual = (matrix.apply(v) - v * l).norm() / (scale * v.norm());
        if !(residual <= RESIDUAL_TOL) {
            return Err(Error::InconsistentEigenvalue { index, residual });
        }
    }
    Ok(vectors)
}

fn special_basis(matrix: &CouplingMatrix, eigenvalues: &[Complex64]) -> Option<Vec<DVector<Complex64>>> {
    let couplings = matrix.couplings();
    let g1 = couplings[0];
    let tol = SYMMETRIC_TOL * g1.norm().max(1.0);
    if couplings.iter().any(|g| (g - g1).norm() > tol) {
        return None;
    }
    let n = matrix.n();
    let zero_tol = SYMMETRIC_TOL * matrix.gamma0().norm().max(1.0);
    if couplings.iter().all(|g| g.norm() <= zero_tol) {
        return Some(
            (0..n)
                .map(|k| DVector::from_fn(n, |i, _| real(if i == k { 1.0 } else { 0.0 })))
                .collect(),
        );
    }
    if n != 3 {
        return None;
    }
    let sym = matrix.gamma0() + 2.0 * g1;
    let dicke_slot = (0..3).min_by(|&a, &b| (eigenvalues[a] - sym).norm().total_cmp(&(eigenvalues[b] - sym).norm()))?;
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let dicke = DVector::from_vec(vec![real(1.0 / s3); 3]);
    let mut others = vec![
        DVector::from_vec(vec![real(0.0), real(1.0 / s2), real(-1.0 / s2)]),
        DVector::from_vec(vec![real(-2.0 / s6), real(1.0 / s6), real(1.0 / s6)]),
    ]
    .into_iter();
    Some(
        (0..3)
            .map(|m| {
                if m == dicke_slot {
                    dicke.clone()
                } else {
                    others.next().unwrap()
                }
            })
            .collect(),
    )
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn general_basis(matrix: &CouplingMatrix, eigenvalues: &[Complex64]) -> Result<Vec<DVector<Complex64>>> {
    let n = matrix.n();
    let mut out: Vec<Option<DVector<Complex64>>> = vec![None; n];
    for group in degeneracy_groups(eigenvalues, matrix.gamma0()) {
        let k = group.len();
        let mean: Complex64 = group.iter().map(|&i| eigenvalues[i]).sum::<Complex64>() / k as f64;
        let basis = null_space(matrix.entries(), mean, k)?;
        let basis = bilinear_orthonormalize(basis).ok_or(Error::NonDiagonalizable {
            condition: f64::INFINITY,
        })?;
        for (slot, v) in group.into_iter().zip(basis) {
            out[slot] = Some(canonical_sign(v));
        }
    }
    Ok(out
        .into_iter()
        .map(|v| v.expect("every index belongs to a group"))
        .collect())
}

/// Right singular vectors of `A - λI` for the `k` smallest singular values.
fn null_space(a: &DMatrix<Complex64>, lambda: Complex64, k: usize) -> Result<Vec<DVector<Complex64>>> {
    let n = a.nrows();
    let shifted = a - DMatrix::from_diagonal_element(n, n, lambda);
    let svd = shifted.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::InternalConsistency("SVD did not return V".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    Ok(order[..k]
        .iter()
        .map(|&i| v_t.row(i).transpose().map(|z| z.conj()))
        .collect())
}

/// Gram-Schmidt under `vᵀw`, pivoting on the largest `|vᵀv|` so isotropic
/// vectors (`vᵀv = 0`) are combined rather than divided by zero.
fn bilinear_orthonormalize(mut pending: Vec<DVector<Complex64>>) -> Option<Vec<DVector<Complex64>>> {
    let mut done: Vec<DVector<Complex64>> = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let (pivot, self_dot) = pending
            .iter()
            .enumerate()
            .map(|(i, v)| (i, bilinear(v, v).norm() / v.norm_squared()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if self_dot < 1e-6 {
            // every remaining vector is (nearly) isotropic; mix a pair
            let (i, j, _) = pair_with_largest_product(&pending)?;
            let sum = &pending[i] + &pending[j];
            pending[i] = sum;
            continue;
        }
        let v = pending.swap_remove(pivot);
        let v = &v / bilinear(&v, &v).sqrt();
        for w in pending.iter_mut() {
            let proj = bilinear(&v, w);
            *w -= &v * proj;
            let norm = w.norm();
            if norm == 0.0 {
                return None;
            }
            *w /= Complex64::new(norm, 0.0);
        }
        done.push(v);
    }
    Some(done)
}

fn pair_with_largest_product(vs: &[DVector<Complex64>]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            let p = bilinear(&vs[i], &vs[j]).norm();
            if best.is_none_or(|b| p > b.2) {
                best = Some((i, j, p));
            }
        }
    }
    best.filter(|b| b.2 > 1e-6)
}

/// Fixes the `±` ambiguity left by `bᵀb = 1`: the largest component gets a
/// positive real part.
fn canonical_sign(v: DVector<Complex64>) -> DVector<Complex64> {
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    let positive = if lead.re.abs() > 1e-12 * lead.norm() {
        lead.re > 0.0
    } else {
        lead.im > 0.0
    };
    if positive {
        v
    } else {
        -v
    }
}
