use num_complex::Complex64;

use super::{CouplingMatrix, ModeSet};
use crate::error::{Error, Result};

/// Eigenmodes from a dense complex Schur decomposition; valid for any `N`.
pub fn eigenmodes_numeric(matrix: &CouplingMatrix) -> Result<ModeSet> {
    ModeSet::assemble(matrix, numeric_eigenvalues(matrix)?)
}

pub(crate) fn numeric_eigenvalues(matrix: &CouplingMatrix) -> Result<Vec<Complex64>> {
    let schur = matrix
        .entries()
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InternalConsistency("Schur iteration did not converge".into()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| Error::InternalConsistency("Schur form is not triangular".into()))?;
    Ok(values.iter().copied().collect())
}
