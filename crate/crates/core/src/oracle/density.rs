use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::state::{checked_dim, digits, StateVector};
use super::{OracleError, Result};
use crate::phasecore::Bipartition;

/// Reduced state on the parties of `subsystem`, indexed by their digits in
/// ascending party order (lowest party most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub subsystem: Bipartition,
    pub entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `max |rho - rho^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// Eigenvalues in ascending order; `rho` is Hermitian.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `max |rho^2 - c rho|`.
    pub fn flatness_residual(&self, c: f64) -> f64 {
        let sq = &self.entries * &self.entries;
        max_abs(&(sq - &self.entries * Complex64::new(c, 0.0)))
    }

    /// `max |rho - c I|`.
    pub fn identity_residual(&self, c: f64) -> f64 {
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim()) * Complex64::new(c, 0.0);
        max_abs(&(&self.entries - id))
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Partial trace over the complement: `rho[a, b] = sum_e psi(a, e) conj(psi(b, e))`.
/// The reduced dimension `q^|S|` must not exceed `cap`.
pub fn reduce(psi: &StateVector, s: &Bipartition, cap: u64) -> Result<DensityMatrix> {
    let n = psi.n();
    if s.n() != n {
        return Err(OracleError::PartyMismatch {
            expected: n,
            found: s.n(),
        });
    }
    let q = psi.q();
    let rows = checked_dim(q, s.size(), cap)?;
    let cols = psi.amplitudes().len() / rows;
    // Digit weight of each party within the row (S) or column (complement) index.
    let mut weight = vec![0usize; n];
    let (mut wr, mut wc) = (1usize, 1usize);
    for i in (0..n).rev() {
        if s.contains(i) {
            weight[i] = wr;
            wr *= q as usize;
        } else {
            weight[i] = wc;
            wc *= q as usize;
        }
    }
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    let mut x = vec![0u64; n];
    for (idx, &a) in psi.amplitudes().iter().enumerate() {
        digits(idx, q, &mut x);
        let (mut r, mut c) = (0, 0);
        for i in 0..n {
            if s.contains(i) {
                r += x[i] as usize * weight[i];
            } else {
                c += x[i] as usize * weight[i];
            }
        }
        m[(r, c)] = a;
    }
    Ok(DensityMatrix {
        subsystem: *s,
        entries: &m * m.adjoint(),
    })
}

/// `Tr(rho^2)`, the squared Frobenius norm.
pub fn purity_exact(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|z| z.norm_sqr()).sum()
}
