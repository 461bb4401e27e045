//! Phase matrices, bipartitions, cut ranks and every entanglement quantity
//! that follows from them: purity, Rényi-2 entropy, the rank-deficit cost,
//! AME certification, k-uniformity and code distance.
//!
//! For a symmetric zero-diagonal `P` over a field of order `q`, the reduced
//! state on `S` has purity `q^(-rk P[S, S̄])`. Everything here is computed
//! from those ranks; no state vector is ever built.

mod bipartition;
mod certify;
mod cut;
pub mod format;

use rand::Rng;
use thiserror::Error;

use crate::field::{Field, FieldError};

pub use self::bipartition::{balanced_classes, enumerate_bipartitions, Bipartition, MAX_PARTIES};
pub(crate) use self::bipartition::{binomial, class_index};
pub use self::certify::{
    certify_ame, certify_components, CertificationReport, FailedCut, SizeRecord,
};
pub use self::cut::{
    cost, cut_rank, cut_submatrix, purity, renyi2_entropy, CutRanker, EntropyUnit, Purity,
};

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error("party count {0} outside the supported range 2..=63")]
    PartyCount(usize),
    #[error("mask {mask:#x} is not a nonempty proper subset of {n} parties")]
    InvalidBipartition { n: usize, mask: u64 },
    #[error("max size {max_size} invalid for {n} parties")]
    InvalidMaxSize { n: usize, max_size: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry ({0}, {0}) is nonzero")]
    NonZeroDiagonal(usize),
    #[error("entry {value} at ({i}, {j}) is outside the field")]
    EntryOutOfRange { i: usize, j: usize, value: u64 },
    #[error("expected a {expected}x{expected} matrix, found {found}")]
    Shape { expected: usize, found: String },
    #[error("bipartition is over {found} parties, matrix has {expected}")]
    PartyMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = PhaseError> = std::result::Result<T, E>;

/// Symmetric, zero-diagonal `n x n` matrix of field (or square-free ring)
/// elements: the generator of a quadratic phase state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseMatrix {
    n: usize,
    field: Field,
    entries: Vec<u64>,
}

impl PhaseMatrix {
    pub fn zeros(field: Field, n: usize) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(PhaseError::PartyCount(n));
        }
        Ok(PhaseMatrix {
            n,
            field,
            entries: vec![0; n * n],
        })
    }

    /// Validates symmetry, zero diagonal and entry range.
    pub fn from_entries(field: Field, n: usize, entries: Vec<u64>) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(PhaseError::PartyCount(n));
        }
        if entries.len() != n * n {
            return Err(PhaseError::Shape {
                expected: n,
                found: format!("{} entries", entries.len()),
            });
        }
        for i in 0..n {
            if entries[i * n + i] != 0 {
                return Err(PhaseError::NonZeroDiagonal(i));
            }
            for j in 0..n {
                let value = entries[i * n + j];
                if !field.contains(value) {
                    return Err(PhaseError::EntryOutOfRange { i, j, value });
                }
                if value != entries[j * n + i] {
                    return Err(PhaseError::NotSymmetric { i, j });
                }
            }
        }
        Ok(PhaseMatrix { n, field, entries })
    }

    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(PhaseError::Shape {
                expected: n,
                found: format!("a row of length {}", bad.len()),
            });
        }
        PhaseMatrix::from_entries(field, n, rows.concat())
    }

    /// Builds the symmetric matrix from its strict upper triangle, row by row.
    pub fn from_upper(field: Field, n: usize, upper: &[u64]) -> Result<Self> {
        if upper.len() != n * (n.saturating_sub(1)) / 2 {
            return Err(PhaseError::Shape {
                expected: n,
                found: format!("{} upper-triangle entries", upper.len()),
            });
        }
        let mut p = PhaseMatrix::zeros(field, n)?;
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                p.set(i, j, *it.next().expect("length checked"))?;
            }
        }
        Ok(p)
    }

    /// Uniformly random symmetric zero-diagonal matrix.
    pub fn random<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Result<Self> {
        let mut p = PhaseMatrix::zeros(field, n)?;
        let q = p.field.order();
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(0..q);
                p.entries[i * n + j] = v;
                p.entries[j * n + i] = v;
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    /// Sets `P[i][j]` and `P[j][i]`.
    pub fn set(&mut self, i: usize, j: usize, value: u64) -> Result<()> {
        if i == j {
            return Err(PhaseError::NonZeroDiagonal(i));
        }
        if i >= self.n || j >= self.n || !self.field.contains(value) {
            return Err(PhaseError::EntryOutOfRange { i, j, value });
        }
        self.entries[i * self.n + j] = value;
        self.entries[j * self.n + i] = value;
        Ok(())
    }

    /// Row-major `n * n` entries.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(<[u64]>::to_vec).collect()
    }

    /// Strict upper triangle, row by row.
    pub fn upper(&self) -> Vec<u64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    pub(crate) fn check_bipartition(&self, s: &Bipartition) -> Result<()> {
        if s.n() != self.n {
            return Err(PhaseError::PartyMismatch {
                expected: self.n,
                found: s.n(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction_validates_invariants() {
        let f2 = Field::prime(2).unwrap();
        assert!(matches!(
            PhaseMatrix::from_rows(f2.clone(), &[vec![1, 0], vec![0, 0]]),
            Err(PhaseError::NonZeroDiagonal(0))
        ));
        assert!(matches!(
            PhaseMatrix::from_rows(f2.clone(), &[vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]]),
            Err(PhaseError::NotSymmetric { .. })
        ));
        assert!(matches!(
            PhaseMatrix::from_rows(f2.clone(), &[vec![0, 2], vec![2, 0]]),
            Err(PhaseError::EntryOutOfRange { .. })
        ));
        assert!(matches!(
            PhaseMatrix::zeros(f2.clone(), 1),
            Err(PhaseError::PartyCount(1))
        ));
        let mut p = PhaseMatrix::zeros(f2, 3).unwrap();
        p.set(0, 2, 1).unwrap();
        assert_eq!(p.get(2, 0), 1);
        assert!(p.set(1, 1, 0).is_err());
    }

    #[test]
    fn random_matrices_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = Field::prime(73).unwrap();
        for n in 2..10 {
            let p = PhaseMatrix::random(f.clone(), n, &mut rng).unwrap();
            let again = PhaseMatrix::from_entries(f.clone(), n, p.entries().to_vec()).unwrap();
            assert_eq!(p, again);
            assert_eq!(
                PhaseMatrix::from_upper(f.clone(), n, &p.upper()).unwrap(),
                p
            );
        }
    }
}
