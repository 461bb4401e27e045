//! Brute-force ground truth: the explicit state vector of a phase matrix,
//! its reduced density matrices and their purities, checked against the
//! rank-based predictions at desk scale.

mod density;
mod state;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crt::{certify_composite, composite_purity, CompositePhase, CrtError};
use crate::field::FieldSpec;
use crate::phasecore::{
    certify_ame, enumerate_bipartitions, purity, Bipartition, PhaseError, PhaseMatrix, Purity,
};

pub use self::density::{purity_exact, reduce, DensityMatrix};
pub use self::state::{build_state, StateVector};

/// Default amplitude budget: `2^20` complex doubles, 16 MiB.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Largest reduced dimension formed explicitly; a larger side is replaced by
/// its complement, which has the same purity and nonzero spectrum.
pub const MAX_REDUCED_DIM: u64 = 1024;

/// Eigenvalues are only computed up to this dimension.
pub const MAX_EIGEN_DIM: usize = 256;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance needs {q}^{n} amplitudes, above the cap of {cap}")]
    InstanceTooLarge { q: u64, n: usize, cap: u64 },
    #[error("bipartition is over {found} parties, state has {expected}")]
    PartyMismatch { expected: usize, found: usize },
    #[error("rank-purity check failed at {} of {} cuts", .0.failures(), .0.cuts.len())]
    DualityViolation(Box<DualityReport>),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Crt(#[from] CrtError),
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

impl OracleError {
    /// Smallest cap that would admit the instance, if it fits in a `u64`.
    pub fn required_cap(&self) -> Option<u64> {
        match self {
            OracleError::InstanceTooLarge { q, n, .. } => q.checked_pow(*n as u32),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutCheck {
    pub mask: u64,
    pub size: usize,
    /// Whether the reduced state was formed on the complement instead.
    pub via_complement: bool,
    /// `(base, rank)` factors of the rank prediction.
    pub predicted: Vec<(u64, u32)>,
    pub purity: f64,
    pub purity_residual: f64,
    /// `max |rho^2 - predicted * rho|`.
    pub flatness_residual: f64,
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    /// `max |rho - q^(-|S|) I|`, for AME matrices and `|S| <= n/2`.
    pub identity_residual: Option<f64>,
    /// Largest eigenvalue deviation from `q^(-|S|)`, same conditions, small
    /// dimensions only.
    pub eigen_residual: Option<f64>,
}

impl CutCheck {
    fn worst(&self) -> f64 {
        [
            self.purity_residual,
            self.flatness_residual,
            self.hermiticity_residual,
            self.trace_residual,
            self.identity_residual.unwrap_or(0.0),
            self.eigen_residual.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    pub local_dim: u64,
    pub tolerance: f64,
    pub is_ame: bool,
    pub norm_residual: f64,
    pub cuts: Vec<CutCheck>,
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

impl DualityReport {
    pub fn max_purity_residual(&self) -> f64 {
        max_of(self.cuts.iter().map(|c| c.purity_residual))
    }

    pub fn max_flatness_residual(&self) -> f64 {
        max_of(self.cuts.iter().map(|c| c.flatness_residual))
    }

    pub fn max_identity_residual(&self) -> Option<f64> {
        self.is_ame
            .then(|| max_of(self.cuts.iter().filter_map(|c| c.identity_residual)))
    }

    pub fn max_eigen_residual(&self) -> Option<f64> {
        let v: Vec<f64> = self.cuts.iter().filter_map(|c| c.eigen_residual).collect();
        (!v.is_empty()).then(|| max_of(v.into_iter()))
    }

    pub fn failures(&self) -> usize {
        self.cuts
            .iter()
            .filter(|c| c.worst() >= self.tolerance)
            .count()
    }

    pub fn passed(&self) -> bool {
        self.norm_residual < self.tolerance && self.failures() == 0
    }
}

enum Predictor {
    Field(PhaseMatrix),
    Composite(CompositePhase),
}

impl Predictor {
    fn purity(&self, s: &Bipartition) -> Result<Purity> {
        Ok(match self {
            Predictor::Field(p) => purity(p, s)?,
            Predictor::Composite(c) => composite_purity(c, s)?,
        })
    }

    fn is_ame(&self) -> Result<bool> {
        Ok(match self {
            Predictor::Field(p) => certify_ame(p)?.is_ame,
            Predictor::Composite(c) => certify_composite(c)?.is_ame,
        })
    }
}

/// Builds the state and checks every bipartition (all sizes `1..n`) against
/// the rank prediction: purity, the flat-spectrum identity
/// `rho^2 = q^(-rk) rho`, and for AME matrices `rho = q^(-|S|) I` with its
/// spectrum. Returns `DualityViolation` if any residual reaches `tolerance`.
pub fn verify_duality(p: &PhaseMatrix, tolerance: f64, cap: u64) -> Result<DualityReport> {
    let report = duality_report(p, tolerance, cap)?;
    if report.passed() {
        Ok(report)
    } else {
        Err(OracleError::DualityViolation(Box::new(report)))
    }
}

/// As [`verify_duality`] but returns the report whatever the outcome.
pub fn duality_report(p: &PhaseMatrix, tolerance: f64, cap: u64) -> Result<DualityReport> {
    let psi = build_state(p, cap)?;
    let predictor = match p.field().spec() {
        FieldSpec::Composite { .. } => Predictor::Composite(CompositePhase::from_matrix(p)?),
        _ => Predictor::Field(p.clone()),
    };
    let is_ame = predictor.is_ame()?;
    let n = p.n();
    let q = p.field().order();
    let subsets: Vec<Bipartition> = enumerate_bipartitions(n, n - 1, false)?.collect();
    let cuts = subsets
        .par_iter()
        .map(|s| {
            let predicted = predictor.purity(s)?;
            let target = predicted.value();
            let fits = (q as u128)
                .checked_pow(s.size() as u32)
                .is_some_and(|d| d <= MAX_REDUCED_DIM as u128);
            let side = if fits { *s } else { s.complement() };
            let rho = reduce(&psi, &side, u64::MAX)?;
            let pur = purity_exact(&rho);
            let uniform = (q as f64).powi(-(s.size() as i32));
            let ame_cut = is_ame && 2 * s.size() <= n && fits;
            let eigen_residual = (ame_cut && rho.dim() <= MAX_EIGEN_DIM)
                .then(|| max_of(rho.eigenvalues().into_iter().map(|e| (e - uniform).abs())));
            Ok(CutCheck {
                mask: s.mask(),
                size: s.size(),
                via_complement: !fits,
                predicted: predicted.factors().to_vec(),
                purity: pur,
                purity_residual: (pur - target).abs(),
                flatness_residual: rho.flatness_residual(target),
                hermiticity_residual: rho.hermiticity_residual(),
                trace_residual: (rho.trace() - 1.0).norm(),
                identity_residual: ame_cut.then(|| rho.identity_residual(uniform)),
                eigen_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualityReport {
        n,
        local_dim: q,
        tolerance,
        is_ame,
        norm_residual: (psi.norm() - 1.0).abs(),
        cuts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::phasecore::cut_rank;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    #[test]
    fn every_four_qubit_matrix_satisfies_the_duality() {
        let f = Field::prime(2).unwrap();
        for code in 0u64..64 {
            let upper: Vec<u64> = (0..6).map(|b| code >> b & 1).collect();
            let p = PhaseMatrix::from_upper(f.clone(), 4, &upper).unwrap();
            let r = verify_duality(&p, TOL, DEFAULT_CAP).unwrap();
            assert_eq!(r.cuts.len(), 14);
            assert!(!r.is_ame);
        }
    }

    #[test]
    fn random_small_prime_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = [2, 3, 5][rng.gen_range(0..3)];
            let n = rng.gen_range(2..=4);
            let m = PhaseMatrix::random(Field::prime(p).unwrap(), n, &mut rng).unwrap();
            verify_duality(&m, TOL, DEFAULT_CAP).unwrap();
        }
    }

    #[test]
    fn extension_field_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f4 = Field::new(FieldSpec::prime_power(2, 2).unwrap()).unwrap();
        for _ in 0..30 {
            let m = PhaseMatrix::random(f4.clone(), 3, &mut rng).unwrap();
            let r = verify_duality(&m, TOL, DEFAULT_CAP).unwrap();
            for c in &r.cuts {
                let s = Bipartition::new(3, c.mask).unwrap();
                assert_eq!(c.predicted, vec![(4, cut_rank(&m, &s).unwrap() as u32)]);
            }
        }
    }

    #[test]
    fn complement_purities_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = PhaseMatrix::random(Field::prime(3).unwrap(), 5, &mut rng).unwrap();
        let psi = build_state(&m, DEFAULT_CAP).unwrap();
        for s in enumerate_bipartitions(5, 4, false).unwrap() {
            let a = purity_exact(&reduce(&psi, &s, u64::MAX).unwrap());
            let b = purity_exact(&reduce(&psi, &s.complement(), u64::MAX).unwrap());
            assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn ame_path_reductions_are_identity() {
        let p = PhaseMatrix::from_rows(
            Field::prime(2).unwrap(),
            &[vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]],
        )
        .unwrap();
        let r = verify_duality(&p, TOL, DEFAULT_CAP).unwrap();
        assert!(r.is_ame);
        assert!(r.max_identity_residual().unwrap() < TOL);
        assert!(r.max_eigen_residual().unwrap() < TOL);
    }

    #[test]
    fn composite_tensor_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z6 = Field::new(FieldSpec::composite(&[2, 3]).unwrap()).unwrap();
        for _ in 0..10 {
            let m = PhaseMatrix::random(z6.clone(), 2, &mut rng).unwrap();
            let r = verify_duality(&m, TOL, DEFAULT_CAP).unwrap();
            assert_eq!(r.local_dim, 6);
        }
        let m = PhaseMatrix::random(z6, 3, &mut rng).unwrap();
        verify_duality(&m, TOL, DEFAULT_CAP).unwrap();
    }

    #[test]
    fn large_sides_use_the_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = PhaseMatrix::random(Field::prime(2).unwrap(), 12, &mut rng).unwrap();
        let psi = build_state(&m, DEFAULT_CAP).unwrap();
        let s = Bipartition::new(12, 0b0111_1111_1111).unwrap();
        let direct = purity_exact(&reduce(&psi, &s.complement(), u64::MAX).unwrap());
        let pred = purity(&m, &s).unwrap().value();
        assert!((direct - pred).abs() < TOL);
    }

    #[test]
    fn cap_errors_report_the_requirement() {
        let z = PhaseMatrix::zeros(Field::prime(3).unwrap(), 5).unwrap();
        let e = verify_duality(&z, TOL, 100).unwrap_err();
        assert_eq!(e.required_cap(), Some(243));
    }
}
