//! Square-free composite dimensions `d = p_1 ... p_r`. A phase matrix over
//! `Z_d` is handled entirely through its reductions mod each `p_a`: the state
//! is the tensor product of the per-prime states, purities multiply and
//! Rényi-2 entropies add. Rank is never taken over `Z_d` itself.

mod gate;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{crt_combine, crt_split, Field, FieldError, FieldSpec};
use crate::phasecore::{
    certify_components, Bipartition, CertificationReport, CutRanker, EntropyUnit, PhaseError,
    PhaseMatrix, Purity,
};
use crate::search::{run_search, SearchConfig, SearchError, SearchResult, Termination};

pub use self::gate::{crt_gate, GateDecision, GateEntry, GateTable};

#[derive(Debug, Error)]
pub enum CrtError {
    #[error("components disagree on the party count ({0} vs {1})")]
    MixedDimensions(usize, usize),
    #[error("prime {0} appears in more than one component")]
    DuplicatePrimes(u64),
    #[error("component over {0} is not a prime field")]
    NotPrimeField(String),
    #[error("matrix over {0} is not over a composite ring")]
    NotComposite(String),
    #[error("no components given")]
    Empty,
    #[error("gate table: {0}")]
    GateTable(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub type Result<T, E = CrtError> = std::result::Result<T, E>;

/// Per-prime phase matrices on a shared party set, sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositePhase {
    n: usize,
    primes: Vec<u64>,
    components: Vec<PhaseMatrix>,
}

fn prime_of(p: &PhaseMatrix) -> Result<u64> {
    match p.field().spec() {
        FieldSpec::Prime { p } => Ok(*p),
        other => Err(CrtError::NotPrimeField(other.to_string())),
    }
}

impl CompositePhase {
    pub fn new(mut components: Vec<PhaseMatrix>) -> Result<Self> {
        let n = components.first().ok_or(CrtError::Empty)?.n();
        for c in &components {
            if c.n() != n {
                return Err(CrtError::MixedDimensions(n, c.n()));
            }
            prime_of(c)?;
        }
        components.sort_by_key(|c| c.field().order());
        let primes: Vec<u64> = components.iter().map(|c| c.field().order()).collect();
        if let Some(w) = primes.windows(2).find(|w| w[0] == w[1]) {
            return Err(CrtError::DuplicatePrimes(w[0]));
        }
        Ok(CompositePhase {
            n,
            primes,
            components,
        })
    }

    pub fn from_matrix(p: &PhaseMatrix) -> Result<Self> {
        CompositePhase::new(split_matrix(p)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn components(&self) -> &[PhaseMatrix] {
        &self.components
    }

    pub fn d(&self) -> u64 {
        self.primes.iter().product()
    }

    pub fn compose(&self) -> Result<PhaseMatrix> {
        if self.components.len() == 1 {
            return Ok(self.components[0].clone());
        }
        let field = Field::new(FieldSpec::composite(&self.primes)?)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        let mut residues = vec![0; self.primes.len()];
        for idx in 0..n * n {
            for (r, c) in residues.iter_mut().zip(&self.components) {
                *r = c.entries()[idx];
            }
            entries.push(crt_combine(&residues, &self.primes)?);
        }
        Ok(PhaseMatrix::from_entries(field, n, entries)?)
    }
}

/// Entrywise CRT combination of per-prime matrices. A single component is
/// returned unchanged.
pub fn compose_matrices(components: &[PhaseMatrix]) -> Result<PhaseMatrix> {
    CompositePhase::new(components.to_vec())?.compose()
}

/// Reductions mod each prime of a composite matrix, in ascending prime order.
pub fn split_matrix(p: &PhaseMatrix) -> Result<Vec<PhaseMatrix>> {
    let primes = match p.field().spec() {
        FieldSpec::Composite { primes } => primes.clone(),
        other => return Err(CrtError::NotComposite(other.to_string())),
    };
    let n = p.n();
    let mut parts: Vec<Vec<u64>> = vec![Vec::with_capacity(n * n); primes.len()];
    for &x in p.entries() {
        for (part, r) in parts.iter_mut().zip(crt_split(x, &primes)?) {
            part.push(r);
        }
    }
    primes
        .iter()
        .zip(parts)
        .map(|(&q, entries)| Ok(PhaseMatrix::from_entries(Field::prime(q)?, n, entries)?))
        .collect()
}

fn component_ranks(c: &CompositePhase, s: &Bipartition) -> Result<Vec<u32>> {
    if s.n() != c.n {
        return Err(PhaseError::PartyMismatch {
            expected: c.n,
            found: s.n(),
        }
        .into());
    }
    c.components
        .iter()
        .map(|p| Ok(CutRanker::new(p.field())?.rank(c.n, p.entries(), s.mask()) as u32))
        .collect()
}

/// `prod_a p_a^(-rk_a)` kept as `(p_a, rk_a)` pairs.
pub fn composite_purity(c: &CompositePhase, s: &Bipartition) -> Result<Purity> {
    let ranks = component_ranks(c, s)?;
    Ok(Purity::new(c.primes.iter().copied().zip(ranks).collect()))
}

/// `sum_a rk_a log(p_a)`, the sum of the component entropies in prime order.
pub fn composite_entropy(c: &CompositePhase, s: &Bipartition, unit: EntropyUnit) -> Result<f64> {
    Ok(composite_purity(c, s)?.neg_log(unit))
}

/// AME iff every component is full rank on every cut; uniformity is the
/// minimum over components.
pub fn certify_composite(c: &CompositePhase) -> Result<CertificationReport> {
    let refs: Vec<&PhaseMatrix> = c.components.iter().collect();
    Ok(certify_components(&refs)?)
}

#[derive(Debug, Clone)]
pub struct CompositeSearchResult {
    /// One independent search per prime, ascending.
    pub components: Vec<SearchResult>,
    pub composite: PhaseMatrix,
    pub report: CertificationReport,
    /// Sum of the component costs.
    pub best_cost: u64,
    pub terminated_by: Termination,
}

/// Runs an independent search over each prime field, all with the same
/// settings and seed, and composes the best matrices.
pub fn search_composite(
    n_parties: usize,
    primes: &[u64],
    base: &SearchConfig,
) -> Result<CompositeSearchResult> {
    let spec = FieldSpec::composite(primes)?;
    let FieldSpec::Composite { primes } = spec else {
        unreachable!("composite constructor")
    };
    let components = primes
        .par_iter()
        .map(|&p| {
            let cfg = SearchConfig {
                n_parties,
                field: FieldSpec::prime(p)?,
                ..base.clone()
            };
            Ok(run_search(cfg)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let phase = CompositePhase::new(components.iter().map(|r| r.best.clone()).collect())?;
    let report = certify_composite(&phase)?;
    let terminated_by = if components
        .iter()
        .all(|r| r.terminated_by == Termination::CostZero)
    {
        Termination::CostZero
    } else {
        Termination::StepBudget
    };
    Ok(CompositeSearchResult {
        best_cost: components.iter().map(|r| r.best_cost).sum(),
        composite: phase.compose()?,
        components,
        report,
        terminated_by,
    })
}
