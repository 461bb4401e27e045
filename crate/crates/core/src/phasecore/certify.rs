use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{binomial, CutRanker, PhaseError, PhaseMatrix, Result};

const CHUNK: usize = 2048;

/// Aggregates for one subsystem size `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub size: usize,
    /// Deduplicated complement classes of this size.
    pub bipartitions: u64,
    /// Raw subsets of this size, `C(n, k)`.
    pub subsets: u64,
    pub saturated: u64,
    pub saturated_subsets: u64,
    /// Smallest rank seen at this size, minimised over components too.
    pub min_rank: u32,
    /// Smallest Rényi-2 entropy over the classes of this size.
    pub min_entropy_bits: f64,
    pub min_entropy_nats: f64,
    /// `k * log2(d)`, the maximally mixed value.
    pub target_bits: f64,
    /// Worst-case gap `sum_a (k - rk_a) log2(p_a)` over this size, from integer ranks.
    pub deficit_bits: f64,
}

impl SizeRecord {
    pub fn is_saturated(&self) -> bool {
        self.saturated == self.bipartitions
    }
}

/// A class `{S, S̄}` whose cut is rank deficient in at least one component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedCut {
    pub mask: u64,
    pub size: usize,
    /// One rank per component.
    pub ranks: Vec<u32>,
    /// `size - min(ranks)`.
    pub deficit: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub n: usize,
    /// Order of each component field; a single entry unless composite.
    pub component_orders: Vec<u64>,
    pub sizes: Vec<SizeRecord>,
    pub failed: Vec<FailedCut>,
    pub is_ame: bool,
    pub k_uniformity: usize,
    pub code_distance: usize,
}

impl CertificationReport {
    /// Local dimension `d`, the product of the component orders.
    pub fn local_dim(&self) -> u64 {
        self.component_orders.iter().product()
    }

    pub fn total_bipartitions(&self) -> u64 {
        self.sizes.iter().map(|s| s.bipartitions).sum()
    }

    /// Failed complement classes (each `{S, S̄}` counted once).
    pub fn failed_classes(&self) -> usize {
        self.failed.len()
    }

    /// Failed subsets with `|S| <= n/2`: a balanced class contributes both
    /// of its sides.
    pub fn failed_subsets(&self) -> usize {
        self.failed
            .iter()
            .map(|f| if 2 * f.size == self.n { 2 } else { 1 })
            .sum()
    }

    /// Failed subsets of size exactly `n/2` (zero for odd `n`).
    pub fn failed_balanced_subsets(&self) -> usize {
        self.failed.iter().filter(|f| 2 * f.size == self.n).count() * 2
    }

    /// Total squared deficit per component, summed; equals the cost function
    /// for a single field.
    pub fn squared_deficit(&self) -> u64 {
        self.failed
            .iter()
            .flat_map(|f| {
                f.ranks
                    .iter()
                    .map(move |&r| (f.size as u64 - r as u64).pow(2))
            })
            .sum()
    }
}

#[derive(Clone)]
struct Partial {
    saturated: Vec<u64>,
    min_rank: Vec<u32>,
    min_bits: Vec<f64>,
    min_nats: Vec<f64>,
    max_deficit_bits: Vec<f64>,
    failed: Vec<FailedCut>,
}

impl Partial {
    fn new(half: usize) -> Self {
        Partial {
            saturated: vec![0; half + 1],
            min_rank: vec![u32::MAX; half + 1],
            min_bits: vec![f64::INFINITY; half + 1],
            min_nats: vec![f64::INFINITY; half + 1],
            max_deficit_bits: vec![0.0; half + 1],
            failed: Vec::new(),
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for k in 0..self.saturated.len() {
            self.saturated[k] += other.saturated[k];
            self.min_rank[k] = self.min_rank[k].min(other.min_rank[k]);
            self.min_bits[k] = self.min_bits[k].min(other.min_bits[k]);
            self.min_nats[k] = self.min_nats[k].min(other.min_nats[k]);
            self.max_deficit_bits[k] = self.max_deficit_bits[k].max(other.max_deficit_bits[k]);
        }
        self.failed.extend(other.failed);
        self
    }
}

pub fn certify_ame(p: &PhaseMatrix) -> Result<CertificationReport> {
    certify_components(&[p])
}

/// Certifies the product state of several phase matrices on the same parties
/// (one per prime factor). A cut is saturated only if it has full rank in
/// every component; a single component gives plain AME certification.
pub fn certify_components(components: &[&PhaseMatrix]) -> Result<CertificationReport> {
    let first = components.first().ok_or(PhaseError::Shape {
        expected: 0,
        found: "no components".into(),
    })?;
    let n = first.n();
    if let Some(bad) = components.iter().find(|c| c.n() != n) {
        return Err(PhaseError::PartyMismatch {
            expected: n,
            found: bad.n(),
        });
    }
    let rankers = components
        .iter()
        .map(|c| CutRanker::new(c.field()))
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<u64> = components.iter().map(|c| c.field().order()).collect();
    let log2s: Vec<f64> = orders.iter().map(|&q| (q as f64).log2()).collect();
    let lns: Vec<f64> = orders.iter().map(|&q| (q as f64).ln()).collect();
    let half = n / 2;

    // Deduplicated classes in ascending order; for odd n or |S| < n/2 the
    // representative is the smaller side.
    let classes: Vec<u64> = super::balanced_classes(n)?.map(|b| b.mask()).collect();

    let partials: Vec<Partial> = classes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut rankers = rankers.clone();
            let mut part = Partial::new(half);
            let mut ranks = Vec::with_capacity(components.len());
            for &mask in chunk {
                let size = mask.count_ones() as usize;
                ranks.clear();
                for (ranker, comp) in rankers.iter_mut().zip(components) {
                    ranks.push(ranker.rank(n, comp.entries(), mask) as u32);
                }
                let min = *ranks.iter().min().expect("at least one component");
                let bits: f64 = ranks.iter().zip(&log2s).map(|(&r, l)| r as f64 * l).sum();
                let nats: f64 = ranks.iter().zip(&lns).map(|(&r, l)| r as f64 * l).sum();
                let deficit_bits: f64 = ranks
                    .iter()
                    .zip(&log2s)
                    .map(|(&r, l)| (size as u32 - r) as f64 * l)
                    .sum();
                part.min_rank[size] = part.min_rank[size].min(min);
                part.min_bits[size] = part.min_bits[size].min(bits);
                part.min_nats[size] = part.min_nats[size].min(nats);
                part.max_deficit_bits[size] = part.max_deficit_bits[size].max(deficit_bits);
                if min as usize == size {
                    part.saturated[size] += 1;
                } else {
                    part.failed.push(FailedCut {
                        mask,
                        size,
                        ranks: ranks.clone(),
                        deficit: size as u32 - min,
                    });
                }
            }
            part
        })
        .collect();

    let total = partials
        .into_iter()
        .fold(Partial::new(half), Partial::merge);

    let log2_d: f64 = log2s.iter().sum();
    let sizes: Vec<SizeRecord> = (1..=half)
        .map(|k| {
            let balanced = 2 * k == n;
            let subsets = binomial(n, k);
            let bipartitions = if balanced { subsets / 2 } else { subsets };
            let sat = total.saturated[k];
            SizeRecord {
                size: k,
                bipartitions,
                subsets,
                saturated: sat,
                saturated_subsets: if balanced { 2 * sat } else { sat },
                min_rank: total.min_rank[k],
                min_entropy_bits: total.min_bits[k],
                min_entropy_nats: total.min_nats[k],
                target_bits: k as f64 * log2_d,
                deficit_bits: total.max_deficit_bits[k],
            }
        })
        .collect();

    let k_uniformity = sizes.iter().take_while(|s| s.is_saturated()).count();
    let is_ame = total.failed.is_empty();
    debug_assert_eq!(is_ame, k_uniformity == half);
    Ok(CertificationReport {
        n,
        component_orders: orders,
        sizes,
        failed: total.failed,
        is_ame,
        k_uniformity,
        code_distance: k_uniformity + 1,
    })
}
