use serde::{Deserialize, Serialize};

use super::{class_index, Bipartition, PhaseMatrix, Result};
use crate::field::{inverse_table, rank_in_place, rank_mod_prime, Field, FieldError, FieldMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyUnit {
    Nats,
    Bits,
}

impl EntropyUnit {
    pub fn log(self, x: f64) -> f64 {
        match self {
            EntropyUnit::Nats => x.ln(),
            EntropyUnit::Bits => x.log2(),
        }
    }
}

/// Exact purity `prod base^(-rank)`, kept as integer exponents so entropies
/// never pass through a tiny floating-point product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Purity {
    factors: Vec<(u64, u32)>,
}

impl Purity {
    pub fn new(factors: Vec<(u64, u32)>) -> Self {
        Purity { factors }
    }

    pub fn single(base: u64, rank: u32) -> Self {
        Purity {
            factors: vec![(base, rank)],
        }
    }

    /// `(base, rank)` pairs; the purity is `prod base^(-rank)`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Negated exponent of a single-base purity, `None` for several bases.
    pub fn exponent(&self) -> Option<i64> {
        match self.factors.as_slice() {
            [(_, r)] => Some(-(*r as i64)),
            _ => None,
        }
    }

    pub fn value(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(b, r)| (b as f64).powi(-(r as i32)))
            .product()
    }

    /// `-log(purity)`, summed factor by factor from the integer exponents.
    pub fn neg_log(&self, unit: EntropyUnit) -> f64 {
        self.factors
            .iter()
            .map(|&(b, r)| r as f64 * unit.log(b as f64))
            .sum()
    }

    pub fn is_pure(&self) -> bool {
        self.factors.iter().all(|&(_, r)| r == 0)
    }
}

/// Reusable scratch space for cut-rank evaluation on one field.
#[derive(Debug, Clone)]
pub struct CutRanker {
    field: Field,
    buf: Vec<u64>,
    inverses: Vec<u32>,
}

/// Largest prime whose inverse table a ranker precomputes.
const INVERSE_TABLE_BOUND: u64 = 1 << 16;

impl CutRanker {
    pub fn new(field: &Field) -> Result<Self> {
        if !field.is_field() {
            return Err(FieldError::CompositeFieldRank(field.order()).into());
        }
        Ok(CutRanker {
            field: field.clone(),
            buf: Vec::with_capacity(32 * 32),
            inverses: match field.prime_modulus() {
                Some(p) if p <= INVERSE_TABLE_BOUND => inverse_table(p),
                _ => Vec::new(),
            },
        })
    }

    /// Rank of `P[S, S̄]` for the row-major `n x n` matrix `entries`.
    ///
    /// The smaller side indexes the rows; rank is transpose-invariant.
    pub fn rank(&mut self, n: usize, entries: &[u64], mask: u64) -> usize {
        if self.field.prime_modulus() == Some(2) {
            return self.rank_gf2(n, entries, mask);
        }
        let (small, other) = split_sides(n, mask);
        self.buf.clear();
        let mut rows = small;
        while rows != 0 {
            let r = rows.trailing_zeros() as usize;
            rows &= rows - 1;
            let row = &entries[r * n..(r + 1) * n];
            let mut cols = other;
            while cols != 0 {
                self.buf.push(row[cols.trailing_zeros() as usize]);
                cols &= cols - 1;
            }
        }
        let (r, c) = (small.count_ones() as usize, other.count_ones() as usize);
        match self.field.prime_modulus() {
            Some(p) => rank_mod_prime(p, &self.inverses, r, c, &mut self.buf),
            None => rank_in_place(&self.field, r, c, &mut self.buf)
                .expect("nonzero pivots are invertible in a field"),
        }
    }
}

/// `(smaller side, larger side)` as masks; ties keep `mask` first.
fn split_sides(n: usize, mask: u64) -> (u64, u64) {
    let rest = ((1u64 << n) - 1) & !mask;
    if (mask.count_ones() as usize) * 2 <= n {
        (mask, rest)
    } else {
        (rest, mask)
    }
}

impl CutRanker {
    /// Rows of the smaller side packed as column bit masks, reduced against a
    /// basis kept in descending order of leading bit.
    fn rank_gf2(&mut self, n: usize, entries: &[u64], mask: u64) -> usize {
        let (small, other) = split_sides(n, mask);
        let basis = &mut self.buf;
        basis.clear();
        let mut rows = small;
        while rows != 0 {
            let r = rows.trailing_zeros() as usize;
            rows &= rows - 1;
            let row = &entries[r * n..(r + 1) * n];
            let mut v = 0u64;
            let mut cols = other;
            while cols != 0 {
                let c = cols.trailing_zeros() as usize;
                cols &= cols - 1;
                v |= (row[c] & 1) << c;
            }
            for &b in basis.iter() {
                v = v.min(v ^ b);
            }
            if v != 0 {
                let at = basis.partition_point(|&b| b > v);
                basis.insert(at, v);
            }
        }
        basis.len()
    }
}

/// The `|S| x (n - |S|)` block with rows in `S` and columns in `S̄`, both in
/// ascending party order.
pub fn cut_submatrix(p: &PhaseMatrix, s: &Bipartition) -> Result<FieldMatrix> {
    p.check_bipartition(s)?;
    let rows = s.members();
    let cols = s.outside();
    let entries = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| p.get(r, c)))
        .collect();
    Ok(FieldMatrix::new(
        p.field().clone(),
        rows.len(),
        cols.len(),
        entries,
    )?)
}

pub fn cut_rank(p: &PhaseMatrix, s: &Bipartition) -> Result<usize> {
    p.check_bipartition(s)?;
    let mut ranker = CutRanker::new(p.field())?;
    Ok(ranker.rank(p.n(), p.entries(), s.mask()))
}

/// `q^(-rk)` with `q` the field order.
pub fn purity(p: &PhaseMatrix, s: &Bipartition) -> Result<Purity> {
    let rk = cut_rank(p, s)?;
    Ok(Purity::single(p.field().order(), rk as u32))
}

/// `rk * log(q)` in the requested unit.
pub fn renyi2_entropy(p: &PhaseMatrix, s: &Bipartition, unit: EntropyUnit) -> Result<f64> {
    Ok(purity(p, s)?.neg_log(unit))
}

/// Sum of squared rank deficits `(|S| - rk)^2` over the deduplicated classes
/// with `|S| <= n/2`. Zero exactly when every such cut has full rank.
pub fn cost(p: &PhaseMatrix) -> Result<u64> {
    let n = p.n();
    let mut ranker = CutRanker::new(p.field())?;
    let mut total = 0u64;
    for class in 1..1u64 << (n - 1) {
        debug_assert_eq!(class_index(n, class), class);
        let target = (class.count_ones() as usize).min(n - class.count_ones() as usize);
        let deficit = (target - ranker.rank(n, p.entries(), class)) as u64;
        total += deficit * deficit;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::phasecore::{balanced_classes, enumerate_bipartitions, PhaseError};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> PhaseMatrix {
        PhaseMatrix::from_rows(
            Field::prime(2).unwrap(),
            &[vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]],
        )
        .unwrap()
    }

    #[test]
    fn binary_ranker_matches_submatrix_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = Field::prime(2).unwrap();
        let mut ranker = CutRanker::new(&f).unwrap();
        for _ in 0..60 {
            let n = rng.gen_range(2..=12);
            let p = PhaseMatrix::random(f.clone(), n, &mut rng).unwrap();
            for mask in 1..(1u64 << n) - 1 {
                let s = Bipartition::new(n, mask).unwrap();
                let expected = cut_submatrix(&p, &s).unwrap().rank().unwrap();
                assert_eq!(ranker.rank(n, p.entries(), mask), expected);
            }
        }
    }

    #[test]
    fn submatrix_examples() {
        let p = path3();
        let s1 = Bipartition::from_parties(3, &[1]).unwrap();
        assert_eq!(cut_submatrix(&p, &s1).unwrap().entries(), &[1, 1]);
        let s0 = Bipartition::from_parties(3, &[0]).unwrap();
        assert_eq!(cut_submatrix(&p, &s0).unwrap().entries(), &[1, 0]);
        assert_eq!(cut_rank(&p, &s1).unwrap(), 1);

        let z = PhaseMatrix::zeros(Field::prime(5).unwrap(), 5).unwrap();
        let s = Bipartition::from_parties(5, &[1, 3]).unwrap();
        let sub = cut_submatrix(&z, &s).unwrap();
        assert_eq!((sub.rows(), sub.cols()), (2, 3));
        assert!(sub.entries().iter().all(|&e| e == 0));
    }

    #[test]
    fn purity_and_entropy_examples() {
        let z = PhaseMatrix::zeros(Field::prime(7).unwrap(), 4).unwrap();
        for s in enumerate_bipartitions(4, 3, false).unwrap() {
            assert!(purity(&z, &s).unwrap().is_pure());
            assert_eq!(renyi2_entropy(&z, &s, EntropyUnit::Bits).unwrap(), 0.0);
        }
        let bell =
            PhaseMatrix::from_rows(Field::prime(2).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let s = Bipartition::from_parties(2, &[0]).unwrap();
        let pur = purity(&bell, &s).unwrap();
        assert_eq!(pur.value(), 0.5);
        assert_eq!(pur.exponent(), Some(-1));
        assert_eq!(renyi2_entropy(&bell, &s, EntropyUnit::Bits).unwrap(), 1.0);
    }

    #[test]
    fn cost_examples() {
        let z = PhaseMatrix::zeros(Field::prime(2).unwrap(), 4).unwrap();
        assert_eq!(cost(&z).unwrap(), 16);
        assert_eq!(cost(&path3()).unwrap(), 0);
    }

    #[test]
    fn composite_matrices_have_no_rank() {
        let z = Field::new(FieldSpec::composite(&[2, 3]).unwrap()).unwrap();
        let p = PhaseMatrix::zeros(z, 3).unwrap();
        assert!(matches!(
            cost(&p),
            Err(PhaseError::Field(FieldError::CompositeFieldRank(6)))
        ));
    }

    /// Independent cost: the definition applied to every subset of size
    /// `<= n/2`, each balanced pair visited from both sides and halved.
    fn cost_by_subsets(p: &PhaseMatrix) -> u64 {
        let n = p.n();
        let mut twice = 0u64;
        for s in enumerate_bipartitions(n, n / 2, false).unwrap() {
            let sub = cut_submatrix(p, &s).unwrap();
            let d = (s.size() - sub.rank().unwrap()) as u64;
            let weight = if 2 * s.size() == n { 1 } else { 2 };
            twice += weight * d * d;
        }
        twice / 2
    }

    #[test]
    fn cut_rank_properties_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let fields = [
            FieldSpec::prime(2).unwrap(),
            FieldSpec::prime(3).unwrap(),
            FieldSpec::prime(73).unwrap(),
            FieldSpec::prime_power(2, 2).unwrap(),
            FieldSpec::prime_power(3, 2).unwrap(),
        ];
        for spec in fields {
            let f = Field::new(spec).unwrap();
            for _ in 0..20 {
                let n = rng.gen_range(2..=8);
                let p = PhaseMatrix::random(f.clone(), n, &mut rng).unwrap();
                for s in enumerate_bipartitions(n, n - 1, false).unwrap() {
                    let r = cut_rank(&p, &s).unwrap();
                    assert_eq!(r, cut_rank(&p, &s.complement()).unwrap());
                    assert!(r <= s.min_side());
                    assert_eq!(r, cut_submatrix(&p, &s).unwrap().rank().unwrap());
                    let h = renyi2_entropy(&p, &s, EntropyUnit::Nats).unwrap();
                    assert_eq!(h, r as f64 * (f.order() as f64).ln());
                    let pur = purity(&p, &s).unwrap().value();
                    assert!((h + pur.ln()).abs() < 1e-12);
                }
                assert_eq!(cost(&p).unwrap(), cost_by_subsets(&p));
                assert_eq!(
                    balanced_classes(n).unwrap().count() as u64,
                    (1 << (n - 1)) - 1
                );
            }
        }
    }
}
