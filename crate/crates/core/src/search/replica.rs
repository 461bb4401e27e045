use rand::Rng;

use super::{Result, SearchError};
use crate::phasecore::{CutRanker, PhaseMatrix};

/// A proposed single-entry change `P[i][j] = P[j][i] = new_value`, tagged
/// with the epoch of the state it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub i: usize,
    pub j: usize,
    pub new_value: u64,
    pub epoch: u64,
}

/// Cost change of a move and the cache entries it rewrites.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Delta {
    pub delta: i64,
    /// `(class index, new rank)` for every class whose rank changes.
    pub updates: Vec<(u64, u8)>,
}

/// One Monte Carlo walker: a matrix, the rank of every complement class and
/// the resulting cost.
///
/// The cache is indexed by class index (the mask of the side without party
/// `n - 1`), so `rank_cache[c]` for `c` in `1..2^(n-1)` covers every class
/// exactly once.
#[derive(Debug, Clone)]
pub struct ReplicaState {
    matrix: PhaseMatrix,
    rank_cache: Vec<u8>,
    cost: u64,
    epoch: u64,
    steps_since_improvement: u64,
    lowest_since_restart: u64,
    ranker: CutRanker,
    scratch: Vec<u64>,
}

fn target(n: usize, class: u64) -> u64 {
    let s = class.count_ones() as u64;
    s.min(n as u64 - s)
}

fn full_cache(ranker: &mut CutRanker, n: usize, entries: &[u64]) -> Vec<u8> {
    let mut cache = vec![0u8; 1 << (n - 1)];
    for (c, slot) in cache.iter_mut().enumerate().skip(1) {
        *slot = ranker.rank(n, entries, c as u64) as u8;
    }
    cache
}

fn cache_cost(n: usize, cache: &[u8]) -> u64 {
    cache
        .iter()
        .enumerate()
        .skip(1)
        .map(|(c, &r)| (target(n, c as u64) - r as u64).pow(2))
        .sum()
}

impl ReplicaState {
    pub fn new(matrix: PhaseMatrix) -> Result<Self> {
        let mut ranker = CutRanker::new(matrix.field())?;
        let n = matrix.n();
        let rank_cache = full_cache(&mut ranker, n, matrix.entries());
        let cost = cache_cost(n, &rank_cache);
        Ok(ReplicaState {
            matrix,
            rank_cache,
            cost,
            epoch: 0,
            steps_since_improvement: 0,
            lowest_since_restart: cost,
            ranker,
            scratch: Vec::new(),
        })
    }

    pub fn matrix(&self) -> &PhaseMatrix {
        &self.matrix
    }

    pub fn rank_cache(&self) -> &[u8] {
        &self.rank_cache
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn steps_since_improvement(&self) -> u64 {
        self.steps_since_improvement
    }

    pub(crate) fn lowest_since_restart(&self) -> u64 {
        self.lowest_since_restart
    }

    pub(crate) fn restore_counters(&mut self, stall: u64, lowest: u64, epoch: u64) {
        self.steps_since_improvement = stall;
        self.lowest_since_restart = lowest;
        self.epoch = epoch;
    }

    /// Replaces the configuration (restart or guide copy) and rebuilds the
    /// cache. Stall tracking starts over.
    pub fn reset(&mut self, matrix: PhaseMatrix) {
        let n = matrix.n();
        self.rank_cache = full_cache(&mut self.ranker, n, matrix.entries());
        self.cost = cache_cost(n, &self.rank_cache);
        self.matrix = matrix;
        self.epoch += 1;
        self.steps_since_improvement = 0;
        self.lowest_since_restart = self.cost;
    }

    /// Counts one step toward the stall limit, or resets it if the cost
    /// dropped below anything seen since the last restart.
    pub(crate) fn note_step(&mut self) {
        if self.cost < self.lowest_since_restart {
            self.lowest_since_restart = self.cost;
            self.steps_since_improvement = 0;
        } else {
            self.steps_since_improvement += 1;
        }
    }

    /// Uniform off-diagonal pair `i < j` and a uniform new value different
    /// from the current one.
    pub fn propose_move<R: Rng + ?Sized>(&self, rng: &mut R) -> Move {
        let n = self.matrix.n();
        let mut k = rng.gen_range(0..n * (n - 1) / 2);
        let mut i = 0;
        while k >= n - 1 - i {
            k -= n - 1 - i;
            i += 1;
        }
        let j = i + 1 + k;
        let current = self.matrix.get(i, j);
        let mut new_value = rng.gen_range(0..self.matrix.field().order() - 1);
        if new_value >= current {
            new_value += 1;
        }
        Move {
            i,
            j,
            new_value,
            epoch: self.epoch,
        }
    }

    /// Cost change of `mv`, re-ranking only the classes that separate `i`
    /// from `j`; every other cut submatrix is untouched by the move.
    pub fn delta_cost(&mut self, mv: &Move) -> Result<Delta> {
        if mv.epoch != self.epoch {
            return Err(SearchError::StaleCache {
                expected: self.epoch,
                found: mv.epoch,
            });
        }
        let n = self.matrix.n();
        if mv.i >= n || mv.j >= n || mv.i == mv.j || !self.matrix.field().contains(mv.new_value) {
            return Err(SearchError::InvalidMove);
        }
        if self.matrix.get(mv.i, mv.j) == mv.new_value {
            return Ok(Delta::default());
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(self.matrix.entries());
        self.scratch[mv.i * n + mv.j] = mv.new_value;
        self.scratch[mv.j * n + mv.i] = mv.new_value;

        let mut out = Delta::default();
        for c in 1..1u64 << (n - 1) {
            if (c >> mv.i ^ c >> mv.j) & 1 == 0 {
                continue;
            }
            let r = self.ranker.rank(n, &self.scratch, c) as u8;
            let old = self.rank_cache[c as usize];
            if r != old {
                let t = target(n, c) as i64;
                out.delta += (t - r as i64).pow(2) - (t - old as i64).pow(2);
                out.updates.push((c, r));
            }
        }
        Ok(out)
    }

    pub fn apply(&mut self, mv: &Move, delta: &Delta) -> Result<()> {
        if mv.epoch != self.epoch {
            return Err(SearchError::StaleCache {
                expected: self.epoch,
                found: mv.epoch,
            });
        }
        self.matrix.set(mv.i, mv.j, mv.new_value)?;
        for &(c, r) in &delta.updates {
            self.rank_cache[c as usize] = r;
        }
        self.cost = (self.cost as i64 + delta.delta) as u64;
        self.epoch += 1;
        Ok(())
    }

    /// Recomputes every rank from scratch and compares with the cache.
    pub fn is_coherent(&mut self) -> bool {
        let n = self.matrix.n();
        let fresh = full_cache(&mut self.ranker, n, self.matrix.entries());
        fresh == self.rank_cache && cache_cost(n, &fresh) == self.cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, FieldSpec};
    use crate::phasecore::cost;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_parties_always_propose_the_only_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s =
            ReplicaState::new(PhaseMatrix::zeros(Field::prime(5).unwrap(), 2).unwrap()).unwrap();
        for _ in 0..100 {
            let m = s.propose_move(&mut rng);
            assert_eq!((m.i, m.j), (0, 1));
            assert_ne!(m.new_value, 0);
        }
    }

    #[test]
    fn binary_moves_flip_the_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = PhaseMatrix::random(Field::prime(2).unwrap(), 6, &mut rng).unwrap();
        let s = ReplicaState::new(p).unwrap();
        for _ in 0..200 {
            let m = s.propose_move(&mut rng);
            assert_eq!(m.new_value, 1 - s.matrix().get(m.i, m.j));
        }
    }

    #[test]
    fn pair_frequencies_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s =
            ReplicaState::new(PhaseMatrix::zeros(Field::prime(3).unwrap(), 4).unwrap()).unwrap();
        let trials = 100_000;
        let mut counts = [0u64; 6];
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for _ in 0..trials {
            let m = s.propose_move(&mut rng);
            counts[pairs.iter().position(|&p| p == (m.i, m.j)).unwrap()] += 1;
        }
        let expected = trials as f64 / 6.0;
        let sigma = (trials as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() < 3.0 * sigma, "{counts:?}");
        }
        // Chi-square with 5 degrees of freedom; 20.5 is the 0.1% tail.
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 20.5, "chi2 = {chi2}");
    }

    #[test]
    fn setting_the_current_value_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = PhaseMatrix::random(Field::prime(7).unwrap(), 5, &mut rng).unwrap();
        let mut s = ReplicaState::new(p).unwrap();
        let mv = Move {
            i: 1,
            j: 3,
            new_value: s.matrix().get(1, 3),
            epoch: s.epoch(),
        };
        assert_eq!(s.delta_cost(&mv).unwrap(), Delta::default());
    }

    #[test]
    fn single_edge_on_four_qubits() {
        let f = Field::prime(2).unwrap();
        let mut s = ReplicaState::new(PhaseMatrix::zeros(f, 4).unwrap()).unwrap();
        assert_eq!(s.cost(), 16);
        let mv = Move {
            i: 0,
            j: 1,
            new_value: 1,
            epoch: 0,
        };
        let d = s.delta_cost(&mv).unwrap();
        // Classes separating 0 and 1 (party 3 never in the index):
        // {0}, {1}, {0,2}, {1,2}; each gains rank 1.
        let mut classes: Vec<u64> = d.updates.iter().map(|u| u.0).collect();
        classes.sort();
        assert_eq!(classes, vec![0b001, 0b010, 0b101, 0b110]);
        let mut after = s.matrix().clone();
        after.set(0, 1, 1).unwrap();
        assert_eq!(d.delta, cost(&after).unwrap() as i64 - 16);
        s.apply(&mv, &d).unwrap();
        assert_eq!(s.cost(), cost(&after).unwrap());
        assert!(s.is_coherent());
    }

    #[test]
    fn stale_moves_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PhaseMatrix::random(Field::prime(3).unwrap(), 4, &mut rng).unwrap();
        let mut s = ReplicaState::new(p).unwrap();
        let first = s.propose_move(&mut rng);
        let d = s.delta_cost(&first).unwrap();
        s.apply(&first, &d).unwrap();
        assert!(matches!(
            s.delta_cost(&first),
            Err(SearchError::StaleCache { .. })
        ));
    }

    #[test]
    fn incremental_delta_matches_full_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let specs = [
            FieldSpec::prime(2).unwrap(),
            FieldSpec::prime(3).unwrap(),
            FieldSpec::prime(5).unwrap(),
            FieldSpec::prime_power(2, 2).unwrap(),
        ];
        for trial in 0..1000 {
            let f = Field::new(specs[trial % specs.len()].clone()).unwrap();
            let n = rng.gen_range(2..=10);
            let p = PhaseMatrix::random(f, n, &mut rng).unwrap();
            let before = cost(&p).unwrap() as i64;
            let mut s = ReplicaState::new(p).unwrap();
            assert_eq!(s.cost() as i64, before);
            let mv = s.propose_move(&mut rng);
            let d = s.delta_cost(&mv).unwrap();
            s.apply(&mv, &d).unwrap();
            let after = cost(s.matrix()).unwrap() as i64;
            assert_eq!(d.delta, after - before);
            if trial % 50 == 0 {
                assert!(s.is_coherent());
            }
        }
    }
}
