use rand::Rng;

/// `T_r = t_min (t_max / t_min)^(r / (R - 1))`; a single replica runs at
/// `t_min`.
pub fn geometric_ladder(t_min: f64, t_max: f64, replicas: usize) -> Vec<f64> {
    if replicas == 1 {
        return vec![t_min];
    }
    let ratio = t_max / t_min;
    (0..replicas)
        .map(|r| {
            if r == replicas - 1 {
                t_max
            } else {
                t_min * ratio.powf(r as f64 / (replicas - 1) as f64)
            }
        })
        .collect()
}

/// Accepts with probability `min(1, exp(-delta / t))`.
pub fn metropolis_accept<R: Rng + ?Sized>(delta: i64, t: f64, rng: &mut R) -> bool {
    delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / t).exp()
}

/// Probability of exchanging the configurations held at temperatures `t_a`
/// (colder) and `t_b`.
pub fn exchange_probability(t_a: f64, t_b: f64, cost_a: u64, cost_b: u64) -> f64 {
    let x = (1.0 / t_a - 1.0 / t_b) * (cost_a as f64 - cost_b as f64);
    x.exp().min(1.0)
}

/// One exchange sweep over adjacent slots `(r, r + 1)` with `r % 2 == parity`.
/// Returns the lower slot of every accepted pair. Pairs in a sweep are
/// disjoint, so the caller may apply the swaps in any order.
pub fn exchange_sweep<R: Rng + ?Sized>(
    costs: &[u64],
    temperatures: &[f64],
    parity: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut swaps = Vec::new();
    let mut r = parity % 2;
    while r + 1 < costs.len() {
        let p = exchange_probability(temperatures[r], temperatures[r + 1], costs[r], costs[r + 1]);
        if p >= 1.0 || rng.gen::<f64>() < p {
            swaps.push(r);
        }
        r += 2;
    }
    swaps
}

/// Nearest-rank percentile of sorted data, `q` in `[0, 1]`.
pub(crate) fn percentile(sorted: &[u64], q: f64) -> u64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ladder_is_geometric_and_increasing() {
        let t = geometric_ladder(0.2, 5.0, 8);
        assert_eq!(t.len(), 8);
        assert_eq!(t[0], 0.2);
        assert_eq!(t[7], 5.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        let ratios: Vec<f64> = t.windows(2).map(|w| w[1] / w[0]).collect();
        for r in &ratios {
            assert!((r - ratios[0]).abs() < 1e-12);
        }
        assert_eq!(geometric_ladder(0.5, 3.0, 1), vec![0.5]);
    }

    #[test]
    fn downhill_and_flat_moves_always_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in [1e-6, 0.2, 5.0, 1e6] {
            assert!(metropolis_accept(-3, t, &mut rng));
            assert!(metropolis_accept(0, t, &mut rng));
        }
    }

    #[test]
    fn uphill_acceptance_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| metropolis_accept(2, 1.0, &mut rng))
            .count() as f64;
        let p = (-2.0f64).exp();
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((hits - trials as f64 * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn exchange_probability_signs() {
        assert_eq!(exchange_probability(0.5, 2.0, 7, 7), 1.0);
        assert!(exchange_probability(0.5, 2.0, 3, 7) < 1.0);
        assert_eq!(exchange_probability(0.5, 2.0, 7, 3), 1.0);
    }

    #[test]
    fn sweeps_alternate_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let costs = [5u64; 6];
        let temps = geometric_ladder(0.2, 5.0, 6);
        assert_eq!(exchange_sweep(&costs, &temps, 0, &mut rng), vec![0, 2, 4]);
        assert_eq!(exchange_sweep(&costs, &temps, 1, &mut rng), vec![1, 3]);
    }

    /// Two replicas, each a two-level system with energies 0 and 1, doing
    /// Metropolis flips plus configuration exchange. The stationary
    /// distribution is the product of the two Gibbs distributions, so each
    /// slot's occupancy of the upper level is `e^(-1/T) / (1 + e^(-1/T))`.
    #[test]
    fn two_level_exchange_reaches_gibbs_occupancy() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let temps = [0.7, 2.0];
        let mut state = [0u64, 1u64];
        let mut upper = [0u64; 2];
        let sweeps = 1_000_000;
        for s in 0..sweeps {
            for r in 0..2 {
                let delta = if state[r] == 0 { 1 } else { -1 };
                if metropolis_accept(delta, temps[r], &mut rng) {
                    state[r] ^= 1;
                }
            }
            for r in exchange_sweep(&state, &temps, s % 2, &mut rng) {
                state.swap(r, r + 1);
            }
            for r in 0..2 {
                upper[r] += state[r];
            }
        }
        for r in 0..2 {
            let w = (-1.0 / temps[r]).exp();
            let expected = w / (1.0 + w);
            let got = upper[r] as f64 / sweeps as f64;
            assert!(
                (got - expected).abs() < 0.02 * expected,
                "slot {r}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn nearest_rank_percentiles() {
        let v: Vec<u64> = (1..=10).collect();
        assert_eq!(percentile(&v, 0.9), 9);
        assert_eq!(percentile(&v, 0.1), 1);
        assert_eq!(percentile(&v, 1.0), 10);
        assert_eq!(percentile(&v, 0.0), 1);
    }
}
