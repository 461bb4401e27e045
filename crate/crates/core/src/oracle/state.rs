use num_complex::Complex64;
use rayon::prelude::*;

use super::{OracleError, Result};
use crate::crt::split_matrix;
use crate::field::FieldSpec;
use crate::phasecore::PhaseMatrix;

const BLOCK: usize = 4096;

/// Dense amplitudes over `q^n` basis states, party 0 the most significant
/// base-`q` digit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    q: u64,
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation of any `|amplitude|` from `q^(-n/2)`.
    pub fn modulus_residual(&self) -> f64 {
        let expected = (self.q as f64).powf(-(self.n as f64) / 2.0);
        self.amplitudes
            .iter()
            .map(|a| (a.norm() - expected).abs())
            .fold(0.0, f64::max)
    }
}

/// `q^n` if it is at most `cap`.
pub(crate) fn checked_dim(q: u64, n: usize, cap: u64) -> Result<usize> {
    match (q as u128).checked_pow(n as u32) {
        Some(d) if d <= cap as u128 => Ok(d as usize),
        _ => Err(OracleError::InstanceTooLarge { q, n, cap }),
    }
}

/// `exp(2 pi i k / p)` for `k` in `0..p`, each from its own integer exponent.
fn roots_of_unity(p: u64) -> Vec<Complex64> {
    (0..p)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / p as f64))
        .collect()
}

/// Base-`q` digits of `index`, party 0 first.
pub(crate) fn digits(mut index: usize, q: u64, out: &mut [u64]) {
    for d in out.iter_mut().rev() {
        *d = index as u64 % q;
        index /= q as usize;
    }
}

/// The quadratic phase state of `p`. Over `F_p` the phase exponent is
/// `sum_{i<j} P_ij x_i x_j mod p`; over `F_{p^m}` the field-valued sum is
/// first traced down to `F_p`. Composite matrices give the tensor product of
/// their per-prime states, with each `Z_d` digit split by CRT.
pub fn build_state(p: &PhaseMatrix, cap: u64) -> Result<StateVector> {
    let field = p.field();
    let q = field.order();
    let n = p.n();
    let dim = checked_dim(q, n, cap)?;
    if let FieldSpec::Composite { .. } = field.spec() {
        return build_composite(p, dim);
    }
    let char_p = field
        .spec()
        .characteristic()
        .expect("fields have a characteristic");
    let roots = roots_of_unity(char_p);
    let scale = (q as f64).powf(-(n as f64) / 2.0);
    let extension = matches!(field.spec(), FieldSpec::PrimePower { .. });
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes
        .par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut x = vec![0u64; n];
            for (k, amp) in chunk.iter_mut().enumerate() {
                digits(b * BLOCK + k, q, &mut x);
                let mut sum = 0u64;
                for i in 0..n {
                    if x[i] == 0 {
                        continue;
                    }
                    for j in i + 1..n {
                        let t = field.mul(field.mul(p.get(i, j), x[i]), x[j]);
                        sum = field.add(sum, t);
                    }
                }
                let chi = if extension {
                    field.trace(sum).expect("extension field")
                } else {
                    sum
                };
                *amp = roots[chi as usize] * scale;
            }
        });
    Ok(StateVector { q, n, amplitudes })
}

fn build_composite(p: &PhaseMatrix, dim: usize) -> Result<StateVector> {
    let parts = split_matrix(p)?;
    let n = p.n();
    let d = p.field().order();
    let states = parts
        .iter()
        .map(|c| build_state(c, u64::MAX))
        .collect::<Result<Vec<_>>>()?;
    let primes: Vec<u64> = parts.iter().map(|c| c.field().order()).collect();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes
        .par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut x = vec![0u64; n];
            for (k, amp) in chunk.iter_mut().enumerate() {
                digits(b * BLOCK + k, d, &mut x);
                let mut a = Complex64::new(1.0, 0.0);
                for (s, &prime) in states.iter().zip(&primes) {
                    let idx = x.iter().fold(0usize, |acc, &xi| {
                        acc * prime as usize + (xi % prime) as usize
                    });
                    a *= s.amplitudes[idx];
                }
                *amp = a;
            }
        });
    Ok(StateVector {
        q: d,
        n,
        amplitudes,
    })
}
