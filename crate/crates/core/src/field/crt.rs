use super::poly::{inv_mod, mul_mod};
use super::{FieldError, Result};

fn check_primes(primes: &[u64]) -> Result<u64> {
    let mut seen = primes.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(FieldError::NonDistinctPrimes);
    }
    primes.iter().try_fold(1u64, |acc, &p| {
        acc.checked_mul(p)
            .ok_or_else(|| FieldError::OrderTooLarge(format!("{primes:?}")))
    })
}

/// The unique `x` in `[0, prod primes)` with `x = residues[a] (mod primes[a])`.
pub fn crt_combine(residues: &[u64], primes: &[u64]) -> Result<u64> {
    if residues.len() != primes.len() {
        return Err(FieldError::DimensionMismatch(residues.len(), primes.len()));
    }
    let d = check_primes(primes)?;
    let mut x = 0u64;
    for (&r, &p) in residues.iter().zip(primes) {
        if r >= p {
            return Err(FieldError::OutOfRange {
                value: r,
                modulus: p,
            });
        }
        let cofactor = d / p;
        let inv = inv_mod(cofactor % p, p).ok_or(FieldError::NonDistinctPrimes)?;
        let term = mul_mod(mul_mod(r, inv, p), cofactor, d);
        x = ((x as u128 + term as u128) % d as u128) as u64;
    }
    Ok(x)
}

/// Residues of `x` modulo each prime.
pub fn crt_split(x: u64, primes: &[u64]) -> Result<Vec<u64>> {
    let d = check_primes(primes)?;
    if x >= d {
        return Err(FieldError::OutOfRange {
            value: x,
            modulus: d,
        });
    }
    Ok(primes.iter().map(|p| x % p).collect())
}
