//! Dense polynomials over a prime field, coefficients stored low-degree first.
//!
//! These helpers back the extension-field arithmetic and the irreducibility
//! test. Every function expects coefficients already reduced into `[0, p)`.

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime via extended Euclid. `a` must be nonzero mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

pub(crate) fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` divided by a nonzero polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = trim(m.to_vec());
    let dm = degree(&m).expect("division by zero polynomial");
    let lead_inv = inv_mod(m[dm], p).expect("leading coefficient invertible");
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let factor = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (k, &c) in m.iter().enumerate() {
            let t = mul_mod(factor, c, p);
            r[shift + k] = (r[shift + k] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

pub(crate) fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn pow_rem(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_rem(&acc, &b, m, p);
        }
        b = mul_rem(&b, &b, m, p);
        exp >>= 1;
    }
    rem(&acc, m, p)
}

/// Irreducibility over F_p: no factor of degree `k <= m/2`, checked through
/// `gcd(f, x^(p^k) - x) = 1`. The `k = 1` step is the root test.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let Some(m) = degree(&f) else {
        return false;
    };
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 1..=m / 2 {
        h = pow_rem(&h, p, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if degree(&g).is_some_and(|d| d > 0) {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `m`, comparing
/// coefficient vectors `(c_0, c_1, ..., c_{m-1})` from the constant term up.
pub(crate) fn smallest_irreducible(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    let mut digits = vec![0u64; m];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        // c_{m-1} is the least significant position in this ordering.
        let mut pos = m;
        loop {
            assert!(pos > 0, "an irreducible polynomial of every degree exists");
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < p {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm on
/// polynomials. Returns `None` when `gcd(a, m) != 1`.
pub(crate) fn inv_rem(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = trim(m.to_vec());
    let mut r1 = rem(a, m, p);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let c = inv_mod(r0[0], p)?;
    Some(rem(&mul(&s0, &[c], p), m, p))
}

fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = inv_mod(b[db], p).expect("leading coefficient invertible");
    let mut r = trim(a.to_vec());
    let mut q = vec![0u64; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let factor = mul_mod(r[dr], lead_inv, p);
        let shift = dr - db;
        q[shift] = factor;
        for (k, &c) in b.iter().enumerate().take(db + 1) {
            let t = mul_mod(factor, c, p);
            r[shift + k] = (r[shift + k] + p - t) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducibles() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        // (c0, c1, c2) = (1, 0, 0) gives x^3 + 1 = (x + 1)(x^2 + x + 1); next is 1 + x^2 + x^3.
        assert_eq!(smallest_irreducible(2, 3), vec![1, 0, 1, 1]);
        // x^2 + 1 is irreducible over F_3 (no square root of -1).
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
        assert!(!is_irreducible(&[0, 0, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        // (x^2 + x + 1)^2 = x^4 + x^2 + 1 has no roots but is reducible.
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn irreducible_count_matches_necklace_formula() {
        // Number of monic irreducibles of degree 4 over F_2 is (16 - 4) / 4 = 3,
        // over F_3 of degree 2 it is (9 - 3) / 2 = 3.
        let count = |p: u64, m: usize| {
            (0..p.pow(m as u32))
                .filter(|&t| {
                    let mut f: Vec<u64> = (0..m).map(|i| (t / p.pow(i as u32)) % p).collect();
                    f.push(1);
                    is_irreducible(&f, p)
                })
                .count()
        };
        assert_eq!(count(2, 4), 3);
        assert_eq!(count(3, 2), 3);
        assert_eq!(count(5, 3), (125 - 5) / 3);
    }

    #[test]
    fn inverse_mod_prime() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(0, 7), None);
        for a in 1..137 {
            assert_eq!(mul_mod(a, inv_mod(a, 137).unwrap(), 137), 1);
        }
    }
}
