//! Exact arithmetic over prime fields, prime-power extension fields and
//! square-free composite rings, plus Gaussian-elimination rank.
//!
//! Elements travel through the hot paths as plain `u64` encodings:
//!
//! * `F_p`: the residue in `[0, p)`.
//! * `F_{p^m}`: the coefficient vector `c_0 + c_1 x + ... + c_{m-1} x^{m-1}`
//!   read as a base-`p` integer with `c_0` the least significant digit.
//! * `Z_d` (square-free `d`): the residue in `[0, d)`.
//!
//! [`FieldElement`] wraps an encoding together with its [`Field`] for checked
//! arithmetic that rejects operands from different fields.

mod crt;
mod matrix;
pub(crate) mod poly;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::crt::{crt_combine, crt_split};
pub(crate) use self::matrix::{inverse_table, rank_mod_prime};
pub use self::matrix::{rank_in_place, FieldMatrix};

/// Largest supported prime (exclusive).
pub const PRIME_BOUND: u64 = 1 << 32;

/// Extension fields at or below this order get multiplication/inverse tables.
const TABLE_LIMIT: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("extension degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("modulus must be monic of degree {expected} with coefficients below {p}")]
    MalformedModulus { expected: u32, p: u64 },
    #[error("modulus {0:?} is reducible over F_{1}")]
    ReducibleModulus(Vec<u64>, u64),
    #[error("field order {0} exceeds the supported range")]
    OrderTooLarge(String),
    #[error("composite primes must be distinct")]
    NonDistinctPrimes,
    #[error("composite ring needs at least one prime")]
    EmptyComposite,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is a zero divisor in Z_{1}")]
    NotInvertible(u64, u64),
    #[error("operands belong to different fields")]
    MixedField,
    #[error("operation requires a prime-power field")]
    WrongFieldKind,
    #[error("rank is undefined over the composite ring Z_{0}; split into prime components first")]
    CompositeFieldRank(u64),
    #[error("length mismatch: {0} residues for {1} primes")]
    DimensionMismatch(usize, usize),
    #[error("value {value} out of range for modulus {modulus}")]
    OutOfRange { value: u64, modulus: u64 },
    #[error("cannot parse field spec {0:?}")]
    Parse(String),
}

pub type Result<T, E = FieldError> = std::result::Result<T, E>;

/// Deterministic Miller-Rabin with witnesses {2, 7, 61}, exact below 4_759_123_141.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 61] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        let mut x = poly::pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = poly::mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Description of an arithmetic domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Prime {
        p: u64,
    },
    /// `modulus` is the monic irreducible, coefficients low-to-high, length `m + 1`.
    PrimePower {
        p: u64,
        m: u32,
        modulus: Vec<u64>,
    },
    /// Sorted distinct primes whose product is the ring order.
    Composite {
        primes: Vec<u64>,
    },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        let spec = FieldSpec::Prime { p };
        spec.validate()?;
        Ok(spec)
    }

    /// `F_{p^m}` with the lexicographically smallest monic irreducible modulus.
    pub fn prime_power(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) || p >= PRIME_BOUND {
            return Err(FieldError::NotPrime(p));
        }
        if m < 2 {
            return Err(FieldError::InvalidDegree(m));
        }
        checked_order(p, m)?;
        let modulus = poly::smallest_irreducible(p, m);
        Ok(FieldSpec::PrimePower { p, m, modulus })
    }

    pub fn prime_power_with(p: u64, m: u32, modulus: Vec<u64>) -> Result<Self> {
        let spec = FieldSpec::PrimePower { p, m, modulus };
        spec.validate()?;
        Ok(spec)
    }

    /// Square-free composite ring; primes are sorted on construction.
    pub fn composite(primes: &[u64]) -> Result<Self> {
        let mut primes = primes.to_vec();
        primes.sort_unstable();
        let spec = FieldSpec::Composite { primes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Prime { p } => {
                if *p >= PRIME_BOUND || !is_prime(*p) {
                    return Err(FieldError::NotPrime(*p));
                }
            }
            FieldSpec::PrimePower { p, m, modulus } => {
                if *p >= PRIME_BOUND || !is_prime(*p) {
                    return Err(FieldError::NotPrime(*p));
                }
                if *m < 2 {
                    return Err(FieldError::InvalidDegree(*m));
                }
                checked_order(*p, *m)?;
                if modulus.len() != *m as usize + 1
                    || modulus.last() != Some(&1)
                    || modulus.iter().any(|&c| c >= *p)
                {
                    return Err(FieldError::MalformedModulus {
                        expected: *m,
                        p: *p,
                    });
                }
                if !poly::is_irreducible(modulus, *p) {
                    return Err(FieldError::ReducibleModulus(modulus.clone(), *p));
                }
            }
            FieldSpec::Composite { primes } => {
                if primes.is_empty() {
                    return Err(FieldError::EmptyComposite);
                }
                for &p in primes {
                    if p >= PRIME_BOUND || !is_prime(p) {
                        return Err(FieldError::NotPrime(p));
                    }
                }
                if primes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(FieldError::NonDistinctPrimes);
                }
                let mut d: u64 = 1;
                for &p in primes {
                    d = d
                        .checked_mul(p)
                        .filter(|&d| d < PRIME_BOUND)
                        .ok_or_else(|| FieldError::OrderTooLarge(format!("{primes:?}")))?;
                }
            }
        }
        Ok(())
    }

    /// Number of elements: `p`, `p^m`, or the product of the primes.
    pub fn cardinality(&self) -> u64 {
        match self {
            FieldSpec::Prime { p } => *p,
            FieldSpec::PrimePower { p, m, .. } => p.pow(*m),
            FieldSpec::Composite { primes } => primes.iter().product(),
        }
    }

    pub fn characteristic(&self) -> Option<u64> {
        match self {
            FieldSpec::Prime { p } | FieldSpec::PrimePower { p, .. } => Some(*p),
            FieldSpec::Composite { .. } => None,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, FieldSpec::Composite { .. })
    }
}

fn checked_order(p: u64, m: u32) -> Result<u64> {
    p.checked_pow(m)
        .filter(|&q| q < PRIME_BOUND)
        .ok_or_else(|| FieldError::OrderTooLarge(format!("{p}^{m}")))
}

/// `prime:7`, `primepower:2:2` or `primepower:2:2:1,1,1`, `composite:73,137`.
impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            FieldSpec::Prime { p } => write!(f, "prime:{p}"),
            FieldSpec::PrimePower { p, m, modulus } => {
                write!(f, "primepower:{p}:{m}:{}", join(modulus))
            }
            FieldSpec::Composite { primes } => write!(f, "composite:{}", join(primes)),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || FieldError::Parse(s.to_string());
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let list = |t: &str| t.split(',').map(num).collect::<Result<Vec<_>>>();
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["prime", p] => FieldSpec::prime(num(p)?),
            ["primepower", p, m] => {
                let m = u32::try_from(num(m)?).map_err(|_| bad())?;
                FieldSpec::prime_power(num(p)?, m)
            }
            ["primepower", p, m, coeffs] => {
                let m = u32::try_from(num(m)?).map_err(|_| bad())?;
                FieldSpec::prime_power_with(num(p)?, m, list(coeffs)?)
            }
            ["composite", primes] => FieldSpec::composite(&list(primes)?),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug)]
struct ExtTables {
    mul: Vec<u32>,
    inv: Vec<u32>,
}

#[derive(Debug, Clone)]
enum Arith {
    Prime {
        p: u64,
    },
    Ext {
        p: u64,
        m: usize,
        q: u64,
        modulus: Vec<u64>,
        /// `Tr(x^k)` for `k < m`; the trace of `sum c_k x^k` is `sum c_k Tr(x^k)`.
        trace_basis: Vec<u64>,
        tables: Option<Arc<ExtTables>>,
    },
    Composite {
        d: u64,
    },
}

/// Arithmetic context for a validated [`FieldSpec`].
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    arith: Arith,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        spec.validate()?;
        let arith = match &spec {
            FieldSpec::Prime { p } => Arith::Prime { p: *p },
            FieldSpec::Composite { primes } => Arith::Composite {
                d: primes.iter().product(),
            },
            FieldSpec::PrimePower { p, m, modulus } => {
                let mut arith = Arith::Ext {
                    p: *p,
                    m: *m as usize,
                    q: p.pow(*m),
                    modulus: modulus.clone(),
                    trace_basis: Vec::new(),
                    tables: None,
                };
                let probe = Field {
                    spec: spec.clone(),
                    arith: arith.clone(),
                };
                let basis: Vec<u64> = (0..*m)
                    .map(|k| probe.trace_by_frobenius(p.pow(k)))
                    .collect();
                let tables = (p.pow(*m) <= TABLE_LIMIT).then(|| Arc::new(probe.build_tables()));
                if let Arith::Ext {
                    trace_basis,
                    tables: t,
                    ..
                } = &mut arith
                {
                    *trace_basis = basis;
                    *t = tables;
                }
                arith
            }
        };
        Ok(Field { spec, arith })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Field::new(FieldSpec::prime(p)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> u64 {
        match &self.arith {
            Arith::Prime { p } => *p,
            Arith::Ext { q, .. } => *q,
            Arith::Composite { d } => *d,
        }
    }

    /// `p` when this is the prime field `F_p`.
    pub fn prime_modulus(&self) -> Option<u64> {
        match self.arith {
            Arith::Prime { p } => Some(p),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self.arith, Arith::Composite { .. })
    }

    pub fn contains(&self, value: u64) -> bool {
        value < self.order()
    }

    /// Checked wrapper around an encoded value.
    pub fn element(&self, value: u64) -> Result<FieldElement<'_>> {
        if !self.contains(value) {
            return Err(FieldError::OutOfRange {
                value,
                modulus: self.order(),
            });
        }
        Ok(FieldElement { field: self, value })
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        match &self.arith {
            Arith::Prime { p } => (a + b) % p,
            Arith::Composite { d } => (a + b) % d,
            Arith::Ext { p, .. } => digitwise(a, b, *p, |x, y| (x + y) % p),
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        match &self.arith {
            Arith::Prime { p } => (a + p - b) % p,
            Arith::Composite { d } => (a + d - b) % d,
            Arith::Ext { p, .. } => digitwise(a, b, *p, |x, y| (x + p - y) % p),
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.arith {
            Arith::Prime { p } => a * b % p,
            Arith::Composite { d } => a * b % d,
            Arith::Ext {
                p,
                m,
                q,
                modulus,
                tables,
                ..
            } => match tables {
                Some(t) => t.mul[(a * q + b) as usize] as u64,
                None => {
                    let prod = poly::mul_rem(&digits(a, *p, *m), &digits(b, *p, *m), modulus, *p);
                    undigits(&prod, *p)
                }
            },
        }
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        match &self.arith {
            Arith::Prime { p } => poly::inv_mod(a, *p).ok_or(FieldError::DivisionByZero),
            Arith::Composite { d } => poly::inv_mod(a, *d).ok_or(FieldError::NotInvertible(a, *d)),
            Arith::Ext {
                p,
                m,
                modulus,
                tables,
                ..
            } => match tables {
                Some(t) => Ok(t.inv[a as usize] as u64),
                None => poly::inv_rem(&digits(a, *p, *m), modulus, *p)
                    .map(|v| undigits(&v, *p))
                    .ok_or(FieldError::DivisionByZero),
            },
        }
    }

    pub fn pow(&self, a: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.order();
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Absolute trace `F_{p^m} -> F_p`, returned as a residue in `[0, p)`.
    pub fn trace(&self, a: u64) -> Result<u64> {
        match &self.arith {
            Arith::Ext { p, trace_basis, .. } => {
                let mut acc = 0u64;
                let mut rest = a;
                for &t in trace_basis {
                    acc = (acc + (rest % p) * t) % p;
                    rest /= p;
                }
                Ok(acc)
            }
            _ => Err(FieldError::WrongFieldKind),
        }
    }

    /// `x + x^p + ... + x^{p^{m-1}}` evaluated directly.
    fn trace_by_frobenius(&self, a: u64) -> u64 {
        let Arith::Ext { p, m, .. } = &self.arith else {
            unreachable!("trace on a prime-power field only");
        };
        let mut acc = 0;
        let mut y = a;
        for _ in 0..*m {
            acc = self.add(acc, y);
            y = self.pow(y, *p);
        }
        debug_assert!(acc < *p, "trace lands in the prime subfield");
        acc
    }

    fn build_tables(&self) -> ExtTables {
        let q = self.order();
        let mut mul = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                mul[(a * q + b) as usize] = self.mul(a, b) as u32;
            }
        }
        let mut inv = vec![0u32; q as usize];
        for a in 1..q {
            let b = (1..q)
                .find(|&b| mul[(a * q + b) as usize] == 1)
                .expect("nonzero elements of a field are invertible");
            inv[a as usize] = b as u32;
        }
        ExtTables { mul, inv }
    }
}

fn digits(mut a: u64, p: u64, m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(a % p);
        a /= p;
    }
    poly::trim(out)
}

fn undigits(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digitwise(mut a: u64, mut b: u64, p: u64, op: impl Fn(u64, u64) -> u64) -> u64 {
    let mut out = 0;
    let mut scale = 1;
    while a > 0 || b > 0 {
        out += op(a % p, b % p) * scale;
        scale *= p;
        a /= p;
        b /= p;
    }
    out
}

/// An element bound to its field. Binary operations fail with
/// [`FieldError::MixedField`] when the operands come from different fields.
#[derive(Debug, Clone, Copy)]
pub struct FieldElement<'f> {
    field: &'f Field,
    value: u64,
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

impl<'f> FieldElement<'f> {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    /// Polynomial coefficients (low degree first) for extension fields; a
    /// single residue otherwise.
    pub fn coefficients(&self) -> Vec<u64> {
        match &self.field.arith {
            Arith::Ext { p, m, .. } => {
                let mut v = digits(self.value, *p, *m);
                v.resize(*m, 0);
                v
            }
            _ => vec![self.value],
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if std::ptr::eq(self.field, other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedField)
        }
    }

    fn wrap(&self, value: u64) -> Self {
        FieldElement {
            field: self.field,
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.wrap(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    /// Trace down to the prime subfield; the result lives in `F_p`.
    pub fn trace(&self) -> Result<u64> {
        self.field.trace(self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f4() -> Field {
        Field::new(FieldSpec::prime_power(2, 2).unwrap()).unwrap()
    }

    #[test]
    fn prime_field_examples() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.inv(3).unwrap(), 5);
        let g = Field::prime(73).unwrap();
        assert_eq!(g.add(59, 14), 0);
        assert_eq!(f.inv(0), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn f4_multiplication_table() {
        let f = f4();
        assert_eq!(f.spec().to_string(), "primepower:2:2:1,1,1");
        // Encoding: 0, 1, x = 2, x + 1 = 3.
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.mul(3, 3), 2);
        assert_eq!(f.add(2, 3), 1);
        assert_eq!(f.inv(2).unwrap(), 3);
    }

    #[test]
    fn f4_trace_examples() {
        let f = f4();
        assert_eq!(f.trace(0).unwrap(), 0);
        assert_eq!(f.trace(1).unwrap(), 0);
        assert_eq!(f.trace(2).unwrap(), 1);
        assert_eq!(f.trace(3).unwrap(), 1);
        assert_eq!(
            Field::prime(5).unwrap().trace(1),
            Err(FieldError::WrongFieldKind)
        );
    }

    #[test]
    fn linear_trace_matches_frobenius_definition() {
        for spec in [
            FieldSpec::prime_power(2, 3).unwrap(),
            FieldSpec::prime_power(3, 2).unwrap(),
            FieldSpec::prime_power(5, 3).unwrap(),
            FieldSpec::prime_power(17, 2).unwrap(),
        ] {
            let f = Field::new(spec).unwrap();
            for a in 0..f.order() {
                assert_eq!(f.trace(a).unwrap(), f.trace_by_frobenius(a));
            }
        }
    }

    #[test]
    fn trace_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [
            FieldSpec::prime_power(2, 2).unwrap(),
            FieldSpec::prime_power(3, 3).unwrap(),
            FieldSpec::prime_power(7, 2).unwrap(),
            FieldSpec::prime_power(13, 4).unwrap(),
        ] {
            let f = Field::new(spec).unwrap();
            let p = f.spec().characteristic().unwrap();
            for _ in 0..1000 {
                let x = rng.gen_range(0..f.order());
                let y = rng.gen_range(0..f.order());
                let alpha = rng.gen_range(0..p);
                let lhs = f.trace(f.add(f.mul(alpha, x), y)).unwrap();
                let rhs = (alpha * f.trace(x).unwrap() + f.trace(y).unwrap()) % p;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn inverses_in_every_supported_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in [
            FieldSpec::prime(2).unwrap(),
            FieldSpec::prime(73).unwrap(),
            FieldSpec::prime(4_294_967_291).unwrap(),
            FieldSpec::prime_power(2, 2).unwrap(),
            FieldSpec::prime_power(3, 5).unwrap(),
            FieldSpec::prime_power(101, 3).unwrap(),
        ] {
            let f = Field::new(spec).unwrap();
            for _ in 0..500 {
                let a = rng.gen_range(1..f.order());
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn composite_ring_zero_divisors() {
        let z6 = Field::new(FieldSpec::composite(&[3, 2]).unwrap()).unwrap();
        assert_eq!(z6.spec(), &FieldSpec::Composite { primes: vec![2, 3] });
        assert_eq!(z6.inv(5).unwrap(), 5);
        assert_eq!(z6.inv(3), Err(FieldError::NotInvertible(3, 6)));
        assert_eq!(z6.mul(4, 5), 2);
    }

    #[test]
    fn spec_validation() {
        assert_eq!(FieldSpec::prime(9), Err(FieldError::NotPrime(9)));
        assert_eq!(
            FieldSpec::composite(&[2, 2]),
            Err(FieldError::NonDistinctPrimes)
        );
        assert!(matches!(
            FieldSpec::prime_power_with(2, 2, vec![1, 0, 1]),
            Err(FieldError::ReducibleModulus(..))
        ));
        assert!(matches!(
            FieldSpec::prime_power_with(2, 2, vec![1, 1]),
            Err(FieldError::MalformedModulus { .. })
        ));
        assert_eq!(
            FieldSpec::prime_power(2, 1),
            Err(FieldError::InvalidDegree(1))
        );
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(4_294_967_297));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn spec_round_trips_through_text() {
        for text in ["prime:73", "primepower:3:2:1,0,1", "composite:73,137"] {
            let spec: FieldSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        let spec: FieldSpec = "primepower:2:2".parse().unwrap();
        assert_eq!(spec.to_string(), "primepower:2:2:1,1,1");
        assert!("prime".parse::<FieldSpec>().is_err());
        assert!("composite:6".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn mixed_field_operands_are_rejected() {
        let f7 = Field::prime(7).unwrap();
        let f11 = Field::prime(11).unwrap();
        let a = f7.element(3).unwrap();
        let b = f11.element(3).unwrap();
        assert_eq!(a.add(&b), Err(FieldError::MixedField));
        assert_eq!(a.mul(&a).unwrap().value(), 2);
        assert_eq!(a.inv().unwrap().value(), 5);
        assert!(f7.element(7).is_err());
        let f = f4();
        assert_eq!(f.element(2).unwrap().coefficients(), vec![0, 1]);
        assert_eq!(f.element(1).unwrap().coefficients(), vec![1, 0]);
    }
}
