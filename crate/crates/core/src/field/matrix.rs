use super::{Field, FieldError, Result};

/// Dense row-major matrix over a field (never a composite ring).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    field: Field,
}

impl FieldMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if !field.is_field() {
            return Err(FieldError::CompositeFieldRank(field.order()));
        }
        if entries.len() != rows * cols {
            return Err(FieldError::DimensionMismatch(entries.len(), rows * cols));
        }
        if let Some(&bad) = entries.iter().find(|&&e| !field.contains(e)) {
            return Err(FieldError::OutOfRange {
                value: bad,
                modulus: field.order(),
            });
        }
        Ok(FieldMatrix {
            rows,
            cols,
            entries,
            field,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Result<Self> {
        FieldMatrix::new(field, rows, cols, vec![0; rows * cols])
    }

    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FieldError::DimensionMismatch(rows.len(), cols));
        }
        FieldMatrix::new(field, rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c));
            }
        }
        FieldMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
            field: self.field.clone(),
        }
    }

    /// Dimension of the row space. Works on a copy.
    pub fn rank(&self) -> Result<usize> {
        let mut work = self.entries.clone();
        rank_in_place(&self.field, self.rows, self.cols, &mut work)
    }
}

/// Row-echelon rank of a row-major buffer, destroying its contents.
///
/// Pivots are the first nonzero entry found scanning down the current column.
pub fn rank_in_place(field: &Field, rows: usize, cols: usize, m: &mut [u64]) -> Result<usize> {
    if !field.is_field() {
        return Err(FieldError::CompositeFieldRank(field.order()));
    }
    debug_assert_eq!(m.len(), rows * cols);
    if let Some(p) = field.prime_modulus() {
        return Ok(rank_mod_prime(p, &[], rows, cols, m));
    }
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if pivot != rank {
            for k in c..cols {
                m.swap(pivot * cols + k, rank * cols + k);
            }
        }
        let inv = field.inv(m[rank * cols + c])?;
        for k in c..cols {
            m[rank * cols + k] = field.mul(m[rank * cols + k], inv);
        }
        for r in rank + 1..rows {
            let factor = m[r * cols + c];
            if factor == 0 {
                continue;
            }
            for k in c..cols {
                let t = field.mul(factor, m[rank * cols + k]);
                m[r * cols + k] = field.sub(m[r * cols + k], t);
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Rank over `F_p`, `p < 2^32`. `inverses[a]` is used when present, otherwise
/// inverses come from the extended Euclidean algorithm.
pub(crate) fn rank_mod_prime(
    p: u64,
    inverses: &[u32],
    rows: usize,
    cols: usize,
    m: &mut [u64],
) -> usize {
    if p < 1 << 16 {
        // Every intermediate stays below 2^32, where a precomputed reciprocal
        // gives the exact remainder without a division.
        let magic = u64::MAX / p + 1;
        let reduce = |a: u64| ((magic.wrapping_mul(a) as u128 * p as u128) >> 64) as u64;
        eliminate(p, inverses, rows, cols, m, reduce)
    } else {
        eliminate(p, inverses, rows, cols, m, |a| a % p)
    }
}

#[inline(always)]
fn eliminate(
    p: u64,
    inverses: &[u32],
    rows: usize,
    cols: usize,
    m: &mut [u64],
    reduce: impl Fn(u64) -> u64,
) -> usize {
    debug_assert_eq!(m.len(), rows * cols);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if pivot != rank {
            for k in c..cols {
                m.swap(pivot * cols + k, rank * cols + k);
            }
        }
        let lead = m[rank * cols + c];
        let inv = match inverses.get(lead as usize) {
            Some(&v) => v as u64,
            None => inv_u32(lead, p),
        };
        let (top, rest) = m.split_at_mut((rank + 1) * cols);
        let top = &top[rank * cols..];
        for row in rest.chunks_exact_mut(cols).take(rows - rank - 1) {
            if row[c] == 0 {
                continue;
            }
            let neg = p - reduce(row[c] * inv);
            for k in c..cols {
                row[k] = reduce(row[k] + neg * top[k]);
            }
        }
        rank += 1;
    }
    rank
}

fn inv_u32(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i64) as u64
}

/// `inv[a]` for every nonzero `a` in `F_p`; entry 0 is unused.
pub(crate) fn inverse_table(p: u64) -> Vec<u32> {
    let mut t = vec![0u32; p as usize];
    for a in 1..p {
        t[a as usize] = inv_u32(a, p) as u32;
    }
    t
}
