//! Text format for phase matrices:
//!
//! ```text
//! ame-phase v1
//! N 3
//! field prime 2
//! 0 1 0
//! 1 0 1
//! 0 1 0
//! ```
//!
//! The field line is one of `field prime <p>`,
//! `field primepower <p> <m> <c_0> .. <c_m>` (monic modulus, low degree
//! first) or `field composite <p_1> <p_2> ..`. Extension-field entries use the
//! base-`p` integer encoding of their coefficient vectors. Lines starting with
//! `#` are comments; a `# manifest: {...}` comment carries run metadata.

use std::fmt::Write as _;
use std::path::Path;

use super::{PhaseError, PhaseMatrix, Result};
use crate::field::{Field, FieldSpec};

pub const HEADER: &str = "ame-phase v1";
pub const MANIFEST_PREFIX: &str = "# manifest: ";

fn err(line: usize, message: impl Into<String>) -> PhaseError {
    PhaseError::Format {
        line,
        message: message.into(),
    }
}

fn parse_u64(line: usize, tok: &str) -> Result<u64> {
    tok.parse()
        .map_err(|_| err(line, format!("expected an integer, found {tok:?}")))
}

fn parse_field(line: usize, toks: &[&str]) -> Result<FieldSpec> {
    let nums = |t: &[&str]| {
        t.iter()
            .map(|s| parse_u64(line, s))
            .collect::<Result<Vec<_>>>()
    };
    let spec = match toks {
        ["prime", p] => FieldSpec::prime(parse_u64(line, p)?),
        ["primepower", p, m, coeffs @ ..] => {
            let m =
                u32::try_from(parse_u64(line, m)?).map_err(|_| err(line, "degree too large"))?;
            FieldSpec::prime_power_with(parse_u64(line, p)?, m, nums(coeffs)?)
        }
        ["composite", primes @ ..] => FieldSpec::composite(&nums(primes)?),
        _ => return Err(err(line, "expected `field prime|primepower|composite ...`")),
    };
    spec.map_err(|e| err(line, e.to_string()))
}

/// Parses a matrix and returns the manifest comment body, if present.
pub fn parse_with_manifest(text: &str) -> Result<(PhaseMatrix, Option<String>)> {
    let mut manifest = None;
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if let Some(m) = line.strip_prefix(MANIFEST_PREFIX.trim_end()) {
            manifest = Some(m.trim().to_string());
            return None;
        }
        (!line.is_empty() && !line.starts_with('#')).then_some((i + 1, line))
    });

    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    if header != HEADER {
        return Err(err(
            ln,
            format!("expected header {HEADER:?}, found {header:?}"),
        ));
    }
    let (ln, nline) = lines
        .next()
        .ok_or_else(|| err(ln + 1, "missing `N` line"))?;
    let n = match nline.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["N", n] => parse_u64(ln, n)? as usize,
        _ => return Err(err(ln, "expected `N <int>`")),
    };
    let (ln, fline) = lines
        .next()
        .ok_or_else(|| err(ln + 1, "missing `field` line"))?;
    let toks: Vec<&str> = fline.split_whitespace().collect();
    if toks.first() != Some(&"field") {
        return Err(err(ln, "expected `field ...`"));
    }
    let spec = parse_field(ln, &toks[1..])?;
    let field = Field::new(spec).map_err(|e| err(ln, e.to_string()))?;

    let mut entries = Vec::with_capacity(n * n);
    let mut last = ln;
    for row in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(last + 1, format!("expected {n} matrix rows, found {row}")))?;
        let vals = line
            .split_whitespace()
            .map(|t| parse_u64(ln, t))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n {
            return Err(err(
                ln,
                format!("row has {} entries, expected {n}", vals.len()),
            ));
        }
        if let Some(v) = vals.iter().find(|&&v| !field.contains(v)) {
            return Err(err(ln, format!("entry {v} outside [0, {})", field.order())));
        }
        entries.extend(vals);
        last = ln;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "unexpected content after the matrix rows"));
    }
    drop(lines);
    let p = PhaseMatrix::from_entries(field, n, entries).map_err(|e| err(last, e.to_string()))?;
    Ok((p, manifest))
}

pub fn parse(text: &str) -> Result<PhaseMatrix> {
    parse_with_manifest(text).map(|(p, _)| p)
}

pub fn read(path: impl AsRef<Path>) -> Result<PhaseMatrix> {
    parse(&std::fs::read_to_string(path)?)
}

fn field_line(spec: &FieldSpec) -> String {
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    match spec {
        FieldSpec::Prime { p } => format!("field prime {p}"),
        FieldSpec::PrimePower { p, m, modulus } => {
            format!("field primepower {p} {m} {}", join(modulus))
        }
        FieldSpec::Composite { primes } => format!("field composite {}", join(primes)),
    }
}

/// Canonical text without comments; digests are taken over this.
pub fn body(p: &PhaseMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "N {}", p.n()).unwrap();
    writeln!(out, "{}", field_line(p.field().spec())).unwrap();
    for row in p.rows() {
        let line: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

/// Body plus an optional trailing manifest comment.
pub fn render(p: &PhaseMatrix, manifest: Option<&str>) -> String {
    let mut out = body(p);
    if let Some(m) = manifest {
        writeln!(out, "{MANIFEST_PREFIX}{m}").unwrap();
    }
    out
}

pub fn write(path: impl AsRef<Path>, p: &PhaseMatrix, manifest: Option<&str>) -> Result<()> {
    std::fs::write(path, render(p, manifest))?;
    Ok(())
}
