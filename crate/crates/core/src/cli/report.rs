use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::phasecore::CertificationReport;

/// `0.0` for an exact zero, otherwise eight decimals.
pub fn fmt_bits(x: f64) -> String {
    if x == 0.0 {
        "0.0".into()
    } else {
        format!("{x:.8}")
    }
}

/// Per-size entropy table: size, classes, smallest computed Rényi-2 entropy,
/// the maximally mixed target and the gap, all in bits.
pub fn entropy_table(r: &CertificationReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>3} {:>10} {:>20} {:>20} {:>16}",
        "k", "n_bips", "computed S2 [bits]", "target S2 [bits]", "deficit [bits]"
    )
    .unwrap();
    for s in &r.sizes {
        writeln!(
            out,
            "{:>3} {:>10} {:>20.8} {:>20.8} {:>16}",
            s.size,
            s.bipartitions,
            s.min_entropy_bits,
            s.target_bits,
            fmt_bits(s.deficit_bits)
        )
        .unwrap();
    }
    out
}

/// Rank saturation per size with the certification verdict.
pub fn saturation_table(r: &CertificationReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>8} {:>10} {:>11} {:>17} {:>7}  status",
        "size |S|", "subsets", "target rank", "rank saturation", "ratio"
    )
    .unwrap();
    for s in &r.sizes {
        let ratio = s.min_rank as f64 / s.size as f64;
        writeln!(
            out,
            "{:>8} {:>10} {:>11} {:>17} {:>7.3}  {}",
            s.size,
            s.bipartitions,
            s.size,
            format!("{}/{}", s.saturated, s.bipartitions),
            ratio,
            if s.is_saturated() { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    let total = r.total_bipartitions();
    let saturated: u64 = r.sizes.iter().map(|s| s.saturated).sum();
    let pct = 100.0 * saturated as f64 / total as f64;
    let min_ratio = r
        .sizes
        .iter()
        .map(|s| s.min_rank as f64 / s.size as f64)
        .fold(1.0, f64::min);
    writeln!(
        out,
        "{:>8} {:>10} {:>11} {:>17} {:>7.1}  {}",
        "total",
        total,
        "-",
        format!("{pct:.1}% saturated"),
        min_ratio,
        if r.is_ame { "CERTIFIED" } else { "NOT AME" }
    )
    .unwrap();
    writeln!(
        out,
        "k-uniformity: {}  code distance: {}",
        r.k_uniformity, r.code_distance
    )
    .unwrap();
    if r.is_ame {
        writeln!(
            out,
            "pure [[{}, 1, {}]]_{} code (quantum Singleton bound saturated)",
            r.n,
            r.code_distance,
            r.local_dim()
        )
        .unwrap();
    } else {
        writeln!(out, "{}", failure_summary(r)).unwrap();
    }
    out
}

/// Failed cuts under both counting conventions: complement classes, and raw
/// subsets with `|S| <= n/2` (a failed balanced class counts twice there).
pub fn failure_summary(r: &CertificationReport) -> String {
    let subsets: u64 = r.sizes.iter().map(|s| s.subsets).sum();
    format!(
        "failed bipartitions: {} of {} complement classes; {} of {} subsets with |S| <= {}",
        r.failed_classes(),
        r.total_bipartitions(),
        r.failed_subsets(),
        subsets,
        r.n / 2
    )
}

pub fn records(r: &CertificationReport) -> Vec<Value> {
    let mut out: Vec<Value> = r
        .sizes
        .iter()
        .map(|s| {
            let mut v = serde_json::to_value(s).expect("record serialises");
            v["record"] = json!("size");
            v
        })
        .collect();
    out.extend(r.failed.iter().map(|f| {
        let mut v = serde_json::to_value(f).expect("record serialises");
        v["record"] = json!("failed");
        v
    }));
    let subsets: u64 = r.sizes.iter().map(|s| s.subsets).sum();
    out.push(json!({
        "record": "summary",
        "n": r.n,
        "component_orders": r.component_orders,
        "local_dim": r.local_dim(),
        "is_ame": r.is_ame,
        "k_uniformity": r.k_uniformity,
        "code_distance": r.code_distance,
        "bipartitions": r.total_bipartitions(),
        "failed_classes": r.failed_classes(),
        "subsets": subsets,
        "failed_subsets": r.failed_subsets(),
        "squared_deficit": r.squared_deficit(),
    }));
    out
}

pub fn to_jsonl(values: &[Value]) -> String {
    let mut s = String::new();
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::phasecore::{certify_ame, PhaseMatrix};

    #[test]
    fn zero_deficit_prints_as_in_the_table() {
        assert_eq!(fmt_bits(0.0), "0.0");
        assert_eq!(fmt_bits(1.5), "1.50000000");
    }

    #[test]
    fn tables_for_small_cases() {
        let path = PhaseMatrix::from_rows(
            Field::prime(2).unwrap(),
            &[vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]],
        )
        .unwrap();
        let r = certify_ame(&path).unwrap();
        let t = entropy_table(&r);
        assert!(t
            .lines()
            .nth(1)
            .unwrap()
            .ends_with(" 1.00000000           1.00000000              0.0"));
        let s = saturation_table(&r);
        assert!(s.contains("CERTIFIED"));
        assert!(s.contains("code distance: 2"));

        let z = PhaseMatrix::zeros(Field::prime(2).unwrap(), 4).unwrap();
        let r = certify_ame(&z).unwrap();
        let t = entropy_table(&r);
        // Zero matrix: the deficit at size k is k bits.
        assert!(t.lines().nth(1).unwrap().ends_with("1.00000000"));
        assert!(t.lines().nth(2).unwrap().ends_with("2.00000000"));
        let s = saturation_table(&r);
        assert!(s.contains("NOT AME"));
        assert!(s.contains("failed bipartitions: 7 of 7 complement classes; 10 of 10 subsets"));
        let recs = records(&r);
        assert_eq!(recs.last().unwrap()["failed_subsets"], 10);
    }
}
