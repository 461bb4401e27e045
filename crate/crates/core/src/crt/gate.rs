use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CrtError, Result};

/// A known nonexistence result: no AME state on `min_parties..=max_parties`
/// parties of local dimension `prime`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateEntry {
    pub prime: u64,
    pub min_parties: usize,
    /// `None` means no upper bound.
    #[serde(default)]
    pub max_parties: Option<usize>,
    pub reason: String,
    pub citation: String,
}

impl GateEntry {
    fn applies(&self, n: usize, prime: u64) -> bool {
        prime == self.prime && n >= self.min_parties && self.max_parties.is_none_or(|m| n <= m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum GateDecision {
    Pass,
    Blocked {
        prime: u64,
        reason: String,
        citation: String,
    },
}

impl GateDecision {
    pub fn is_blocked(&self) -> bool {
        matches!(self, GateDecision::Blocked { .. })
    }
}

/// Necessary condition for a product-form composite certificate: every prime
/// factor must admit one. The table lists factors known to be impossible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTable {
    pub entries: Vec<GateEntry>,
}

impl Default for GateTable {
    fn default() -> Self {
        GateTable::builtin()
    }
}

impl GateTable {
    pub fn builtin() -> Self {
        GateTable {
            entries: vec![
                GateEntry {
                    prime: 2,
                    min_parties: 4,
                    max_parties: Some(4),
                    reason: "AME(4,2) nonexistent".into(),
                    citation: "Higuchi and Sudbery, Phys. Lett. A 273, 213 (2000); \
                               Huber, Eltschka, Siewert and Gühne, J. Phys. A 51, 175301 (2018)"
                        .into(),
                },
                GateEntry {
                    prime: 2,
                    min_parties: 7,
                    max_parties: None,
                    reason: "AME(N≥7,2) nonexistent".into(),
                    citation: "Huber, Gühne and Siewert, Phys. Rev. Lett. 118, 200502 (2017)"
                        .into(),
                },
            ],
        }
    }

    /// Parses a JSON array of entries.
    pub fn from_json(text: &str) -> Result<Vec<GateEntry>> {
        serde_json::from_str(text).map_err(|e| CrtError::GateTable(e.to_string()))
    }

    /// Built-in entries followed by those in a JSON file.
    pub fn with_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CrtError::GateTable(e.to_string()))?;
        let mut table = GateTable::builtin();
        table.entries.extend(GateTable::from_json(&text)?);
        Ok(table)
    }

    /// First matching entry over the primes in ascending order.
    pub fn check(&self, n_parties: usize, primes: &[u64]) -> GateDecision {
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        for p in sorted {
            if let Some(e) = self.entries.iter().find(|e| e.applies(n_parties, p)) {
                return GateDecision::Blocked {
                    prime: p,
                    reason: e.reason.clone(),
                    citation: e.citation.clone(),
                };
            }
        }
        GateDecision::Pass
    }
}

/// Checks against the built-in table.
pub fn crt_gate(n_parties: usize, primes: &[u64]) -> GateDecision {
    GateTable::builtin().check(n_parties, primes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reason(d: GateDecision) -> Option<(u64, String)> {
        match d {
            GateDecision::Pass => None,
            GateDecision::Blocked { prime, reason, .. } => Some((prime, reason)),
        }
    }

    #[test]
    fn builtin_entries() {
        assert_eq!(
            reason(crt_gate(4, &[2, 3])),
            Some((2, "AME(4,2) nonexistent".into()))
        );
        assert_eq!(
            reason(crt_gate(8, &[3, 2])),
            Some((2, "AME(N≥7,2) nonexistent".into()))
        );
        assert_eq!(crt_gate(5, &[2, 3]), GateDecision::Pass);
        assert_eq!(crt_gate(6, &[2, 3]), GateDecision::Pass);
        assert_eq!(crt_gate(4, &[3, 5]), GateDecision::Pass);
        assert!(crt_gate(30, &[2]).is_blocked());
    }

    #[test]
    fn table_extends_from_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gate.json");
        std::fs::write(
            &path,
            r#"[{"prime": 3, "min_parties": 9, "max_parties": 9, "reason": "hypothetical", "citation": "test"}]"#,
        )
        .unwrap();
        let t = GateTable::with_file(&path).unwrap();
        assert_eq!(t.entries.len(), 3);
        assert_eq!(
            reason(t.check(9, &[3, 5])),
            Some((3, "hypothetical".into()))
        );
        assert_eq!(t.check(10, &[3, 5]), GateDecision::Pass);
        assert!(GateTable::from_json("{").is_err());
    }
}
