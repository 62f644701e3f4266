//! Serializable experiment reports (JSON and a fixed CSV schema).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formulas::{CheckKind, CheckOutcome, GeoMeanReport, MeanValueWitness, RatioRecord, RhGapRow};
use crate::ladder::SetPropertyReport;

pub const FORMAT_VERSION: u32 = 1;

/// Header row of the CSV format.
pub const CSV_HEADER: &str = "label,T,U,l,n,lhs,rhs,ratio,est_error";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub config_hash: String,
    pub created_unix: u64,
    pub ladder_cache_key: Option<String>,
    pub suite: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub meta: ReportMeta,
    pub records: Vec<RatioRecord>,
    pub checks: Vec<CheckOutcome>,
    #[serde(default)]
    pub witnesses: Vec<MeanValueWitness>,
    #[serde(default)]
    pub geo_means: Vec<GeoMeanReport>,
    #[serde(default)]
    pub set_properties: Vec<SetPropertyReport>,
    #[serde(default)]
    pub rh_rows: Vec<RhGapRow>,
}

/// SHA-256 over `key=value` lines in key order.
pub fn config_hash(config: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (k, v) in config {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentReport {
    pub fn new(suite: &str, config: &BTreeMap<String, String>, ladder_cache_key: Option<String>) -> Self {
        let created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            format_version: FORMAT_VERSION,
            meta: ReportMeta {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash: config_hash(config),
                created_unix,
                ladder_cache_key,
                suite: suite.to_string(),
            },
            records: Vec::new(),
            checks: Vec::new(),
            witnesses: Vec::new(),
            geo_means: Vec::new(),
            set_properties: Vec::new(),
            rh_rows: Vec::new(),
        }
    }

    pub fn check(&mut self, outcome: CheckOutcome) {
        self.checks.push(outcome);
    }

    /// Families of failed checks of the given kind.
    pub fn failures(&self, kind: CheckKind) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.kind == kind && !c.passed)
            .map(|c| c.family.as_str())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Records as CSV: 17 significant digits, `\n` line endings.
pub fn records_to_csv(records: &[RatioRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.label,
            sci(r.t),
            sci(r.u),
            r.l,
            r.n,
            sci(r.lhs),
            sci(r.rhs),
            sci(r.ratio),
            sci(r.est_error)
        );
    }
    out
}

pub fn records_from_csv(s: &str) -> Result<Vec<RatioRecord>> {
    let mut lines = s.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Format("missing CSV header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            let bad = |what: &str| Error::Format(format!("line {}: {what}", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(bad("expected 9 fields"));
            }
            let num = |j: usize| f[j].parse::<f64>().map_err(|_| bad("bad number"));
            let int = |j: usize| f[j].parse::<usize>().map_err(|_| bad("bad integer"));
            Ok(RatioRecord {
                label: f[0].to_string(),
                t: num(1)?,
                u: num(2)?,
                l: int(3)?,
                n: int(4)?,
                lhs: num(5)?,
                rhs: num(6)?,
                ratio: num(7)?,
                est_error: num(8)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::CheckKind;

    fn sample() -> ExperimentReport {
        let mut cfg = BTreeMap::new();
        cfg.insert("T".into(), "100000".into());
        let mut r = ExperimentReport::new("identity", &cfg, Some("abc".into()));
        r.records.push(RatioRecord::new("identity", 1e5, 754.3, 1, 2, 0.1 + 0.2, 0.3, 1e-9));
        r.records.push(RatioRecord::new("conjugate", 1e4, 1.0 / 3.0, 3, 5, 7.25e-300, 2.0, 0.0));
        r.check(CheckOutcome::new("identity", CheckKind::Hard, true, "ok"));
        r
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let r = sample();
        let csv = records_to_csv(&r.records);
        assert!(csv.starts_with("label,T,U,l,n,lhs,rhs,ratio,est_error\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(records_from_csv(&csv).unwrap(), r.records);
        assert_eq!(records_to_csv(&records_from_csv(&csv).unwrap()), csv);
        assert!(records_from_csv("nope\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(ExperimentReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }

    #[test]
    fn hash_depends_on_config() {
        let mut a = BTreeMap::new();
        a.insert("T".to_string(), "1".to_string());
        let mut b = a.clone();
        b.insert("U".to_string(), "2".to_string());
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
    }
}
