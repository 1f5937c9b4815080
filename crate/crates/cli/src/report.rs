use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub check: String,
    /// sha256 of the canonical command input.
    pub inputs: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub records: Vec<Record>,
}

pub fn digest(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), records: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let tag = match r.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            let _ = writeln!(out, "{tag} {}", r.check);
            for v in &r.values {
                let _ = writeln!(out, "    {v}");
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "    witness: {w}");
            }
            if let Some(us) = r.micros {
                let _ = writeln!(out, "    time: {us} us");
            }
        }
        let ok = self.records.iter().filter(|r| r.verdict == Verdict::Pass).count();
        let _ = writeln!(out, "{}: {ok} of {} checks pass", self.command, self.records.len());
        out
    }

    /// One JSON object per record.
    pub fn ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            #[derive(Serialize)]
            struct Line<'a> {
                command: &'a str,
                #[serde(flatten)]
                record: &'a Record,
            }
            out.push_str(&serde_json::to_string(&Line { command: &self.command, record: r }).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.ndjson().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_forms() {
        let mut rep = Report::new("pcurvature");
        rep.records.push(Record {
            check: "p-curvature".into(),
            inputs: digest("x"),
            verdict: Verdict::Pass,
            values: vec!["psi(D1) = x^2 + 1".into()],
            witness: None,
            micros: None,
        });
        assert!(rep.passed());
        assert!(rep.human().contains("PASS p-curvature\n    psi(D1) = x^2 + 1\n"));
        let line = rep.ndjson();
        let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["command"], "pcurvature");
        assert_eq!(v["inputs"].as_str().unwrap().len(), 64);
        assert!(v.get("micros").is_none());
    }
}
