use std::fmt::Write as _;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::algebra::{ResidualEntry, ResidualReport};
use crate::operators::{FamilyVerdict, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            _ => Err(format!("unknown format `{s}` (json|text)")),
        }
    }
}

impl Serialize for ResidualEntry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("coordinate", &self.coordinate)?;
        m.serialize_entry("equation", &self.equation)?;
        m.serialize_entry("indices", &self.indices)?;
        m.serialize_entry("residual", &self.residual.to_string())?;
        m.end()
    }
}

impl Serialize for ResidualReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let side: Vec<String> = self.side_conditions.iter().map(ToString::to_string).collect();
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("entries", &self.entries)?;
        m.serialize_entry("identically_zero", &self.identically_zero)?;
        m.serialize_entry("side_conditions", &side)?;
        m.end()
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("status", self.label())?;
        match self {
            Verdict::Pass => {}
            Verdict::Fail(w) => m.serialize_entry("witness", w)?,
            Verdict::Skipped(r) => m.serialize_entry("reason", r)?,
        }
        m.end()
    }
}

impl Serialize for FamilyVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let side: Vec<String> = self.side_conditions.iter().map(ToString::to_string).collect();
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("verdict", &self.verdict)?;
        if let Some(z) = &self.lambda_zero {
            m.serialize_entry("lambda_zero", z)?;
        }
        m.serialize_entry("weight", &self.weight)?;
        m.serialize_entry("variant", &self.variant)?;
        m.serialize_entry("side_conditions", &side)?;
        m.serialize_entry("report", &self.report)?;
        m.end()
    }
}

/// Human-readable residual report, one line per nonzero entry.
pub fn report_text(r: &ResidualReport) -> String {
    let mut out = String::new();
    if r.identically_zero {
        out.push_str("identically zero\n");
    } else {
        let _ = writeln!(out, "{} nonzero residual entries", r.entries.len());
        for e in &r.entries {
            let idx: Vec<String> = e.indices.iter().map(ToString::to_string).collect();
            let eq = if e.equation.is_empty() { String::new() } else { format!(" [{}]", e.equation) };
            let _ = writeln!(out, "  ({}) coordinate {}{}: {}", idx.join(","), e.coordinate, eq, e.residual);
        }
    }
    for s in &r.side_conditions {
        let _ = writeln!(out, "side condition: {s} != 0");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::to_canonical_json;
    use crate::scalar::RatFunc;

    #[test]
    fn empty_report_json() {
        let r = ResidualReport::new(vec![], vec![]);
        assert_eq!(
            serde_json::to_string(&serde_json::to_value(&r).unwrap()).unwrap(),
            r#"{"entries":[],"identically_zero":true,"side_conditions":[]}"#
        );
    }

    #[test]
    fn fail_verdict_text_and_json() {
        let e = ResidualEntry { equation: String::new(), indices: vec![1, 1, 1, 1, 1], coordinate: 1, residual: RatFunc::from_i64(-2) };
        let v = Verdict::Fail(e.clone());
        assert!(v.to_string().contains("(1,1,1,1,1)"));
        assert!(v.to_string().ends_with("-2"));
        assert!(to_canonical_json(&v).contains("\"residual\": \"-2\""));
        let text = report_text(&ResidualReport::new(vec![e], vec![]));
        assert!(text.contains("(1,1,1,1,1) coordinate 1: -2"));
    }
}
