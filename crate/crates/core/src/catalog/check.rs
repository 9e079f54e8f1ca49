use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{Catalog, CatalogEntry, EntryBody, EntryKind, OperatorTable, DEFAULT_ALPHA};
use crate::algebra::{ternary_compatibility_residual, ternary_leibniz_residual, OperatorMatrix, ResidualEntry};
use crate::algebra::TernaryStructure;
use crate::io::Algebra;
use crate::operators::{operator_residual, operator_residual_pair, verify_family, ClassTag, Family, OperatorClass, Verdict};
use crate::scalar::{FieldElement, RatFunc};
use crate::solvers::{completeness_report_family, CompletenessOptions, CompletenessReport, FpSolution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Residual(ResidualEntry),
    /// F_p solution not produced by any row of the table.
    Missing(FpSolution),
    /// Row instance over F_p that violates the identity.
    Extraneous(FpSolution),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Box<Witness>),
    Skipped(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail(_) => "FAIL",
            Outcome::Skipped(_) => "SKIPPED",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Outcome::Pass,
            Verdict::Fail(e) => Outcome::Fail(Box::new(Witness::Residual(e))),
            Verdict::Skipped(r) => Outcome::Skipped(r),
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("status", self.label())?;
        match self {
            Outcome::Pass => {}
            Outcome::Fail(w) => match &**w {
                Witness::Residual(e) => m.serialize_entry("witness", e)?,
                Witness::Missing(sol) => m.serialize_entry("missing", sol)?,
                Witness::Extraneous(sol) => m.serialize_entry("extraneous", sol)?,
            },
            Outcome::Skipped(r) => m.serialize_entry("reason", r)?,
        }
        m.end()
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Pass => f.write_str("PASS"),
            Outcome::Skipped(r) => write!(f, "SKIPPED ({r})"),
            Outcome::Fail(w) => match &**w {
                Witness::Residual(e) => write!(f, "{}", Verdict::Fail(e.clone())),
                Witness::Missing(sol) => write!(f, "FAIL missing solution {}", solution_text(sol)),
                Witness::Extraneous(sol) => write!(f, "FAIL row instance violates identity {}", solution_text(sol)),
            },
        }
    }
}

fn solution_text(sol: &FpSolution) -> String {
    let entries: Vec<String> = sol.entries.iter().map(ToString::to_string).collect();
    match sol.weight {
        Some(w) => format!("[{}] at weight {w}", entries.join(",")),
        None => format!("[{}]", entries.join(",")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    /// `identity`, `compatibility`, `anchor`, `containment`, `containment-lambda-0` or `completeness`.
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<String>,
    pub verdict: Outcome,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub side_conditions: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completeness: Option<CompletenessReport>,
}

impl CheckRecord {
    fn new(check: &str, row: Option<&str>, verdict: Outcome) -> Self {
        CheckRecord {
            check: check.to_string(),
            row: row.map(str::to_string),
            verdict,
            side_conditions: Vec::new(),
            notes: Vec::new(),
            completeness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub kind: EntryKind,
    pub source: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub entries: usize,
    pub table_rows: usize,
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConformanceReport {
    pub entries: Vec<EntryReport>,
    pub summary: Summary,
}

impl ConformanceReport {
    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn entry(&self, id: &str) -> Option<&EntryReport> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{} ({}; {})", e.id, e.kind, e.source);
            for n in &e.notes {
                let _ = writeln!(out, "  note: {n}");
            }
            for c in &e.checks {
                let row = c.row.as_deref().map(|r| format!(" {r}")).unwrap_or_default();
                let _ = writeln!(out, "  {}{}: {}", c.check, row, c.verdict);
                for n in &c.notes {
                    let _ = writeln!(out, "    note: {n}");
                }
                for s in &c.side_conditions {
                    let _ = writeln!(out, "    side condition: {s} != 0");
                }
                if let Some(r) = &c.completeness {
                    let _ = writeln!(
                        out,
                        "    mod {}: family {} of {} solutions, missing {}, extraneous {}, skipped points {}",
                        r.p, r.family_instances, r.total, r.missing_count, r.extraneous_count, r.skipped_points
                    );
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} entries, {} table rows, {} checks: {} PASS, {} FAIL, {} SKIPPED",
            s.entries, s.table_rows, s.checks, s.pass, s.fail, s.skipped
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Runs the F_p completeness step for each table when set.
    pub prime: Option<u64>,
    /// Weight residues for weighted classes; empty means all residues.
    pub weights: Vec<u64>,
    /// Value substituted for `alpha` in the F_p step.
    pub alpha: i64,
    pub completeness: CompletenessOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { prime: None, weights: Vec::new(), alpha: DEFAULT_ALPHA, completeness: CompletenessOptions::default() }
    }
}

fn scalar_centroid(n: usize) -> Vec<OperatorMatrix> {
    vec![OperatorMatrix::scalar(n, RatFunc::var("c"))]
}

fn algebra_checks(a: &Algebra) -> Vec<CheckRecord> {
    let scalar = OperatorClass::new(ClassTag::Centroid);
    let anchor = |r: Result<_, _>| match r {
        Ok(rep) => Outcome::from(Verdict::from_report(&rep)),
        Err(e) => Outcome::Skipped(format!("{e}")),
    };
    match a {
        Algebra::Ternary(t) => vec![
            CheckRecord::new("identity", None, Verdict::from_report(&ternary_leibniz_residual(t)).into()),
            CheckRecord::new("anchor", Some("scalar centroid"), anchor(operator_residual(t, &scalar, &scalar_centroid(t.dim())))),
        ],
        Algebra::TernaryPair(t1, t2) => {
            let compat = match ternary_compatibility_residual(t1, t2) {
                Ok(r) => Verdict::from_report(&r).into(),
                Err(e) => Outcome::Skipped(e.to_string()),
            };
            vec![
                CheckRecord::new("identity", Some("bracket 1"), Verdict::from_report(&ternary_leibniz_residual(t1)).into()),
                CheckRecord::new("identity", Some("bracket 2"), Verdict::from_report(&ternary_leibniz_residual(t2)).into()),
                CheckRecord::new("compatibility", None, compat),
                CheckRecord::new(
                    "anchor",
                    Some("scalar centroid"),
                    anchor(operator_residual_pair(t1, t2, &scalar, &scalar_centroid(t1.dim()))),
                ),
            ]
        }
        Algebra::Binary(_) | Algebra::BinaryPair(..) => {
            vec![CheckRecord::new("identity", None, Outcome::Skipped("binary algebras are not catalog entries".into()))]
        }
    }
}

fn instantiate_alpha(t: &TernaryStructure, alpha: i64) -> Result<TernaryStructure, String> {
    let values = BTreeMap::from([("alpha".to_string(), FieldElement::from_i64(alpha))]);
    t.instantiate(&values).map_err(|e| e.to_string())
}

fn completeness_check(target: &Algebra, table: &OperatorTable, opts: &CheckOptions, p: u64) -> CheckRecord {
    let families: Vec<Vec<OperatorMatrix>> = table.rows.iter().map(|r| r.spec.matrices.clone()).collect();
    let class = table.rows[0].spec.class.clone();
    let alpha_note = format!("alpha = {} in the F_p step", opts.alpha);
    let pinned = |m: &[OperatorMatrix]| {
        let values = BTreeMap::from([("alpha".to_string(), RatFunc::from_i64(opts.alpha))]);
        m.iter().map(|x| x.compose_vars(&values)).collect::<Result<Vec<_>, _>>()
    };
    let families = match families.iter().map(|f| pinned(f)).collect::<Result<Vec<_>, _>>() {
        Ok(f) => f,
        Err(e) => return CheckRecord::new("completeness", None, Outcome::Skipped(e.to_string())),
    };
    let result = match target {
        Algebra::Ternary(t) => instantiate_alpha(t, opts.alpha).and_then(|t| {
            completeness_report_family(Family::Single(&t), &class, &families, p, &opts.weights, opts.completeness)
                .map_err(|e| e.to_string())
        }),
        Algebra::TernaryPair(t1, t2) => instantiate_alpha(t1, opts.alpha).and_then(|a| {
            let b = instantiate_alpha(t2, opts.alpha)?;
            completeness_report_family(Family::Pair(&a, &b), &class, &families, p, &opts.weights, opts.completeness)
                .map_err(|e| e.to_string())
        }),
        _ => Err("binary target".to_string()),
    };
    let mut rec = match result {
        Err(reason) => CheckRecord::new("completeness", None, Outcome::Skipped(reason)),
        Ok(r) => {
            let verdict = if let Some(x) = r.extraneous.first() {
                Outcome::Fail(Box::new(Witness::Extraneous(x.clone())))
            } else if let Some(m) = r.missing.first() {
                Outcome::Fail(Box::new(Witness::Missing(m.clone())))
            } else {
                Outcome::Pass
            };
            let mut rec = CheckRecord::new("completeness", None, verdict);
            rec.completeness = Some(r);
            rec
        }
    };
    if target_has_alpha(target) {
        rec.notes.push(alpha_note);
    }
    rec
}

fn target_has_alpha(a: &Algebra) -> bool {
    match a {
        Algebra::Ternary(t) | Algebra::TernaryPair(t, _) => t.params().iter().any(|p| p == "alpha"),
        _ => false,
    }
}

fn table_checks(catalog: &Catalog, table: &OperatorTable, opts: &CheckOptions) -> Vec<CheckRecord> {
    let Some(target) = catalog.algebra(&table.algebra) else {
        return vec![CheckRecord::new("containment", None, Outcome::Skipped(format!("unknown algebra {}", table.algebra)))];
    };
    let mut out = Vec::new();
    for row in &table.rows {
        let family = match target {
            Algebra::Ternary(t) => Family::Single(t),
            Algebra::TernaryPair(t1, t2) => Family::Pair(t1, t2),
            _ => {
                out.push(CheckRecord::new("containment", Some(&row.name), Outcome::Skipped("binary target".into())));
                continue;
            }
        };
        match verify_family(family, &row.spec.class, &row.spec.matrices) {
            Ok(fv) => {
                let mut rec = CheckRecord::new("containment", Some(&row.name), fv.verdict.into());
                rec.side_conditions = fv.side_conditions.iter().map(ToString::to_string).collect();
                rec.notes = row.notes.clone();
                out.push(rec);
                if let Some(z) = fv.lambda_zero {
                    out.push(CheckRecord::new("containment-lambda-0", Some(&row.name), z.into()));
                }
            }
            Err(e) => {
                let mut rec = CheckRecord::new("containment", Some(&row.name), Outcome::Skipped(e.to_string()));
                rec.notes = row.notes.clone();
                out.push(rec);
            }
        }
    }
    if let Some(p) = opts.prime {
        out.push(completeness_check(target, table, opts, p));
    }
    out
}

fn check_entry(catalog: &Catalog, e: &CatalogEntry, opts: &CheckOptions) -> EntryReport {
    let checks = match &e.body {
        EntryBody::Algebra(a) => algebra_checks(a),
        EntryBody::Table(t) => table_checks(catalog, t, opts),
    };
    EntryReport { id: e.id.clone(), kind: e.kind, source: e.source.clone(), notes: e.notes.clone(), checks }
}

/// Audits the selected entries (all when `ids` is empty); failures are data, never errors.
///
/// Unknown ids produce an entry whose single check is SKIPPED.
pub fn catalog_check(catalog: &Catalog, ids: &[String], opts: &CheckOptions) -> ConformanceReport {
    let selected: Vec<Result<&CatalogEntry, String>> = if ids.is_empty() {
        catalog.select(&Default::default()).into_iter().map(Ok).collect()
    } else {
        ids.iter().map(|id| catalog.get(id).ok_or_else(|| id.clone())).collect()
    };
    let entries: Vec<EntryReport> = selected
        .par_iter()
        .map(|s| match s {
            Ok(e) => check_entry(catalog, e, opts),
            Err(id) => EntryReport {
                id: id.clone(),
                kind: EntryKind::Algebra,
                source: String::new(),
                notes: Vec::new(),
                checks: vec![CheckRecord::new("lookup", None, Outcome::Skipped(format!("no catalog entry `{id}`")))],
            },
        })
        .collect();
    let mut summary = Summary { entries: entries.len(), ..Default::default() };
    for e in &entries {
        summary.table_rows += e.checks.iter().filter(|c| c.check == "containment").count();
        for c in &e.checks {
            summary.checks += 1;
            match c.verdict {
                Outcome::Pass => summary.pass += 1,
                Outcome::Fail(_) => summary.fail += 1,
                Outcome::Skipped(_) => summary.skipped += 1,
            }
        }
    }
    ConformanceReport { entries, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(id: &str) -> EntryReport {
        let r = catalog_check(Catalog::builtin(), &[id.to_string()], &CheckOptions::default());
        r.entries.into_iter().next().unwrap()
    }

    #[test]
    fn two_dimensional_algebras_pass() {
        for id in ["T2.L1", "T2.L2"] {
            let e = check(id);
            assert!(e.checks.iter().all(|c| c.verdict.is_pass()), "{id}: {:?}", e.checks);
        }
        let e = check("CT2.L1");
        assert_eq!(e.checks.len(), 4);
        assert!(e.checks.iter().all(|c| c.verdict.is_pass()));
    }

    #[test]
    fn derivation_anchor_row() {
        let e = check("T2.L1/derivations");
        let c = e.checks.iter().find(|c| c.row.as_deref() == Some("T2.L1/derivations#1") && c.check == "containment").unwrap();
        assert!(c.verdict.is_pass(), "{:?}", c.verdict);
    }

    #[test]
    fn unknown_id_is_skipped() {
        let e = check("T9.L1");
        assert!(matches!(e.checks[0].verdict, Outcome::Skipped(_)));
    }

    #[test]
    fn completeness_step_finds_centroid_gap() {
        let opts = CheckOptions { prime: Some(3), ..Default::default() };
        let r = catalog_check(Catalog::builtin(), &["T2.L1/centroids".to_string()], &opts);
        let c = r.entries[0].checks.iter().find(|c| c.check == "completeness").unwrap();
        let rep = c.completeness.as_ref().unwrap();
        assert_eq!((rep.family_instances, rep.total), (3, 9));
        assert!(matches!(&c.verdict, Outcome::Fail(w) if matches!(**w, Witness::Missing(_))));
    }
}
