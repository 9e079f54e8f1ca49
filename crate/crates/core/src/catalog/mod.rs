//! Embedded classification tables: algebras, compatible pairs and operator families.
//!
//! The tables ship as JSON data files whose algebra and operator parts are
//! ordinary documents (see [`crate::io`]). Entries keep the original table
//! contents, including anomalies, each flagged by a transcription note.

mod check;
mod invariants;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::DocumentError;
use crate::io::{
    algebra_document, algebra_from_document, from_json, operator_document, operator_from_document, to_canonical_json,
    Algebra, AlgebraDocument, OperatorDocument, OperatorSpec,
};
use crate::operators::ClassTag;

pub use check::{catalog_check, CheckOptions, CheckRecord, ConformanceReport, EntryReport, Outcome, Summary, Witness};
pub use invariants::{
    catalog_invariants, dimension_corollary_audit, distinguishability_audit, invariants, invariants_pair,
    CatalogInvariants, CorollaryClaim, DimensionCorollaryAudit, DistinguishabilityAudit, InvariantRecord, DEFAULT_ALPHA,
};

/// Data files in load order.
pub const DATA_FILES: [(&str, &str); 7] = [
    ("algebras.json", include_str!("../../data/catalog/algebras.json")),
    ("derivations.json", include_str!("../../data/catalog/derivations.json")),
    ("averaging.json", include_str!("../../data/catalog/averaging.json")),
    ("rota-baxter.json", include_str!("../../data/catalog/rota-baxter.json")),
    ("nijenhuis.json", include_str!("../../data/catalog/nijenhuis.json")),
    ("reynolds.json", include_str!("../../data/catalog/reynolds.json")),
    ("centroids.json", include_str!("../../data/catalog/centroids.json")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Algebra,
    CompatiblePair,
    OperatorTable,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::Algebra => "algebra",
            EntryKind::CompatiblePair => "compatible-pair",
            EntryKind::OperatorTable => "operator-table",
        }
    }
}

impl std::fmt::Display for EntryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EntryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "algebra" => Ok(EntryKind::Algebra),
            "compatible-pair" => Ok(EntryKind::CompatiblePair),
            "operator-table" => Ok(EntryKind::OperatorTable),
            _ => Err(format!("unknown entry kind `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraEntryFile {
    id: String,
    kind: EntryKind,
    source: String,
    #[serde(default)]
    notes: Vec<String>,
    document: AlgebraDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRowFile {
    #[serde(default)]
    notes: Vec<String>,
    document: OperatorDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryFile {
    id: String,
    kind: EntryKind,
    algebra: String,
    source: String,
    rows: Vec<TableRowFile>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub name: String,
    pub notes: Vec<String>,
    pub spec: OperatorSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTable {
    /// Id of the algebra or pair the operators act on.
    pub algebra: String,
    pub class: ClassTag,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryBody {
    Algebra(Algebra),
    Table(OperatorTable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: EntryKind,
    pub dim: usize,
    /// Which classification table the entry comes from.
    pub source: String,
    pub notes: Vec<String>,
    pub body: EntryBody,
    file: usize,
}

impl CatalogEntry {
    pub fn algebra(&self) -> Option<&Algebra> {
        match &self.body {
            EntryBody::Algebra(a) => Some(a),
            EntryBody::Table(_) => None,
        }
    }

    pub fn table(&self) -> Option<&OperatorTable> {
        match &self.body {
            EntryBody::Table(t) => Some(t),
            EntryBody::Algebra(_) => None,
        }
    }

    pub fn class(&self) -> Option<ClassTag> {
        self.table().map(|t| t.class)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ListFilter {
    pub kind: Option<EntryKind>,
    pub dim: Option<usize>,
    pub class: Option<ClassTag>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    index: BTreeMap<String, usize>,
}

fn located(file: &str, at: String, err: DocumentError) -> DocumentError {
    match err {
        DocumentError::Schema { path, reason } => DocumentError::Schema { path: format!("{file}:{at}.{path}"), reason },
        DocumentError::Coefficient { path, source } => {
            DocumentError::Coefficient { path: format!("{file}:{at}.{path}"), source }
        }
        other => DocumentError::schema(format!("{file}:{at}"), other.to_string()),
    }
}

/// Ordering key: single before compatible, then dimension, algebra number, suffix, kind, class.
fn sort_key(e: &CatalogEntry) -> (bool, usize, u32, String, EntryKind, Option<ClassTag>) {
    let algebra = e.id.split('/').next().unwrap_or("");
    let compat = algebra.starts_with("CT");
    let (num, suffix) = algebra
        .split_once(".L")
        .map(|(_, l)| {
            let digits: String = l.chars().take_while(char::is_ascii_digit).collect();
            (digits.parse().unwrap_or(0), l[digits.len()..].to_string())
        })
        .unwrap_or((0, String::new()));
    (compat, e.dim, num, suffix, e.kind, e.class())
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_files(&DATA_FILES).expect("embedded catalog is valid"))
    }

    pub fn from_files(files: &[(&str, &str)]) -> Result<Catalog, DocumentError> {
        let mut entries = Vec::new();
        for (f, (name, text)) in files.iter().enumerate() {
            if *name == "algebras.json" {
                let list: Vec<AlgebraEntryFile> = from_json(text).map_err(|e| located(name, "$".into(), e))?;
                for (i, e) in list.into_iter().enumerate() {
                    let a = algebra_from_document(&e.document)
                        .map_err(|err| located(name, format!("[{i}].document"), err))?;
                    let expected = if a.is_pair() { EntryKind::CompatiblePair } else { EntryKind::Algebra };
                    if e.kind != expected {
                        return Err(DocumentError::schema(format!("{name}:[{i}].kind"), "kind does not match document"));
                    }
                    entries.push(CatalogEntry {
                        id: e.id,
                        kind: e.kind,
                        dim: a.dim(),
                        source: e.source,
                        notes: e.notes,
                        body: EntryBody::Algebra(a),
                        file: f,
                    });
                }
            } else {
                let list: Vec<TableEntryFile> = from_json(text).map_err(|e| located(name, "$".into(), e))?;
                for (i, e) in list.into_iter().enumerate() {
                    if e.kind != EntryKind::OperatorTable || e.rows.is_empty() {
                        return Err(DocumentError::schema(format!("{name}:[{i}]"), "operator tables need kind and rows"));
                    }
                    let mut rows = Vec::with_capacity(e.rows.len());
                    for (r, row) in e.rows.into_iter().enumerate() {
                        let spec = operator_from_document(&row.document)
                            .map_err(|err| located(name, format!("[{i}].rows[{r}].document"), err))?;
                        rows.push(TableRow { name: spec.name.clone(), notes: row.notes, spec });
                    }
                    let class = rows[0].spec.class.tag;
                    if rows.iter().any(|r| r.spec.class.tag != class) {
                        return Err(DocumentError::schema(format!("{name}:[{i}].rows"), "mixed operator classes"));
                    }
                    let dim = rows[0].spec.matrices[0].dim();
                    entries.push(CatalogEntry {
                        id: e.id,
                        kind: e.kind,
                        dim,
                        source: e.source,
                        notes: Vec::new(),
                        body: EntryBody::Table(OperatorTable { algebra: e.algebra, class, rows }),
                        file: f,
                    });
                }
            }
        }
        let mut index = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.id.clone(), i).is_some() {
                return Err(DocumentError::schema(e.id.clone(), "duplicate catalog id"));
            }
        }
        for e in &entries {
            if let Some(t) = e.table() {
                let target = index.get(&t.algebra).map(|&i| &entries[i]);
                match target.and_then(CatalogEntry::algebra) {
                    Some(a) if a.dim() == e.dim => {}
                    Some(_) => return Err(DocumentError::schema(e.id.clone(), "operator size differs from algebra")),
                    None => return Err(DocumentError::schema(e.id.clone(), format!("unknown algebra `{}`", t.algebra))),
                }
            }
        }
        Ok(Catalog { entries, index })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    pub fn algebra(&self, id: &str) -> Option<&Algebra> {
        self.get(id).and_then(CatalogEntry::algebra)
    }

    /// Entries matching `filter`, in canonical order.
    pub fn select(&self, filter: &ListFilter) -> Vec<&CatalogEntry> {
        let mut out: Vec<&CatalogEntry> = self
            .entries
            .iter()
            .filter(|e| filter.kind.is_none_or(|k| e.kind == k))
            .filter(|e| filter.dim.is_none_or(|d| e.dim == d))
            .filter(|e| filter.class.is_none_or(|c| e.class() == Some(c)))
            .collect();
        out.sort_by_key(|e| sort_key(e));
        out
    }

    pub fn list(&self, filter: &ListFilter) -> Vec<String> {
        self.select(filter).into_iter().map(|e| e.id.clone()).collect()
    }

    /// Canonical JSON of one entry, in the data-file layout.
    pub fn show(&self, id: &str) -> Option<String> {
        self.get(id).map(|e| to_canonical_json(&entry_value(e)))
    }

    /// Canonical text of every data file, regenerated from the parsed entries.
    pub fn export(&self) -> Vec<(&'static str, String)> {
        DATA_FILES
            .iter()
            .enumerate()
            .map(|(f, (name, _))| {
                let values: Vec<serde_json::Value> =
                    self.entries.iter().filter(|e| e.file == f).map(entry_value).collect();
                (*name, to_canonical_json(&values))
            })
            .collect()
    }

    /// Number of operator-table rows.
    pub fn table_rows(&self) -> usize {
        self.entries.iter().filter_map(CatalogEntry::table).map(|t| t.rows.len()).sum()
    }
}

fn entry_value(e: &CatalogEntry) -> serde_json::Value {
    let v = match &e.body {
        EntryBody::Algebra(a) => serde_json::to_value(AlgebraEntryFile {
            id: e.id.clone(),
            kind: e.kind,
            source: e.source.clone(),
            notes: e.notes.clone(),
            document: algebra_document(a),
        }),
        EntryBody::Table(t) => serde_json::to_value(TableEntryFile {
            id: e.id.clone(),
            kind: e.kind,
            algebra: t.algebra.clone(),
            source: e.source.clone(),
            rows: t
                .rows
                .iter()
                .map(|r| TableRowFile { notes: r.notes.clone(), document: operator_document(&r.spec) })
                .collect(),
        }),
    };
    v.expect("catalog entries serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_filters() {
        let c = Catalog::builtin();
        let f = ListFilter { kind: Some(EntryKind::Algebra), dim: Some(2), class: None };
        assert_eq!(c.list(&f), ["T2.L1", "T2.L2"]);
        let f = ListFilter { kind: Some(EntryKind::CompatiblePair), dim: Some(2), class: None };
        assert_eq!(c.list(&f), ["CT2.L1", "CT2.L2a", "CT2.L3"]);
        assert_eq!(c.list(&ListFilter::default()).len(), c.entries().len());
        let f = ListFilter { class: Some(ClassTag::Centroid), dim: Some(2), ..Default::default() };
        assert_eq!(c.list(&f), ["T2.L1/centroids", "T2.L2/centroids", "CT2.L1/centroids", "CT2.L2a/centroids", "CT2.L3/centroids"]);
    }

    #[test]
    fn sizes() {
        let c = Catalog::builtin();
        assert_eq!(c.entries().iter().filter(|e| e.kind == EntryKind::Algebra).count(), 10);
        assert_eq!(c.entries().iter().filter(|e| e.kind == EntryKind::CompatiblePair).count(), 12);
        assert!(c.table_rows() >= 60);
        assert!(c.get("T3.L4a").unwrap().algebra().unwrap().name() == "T3.L4a");
    }
}
