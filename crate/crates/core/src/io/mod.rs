//! JSON documents for algebras, operator tuples and reports.
//!
//! Emission is canonical: object keys sorted, brackets sorted by arguments,
//! coefficients in their canonical string form, two-space indentation and a
//! trailing newline. Parsing a canonical document and emitting it again
//! reproduces the input byte for byte.

mod report;

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    binary_compatibility_residual, binary_leibniz_residual, ternary_compatibility_residual, ternary_leibniz_residual,
    BinaryStructure, OperatorMatrix, ResidualReport, Structure, TernaryStructure, Vector,
};
use crate::error::{AlgebraError, DocumentError};
use crate::operators::{ClassTag, OperatorClass, Variant};
use crate::scalar::expr::is_identifier;
use crate::scalar::{make_field, parse_expr, FieldDescriptor, RatFunc};

pub use report::{report_text, ReportFormat};

/// One basis bracket: 1-based arguments and the nonzero output coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketDocument {
    pub args: Vec<usize>,
    pub out: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub name: String,
    pub arity: usize,
    pub dim: usize,
    #[serde(default)]
    pub roots: Vec<i64>,
    #[serde(default)]
    pub params: Vec<String>,
    pub brackets: Vec<BracketDocument>,
    /// Second bracket of a compatible pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<Vec<BracketDocument>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDocument {
    pub name: String,
    pub class: ClassTag,
    /// Weight expression of weighted classes; `lambda` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<i64>,
    pub matrices: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub params: Vec<String>,
}

/// A parsed algebra document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algebra {
    Ternary(TernaryStructure),
    Binary(BinaryStructure),
    TernaryPair(TernaryStructure, TernaryStructure),
    BinaryPair(BinaryStructure, BinaryStructure),
}

impl Algebra {
    pub fn name(&self) -> &str {
        match self {
            Algebra::Ternary(t) | Algebra::TernaryPair(t, _) => &t.name,
            Algebra::Binary(b) | Algebra::BinaryPair(b, _) => &b.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Algebra::Ternary(t) | Algebra::TernaryPair(t, _) => t.dim(),
            Algebra::Binary(b) | Algebra::BinaryPair(b, _) => b.dim(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Algebra::Ternary(_) | Algebra::TernaryPair(..) => 3,
            Algebra::Binary(_) | Algebra::BinaryPair(..) => 2,
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, Algebra::TernaryPair(..) | Algebra::BinaryPair(..))
    }

    /// Leibniz residual of each bracket, plus the compatibility residual for pairs.
    pub fn residual(&self) -> Result<ResidualReport, AlgebraError> {
        Ok(match self {
            Algebra::Ternary(t) => ternary_leibniz_residual(t),
            Algebra::Binary(b) => binary_leibniz_residual(b),
            Algebra::TernaryPair(t1, t2) => ResidualReport::merge(vec![
                ("bracket 1".into(), ternary_leibniz_residual(t1)),
                ("bracket 2".into(), ternary_leibniz_residual(t2)),
                ("compatibility".into(), ternary_compatibility_residual(t1, t2)?),
            ]),
            Algebra::BinaryPair(b1, b2) => ResidualReport::merge(vec![
                ("bracket 1".into(), binary_leibniz_residual(b1)),
                ("bracket 2".into(), binary_leibniz_residual(b2)),
                ("compatibility".into(), binary_compatibility_residual(b1, b2)?),
            ]),
        })
    }

    fn field_and_params(&self) -> (&FieldDescriptor, &[String]) {
        match self {
            Algebra::Ternary(t) | Algebra::TernaryPair(t, _) => (t.field(), t.params()),
            Algebra::Binary(b) | Algebra::BinaryPair(b, _) => (b.field(), b.params()),
        }
    }
}

/// A parsed operator document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    pub name: String,
    pub class: OperatorClass,
    pub field: FieldDescriptor,
    pub params: Vec<String>,
    pub matrices: Vec<OperatorMatrix>,
}

/// Deserializes `text`, reporting the JSON path of the first schema violation.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        DocumentError::schema(path, e.into_inner().to_string())
    })
}

/// Canonical JSON text of any serializable value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("documents serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn check_params(params: &[String], path: &str) -> Result<(), DocumentError> {
    for (i, p) in params.iter().enumerate() {
        if !is_identifier(p) {
            return Err(DocumentError::schema(format!("{path}[{i}]"), format!("`{p}` is not a parameter name")));
        }
        if params[..i].contains(p) {
            return Err(DocumentError::schema(format!("{path}[{i}]"), format!("duplicate parameter `{p}`")));
        }
    }
    Ok(())
}

fn field_of(roots: &[i64]) -> Result<FieldDescriptor, DocumentError> {
    make_field(roots).map_err(|source| DocumentError::Coefficient { path: "roots".into(), source })
}

fn coefficient(src: &str, field: &FieldDescriptor, params: &[String], path: String) -> Result<RatFunc, DocumentError> {
    parse_expr(src, field, Some(params)).map_err(|source| DocumentError::Coefficient { path, source })
}

fn structure_from<const A: usize>(
    doc: &AlgebraDocument,
    brackets: &[BracketDocument],
    key: &str,
    field: &FieldDescriptor,
) -> Result<Structure<A>, DocumentError> {
    let n = doc.dim;
    let mut s = Structure::<A>::new(doc.name.clone(), n, field.clone(), doc.params.clone());
    let mut seen = std::collections::BTreeSet::new();
    for (b, br) in brackets.iter().enumerate() {
        let at = format!("{key}[{b}]");
        if br.args.len() != A {
            return Err(DocumentError::schema(format!("{at}.args"), format!("expected {A} indices, got {}", br.args.len())));
        }
        let mut args = [0usize; A];
        for (k, &a) in br.args.iter().enumerate() {
            if a == 0 || a > n {
                return Err(DocumentError::schema(
                    format!("{at}.args[{k}]"),
                    format!("index {a} outside 1..={n} (indices are 1-based)"),
                ));
            }
            args[k] = a - 1;
        }
        if !seen.insert(args) {
            return Err(DocumentError::schema(format!("{at}.args"), "duplicate bracket"));
        }
        let mut out: Vector = vec![RatFunc::zero(); n];
        for (p, expr) in &br.out {
            let idx = p
                .parse::<usize>()
                .ok()
                .filter(|&i| (1..=n).contains(&i))
                .ok_or_else(|| DocumentError::schema(format!("{at}.out"), format!("output index `{p}` outside 1..={n}")))?;
            out[idx - 1] = coefficient(expr, field, &doc.params, format!("{at}.out.{p}"))?;
        }
        s.set(args, out)?;
    }
    Ok(s)
}

/// Validates a deserialized algebra document.
pub fn algebra_from_document(doc: &AlgebraDocument) -> Result<Algebra, DocumentError> {
    if doc.arity != 2 && doc.arity != 3 {
        return Err(DocumentError::schema("arity", format!("expected 2 or 3, got {}", doc.arity)));
    }
    if doc.dim == 0 {
        return Err(DocumentError::schema("dim", "dimension must be positive"));
    }
    check_params(&doc.params, "params")?;
    let field = field_of(&doc.roots)?;
    Ok(match (doc.arity, &doc.second) {
        (3, None) => Algebra::Ternary(structure_from(doc, &doc.brackets, "brackets", &field)?),
        (2, None) => Algebra::Binary(structure_from(doc, &doc.brackets, "brackets", &field)?),
        (3, Some(second)) => Algebra::TernaryPair(
            structure_from(doc, &doc.brackets, "brackets", &field)?,
            structure_from(doc, second, "second", &field)?,
        ),
        (_, Some(second)) => Algebra::BinaryPair(
            structure_from(doc, &doc.brackets, "brackets", &field)?,
            structure_from(doc, second, "second", &field)?,
        ),
        _ => unreachable!("arity checked above"),
    })
}

pub fn parse_algebra(text: &str) -> Result<Algebra, DocumentError> {
    algebra_from_document(&from_json(text)?)
}

fn brackets_of<const A: usize>(s: &Structure<A>) -> Vec<BracketDocument> {
    s.constants()
        .map(|(args, v)| BracketDocument {
            args: args.iter().map(|a| a + 1).collect(),
            out: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(p, c)| ((p + 1).to_string(), c.to_string()))
                .collect(),
        })
        .collect()
}

pub fn algebra_document(a: &Algebra) -> AlgebraDocument {
    let (field, params) = a.field_and_params();
    let (brackets, second) = match a {
        Algebra::Ternary(t) => (brackets_of(t), None),
        Algebra::Binary(b) => (brackets_of(b), None),
        Algebra::TernaryPair(t1, t2) => (brackets_of(t1), Some(brackets_of(t2))),
        Algebra::BinaryPair(b1, b2) => (brackets_of(b1), Some(brackets_of(b2))),
    };
    AlgebraDocument {
        name: a.name().to_string(),
        arity: a.arity(),
        dim: a.dim(),
        roots: field.roots().to_vec(),
        params: params.to_vec(),
        brackets,
        second,
    }
}

pub fn emit_algebra(a: &Algebra) -> String {
    to_canonical_json(&algebra_document(a))
}

pub fn ternary_document(t: &TernaryStructure) -> String {
    emit_algebra(&Algebra::Ternary(t.clone()))
}

pub fn binary_document(b: &BinaryStructure) -> String {
    emit_algebra(&Algebra::Binary(b.clone()))
}

/// Validates a deserialized operator document.
pub fn operator_from_document(doc: &OperatorDocument) -> Result<OperatorSpec, DocumentError> {
    check_params(&doc.params, "params")?;
    let field = field_of(&doc.roots)?;
    let weight = match (&doc.weight, doc.class.is_weighted()) {
        (Some(w), _) => coefficient(w, &field, &doc.params, "weight".into())?,
        (None, true) => coefficient("lambda", &field, &doc.params, "weight".into())?,
        (None, false) => RatFunc::zero(),
    };
    if doc.matrices.is_empty() {
        return Err(DocumentError::schema("matrices", "at least one matrix is required"));
    }
    let mut matrices = Vec::with_capacity(doc.matrices.len());
    let n = doc.matrices[0].len();
    for (m, rows) in doc.matrices.iter().enumerate() {
        if rows.len() != n || n == 0 {
            return Err(DocumentError::schema(format!("matrices[{m}]"), format!("expected {n} rows, got {}", rows.len())));
        }
        let mut parsed = Vec::with_capacity(n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(DocumentError::schema(
                    format!("matrices[{m}][{r}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            let entries = row
                .iter()
                .enumerate()
                .map(|(c, e)| coefficient(e, &field, &doc.params, format!("matrices[{m}][{r}][{c}]")))
                .collect::<Result<Vec<_>, _>>()?;
            parsed.push(entries);
        }
        matrices.push(OperatorMatrix::from_rows(parsed)?);
    }
    Ok(OperatorSpec {
        name: doc.name.clone(),
        class: OperatorClass { tag: doc.class, weight, variant: doc.variant },
        field,
        params: doc.params.clone(),
        matrices,
    })
}

pub fn parse_operator(text: &str) -> Result<OperatorSpec, DocumentError> {
    operator_from_document(&from_json(text)?)
}

pub fn operator_document(spec: &OperatorSpec) -> OperatorDocument {
    OperatorDocument {
        name: spec.name.clone(),
        class: spec.class.tag,
        weight: spec.class.tag.is_weighted().then(|| spec.class.weight.to_string()),
        variant: spec.class.variant,
        roots: spec.field.roots().to_vec(),
        matrices: spec
            .matrices
            .iter()
            .map(|m| m.rows().iter().map(|row| row.iter().map(ToString::to_string).collect()).collect())
            .collect(),
        params: spec.params.clone(),
    }
}

pub fn emit_operator(spec: &OperatorSpec) -> String {
    to_canonical_json(&operator_document(spec))
}
