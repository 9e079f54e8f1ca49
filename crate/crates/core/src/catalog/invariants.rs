use std::collections::BTreeMap;

use serde::Serialize;

use super::{Catalog, EntryKind};
use crate::algebra::{all_tuples, TernaryStructure};
use crate::error::AlgebraError;
use crate::io::Algebra;
use crate::operators::{linear_system, ClassTag, OperatorClass};
use crate::scalar::{FieldElement, RatFunc};
use crate::solvers::nullspace;

/// Generic value for `alpha` when invariants need constant structure constants.
pub const DEFAULT_ALPHA: i64 = 2;

/// Basis-independent integers attached to a constant ternary bracket (or pair).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InvariantRecord {
    pub centroid: usize,
    pub derivations_weight_0: usize,
    pub central_derivations: usize,
    pub left_annihilator: usize,
    pub middle_annihilator: usize,
    pub right_annihilator: usize,
    pub image_rank: usize,
}

fn constant(r: &RatFunc) -> FieldElement {
    r.as_constant().expect("constant structure checked")
}

fn class_dim(ts: &[&TernaryStructure], class: &OperatorClass) -> Result<usize, AlgebraError> {
    let mut rows = Vec::new();
    let mut unknowns = 0;
    for t in ts {
        let sys = linear_system(t, class)?;
        unknowns = sys.unknowns();
        rows.extend(sys.rows);
    }
    Ok(nullspace(&rows, unknowns).dimension)
}

/// Vectors `v` with the bracket vanishing whenever `v` sits in `slot`.
fn annihilator(ts: &[&TernaryStructure], slot: usize) -> usize {
    let n = ts[0].dim();
    let mut rows = Vec::new();
    for t in ts {
        for others in all_tuples::<2>(n) {
            for p in 0..n {
                let row: Vec<FieldElement> = (0..n)
                    .map(|v| {
                        let mut idx = [0; 3];
                        let mut k = 0;
                        for (s, x) in idx.iter_mut().enumerate() {
                            if s == slot {
                                *x = v;
                            } else {
                                *x = others[k];
                                k += 1;
                            }
                        }
                        constant(&t.basis_bracket(&idx)[p])
                    })
                    .collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    nullspace(&rows, n).dimension
}

fn image_rank(ts: &[&TernaryStructure]) -> usize {
    let n = ts[0].dim();
    let rows: Vec<Vec<FieldElement>> =
        ts.iter().flat_map(|t| t.constants().map(|(_, v)| v.iter().map(constant).collect())).collect();
    nullspace(&rows, n).rank
}

fn record(ts: &[&TernaryStructure]) -> Result<InvariantRecord, AlgebraError> {
    for t in ts {
        t.require_constant()?;
    }
    Ok(InvariantRecord {
        centroid: class_dim(ts, &OperatorClass::new(ClassTag::Centroid))?,
        derivations_weight_0: class_dim(ts, &OperatorClass::with_weight(ClassTag::DerivationWeighted, RatFunc::zero()))?,
        central_derivations: class_dim(ts, &OperatorClass::new(ClassTag::CentralDerivation))?,
        left_annihilator: annihilator(ts, 0),
        middle_annihilator: annihilator(ts, 1),
        right_annihilator: annihilator(ts, 2),
        image_rank: image_rank(ts),
    })
}

/// Invariants of a constant ternary bracket.
pub fn invariants(t: &TernaryStructure) -> Result<InvariantRecord, AlgebraError> {
    record(&[t])
}

/// Invariants of a compatible pair: operators and annihilators common to both brackets,
/// rank of the joint image.
pub fn invariants_pair(t1: &TernaryStructure, t2: &TernaryStructure) -> Result<InvariantRecord, AlgebraError> {
    if t1.dim() != t2.dim() {
        return Err(AlgebraError::DimensionMismatch { expected: t1.dim(), got: t2.dim() });
    }
    record(&[t1, t2])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogInvariants {
    pub id: String,
    pub kind: EntryKind,
    pub dim: usize,
    /// Parameter values substituted before computing.
    pub point: BTreeMap<String, i64>,
    pub record: InvariantRecord,
}

/// Invariants of every catalog algebra and pair, with `alpha` set to `alpha`.
pub fn catalog_invariants(catalog: &Catalog, alpha: i64) -> Result<Vec<CatalogInvariants>, AlgebraError> {
    let values = BTreeMap::from([("alpha".to_string(), FieldElement::from_i64(alpha))]);
    let mut out = Vec::new();
    for e in catalog.select(&Default::default()) {
        let Some(a) = e.algebra() else { continue };
        let (rec, uses_alpha) = match a {
            Algebra::Ternary(t) => (invariants(&t.instantiate(&values)?)?, t.params().iter().any(|p| p == "alpha")),
            Algebra::TernaryPair(t1, t2) => (
                invariants_pair(&t1.instantiate(&values)?, &t2.instantiate(&values)?)?,
                t1.params().iter().any(|p| p == "alpha"),
            ),
            _ => continue,
        };
        let point = if uses_alpha { BTreeMap::from([("alpha".to_string(), alpha)]) } else { BTreeMap::new() };
        out.push(CatalogInvariants { id: e.id.clone(), kind: e.kind, dim: e.dim, point, record: rec });
    }
    Ok(out)
}

/// Pairs of same-kind, same-dimension entries whose invariant records coincide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinguishabilityAudit {
    pub records: Vec<CatalogInvariants>,
    pub indistinguishable: Vec<(String, String)>,
}

pub fn distinguishability_audit(records: Vec<CatalogInvariants>) -> DistinguishabilityAudit {
    let mut pairs = Vec::new();
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            if a.kind == b.kind && a.dim == b.dim && a.record == b.record {
                pairs.push((a.id.clone(), b.id.clone()));
            }
        }
    }
    DistinguishabilityAudit { records, indistinguishable: pairs }
}

/// A claimed range for weight-0 derivation dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryClaim {
    pub kind: EntryKind,
    pub dim: usize,
    pub min: usize,
    pub max: usize,
    pub observed: Vec<(String, usize)>,
    /// Entries outside `min..=max`.
    pub discrepancies: Vec<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionCorollaryAudit {
    pub claims: Vec<CorollaryClaim>,
}

/// Compares derivation dimensions with the stated ranges:
/// ternary 2-dim exactly 1, ternary 3-dim 1 to 4, compatible 2-dim exactly 0, compatible 3-dim 0 to 2.
pub fn dimension_corollary_audit(records: &[CatalogInvariants]) -> DimensionCorollaryAudit {
    let ranges = [
        (EntryKind::Algebra, 2, 1, 1),
        (EntryKind::Algebra, 3, 1, 4),
        (EntryKind::CompatiblePair, 2, 0, 0),
        (EntryKind::CompatiblePair, 3, 0, 2),
    ];
    let claims = ranges
        .into_iter()
        .map(|(kind, dim, min, max)| {
            let observed: Vec<(String, usize)> = records
                .iter()
                .filter(|r| r.kind == kind && r.dim == dim)
                .map(|r| (r.id.clone(), r.record.derivations_weight_0))
                .collect();
            let discrepancies: Vec<String> =
                observed.iter().filter(|(_, d)| !(min..=max).contains(d)).map(|(id, _)| id.clone()).collect();
            CorollaryClaim { kind, dim, min, max, holds: discrepancies.is_empty(), observed, discrepancies }
        })
        .collect();
    DimensionCorollaryAudit { claims }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::OperatorMatrix;
    use crate::constructions::{construct_tl, fixtures};
    use crate::scalar::FieldDescriptor;

    fn t2_l1() -> TernaryStructure {
        TernaryStructure::new("T2.L1", 2, FieldDescriptor::rationals(), vec![]).with([1, 1, 1], &[(2, RatFunc::one())])
    }

    #[test]
    fn zero_algebra() {
        let r = invariants(&TernaryStructure::zero(2)).unwrap();
        assert_eq!((r.centroid, r.derivations_weight_0, r.central_derivations), (4, 4, 4));
        assert_eq!((r.left_annihilator, r.middle_annihilator, r.right_annihilator, r.image_rank), (2, 2, 2, 0));
    }

    #[test]
    fn t2_l1_record() {
        let r = invariants(&t2_l1()).unwrap();
        assert_eq!((r.centroid, r.derivations_weight_0, r.right_annihilator, r.image_rank), (2, 2, 1, 1));
    }

    #[test]
    fn lie_construction_rank() {
        let t = construct_tl(&fixtures::lie2(), false).unwrap();
        assert_eq!(invariants(&t).unwrap().image_rank, 1);
    }

    #[test]
    fn parametric_algebra_is_rejected() {
        let t = TernaryStructure::new("p", 1, FieldDescriptor::rationals(), vec!["a".into()]).with([1, 1, 1], &[(1, RatFunc::var("a"))]);
        assert!(matches!(invariants(&t), Err(AlgebraError::ParametricAlgebra(_))));
    }

    #[test]
    fn basis_change_keeps_record() {
        let p = OperatorMatrix::from_rows(vec![
            vec![RatFunc::from_i64(2), RatFunc::one()],
            vec![RatFunc::one(), RatFunc::one()],
        ])
        .unwrap();
        let t = t2_l1();
        assert_eq!(invariants(&t).unwrap(), invariants(&t.change_basis(&p).unwrap()).unwrap());
    }
}
