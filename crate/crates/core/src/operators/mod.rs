//! Operator classes on ternary and binary brackets and their residual systems.

mod linear;
mod verify;

pub use linear::{binary_linear_system, linear_system, LinearSystem};
pub use verify::{verify_family, verify_family_binary, Family, FamilyVerdict, Verdict};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::matrix::{vec_add, vec_scale, vec_sub, zero_vec, Vector};
use crate::algebra::residual::push_nonzero;
use crate::algebra::structure::{all_tuples, basis};
use crate::algebra::{BinaryStructure, OperatorMatrix, ResidualReport, TernaryStructure};
use crate::error::AlgebraError;
use crate::scalar::RatFunc;

/// Name of the formal weight parameter.
pub const WEIGHT_VAR: &str = "lambda";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    CentralDerivation,
    GeneralizedDerivation,
    Quasiderivation,
    DerivationWeighted,
    Averaging,
    AveragingCompatibility,
    RotaBaxter,
    Nijenhuis,
    Reynolds,
    Centroid,
}

impl ClassTag {
    pub const ALL: [ClassTag; 10] = [
        ClassTag::CentralDerivation,
        ClassTag::GeneralizedDerivation,
        ClassTag::Quasiderivation,
        ClassTag::DerivationWeighted,
        ClassTag::Averaging,
        ClassTag::AveragingCompatibility,
        ClassTag::RotaBaxter,
        ClassTag::Nijenhuis,
        ClassTag::Reynolds,
        ClassTag::Centroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::CentralDerivation => "central-derivation",
            ClassTag::GeneralizedDerivation => "generalized-derivation",
            ClassTag::Quasiderivation => "quasiderivation",
            ClassTag::DerivationWeighted => "derivation-weighted",
            ClassTag::Averaging => "averaging",
            ClassTag::AveragingCompatibility => "averaging-compatibility",
            ClassTag::RotaBaxter => "rota-baxter",
            ClassTag::Nijenhuis => "nijenhuis",
            ClassTag::Reynolds => "reynolds",
            ClassTag::Centroid => "centroid",
        }
    }

    /// Number of matrices in the operator tuple on a ternary bracket.
    pub fn ternary_arity(self) -> usize {
        match self {
            ClassTag::GeneralizedDerivation => 4,
            ClassTag::Quasiderivation | ClassTag::AveragingCompatibility => 2,
            _ => 1,
        }
    }

    /// Number of matrices in the operator tuple on a binary bracket.
    pub fn binary_arity(self) -> usize {
        match self {
            ClassTag::GeneralizedDerivation => 3,
            ClassTag::Quasiderivation | ClassTag::AveragingCompatibility => 2,
            _ => 1,
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, ClassTag::DerivationWeighted | ClassTag::RotaBaxter)
    }

    pub fn is_linear(self) -> bool {
        matches!(
            self,
            ClassTag::Centroid
                | ClassTag::CentralDerivation
                | ClassTag::GeneralizedDerivation
                | ClassTag::Quasiderivation
        )
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassTag::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown operator class `{s}`"))
    }
}

/// Last term of the Nijenhuis-deformed binary bracket: `−[x,y]` or `−N[x,y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Paper,
    Standard,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Paper => "paper",
            Variant::Standard => "standard",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Variant::Paper),
            "standard" => Ok(Variant::Standard),
            _ => Err(format!("unknown variant `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorClass {
    pub tag: ClassTag,
    /// Weight of weighted classes; ignored elsewhere.
    pub weight: RatFunc,
    pub variant: Variant,
}

impl OperatorClass {
    /// Class with the formal weight `lambda`.
    pub fn new(tag: ClassTag) -> Self {
        OperatorClass { tag, weight: RatFunc::var(WEIGHT_VAR), variant: Variant::Paper }
    }

    pub fn with_weight(tag: ClassTag, weight: RatFunc) -> Self {
        OperatorClass { tag, weight, variant: Variant::Paper }
    }
}

fn check_ops(n: usize, tag: ClassTag, expected: usize, ops: &[OperatorMatrix]) -> Result<(), AlgebraError> {
    if ops.len() != expected {
        return Err(AlgebraError::WrongTupleArity { class: tag.name().into(), expected, got: ops.len() });
    }
    for m in ops {
        if m.dim() != n {
            return Err(AlgebraError::DimensionMismatch { expected: n, got: m.dim() });
        }
    }
    Ok(())
}

fn add_all(n: usize, vs: &[Vector]) -> Vector {
    vs.iter().fold(zero_vec(n), |acc, v| vec_add(&acc, v))
}

/// Appends every pairwise difference of a chain of equal expressions.
fn push_chain(entries: &mut Vec<crate::algebra::ResidualEntry>, idx: &[usize], members: &[(&str, Vector)]) {
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            let label = format!("{} - {}", members[a].0, members[b].0);
            push_nonzero(entries, &label, idx, &vec_sub(&members[a].1, &members[b].1));
        }
    }
}

/// Residual system of `class` for the operator tuple `ops` on a ternary bracket.
pub fn operator_residual(
    t: &TernaryStructure,
    class: &OperatorClass,
    ops: &[OperatorMatrix],
) -> Result<ResidualReport, AlgebraError> {
    let n = t.dim();
    let tag = class.tag;
    check_ops(n, tag, tag.ternary_arity(), ops)?;
    let e = basis(n);
    // Images of basis vectors under each operator.
    let img: Vec<Vec<Vector>> = ops.iter().map(|m| (0..n).map(|c| m.column(c)).collect()).collect();
    let lam = &class.weight;
    let br = |a: &[RatFunc], b: &[RatFunc], c: &[RatFunc]| {
        t.bracket([a, b, c])
    };
    let mut entries = Vec::new();
    for idx in all_tuples::<3>(n) {
        let [i, j, k] = idx;
        let (x, y, z) = (&e[i], &e[j], &e[k]);
        let xyz = t.basis_bracket(&idx);
        match tag {
            ClassTag::CentralDerivation => {
                let d = &img[0];
                push_chain(
                    &mut entries,
                    &idx,
                    &[
                        ("D[x,y,z]", ops[0].apply(&xyz)),
                        ("[Dx,y,z]", br(&d[i], y, z)),
                        ("[x,Dy,z]", br(x, &d[j], z)),
                        ("[x,y,Dz]", br(x, y, &d[k])),
                        ("0", zero_vec(n)),
                    ],
                );
            }
            ClassTag::Centroid => {
                let th = &img[0];
                push_chain(
                    &mut entries,
                    &idx,
                    &[
                        ("T[x,y,z]", ops[0].apply(&xyz)),
                        ("[Tx,y,z]", br(&th[i], y, z)),
                        ("[x,Ty,z]", br(x, &th[j], z)),
                        ("[x,y,Tz]", br(x, y, &th[k])),
                    ],
                );
            }
            ClassTag::GeneralizedDerivation => {
                let lhs = ops[3].apply(&xyz);
                let rhs = add_all(n, &[br(&img[0][i], y, z), br(x, &img[1][j], z), br(x, y, &img[2][k])]);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::Quasiderivation => {
                let d = &img[0];
                let lhs = ops[1].apply(&xyz);
                let rhs = add_all(n, &[br(&d[i], y, z), br(x, &d[j], z), br(x, y, &d[k])]);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::DerivationWeighted => {
                let d = &img[0];
                let lhs = ops[0].apply(&xyz);
                let one = add_all(n, &[br(&d[i], y, z), br(x, &d[j], z), br(x, y, &d[k])]);
                let two = add_all(n, &[br(&d[i], &d[j], z), br(x, &d[j], &d[k]), br(&d[i], y, &d[k])]);
                let three = br(&d[i], &d[j], &d[k]);
                let rhs = add_all(n, &[one, vec_scale(&two, lam), vec_scale(&three, &lam.mul(lam))]);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::Averaging => {
                let b = &img[0];
                let op = &ops[0];
                push_chain(&mut entries, &idx, &averaging_chain(op, b, t, idx));
            }
            ClassTag::AveragingCompatibility => {
                let sum = ops[0].add(&ops[1]);
                let b: Vec<Vector> = (0..n).map(|c| sum.column(c)).collect();
                push_chain(&mut entries, &idx, &averaging_chain(&sum, &b, t, idx));
            }
            ClassTag::RotaBaxter => {
                let r = &img[0];
                let lhs = br(&r[i], &r[j], &r[k]);
                let two = add_all(n, &[br(&r[i], &r[j], z), br(&r[i], y, &r[k]), br(x, &r[j], &r[k])]);
                let one = add_all(n, &[br(&r[i], y, z), br(x, &r[j], z), br(x, y, &r[k])]);
                let inner = add_all(n, &[two, vec_scale(&one, lam), vec_scale(&xyz, &lam.mul(lam))]);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &ops[0].apply(&inner)));
            }
            ClassTag::Nijenhuis => {
                let nn = &img[0];
                let op = &ops[0];
                let lhs = br(&nn[i], &nn[j], &nn[k]);
                let two = add_all(n, &[br(&nn[i], &nn[j], z), br(&nn[i], y, &nn[k]), br(x, &nn[j], &nn[k])]);
                let one = add_all(n, &[br(&nn[i], y, z), br(x, &nn[j], z), br(x, y, &nn[k])]);
                let n_two = op.apply(&two);
                let nn_one = op.apply(&op.apply(&one));
                let nnn = op.apply(&op.apply(&op.apply(&xyz)));
                let rhs = vec_add(&vec_sub(&n_two, &nn_one), &nnn);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::Reynolds => {
                let r = &img[0];
                let lhs = br(&r[i], &r[j], &r[k]);
                let two = add_all(n, &[br(&r[i], &r[j], z), br(&r[i], y, &r[k]), br(x, &r[j], &r[k])]);
                let inner = vec_sub(&two, &lhs);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &ops[0].apply(&inner)));
            }
        }
    }
    let mut side = t.side_conditions();
    for m in ops {
        side.extend(m.side_conditions());
    }
    side.extend(lam.side_condition().cloned());
    side.sort_by_key(|p| p.to_string());
    side.dedup();
    Ok(ResidualReport::new(entries, side))
}

fn averaging_chain(
    op: &OperatorMatrix,
    b: &[Vector],
    t: &TernaryStructure,
    idx: [usize; 3],
) -> Vec<(&'static str, Vector)> {
    let n = t.dim();
    let e = basis(n);
    let [i, j, k] = idx;
    let (x, y, z) = (&e[i], &e[j], &e[k]);
    vec![
        ("B[Bx,By,z]", op.apply(&t.bracket([&b[i], &b[j], z]))),
        ("B[Bx,y,Bz]", op.apply(&t.bracket([&b[i], y, &b[k]]))),
        ("B[x,By,Bz]", op.apply(&t.bracket([x, &b[j], &b[k]]))),
        ("[Bx,By,Bz]", t.bracket([&b[i], &b[j], &b[k]])),
    ]
}

/// Residual system of `class` for the operator tuple `ops` on a binary bracket.
pub fn binary_operator_residual(
    b: &BinaryStructure,
    class: &OperatorClass,
    ops: &[OperatorMatrix],
) -> Result<ResidualReport, AlgebraError> {
    let n = b.dim();
    let tag = class.tag;
    check_ops(n, tag, tag.binary_arity(), ops)?;
    let e = basis(n);
    let img: Vec<Vec<Vector>> = ops.iter().map(|m| (0..n).map(|c| m.column(c)).collect()).collect();
    let lam = &class.weight;
    let br = |u: &[RatFunc], v: &[RatFunc]| b.bracket([u, v]);
    let mut entries = Vec::new();
    for idx in all_tuples::<2>(n) {
        let [i, j] = idx;
        let (x, y) = (&e[i], &e[j]);
        let xy = b.basis_bracket(&idx);
        match tag {
            ClassTag::CentralDerivation => {
                let d = &img[0];
                push_chain(
                    &mut entries,
                    &idx,
                    &[
                        ("D[x,y]", ops[0].apply(&xy)),
                        ("[Dx,y]", br(&d[i], y)),
                        ("[x,Dy]", br(x, &d[j])),
                        ("0", zero_vec(n)),
                    ],
                );
            }
            ClassTag::Centroid => {
                let th = &img[0];
                push_chain(
                    &mut entries,
                    &idx,
                    &[("T[x,y]", ops[0].apply(&xy)), ("[Tx,y]", br(&th[i], y)), ("[x,Ty]", br(x, &th[j]))],
                );
            }
            ClassTag::GeneralizedDerivation => {
                let lhs = ops[2].apply(&xy);
                let rhs = vec_add(&br(&img[0][i], y), &br(x, &img[1][j]));
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::Quasiderivation => {
                let d = &img[0];
                let lhs = ops[1].apply(&xy);
                let rhs = vec_add(&br(&d[i], y), &br(x, &d[j]));
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::DerivationWeighted => {
                let d = &img[0];
                let lhs = ops[0].apply(&xy);
                let rhs = add_all(n, &[br(&d[i], y), br(x, &d[j]), vec_scale(&xy, lam)]);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &rhs));
            }
            ClassTag::Averaging => {
                let bb = &img[0];
                push_chain(
                    &mut entries,
                    &idx,
                    &[
                        ("B[Bx,y]", ops[0].apply(&br(&bb[i], y))),
                        ("[Bx,By]", br(&bb[i], &bb[j])),
                        ("B[x,By]", ops[0].apply(&br(x, &bb[j]))),
                    ],
                );
            }
            ClassTag::AveragingCompatibility => {
                // Literal form with a trailing third argument: one triple per (i, j, k).
                let (b1, b2) = (&img[0], &img[1]);
                for k in 0..n {
                    let z = &e[k];
                    let lhs = vec_add(
                        &br(&ops[1].apply(&br(&b1[i], y)), z),
                        &br(&ops[0].apply(&br(&b2[i], y)), z),
                    );
                    let rhs = vec_add(&br(&br(&b1[i], &b2[j]), z), &br(&br(&b2[i], &b1[j]), z));
                    push_nonzero(&mut entries, "", &[i, j, k], &vec_sub(&lhs, &rhs));
                }
            }
            ClassTag::RotaBaxter => {
                let r = &img[0];
                let lhs = br(&r[i], &r[j]);
                let inner = add_all(n, &[br(&r[i], y), br(x, &r[j]), vec_scale(&xy, lam)]);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &ops[0].apply(&inner)));
            }
            ClassTag::Nijenhuis => {
                let nn = &img[0];
                let lhs = br(&nn[i], &nn[j]);
                let inner = vec_sub(&vec_add(&br(&nn[i], y), &br(x, &nn[j])), &ops[0].apply(&xy));
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &ops[0].apply(&inner)));
            }
            ClassTag::Reynolds => {
                let r = &img[0];
                let lhs = br(&r[i], &r[j]);
                let inner = vec_sub(&vec_add(&br(&r[i], y), &br(x, &r[j])), &lhs);
                push_nonzero(&mut entries, "", &idx, &vec_sub(&lhs, &ops[0].apply(&inner)));
            }
        }
    }
    let mut side = b.side_conditions();
    for m in ops {
        side.extend(m.side_conditions());
    }
    side.extend(lam.side_condition().cloned());
    side.sort_by_key(|p| p.to_string());
    side.dedup();
    Ok(ResidualReport::new(entries, side))
}

/// Residual on each bracket of a compatible pair, labelled `bracket 1` / `bracket 2`.
pub fn operator_residual_pair(
    t1: &TernaryStructure,
    t2: &TernaryStructure,
    class: &OperatorClass,
    ops: &[OperatorMatrix],
) -> Result<ResidualReport, AlgebraError> {
    Ok(ResidualReport::merge(vec![
        ("bracket 1".into(), operator_residual(t1, class, ops)?),
        ("bracket 2".into(), operator_residual(t2, class, ops)?),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_expr, FieldDescriptor};

    fn t2_l1() -> TernaryStructure {
        TernaryStructure::new("T2.L1", 2, FieldDescriptor::rationals(), vec![]).with([1, 1, 1], &[(2, RatFunc::one())])
    }

    fn t2_l2() -> TernaryStructure {
        TernaryStructure::new("T2.L2", 2, FieldDescriptor::rationals(), vec![])
            .with([1, 2, 2], &[(1, RatFunc::one())])
            .with([2, 2, 2], &[(1, RatFunc::one())])
    }

    fn mat(rows: &[&[&str]]) -> OperatorMatrix {
        let f = FieldDescriptor::rationals();
        OperatorMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| parse_expr(s, &f, None).unwrap()).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_maps() {
        let c = OperatorMatrix::scalar(2, RatFunc::var("c"));
        for t in [t2_l1(), t2_l2()] {
            for tag in [ClassTag::Centroid, ClassTag::Nijenhuis] {
                let r = operator_residual(&t, &OperatorClass::new(tag), &[c.clone()]).unwrap();
                assert!(r.identically_zero, "{tag} on {}", t.name);
            }
        }
    }

    #[test]
    fn reynolds_identity_fails_on_nonzero_bracket() {
        let r = operator_residual(&t2_l1(), &OperatorClass::new(ClassTag::Reynolds), &[OperatorMatrix::identity(2)])
            .unwrap();
        assert!(!r.identically_zero);
        assert_eq!(r.entries[0].indices, vec![1, 1, 1]);
        assert_eq!(r.entries[0].residual, RatFunc::from_i64(-1));
    }

    #[test]
    fn weighted_derivation_witness() {
        let d = mat(&[&["d11", "0"], &["0", "3*d11"]]);
        let r = operator_residual(&t2_l1(), &OperatorClass::new(ClassTag::DerivationWeighted), &[d.clone()]).unwrap();
        assert_eq!(r.entries.len(), 1);
        let w = &r.entries[0];
        assert_eq!((w.indices.clone(), w.coordinate), (vec![1, 1, 1], 2));
        assert_eq!(w.residual.num().coefficient_of(WEIGHT_VAR, 1).to_string(), "-3*d11^2");
        let at_zero = OperatorClass::with_weight(ClassTag::DerivationWeighted, RatFunc::zero());
        assert!(operator_residual(&t2_l1(), &at_zero, &[d]).unwrap().identically_zero);
        let fam = mat(&[&["0", "0"], &["d21", "0"]]);
        let r = operator_residual(&t2_l1(), &OperatorClass::new(ClassTag::DerivationWeighted), &[fam]).unwrap();
        assert!(r.identically_zero);
    }

    #[test]
    fn binary_examples() {
        let lie = BinaryStructure::new("lie", 2, FieldDescriptor::rationals(), vec![])
            .with([1, 2], &[(2, RatFunc::one())])
            .with([2, 1], &[(2, RatFunc::one().neg())]);
        let id = OperatorMatrix::identity(2);
        let avg = binary_operator_residual(&lie, &OperatorClass::new(ClassTag::Averaging), &[id]).unwrap();
        assert!(avg.identically_zero);
        let c = OperatorMatrix::scalar(2, RatFunc::var("c"));
        let pair = OperatorClass::new(ClassTag::AveragingCompatibility);
        assert!(binary_operator_residual(&lie, &pair, &[c.clone(), c]).unwrap().identically_zero);
        let rb0 = OperatorClass::with_weight(ClassTag::RotaBaxter, RatFunc::zero());
        assert!(binary_operator_residual(&lie, &rb0, &[OperatorMatrix::zero(2)]).unwrap().identically_zero);
    }

    #[test]
    fn arity_errors() {
        let r = operator_residual(&t2_l1(), &OperatorClass::new(ClassTag::Quasiderivation), &[OperatorMatrix::zero(2)]);
        assert!(matches!(r, Err(AlgebraError::WrongTupleArity { expected: 2, got: 1, .. })));
        let r = operator_residual(&t2_l1(), &OperatorClass::new(ClassTag::Centroid), &[OperatorMatrix::zero(3)]);
        assert!(matches!(r, Err(AlgebraError::DimensionMismatch { .. })));
    }
}
