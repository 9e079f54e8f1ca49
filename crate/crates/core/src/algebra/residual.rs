//! Residuals (left side minus right side) of the Leibniz and compatibility identities.

use super::matrix::{vec_add, vec_sub, Vector};
use super::structure::{all_tuples, basis, merged_context, BinaryStructure, TernaryStructure};
use crate::error::AlgebraError;
use crate::scalar::{Polynomial, RatFunc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualEntry {
    /// Which equation of a multi-equation system produced the entry.
    pub equation: String,
    /// 1-based basis indices of the arguments.
    pub indices: Vec<usize>,
    /// 1-based output coordinate.
    pub coordinate: usize,
    pub residual: RatFunc,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub identically_zero: bool,
    pub side_conditions: Vec<Polynomial>,
}

impl ResidualReport {
    pub fn new(entries: Vec<ResidualEntry>, side_conditions: Vec<Polynomial>) -> Self {
        ResidualReport { identically_zero: entries.is_empty(), entries, side_conditions }
    }

    /// Concatenates reports, relabelling equations with a prefix.
    pub fn merge(parts: Vec<(String, ResidualReport)>) -> Self {
        let mut entries = Vec::new();
        let mut side = Vec::new();
        for (label, r) in parts {
            for mut e in r.entries {
                e.equation = if e.equation.is_empty() { label.clone() } else { format!("{label}: {}", e.equation) };
                entries.push(e);
            }
            for s in r.side_conditions {
                if !side.contains(&s) {
                    side.push(s);
                }
            }
        }
        side.sort_by_key(|p: &Polynomial| p.to_string());
        ResidualReport::new(entries, side)
    }
}

/// Appends the nonzero coordinates of `v` as entries.
pub(crate) fn push_nonzero(entries: &mut Vec<ResidualEntry>, equation: &str, idx: &[usize], v: &[RatFunc]) {
    for (s, r) in v.iter().enumerate() {
        if !r.is_zero() {
            entries.push(ResidualEntry {
                equation: equation.to_string(),
                indices: idx.iter().map(|i| i + 1).collect(),
                coordinate: s + 1,
                residual: r.clone(),
            });
        }
    }
}

fn sum(vs: &[Vector]) -> Vector {
    let mut it = vs.iter();
    let first = it.next().expect("nonempty").clone();
    it.fold(first, |acc, v| vec_add(&acc, v))
}

/// `B(A(x,y,z),t,u) − B(x,y,A(z,t,u)) − B(x,A(y,t,u),z) − B(A(x,t,u),y,z)`.
fn ternary_mixed(a: &TernaryStructure, b: &TernaryStructure, e: &[Vector], i: [usize; 5]) -> Vector {
    let [x, y, z, t, u] = i.map(|k| e[k].as_slice());
    let lhs = b.bracket([&a.bracket([x, y, z]), t, u]);
    let r1 = b.bracket([x, y, &a.bracket([z, t, u])]);
    let r2 = b.bracket([x, &a.bracket([y, t, u]), z]);
    let r3 = b.bracket([&a.bracket([x, t, u]), y, z]);
    vec_sub(&lhs, &sum(&[r1, r2, r3]))
}

/// `B(A(x,y),z) − B(x,A(y,z)) − B(A(x,z),y)`.
fn binary_mixed(a: &BinaryStructure, b: &BinaryStructure, e: &[Vector], i: [usize; 3]) -> Vector {
    let [x, y, z] = i.map(|k| e[k].as_slice());
    let lhs = b.bracket([&a.bracket([x, y]), z]);
    let r1 = b.bracket([x, &a.bracket([y, z])]);
    let r2 = b.bracket([&a.bracket([x, z]), y]);
    vec_sub(&lhs, &vec_add(&r1, &r2))
}

/// Fundamental identity over all basis 5-tuples.
pub fn ternary_leibniz_residual(t: &TernaryStructure) -> ResidualReport {
    let e = basis(t.dim());
    let mut entries = Vec::new();
    for idx in all_tuples::<5>(t.dim()) {
        let v = ternary_mixed(t, t, &e, idx);
        push_nonzero(&mut entries, "", &idx, &v);
    }
    ResidualReport::new(entries, t.side_conditions())
}

/// `[[x,y],z] − [x,[y,z]] − [[x,z],y]` over all basis triples.
pub fn binary_leibniz_residual(b: &BinaryStructure) -> ResidualReport {
    let e = basis(b.dim());
    let mut entries = Vec::new();
    for idx in all_tuples::<3>(b.dim()) {
        let v = binary_mixed(b, b, &e, idx);
        push_nonzero(&mut entries, "", &idx, &v);
    }
    ResidualReport::new(entries, b.side_conditions())
}

/// Mixed identity of a pair of ternary brackets.
pub fn ternary_compatibility_residual(
    t1: &TernaryStructure,
    t2: &TernaryStructure,
) -> Result<ResidualReport, AlgebraError> {
    merged_context(t1, t2)?;
    let e = basis(t1.dim());
    let mut entries = Vec::new();
    for idx in all_tuples::<5>(t1.dim()) {
        let v = vec_add(&ternary_mixed(t1, t2, &e, idx), &ternary_mixed(t2, t1, &e, idx));
        push_nonzero(&mut entries, "", &idx, &v);
    }
    let mut side = t1.side_conditions();
    side.extend(t2.side_conditions());
    side.sort_by_key(|p| p.to_string());
    side.dedup();
    Ok(ResidualReport::new(entries, side))
}

/// Mixed identity of a pair of binary brackets.
pub fn binary_compatibility_residual(
    b1: &BinaryStructure,
    b2: &BinaryStructure,
) -> Result<ResidualReport, AlgebraError> {
    merged_context(b1, b2)?;
    let e = basis(b1.dim());
    let mut entries = Vec::new();
    for idx in all_tuples::<3>(b1.dim()) {
        let v = vec_add(&binary_mixed(b1, b2, &e, idx), &binary_mixed(b2, b1, &e, idx));
        push_nonzero(&mut entries, "", &idx, &v);
    }
    let mut side = b1.side_conditions();
    side.extend(b2.side_conditions());
    side.sort_by_key(|p| p.to_string());
    side.dedup();
    Ok(ResidualReport::new(entries, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure::pencil;
    use crate::scalar::FieldDescriptor;

    fn one() -> RatFunc {
        RatFunc::one()
    }

    fn t(dim: usize) -> TernaryStructure {
        TernaryStructure::new("t", dim, FieldDescriptor::rationals(), vec![])
    }

    fn b(dim: usize) -> BinaryStructure {
        BinaryStructure::new("b", dim, FieldDescriptor::rationals(), vec![])
    }

    #[test]
    fn one_dimensional_identity_bracket() {
        let r = ternary_leibniz_residual(&t(1).with([1, 1, 1], &[(1, one())]));
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].indices, vec![1, 1, 1, 1, 1]);
        assert_eq!(r.entries[0].residual, RatFunc::from_i64(-2));
    }

    #[test]
    fn two_dimensional_classes_balance() {
        assert!(ternary_leibniz_residual(&t(3)).identically_zero);
        let l1 = t(2).with([1, 1, 1], &[(2, one())]);
        assert!(ternary_leibniz_residual(&l1).identically_zero);
        let l2 = t(2).with([1, 2, 2], &[(1, one())]).with([2, 2, 2], &[(1, one())]);
        assert!(ternary_leibniz_residual(&l2).identically_zero);
    }

    #[test]
    fn binary_examples() {
        let lie = b(2).with([1, 2], &[(2, one())]).with([2, 1], &[(2, one().neg())]);
        assert!(binary_leibniz_residual(&lie).identically_zero);
        let sq = b(2).with([1, 1], &[(2, one())]);
        assert!(binary_leibniz_residual(&sq).identically_zero);
        let bad = b(2).with([2, 1], &[(1, one())]);
        let r = binary_leibniz_residual(&bad);
        let hit = r.entries.iter().find(|e| e.indices == vec![2, 2, 1]).unwrap();
        assert_eq!((hit.coordinate, hit.residual.clone()), (1, RatFunc::from_i64(-1)));
        assert!(binary_compatibility_residual(&lie, &lie).unwrap().identically_zero);
        assert!(binary_compatibility_residual(&lie, &b(2)).unwrap().identically_zero);
    }

    #[test]
    fn compatible_pair_and_pencil() {
        let t1 = t(2).with([1, 1, 1], &[(2, one())]);
        let t2 = t(2).with([2, 1, 1], &[(2, one())]);
        assert!(ternary_compatibility_residual(&t1, &t2).unwrap().identically_zero);
        assert!(ternary_compatibility_residual(&t1, &t1).unwrap().identically_zero);
        let p = pencil(&t1, &t2, &RatFunc::var("k1"), &RatFunc::var("k2")).unwrap();
        assert!(ternary_leibniz_residual(&p).identically_zero);
        let mismatch = ternary_compatibility_residual(&t1, &t(3));
        assert!(matches!(mismatch, Err(AlgebraError::DimensionMismatch { .. })));
    }
}
