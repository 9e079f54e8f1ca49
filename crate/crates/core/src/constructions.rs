//! Constructions of new brackets from old ones and the lifting results from binary
//! to ternary operators.

use crate::algebra::matrix::{vec_add, vec_sub};
use crate::algebra::structure::{all_tuples, basis};
use crate::algebra::{
    binary_leibniz_residual, ternary_compatibility_residual, BinaryStructure, OperatorMatrix, TernaryStructure,
};
use crate::error::ConstructionError;
use crate::operators::{binary_operator_residual, operator_residual, ClassTag, OperatorClass, Variant, Verdict};
use crate::scalar::{Polynomial, RatFunc};

/// A constructed bracket with the conditions under which the construction is valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructed<S> {
    pub structure: S,
    pub side_conditions: Vec<Polynomial>,
}

/// `T(L)`: `{x, y, z} = [x, [y, z]]`, so `χ^p_{ijk} = Σ_r c^r_{jk} c^p_{ir}`.
pub fn construct_tl(b: &BinaryStructure, force: bool) -> Result<TernaryStructure, ConstructionError> {
    if !force && !binary_leibniz_residual(b).identically_zero {
        return Err(ConstructionError::NotLeibniz);
    }
    let n = b.dim();
    let e = basis(n);
    let mut t = TernaryStructure::new(format!("T({})", b.name), n, b.field().clone(), b.params().to_vec());
    for [i, j, k] in all_tuples::<3>(n) {
        let inner = b.basis_bracket(&[j, k]);
        t.set([i, j, k], b.bracket([&e[i], &inner]))?;
    }
    Ok(t)
}

fn injectivity(beta: &OperatorMatrix, force: bool) -> Result<Vec<Polynomial>, ConstructionError> {
    let det = beta.det();
    if det.is_zero() {
        return if force { Ok(Vec::new()) } else { Err(ConstructionError::NotInjective) };
    }
    let mut side = Vec::new();
    if det.as_constant().is_none() {
        side.push(det.num().clone());
    }
    side.extend(beta.side_conditions());
    Ok(side)
}

/// `⟦x, y, z⟧_β = ⟦βx, βy, z⟧`.
pub fn averaging_induced_ternary(
    t: &TernaryStructure,
    beta: &OperatorMatrix,
    force: bool,
) -> Result<Constructed<TernaryStructure>, ConstructionError> {
    let class = OperatorClass::new(ClassTag::Averaging);
    if !force && !operator_residual(t, &class, std::slice::from_ref(beta))?.identically_zero {
        return Err(ConstructionError::NotAveraging);
    }
    let side_conditions = injectivity(beta, force)?;
    let n = t.dim();
    let e = basis(n);
    let cols: Vec<_> = (0..n).map(|c| beta.column(c)).collect();
    let mut out = TernaryStructure::new(format!("{}^beta", t.name), n, t.field().clone(), t.params().to_vec());
    for [i, j, k] in all_tuples::<3>(n) {
        out.set([i, j, k], t.bracket([&cols[i], &cols[j], &e[k]]))?;
    }
    Ok(Constructed { structure: out, side_conditions })
}

/// `[x, y]_β = [βx, y]`.
pub fn averaging_induced_binary(
    b: &BinaryStructure,
    beta: &OperatorMatrix,
    force: bool,
) -> Result<Constructed<BinaryStructure>, ConstructionError> {
    let class = OperatorClass::new(ClassTag::Averaging);
    if !force && !binary_operator_residual(b, &class, std::slice::from_ref(beta))?.identically_zero {
        return Err(ConstructionError::NotAveraging);
    }
    let n = b.dim();
    let e = basis(n);
    let mut out = BinaryStructure::new(format!("{}^beta", b.name), n, b.field().clone(), b.params().to_vec());
    for [i, j] in all_tuples::<2>(n) {
        out.set([i, j], b.bracket([&beta.column(i), &e[j]]))?;
    }
    Ok(Constructed { structure: out, side_conditions: beta.side_conditions() })
}

/// `[x, y]_N = [Nx, y] + [x, Ny] − [x, y]` for `Variant::Paper`, `… − N[x, y]` for `Variant::Standard`.
pub fn nijenhuis_deformed_binary(
    b: &BinaryStructure,
    n_op: &OperatorMatrix,
    variant: Variant,
    force: bool,
) -> Result<BinaryStructure, ConstructionError> {
    let class = OperatorClass::new(ClassTag::Nijenhuis);
    if !force && !binary_operator_residual(b, &class, std::slice::from_ref(n_op))?.identically_zero {
        return Err(ConstructionError::NotNijenhuis);
    }
    let n = b.dim();
    let e = basis(n);
    let mut out = BinaryStructure::new(format!("{}_N", b.name), n, b.field().clone(), b.params().to_vec());
    for [i, j] in all_tuples::<2>(n) {
        let xy = b.basis_bracket(&[i, j]);
        let last = match variant {
            Variant::Paper => xy,
            Variant::Standard => n_op.apply(&xy),
        };
        let sum = vec_add(&b.bracket([&n_op.column(i), &e[j]]), &b.bracket([&e[i], &n_op.column(j)]));
        out.set([i, j], vec_sub(&sum, &last))?;
    }
    Ok(out)
}

/// Source of a lift: one binary bracket or a compatible pair.
#[derive(Clone, Copy, Debug)]
pub enum LiftSource<'a> {
    Single(&'a BinaryStructure),
    Pair(&'a BinaryStructure, &'a BinaryStructure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftVerdict {
    /// Ternary class checked on `T(L)`.
    pub ternary_class: ClassTag,
    /// Operator tuple the ternary class is applied to.
    pub lifted: Vec<OperatorMatrix>,
    pub verdict: Verdict,
}

/// Binary conditions a lift requires: `(class, tuple)` pairs that must all hold.
fn binary_conditions(tag: ClassTag, ops: &[OperatorMatrix]) -> Result<Vec<(ClassTag, Vec<OperatorMatrix>)>, ConstructionError> {
    let need = |k: usize| {
        if ops.len() == k {
            Ok(())
        } else {
            Err(ConstructionError::PreconditionFailed(format!("{tag} lift takes {k} matrices, got {}", ops.len())))
        }
    };
    Ok(match tag {
        ClassTag::GeneralizedDerivation => {
            need(4)?;
            let [d, d1, d2, d3] = [&ops[0], &ops[1], &ops[2], &ops[3]];
            vec![
                (tag, vec![d.clone(), d1.clone(), d2.clone()]),
                (tag, vec![d.clone(), d2.clone(), d3.clone()]),
            ]
        }
        ClassTag::Quasiderivation => {
            need(3)?;
            vec![(tag, vec![ops[0].clone(), ops[1].clone()]), (tag, vec![ops[1].clone(), ops[2].clone()])]
        }
        ClassTag::AveragingCompatibility => {
            return Err(ConstructionError::PreconditionFailed(format!("no lift is stated for {tag}")));
        }
        _ => {
            need(1)?;
            vec![(tag, ops.to_vec())]
        }
    })
}

fn lifted_tuple(tag: ClassTag, ops: &[OperatorMatrix]) -> Vec<OperatorMatrix> {
    match tag {
        // (D, D', D'', D''') on L gives (D, D, D', D''') on T(L).
        ClassTag::GeneralizedDerivation => vec![ops[0].clone(), ops[0].clone(), ops[1].clone(), ops[3].clone()],
        ClassTag::Quasiderivation => vec![ops[0].clone(), ops[2].clone()],
        _ => ops.to_vec(),
    }
}

/// Checks the binary hypotheses of a lift, then the ternary class on `T(L)`.
///
/// Generalized derivations take `(D, D', D'', D''')`, quasiderivations `(D, D', D'')`,
/// every other class a single matrix.
pub fn lift_check(
    source: LiftSource<'_>,
    class: &OperatorClass,
    ops: &[OperatorMatrix],
) -> Result<LiftVerdict, ConstructionError> {
    let brackets: Vec<&BinaryStructure> = match source {
        LiftSource::Single(b) => vec![b],
        LiftSource::Pair(b1, b2) => vec![b1, b2],
    };
    let conditions = binary_conditions(class.tag, ops)?;
    for (k, b) in brackets.iter().enumerate() {
        for (tag, tuple) in &conditions {
            let c = OperatorClass { tag: *tag, ..class.clone() };
            let r = binary_operator_residual(b, &c, tuple)?;
            if let Verdict::Fail(w) = Verdict::from_report(&r) {
                return Err(ConstructionError::PreconditionFailed(format!(
                    "binary {tag} condition fails on bracket {}: {}",
                    k + 1,
                    Verdict::Fail(w)
                )));
            }
        }
    }
    let ternary: Vec<TernaryStructure> =
        brackets.iter().map(|b| construct_tl(b, false)).collect::<Result<_, _>>()?;
    if ternary.len() == 2 && !ternary_compatibility_residual(&ternary[0], &ternary[1])?.identically_zero {
        return Err(ConstructionError::PreconditionFailed("the associated ternary brackets are not compatible".into()));
    }
    let lifted = lifted_tuple(class.tag, ops);
    let mut verdict = Verdict::Pass;
    for t in &ternary {
        let v = Verdict::from_report(&operator_residual(t, class, &lifted)?);
        if !v.is_pass() {
            verdict = v;
            break;
        }
    }
    Ok(LiftVerdict { ternary_class: class.tag, lifted, verdict })
}

/// Bundled binary Leibniz fixtures.
pub mod fixtures {
    use super::*;
    use crate::scalar::FieldDescriptor;

    fn one() -> RatFunc {
        RatFunc::one()
    }

    fn b(name: &str, dim: usize) -> BinaryStructure {
        BinaryStructure::new(name, dim, FieldDescriptor::rationals(), Vec::new())
    }

    pub fn abelian(dim: usize) -> BinaryStructure {
        b("abelian", dim)
    }

    /// `[e1, e1] = e2`.
    pub fn square() -> BinaryStructure {
        b("square", 2).with([1, 1], &[(2, one())])
    }

    /// `[e1, e2] = e2 = −[e2, e1]`.
    pub fn lie2() -> BinaryStructure {
        b("lie2", 2).with([1, 2], &[(2, one())]).with([2, 1], &[(2, one().neg())])
    }

    /// `[e1, e2] = e3 = −[e2, e1]`.
    pub fn heisenberg() -> BinaryStructure {
        b("heisenberg", 3).with([1, 2], &[(3, one())]).with([2, 1], &[(3, one().neg())])
    }

    pub fn all() -> Vec<BinaryStructure> {
        vec![abelian(2), square(), lie2(), heisenberg()]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::algebra::ternary_leibniz_residual;

    #[test]
    fn tl_of_fixtures() {
        assert!(construct_tl(&abelian(2), false).unwrap().is_zero());
        assert!(construct_tl(&square(), false).unwrap().is_zero());
        let t = construct_tl(&lie2(), false).unwrap();
        let nonzero: Vec<_> = t.constants().map(|(k, v)| (*k, v.clone())).collect();
        assert_eq!(
            nonzero,
            vec![
                ([0, 0, 1], vec![RatFunc::zero(), RatFunc::one()]),
                ([0, 1, 0], vec![RatFunc::zero(), RatFunc::one().neg()]),
            ]
        );
        for b in all() {
            assert!(ternary_leibniz_residual(&construct_tl(&b, false).unwrap()).identically_zero, "{}", b.name);
        }
        let bad = BinaryStructure::new("bad", 2, Default::default(), vec![]).with([2, 1], &[(1, RatFunc::one())]);
        assert_eq!(construct_tl(&bad, false), Err(ConstructionError::NotLeibniz));
    }

    #[test]
    fn deformed_brackets() {
        let l = lie2();
        for v in [Variant::Paper, Variant::Standard] {
            assert_eq!(nijenhuis_deformed_binary(&l, &OperatorMatrix::identity(2), v, false).unwrap().constants().count(), 2);
        }
        let zero = OperatorMatrix::zero(2);
        let literal = nijenhuis_deformed_binary(&l, &zero, Variant::Paper, false).unwrap();
        assert_eq!(literal.basis_bracket(&[0, 1])[1], RatFunc::from_i64(-1));
        assert!(nijenhuis_deformed_binary(&l, &zero, Variant::Standard, false).unwrap().is_zero());
        let c = RatFunc::var("c");
        let std = nijenhuis_deformed_binary(&l, &OperatorMatrix::scalar(2, c.clone()), Variant::Standard, false).unwrap();
        assert_eq!(std.basis_bracket(&[0, 1])[1], c);
    }

    #[test]
    fn averaging_constructions() {
        let t = construct_tl(&lie2(), false).unwrap();
        let c = RatFunc::var("c");
        let scaled = averaging_induced_ternary(&t, &OperatorMatrix::scalar(2, c.clone()), false).unwrap();
        assert_eq!(scaled.structure.basis_bracket(&[0, 0, 1])[1], c.mul(&c));
        assert_eq!(scaled.side_conditions.len(), 1);
        assert_eq!(
            averaging_induced_ternary(&t, &OperatorMatrix::zero(2), false),
            Err(ConstructionError::NotInjective)
        );
        let bb = averaging_induced_binary(&lie2(), &OperatorMatrix::identity(2), false).unwrap();
        assert_eq!(bb.structure.constants().count(), 2);
    }

    #[test]
    fn lifts() {
        let c = OperatorMatrix::scalar(2, RatFunc::var("c"));
        let v = lift_check(LiftSource::Single(&lie2()), &OperatorClass::new(ClassTag::Centroid), &[c]).unwrap();
        assert!(v.verdict.is_pass());
        let e21 = OperatorMatrix::unit(2, 1, 0);
        let v = lift_check(LiftSource::Single(&square()), &OperatorClass::new(ClassTag::CentralDerivation), &[e21]).unwrap();
        assert!(v.verdict.is_pass());
        let id = OperatorMatrix::identity(2);
        let r = lift_check(LiftSource::Single(&lie2()), &OperatorClass::new(ClassTag::CentralDerivation), &[id]);
        assert!(matches!(r, Err(ConstructionError::PreconditionFailed(_))));
    }
}
