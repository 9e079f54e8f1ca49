use super::{ClassTag, OperatorClass};
use crate::algebra::matrix::OperatorMatrix;
use crate::algebra::structure::{all_tuples, Structure};
use crate::error::AlgebraError;
use crate::scalar::{FieldElement, RatFunc};

/// Homogeneous system `M·vec = 0` in the entries of an operator tuple.
///
/// Unknown `op·n² + r·n + c` is entry `(r, c)` of matrix `op`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub dim: usize,
    pub tuple_len: usize,
    pub rows: Vec<Vec<FieldElement>>,
}

impl LinearSystem {
    pub fn unknowns(&self) -> usize {
        self.tuple_len * self.dim * self.dim
    }

    pub fn unknown_index(&self, op: usize, r: usize, c: usize) -> usize {
        op * self.dim * self.dim + r * self.dim + c
    }

    /// Splits a solution vector into its operator tuple.
    pub fn to_ops(&self, v: &[FieldElement]) -> Vec<OperatorMatrix> {
        let n = self.dim;
        (0..self.tuple_len)
            .map(|op| {
                let mut m = OperatorMatrix::zero(n);
                for r in 0..n {
                    for c in 0..n {
                        m.set(r, c, RatFunc::constant(v[self.unknown_index(op, r, c)].clone()));
                    }
                }
                m
            })
            .collect()
    }

    /// Flattens constant operator matrices; `None` if an entry is not constant.
    pub fn from_ops(&self, ops: &[OperatorMatrix]) -> Option<Vec<FieldElement>> {
        ops.iter().flat_map(|m| m.entries().iter().map(RatFunc::as_constant)).collect()
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).fold(FieldElement::zero(), |acc, (a, x)| acc.add(&a.mul(x))))
            .collect()
    }
}

struct Assembler<const A: usize> {
    chi: Vec<Vec<FieldElement>>,
    n: usize,
    unknowns: usize,
}

impl<const A: usize> Assembler<A> {
    fn chi(&self, idx: &[usize; A]) -> &[FieldElement] {
        let k = idx.iter().fold(0, |acc, &i| acc * self.n + i);
        &self.chi[k]
    }

    fn var(&self, op: usize, r: usize, c: usize) -> usize {
        op * self.n * self.n + r * self.n + c
    }

    /// Rows (one per output q) of `op(⟦e_idx⟧)_q = Σ_p op_{qp} χ^p_idx`.
    fn outer(&self, op: usize, idx: &[usize; A]) -> Vec<Vec<FieldElement>> {
        let chi = self.chi(idx);
        (0..self.n)
            .map(|q| {
                let mut row = vec![FieldElement::zero(); self.unknowns];
                for (p, c) in chi.iter().enumerate() {
                    if !c.is_zero() {
                        row[self.var(op, q, p)] = c.clone();
                    }
                }
                row
            })
            .collect()
    }

    /// Rows of `⟦…, op(e_{idx[slot]}), …⟧_q = Σ_p op_{p,idx[slot]} χ^q_{idx[slot→p]}`.
    fn inner(&self, op: usize, slot: usize, idx: &[usize; A]) -> Vec<Vec<FieldElement>> {
        (0..self.n)
            .map(|q| {
                let mut row = vec![FieldElement::zero(); self.unknowns];
                for p in 0..self.n {
                    let mut j = *idx;
                    j[slot] = p;
                    let c = &self.chi(&j)[q];
                    if !c.is_zero() {
                        row[self.var(op, p, idx[slot])] = c.clone();
                    }
                }
                row
            })
            .collect()
    }

    fn zero(&self) -> Vec<Vec<FieldElement>> {
        vec![vec![FieldElement::zero(); self.unknowns]; self.n]
    }
}

fn combine(terms: &[(i64, &Vec<Vec<FieldElement>>)]) -> Vec<Vec<FieldElement>> {
    let n = terms[0].1.len();
    let u = terms[0].1[0].len();
    let mut out = vec![vec![FieldElement::zero(); u]; n];
    for (sign, rows) in terms {
        for (q, row) in rows.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    let v = if *sign > 0 { c.clone() } else { c.neg() };
                    out[q][k] = out[q][k].add(&v);
                }
            }
        }
    }
    out
}

fn assemble<const A: usize>(s: &Structure<A>, class: &OperatorClass, tuple_len: usize) -> Result<LinearSystem, AlgebraError> {
    let tag = class.tag;
    let linear = tag.is_linear()
        || (tag == ClassTag::DerivationWeighted && class.weight.is_zero());
    if !linear {
        return Err(AlgebraError::NonlinearClass(tag.name().into()));
    }
    s.require_constant()?;
    let n = s.dim();
    let chi = all_tuples::<A>(n)
        .map(|idx| {
            s.basis_bracket(&idx)
                .iter()
                .map(|c| c.as_constant().expect("constant structure"))
                .collect()
        })
        .collect();
    let asm = Assembler::<A> { chi, n, unknowns: tuple_len * n * n };
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for idx in all_tuples::<A>(n) {
        let inner = |op: usize, slot: usize| asm.inner(op, slot, &idx);
        let eqs: Vec<Vec<Vec<FieldElement>>> = match tag {
            ClassTag::Centroid | ClassTag::CentralDerivation => {
                let mut chain = vec![asm.outer(0, &idx)];
                chain.extend((0..A).map(|s| inner(0, s)));
                if tag == ClassTag::CentralDerivation {
                    chain.push(asm.zero());
                }
                let mut eqs = Vec::new();
                for a in 0..chain.len() {
                    for b in a + 1..chain.len() {
                        eqs.push(combine(&[(1, &chain[a]), (-1, &chain[b])]));
                    }
                }
                eqs
            }
            ClassTag::Quasiderivation | ClassTag::DerivationWeighted => {
                let outer_op = if tag == ClassTag::Quasiderivation { 1 } else { 0 };
                let lhs = asm.outer(outer_op, &idx);
                let parts: Vec<_> = (0..A).map(|s| inner(0, s)).collect();
                let mut terms = vec![(1, &lhs)];
                terms.extend(parts.iter().map(|p| (-1, p)));
                vec![combine(&terms)]
            }
            ClassTag::GeneralizedDerivation => {
                let lhs = asm.outer(A, &idx);
                let parts: Vec<_> = (0..A).map(|s| inner(s, s)).collect();
                let mut terms = vec![(1, &lhs)];
                terms.extend(parts.iter().map(|p| (-1, p)));
                vec![combine(&terms)]
            }
            _ => unreachable!("nonlinear classes rejected above"),
        };
        for eq in eqs {
            rows.extend(eq.into_iter().filter(|r| r.iter().any(|c| !c.is_zero())));
        }
    }
    Ok(LinearSystem { dim: n, tuple_len, rows })
}

/// Linear system of a linear class on a ternary bracket.
///
/// Accepts centroid, central derivation, quasiderivation, generalized derivation, and
/// the weighted derivation class at weight 0.
pub fn linear_system(t: &Structure<3>, class: &OperatorClass) -> Result<LinearSystem, AlgebraError> {
    assemble(t, class, class.tag.ternary_arity())
}

/// Binary counterpart of [`linear_system`].
pub fn binary_linear_system(b: &Structure<2>, class: &OperatorClass) -> Result<LinearSystem, AlgebraError> {
    assemble(b, class, class.tag.binary_arity())
}
