use crate::algebra::OperatorMatrix;
use crate::error::ScalarError;
use crate::operators::LinearSystem;
use crate::scalar::modp::{inv_mod, reduce_field, RootResidues};
use crate::scalar::FieldElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullspaceResult {
    /// Basis vectors, one per free unknown in increasing order.
    pub vectors: Vec<Vec<FieldElement>>,
    pub dimension: usize,
    pub rank: usize,
    pub unknowns: usize,
}

/// Reduced row echelon form; returns the pivot column of each nonzero row.
fn rref(rows: &mut Vec<Vec<FieldElement>>, unknowns: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for c in col..unknowns {
                if !rows[r][c].is_zero() {
                    let t = rows[r][c].mul(&f);
                    rows[i][c] = rows[i][c].sub(&t);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Exact nullspace of `M` with `unknowns` columns.
///
/// Each basis vector sets one free unknown to 1 and the others to 0.
pub fn nullspace(m: &[Vec<FieldElement>], unknowns: usize) -> NullspaceResult {
    let mut rows: Vec<Vec<FieldElement>> = m.to_vec();
    let pivots = rref(&mut rows, unknowns);
    let mut vectors = Vec::new();
    for free in (0..unknowns).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElement::zero(); unknowns];
        v[free] = FieldElement::one();
        for (row, &pc) in rows.iter().zip(&pivots) {
            v[pc] = row[free].neg();
        }
        vectors.push(v);
    }
    NullspaceResult { dimension: vectors.len(), rank: pivots.len(), vectors, unknowns }
}

impl NullspaceResult {
    /// Basis vectors split into operator tuples of `sys`.
    pub fn operator_basis(&self, sys: &LinearSystem) -> Vec<Vec<OperatorMatrix>> {
        self.vectors.iter().map(|v| sys.to_ops(v)).collect()
    }
}

pub fn solve_linear(sys: &LinearSystem) -> NullspaceResult {
    nullspace(&sys.rows, sys.unknowns())
}

/// Rank of `M` reduced mod `p`.
pub fn rank_mod_p(m: &[Vec<FieldElement>], unknowns: usize, roots: &RootResidues) -> Result<usize, ScalarError> {
    let p = roots.p;
    let mut rows: Vec<Vec<u64>> = m
        .iter()
        .map(|row| row.iter().map(|x| reduce_field(x, roots)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let mut r = 0;
    for col in 0..unknowns {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = inv_mod(rows[r][col], p).expect("prime modulus");
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for c in col..unknowns {
                    rows[i][c] = (rows[i][c] + p * p - f * rows[r][c] % p) % p;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TernaryStructure;
    use crate::operators::{linear_system, ClassTag, OperatorClass};
    use crate::scalar::{FieldDescriptor, RatFunc};

    fn t2_l1() -> TernaryStructure {
        TernaryStructure::new("T2.L1", 2, FieldDescriptor::rationals(), vec![]).with([1, 1, 1], &[(2, RatFunc::one())])
    }

    fn ints(v: &[FieldElement]) -> Vec<String> {
        v.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn centroid_of_t2_l1() {
        let sys = linear_system(&t2_l1(), &OperatorClass::new(ClassTag::Centroid)).unwrap();
        let ns = solve_linear(&sys);
        assert_eq!((ns.dimension, ns.rank), (2, 2));
        assert_eq!(ints(&ns.vectors[0]), ["0", "0", "1", "0"]);
        assert_eq!(ints(&ns.vectors[1]), ["1", "0", "0", "1"]);
        let ops = ns.operator_basis(&sys);
        assert_eq!(ops[1][0], OperatorMatrix::identity(2));
    }

    #[test]
    fn weight_zero_derivations_of_t2_l1() {
        let class = OperatorClass::with_weight(ClassTag::DerivationWeighted, RatFunc::zero());
        let sys = linear_system(&t2_l1(), &class).unwrap();
        let ns = solve_linear(&sys);
        assert_eq!(ns.dimension, 2);
        // d12 = 0 and d22 = 3 d11
        assert_eq!(ints(&ns.vectors[0]), ["0", "0", "1", "0"]);
        assert_eq!(ints(&ns.vectors[1]), ["1/3", "0", "0", "1"]);
    }

    #[test]
    fn zero_matrix_and_mod_p_rank() {
        let ns = nullspace(&[vec![FieldElement::zero(); 3]], 3);
        assert_eq!((ns.dimension, ns.rank), (3, 0));
        let m = vec![vec![FieldElement::from_i64(3), FieldElement::from_i64(-1)]];
        assert_eq!(rank_mod_p(&m, 2, &RootResidues::new(3).unwrap()).unwrap(), 1);
        let m = vec![vec![FieldElement::from_i64(3), FieldElement::from_i64(6)]];
        assert_eq!(rank_mod_p(&m, 2, &RootResidues::new(3).unwrap()).unwrap(), 0);
    }
}
