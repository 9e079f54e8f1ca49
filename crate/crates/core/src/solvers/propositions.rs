//! Exhaustive F_p checks of the relations between Nijenhuis, Rota-Baxter and weighted
//! derivation operators on a constant ternary bracket.

use serde::Serialize;

use super::fp::{all_points, check_prime, guard_single, CompiledSystem, FpSolution};
use crate::algebra::TernaryStructure;
use crate::error::SolverError;
use crate::operators::{ClassTag, OperatorClass};
use crate::scalar::modp::{inv_mod, RootResidues};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Proposition {
    /// `N² = 0`: Nijenhuis iff Rota-Baxter of weight 0.
    SquareZero,
    /// `N² = N` and Rota-Baxter of weight −1 implies Nijenhuis.
    Idempotent,
    /// The inverse of an invertible Rota-Baxter operator of weight λ is a derivation of weight λ.
    InverseRotaBaxter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropositionCheck {
    pub proposition: Proposition,
    pub p: u64,
    /// Matrices satisfying the hypothesis.
    pub hypotheses: u64,
    pub holds: bool,
    /// First counterexamples in lexicographic order.
    pub counterexamples: Vec<FpSolution>,
}

const WITNESS_LIMIT: usize = 16;

/// Row-major `n×n` product over F_p.
pub fn mat_mul_mod(a: &[u64], b: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0; n * n];
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] = (0..n).map(|k| a[r * n + k] * b[k * n + c] % p).sum::<u64>() % p;
        }
    }
    out
}

/// Inverse over F_p by Gauss-Jordan elimination; `None` when singular.
pub fn mat_inv_mod(a: &[u64], n: usize, p: u64) -> Option<Vec<u64>> {
    let w = 2 * n;
    let mut m = vec![0u64; n * w];
    for r in 0..n {
        m[r * w..r * w + n].copy_from_slice(&a[r * n..r * n + n]);
        m[r * w + n + r] = 1;
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r * w + col] % p != 0)?;
        for k in 0..w {
            m.swap(pivot * w + k, col * w + k);
        }
        let inv = inv_mod(m[col * w + col], p)?;
        for k in 0..w {
            m[col * w + k] = m[col * w + k] * inv % p;
        }
        for r in (0..n).filter(|&r| r != col) {
            let f = m[r * w + col];
            if f != 0 {
                for k in 0..w {
                    m[r * w + k] = (m[r * w + k] + (p - f) * m[col * w + k]) % p;
                }
            }
        }
    }
    Some((0..n).flat_map(|r| m[r * w + n..r * w + w].to_vec()).collect())
}

fn finish(proposition: Proposition, p: u64, hypotheses: u64, bad: Vec<FpSolution>) -> PropositionCheck {
    PropositionCheck { proposition, p, hypotheses, holds: bad.is_empty(), counterexamples: bad }
}

fn push(bad: &mut Vec<FpSolution>, weight: Option<u64>, entries: &[u64]) {
    if bad.len() < WITNESS_LIMIT {
        bad.push(FpSolution { weight, entries: entries.to_vec() });
    }
}

fn system(t: &TernaryStructure, tag: ClassTag, roots: &RootResidues) -> Result<CompiledSystem, SolverError> {
    CompiledSystem::ternary(t, &OperatorClass::new(tag), roots)
}

/// Over every `n×n` matrix with `N² = 0`: Nijenhuis iff Rota-Baxter of weight 0.
pub fn square_zero_check(t: &TernaryStructure, p: u64) -> Result<PropositionCheck, SolverError> {
    check_prime(p)?;
    let n = t.dim();
    guard_single(p, n * n)?;
    let roots = RootResidues::new(p)?;
    let nij = system(t, ClassTag::Nijenhuis, &roots)?;
    let rb = system(t, ClassTag::RotaBaxter, &roots)?;
    let mut hyp = 0;
    let mut bad = Vec::new();
    for m in all_points(p, n * n) {
        if mat_mul_mod(&m, &m, n, p).iter().any(|&x| x != 0) {
            continue;
        }
        hyp += 1;
        if nij.satisfied(&m, None) != rb.satisfied(&m, Some(0)) {
            push(&mut bad, None, &m);
        }
    }
    Ok(finish(Proposition::SquareZero, p, hyp, bad))
}

/// Over every idempotent Rota-Baxter operator of weight −1: Nijenhuis.
pub fn idempotent_check(t: &TernaryStructure, p: u64) -> Result<PropositionCheck, SolverError> {
    check_prime(p)?;
    let n = t.dim();
    guard_single(p, n * n)?;
    let roots = RootResidues::new(p)?;
    let nij = system(t, ClassTag::Nijenhuis, &roots)?;
    let rb = system(t, ClassTag::RotaBaxter, &roots)?;
    let minus_one = p - 1;
    let mut hyp = 0;
    let mut bad = Vec::new();
    for m in all_points(p, n * n) {
        if mat_mul_mod(&m, &m, n, p) != m || !rb.satisfied(&m, Some(minus_one)) {
            continue;
        }
        hyp += 1;
        if !nij.satisfied(&m, None) {
            push(&mut bad, Some(minus_one), &m);
        }
    }
    Ok(finish(Proposition::Idempotent, p, hyp, bad))
}

/// Over every invertible Rota-Baxter operator of every weight in F_p: the inverse is a
/// derivation of the same weight.
pub fn inverse_rota_baxter_check(t: &TernaryStructure, p: u64) -> Result<PropositionCheck, SolverError> {
    check_prime(p)?;
    let n = t.dim();
    guard_single(p, n * n)?;
    let roots = RootResidues::new(p)?;
    let rb = system(t, ClassTag::RotaBaxter, &roots)?;
    let der = system(t, ClassTag::DerivationWeighted, &roots)?;
    let mut hyp = 0;
    let mut bad = Vec::new();
    for w in 0..p {
        for m in all_points(p, n * n) {
            if !rb.satisfied(&m, Some(w)) {
                continue;
            }
            let Some(inv) = mat_inv_mod(&m, n, p) else { continue };
            hyp += 1;
            if !der.satisfied(&inv, Some(w)) {
                push(&mut bad, Some(w), &m);
            }
        }
    }
    Ok(finish(Proposition::InverseRotaBaxter, p, hyp, bad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{FieldDescriptor, RatFunc};

    #[test]
    fn inverse_mod_p() {
        let a = [2, 1, 1, 1];
        let inv = mat_inv_mod(&a, 2, 5).unwrap();
        assert_eq!(mat_mul_mod(&a, &inv, 2, 5), vec![1, 0, 0, 1]);
        assert_eq!(mat_inv_mod(&[1, 2, 2, 4], 2, 5), None);
    }

    #[test]
    fn zero_algebra_satisfies_everything() {
        let t = TernaryStructure::zero(2);
        for check in [square_zero_check, idempotent_check, inverse_rota_baxter_check] {
            assert!(check(&t, 3).unwrap().holds);
        }
    }

    #[test]
    fn one_dimensional_counts() {
        let t = TernaryStructure::new("one", 1, FieldDescriptor::rationals(), vec![]).with([1, 1, 1], &[(1, RatFunc::one())]);
        let c = square_zero_check(&t, 3).unwrap();
        assert_eq!(c.hypotheses, 1);
        assert!(c.holds);
    }
}
