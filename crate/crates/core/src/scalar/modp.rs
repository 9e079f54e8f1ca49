//! Reduction of exact values into prime fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::field::{FieldElement, Rational};
use super::poly::Polynomial;
use super::ratfunc::RatFunc;
use crate::error::ScalarError;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (a != 0).then(|| pow_mod(a, p - 2, p))
}

/// Smallest `r` in `0..p` with `r² ≡ d (mod p)`.
pub fn sqrt_mod(d: i64, p: u64) -> Option<u64> {
    let target = d.rem_euclid(p as i64) as u64;
    (0..p).find(|r| r * r % p == target)
}

pub fn residue_of_int(n: &BigInt, p: u64) -> u64 {
    let m = n.mod_floor(&BigInt::from(p));
    m.to_u64().expect("residue fits")
}

pub fn reduce_rational(q: &Rational, p: u64) -> Result<u64, ScalarError> {
    let num = residue_of_int(q.numer(), p);
    let den = residue_of_int(q.denom(), p);
    let inv = inv_mod(den, p).ok_or(ScalarError::NonInvertibleDenominator(p))?;
    Ok(num * inv % p)
}

/// Residues chosen for the adjoined square roots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootResidues {
    pub p: u64,
    values: BTreeMap<i64, u64>,
}

impl RootResidues {
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(RootResidues { p, values: BTreeMap::new() })
    }

    /// Picks the smallest square root mod `p` for every root.
    pub fn auto(roots: &[i64], p: u64) -> Result<Self, ScalarError> {
        let mut out = Self::new(p)?;
        for &d in roots {
            let r = sqrt_mod(d, p).ok_or(ScalarError::RootHasNoResidue { root: d, p })?;
            out.values.insert(d, r);
        }
        Ok(out)
    }

    pub fn set(&mut self, root: i64, residue: u64) -> Result<(), ScalarError> {
        let p = self.p;
        if (residue * residue) % p != root.rem_euclid(p as i64) as u64 {
            return Err(ScalarError::BadRootResidue { root, residue, p });
        }
        self.values.insert(root, residue % p);
        Ok(())
    }

    pub fn get(&self, root: i64) -> Result<u64, ScalarError> {
        match self.values.get(&root) {
            Some(r) => Ok(*r),
            None => sqrt_mod(root, self.p).ok_or(ScalarError::RootHasNoResidue { root, p: self.p }),
        }
    }
}

pub fn reduce_field(x: &FieldElement, roots: &RootResidues) -> Result<u64, ScalarError> {
    let p = roots.p;
    let mut acc = 0u64;
    for (basis, q) in x.coords() {
        let mut term = reduce_rational(q, p)?;
        for &d in basis.roots() {
            term = term * roots.get(d)? % p;
        }
        acc = (acc + term) % p;
    }
    Ok(acc)
}

pub fn reduce_poly(
    poly: &Polynomial,
    roots: &RootResidues,
    assignment: &BTreeMap<String, u64>,
) -> Result<u64, ScalarError> {
    let p = roots.p;
    let mut acc = 0u64;
    for (m, c) in poly.terms() {
        let mut term = reduce_field(c, roots)?;
        for (v, e) in m.factors() {
            let val = assignment.get(&**v).ok_or_else(|| ScalarError::MissingParameter(v.to_string()))?;
            term = term * pow_mod(*val, *e as u64, p) % p;
        }
        acc = (acc + term) % p;
    }
    Ok(acc)
}

/// Value of `r` in F_p; roots map through `roots`, parameters through `assignment`.
pub fn reduce_mod_p(
    r: &RatFunc,
    roots: &RootResidues,
    assignment: &BTreeMap<String, u64>,
) -> Result<u64, ScalarError> {
    let p = roots.p;
    let num = reduce_poly(r.num(), roots, assignment)?;
    let den = reduce_poly(r.den(), roots, assignment)?;
    let inv = inv_mod(den, p).ok_or(ScalarError::NonInvertibleDenominator(p))?;
    Ok(num * inv % p)
}

/// Residue as a signed representative in `(-p/2, p/2]`.
pub fn centered(x: u64, p: u64) -> i64 {
    if x > p / 2 {
        x as i64 - p as i64
    } else {
        x as i64
    }
}

pub fn is_zero_mod(q: &Rational, p: u64) -> bool {
    q.numer().mod_floor(&BigInt::from(p)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::expr::parse_expr;
    use crate::scalar::field::{make_field, rat_frac, FieldDescriptor};

    #[test]
    fn rationals_mod_p() {
        assert_eq!(reduce_rational(&rat_frac(1, 2), 5), Ok(3));
        assert_eq!(reduce_rational(&rat_frac(-1, 3), 7), Ok(2));
        assert_eq!(reduce_rational(&rat_frac(1, 3), 3), Err(ScalarError::NonInvertibleDenominator(3)));
    }

    #[test]
    fn gaussian_unit_mod_5() {
        let f = make_field(&[-1]).unwrap();
        let i = parse_expr("i", &f, None).unwrap();
        let mut roots = RootResidues::new(5).unwrap();
        roots.set(-1, 2).unwrap();
        assert_eq!(reduce_mod_p(&i, &roots, &BTreeMap::new()), Ok(2));
        assert!(roots.set(-1, 1).is_err());
        assert_eq!(RootResidues::auto(&[-1], 3), Err(ScalarError::RootHasNoResidue { root: -1, p: 3 }));
    }

    #[test]
    fn parameters_mod_p() {
        let r = parse_expr("3*d11", &FieldDescriptor::rationals(), None).unwrap();
        let roots = RootResidues::new(3).unwrap();
        let at: BTreeMap<String, u64> = [("d11".to_string(), 1)].into();
        assert_eq!(reduce_mod_p(&r, &roots, &at), Ok(0));
        let r = parse_expr("3*R33/(1+R33)", &FieldDescriptor::rationals(), None).unwrap();
        let roots = RootResidues::new(5).unwrap();
        let at: BTreeMap<String, u64> = [("R33".to_string(), 4)].into();
        assert_eq!(reduce_mod_p(&r, &roots, &at), Err(ScalarError::NonInvertibleDenominator(5)));
    }
}
