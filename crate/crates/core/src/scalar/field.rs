//! Multi-quadratic number fields ℚ(√d₁,…,√d_k).
//!
//! An element is a rational combination of basis monomials `√d_S = Π_{d∈S} √d`
//! indexed by subsets `S` of the declared roots. Products reduce through
//! `√d_S · √d_T = (Π_{d∈S∩T} d) · √d_{S△T}`, so arithmetic never needs the
//! descriptor once the elements exist.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::ScalarError;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sorted set of distinct squarefree roots naming one basis monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RootSet(SmallVec<[i64; 3]>);

impl RootSet {
    pub fn empty() -> Self {
        RootSet(SmallVec::new())
    }

    pub fn single(d: i64) -> Self {
        let mut s = SmallVec::new();
        s.push(d);
        RootSet(s)
    }

    pub fn from_sorted(roots: &[i64]) -> Self {
        RootSet(roots.iter().copied().collect())
    }

    pub fn roots(&self) -> &[i64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, d: i64) -> bool {
        self.0.binary_search(&d).is_ok()
    }

    /// Symmetric difference and the integer product over the intersection.
    fn combine(&self, other: &RootSet) -> (RootSet, i64) {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::new();
        let mut factor = 1i64;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    factor *= a[i];
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        (RootSet(out), factor)
    }
}

impl Ord for RootSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for RootSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, d) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *d == -1 {
                f.write_str("i")?;
            } else {
                write!(f, "sqrt({d})")?;
            }
        }
        Ok(())
    }
}

/// Declared square roots adjoined to ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FieldDescriptor {
    roots: Vec<i64>,
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor { roots: Vec::new() }
    }

    pub fn roots(&self) -> &[i64] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        1usize << self.roots.len()
    }

    /// All basis monomials in canonical order.
    pub fn basis(&self) -> Vec<RootSet> {
        let k = self.roots.len();
        let mut out: Vec<RootSet> = (0..1usize << k)
            .map(|mask| {
                let picked: Vec<i64> = (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| self.roots[b])
                    .collect();
                RootSet::from_sorted(&picked)
            })
            .collect();
        out.sort();
        out
    }

    pub fn has_root(&self, d: i64) -> bool {
        self.roots.binary_search(&d).is_ok()
    }

    /// Smallest field containing both descriptors.
    pub fn join(&self, other: &FieldDescriptor) -> Result<FieldDescriptor, ScalarError> {
        let mut all = self.roots.clone();
        all.extend_from_slice(&other.roots);
        all.sort_unstable();
        all.dedup();
        make_field(&all)
    }

    /// Writes `sqrt(k)` as an element of this field, if possible.
    ///
    /// `k` is reduced to `m²·s` with `s` squarefree; `√s` must be a product of
    /// declared roots up to a rational square.
    pub fn sqrt_of(&self, k: i64) -> Result<FieldElement, ScalarError> {
        if k == 0 {
            return Ok(FieldElement::zero());
        }
        let (square, free) = split_square(k);
        if free == 1 {
            return Ok(FieldElement::from_rational(rat(square)));
        }
        let n = self.roots.len();
        for mask in 1..(1usize << n) {
            let subset: Vec<i64> = (0..n)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| self.roots[b])
                .collect();
            let prod: i64 = subset.iter().product();
            let q = free * prod;
            if q < 0 || split_square(q).1 != 1 {
                continue;
            }
            // (c·√d_S)² = c²·prod = free with c = √q / |prod| > 0.
            let c = Rational::new(isqrt(q), BigInt::from(prod.abs()));
            let coeff = c * Rational::from_integer(BigInt::from(square));
            return Ok(FieldElement::monomial(RootSet::from_sorted(&subset), coeff));
        }
        Err(ScalarError::UndeclaredRoot(k))
    }
}

fn isqrt(n: i64) -> BigInt {
    let r = (n as f64).sqrt().round() as i64;
    for c in [r - 1, r, r + 1] {
        if c >= 0 && c * c == n {
            return BigInt::from(c);
        }
    }
    BigInt::from(r)
}

/// `k = square² · free` with `free` squarefree (sign kept on `free`).
fn split_square(k: i64) -> (i64, i64) {
    let sign = if k < 0 { -1 } else { 1 };
    let mut n = k.abs();
    let mut square = 1i64;
    let mut free = 1i64;
    let mut p = 2i64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= p;
        }
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= n;
    (square, sign * free)
}

pub fn squarefree_part(k: i64) -> i64 {
    split_square(k).1
}

/// Builds a descriptor from root integers, reducing each to its squarefree part.
pub fn make_field(roots: &[i64]) -> Result<FieldDescriptor, ScalarError> {
    let mut reduced = Vec::with_capacity(roots.len());
    for &r in roots {
        if r == 0 {
            return Err(ScalarError::InvalidRoot(r));
        }
        let s = squarefree_part(r);
        if s == 1 {
            return Err(ScalarError::InvalidRoot(r));
        }
        if reduced.contains(&s) {
            return Err(ScalarError::DuplicateRoot(r));
        }
        reduced.push(s);
    }
    reduced.sort_unstable();
    let k = reduced.len();
    for mask in 1..(1usize << k) {
        let prod: i64 = (0..k)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| reduced[b])
            .product();
        if prod > 0 && split_square(prod).1 == 1 {
            return Err(ScalarError::DependentRoots(reduced.clone()));
        }
    }
    Ok(FieldDescriptor { roots: reduced })
}

/// Exact element of a multi-quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FieldElement {
    coords: Vec<(RootSet, Rational)>,
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement { coords: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::monomial(RootSet::empty(), q)
    }

    pub fn monomial(basis: RootSet, q: Rational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            FieldElement { coords: vec![(basis, q)] }
        }
    }

    /// `√d` for a declared squarefree root `d`.
    pub fn root(d: i64) -> Self {
        Self::monomial(RootSet::single(d), Rational::one())
    }

    pub fn coords(&self) -> &[(RootSet, Rational)] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coords.len() == 1 && self.coords[0].0.is_empty() && self.coords[0].1.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.coords.as_slice() {
            [] => Some(Rational::zero()),
            [(b, q)] if b.is_empty() => Some(q.clone()),
            _ => None,
        }
    }

    /// Roots that occur in some nonzero coordinate.
    pub fn roots_used(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.coords.iter().flat_map(|(b, _)| b.roots().to_vec()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn from_unsorted(mut items: Vec<(RootSet, Rational)>) -> Self {
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let mut coords: Vec<(RootSet, Rational)> = Vec::with_capacity(items.len());
        for (b, q) in items {
            match coords.last_mut() {
                Some((lb, lq)) if *lb == b => *lq += q,
                _ => coords.push((b, q)),
            }
        }
        coords.retain(|(_, q)| !q.is_zero());
        FieldElement { coords }
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.coords.len() + other.coords.len());
        let (a, b) = (&self.coords, &other.coords);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &a[i].1 + &b[j].1;
                    if !s.is_zero() {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        FieldElement { coords: out }
    }

    pub fn neg(&self) -> Self {
        FieldElement { coords: self.coords.iter().map(|(b, q)| (b.clone(), -q)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        FieldElement { coords: self.coords.iter().map(|(b, c)| (b.clone(), c * q)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let ([(ba, qa)], [(bb, qb)]) = (self.coords.as_slice(), other.coords.as_slice()) {
            if ba.is_empty() {
                return Self::monomial(bb.clone(), qa * qb);
            }
            if bb.is_empty() {
                return Self::monomial(ba.clone(), qa * qb);
            }
        }
        let mut items = Vec::with_capacity(self.coords.len() * other.coords.len());
        for (ba, qa) in &self.coords {
            for (bb, qb) in &other.coords {
                let (basis, factor) = ba.combine(bb);
                items.push((basis, qa * qb * rat(factor)));
            }
        }
        Self::from_unsorted(items)
    }

    /// Multiplicative inverse by successive conjugation; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::from_rational(q.recip()));
        }
        let d = *self.roots_used().last()?;
        let conj = FieldElement {
            coords: self
                .coords
                .iter()
                .map(|(b, q)| (b.clone(), if b.contains(d) { -q } else { q.clone() }))
                .collect(),
        };
        let norm = self.mul(&conj);
        debug_assert!(norm.coords.iter().all(|(b, _)| !b.contains(d)));
        let norm_inv = norm.inv()?;
        Some(conj.mul(&norm_inv))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self.mul(&inv))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// True when the element is a single negative rational multiple of a basis monomial.
    pub(crate) fn is_negative_monomial(&self) -> bool {
        self.coords.len() == 1 && self.coords[0].1.is_negative()
    }

    pub(crate) fn is_monomial(&self) -> bool {
        self.coords.len() == 1
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return f.write_str("0");
        }
        for (idx, (b, q)) in self.coords.iter().enumerate() {
            let abs = q.abs();
            if idx == 0 {
                if q.is_negative() {
                    f.write_str("-")?;
                }
            } else if q.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if b.is_empty() {
                fmt_rational(&abs, f)?;
            } else if abs.is_one() {
                write!(f, "{b}")?;
            } else {
                fmt_rational(&abs, f)?;
                write!(f, "*{b}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biquadratic_basis() {
        let f = make_field(&[-1, 2]).unwrap();
        let basis: Vec<String> = f.basis().iter().map(|b| b.to_string()).collect();
        assert_eq!(basis, vec!["", "i", "sqrt(2)", "i*sqrt(2)"]);
        assert_eq!(f.degree(), 4);
    }

    #[test]
    fn plain_rationals() {
        assert_eq!(make_field(&[]).unwrap().degree(), 1);
    }

    #[test]
    fn roots_are_reduced() {
        assert_eq!(make_field(&[8]).unwrap().roots(), &[2]);
        assert_eq!(make_field(&[12, -4]).unwrap().roots(), &[-1, 3]);
        assert_eq!(make_field(&[2]).unwrap(), make_field(&[2]).unwrap());
    }

    #[test]
    fn bad_roots() {
        assert!(matches!(make_field(&[0]), Err(ScalarError::InvalidRoot(0))));
        assert!(matches!(make_field(&[4]), Err(ScalarError::InvalidRoot(4))));
        assert!(matches!(make_field(&[2, 8]), Err(ScalarError::DuplicateRoot(8))));
        assert!(matches!(make_field(&[2, 3, 6]), Err(ScalarError::DependentRoots(_))));
    }

    #[test]
    fn root_squares() {
        for d in [-1, 2, 7, -3] {
            let r = FieldElement::root(d);
            assert_eq!(r.mul(&r), FieldElement::from_i64(d));
        }
    }

    #[test]
    fn conjugate_inverse() {
        // (1 + i + sqrt(2)) * inverse == 1
        let a = FieldElement::one().add(&FieldElement::root(-1)).add(&FieldElement::root(2));
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).is_one());
    }

    #[test]
    fn sqrt_lookup() {
        let f = make_field(&[-1, 2]).unwrap();
        assert_eq!(f.sqrt_of(-1).unwrap(), FieldElement::root(-1));
        assert_eq!(f.sqrt_of(8).unwrap(), FieldElement::root(2).scale(&rat(2)));
        let s = f.sqrt_of(-2).unwrap();
        assert_eq!(s.mul(&s), FieldElement::from_i64(-2));
        assert!(matches!(f.sqrt_of(3), Err(ScalarError::UndeclaredRoot(3))));
        assert_eq!(f.sqrt_of(9).unwrap(), FieldElement::from_i64(3));
    }
}
