use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::field::FieldElement;
use super::poly::{Polynomial, Var};
use crate::error::ScalarError;

/// Quotient of polynomials; the denominator is never zero.
///
/// Stored with `den = 1` whenever the denominator divides the numerator and with
/// a monic denominator otherwise. Equality is decided by cross-multiplication.
#[derive(Clone, Debug, Default)]
pub struct RatFunc {
    num: Polynomial,
    den: Polynomial,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_poly(Polynomial::from_i64(n))
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(Polynomial::var(name))
    }

    pub fn from_poly(num: Polynomial) -> Self {
        RatFunc { num, den: Polynomial::one() }
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return RatFunc { num, den };
        }
        if let Some(c) = den.as_constant() {
            let inv = c.inv().expect("nonzero constant denominator");
            return RatFunc { num: num.scale(&inv), den: Polynomial::one() };
        }
        if let Some(q) = num.div_exact(&den) {
            return RatFunc { num: q, den: Polynomial::one() };
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if lc.is_one() {
            return RatFunc { num, den };
        }
        let inv = lc.inv().expect("nonzero leading coefficient");
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v
    }

    pub fn roots_used(&self) -> BTreeSet<i64> {
        let mut r = self.num.roots_used();
        r.extend(self.den.roots_used());
        r
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return RatFunc { num, den: Polynomial::one() };
            }
            return Self::normalized(num, self.den.clone());
        }
        if other.den.is_one() {
            return Self::normalized(self.num.add(&other.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return Self::normalized(self.num.mul(&other.den).add(&other.num), other.den.clone());
        }
        if let Some(q) = other.den.div_exact(&self.den) {
            return Self::normalized(self.num.mul(&q).add(&other.num), other.den.clone());
        }
        if let Some(q) = self.den.div_exact(&other.den) {
            return Self::normalized(self.num.add(&other.num.mul(&q)), self.den.clone());
        }
        Self::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: self.num.mul(&other.num), den: Polynomial::one() };
        }
        // Cancel a whole denominator against the opposite numerator when possible.
        if let Some(q) = other.num.div_exact(&self.den) {
            return Self::normalized(self.num.mul(&q), other.den.clone());
        }
        if let Some(q) = self.num.div_exact(&other.den) {
            return Self::normalized(q.mul(&other.num), self.den.clone());
        }
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &FieldElement) -> RatFunc {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        other.inv().map(|inv| self.mul(&inv))
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        let mut acc = RatFunc::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact evaluation at a full assignment.
    pub fn substitute(&self, values: &BTreeMap<String, FieldElement>) -> Result<FieldElement, ScalarError> {
        let den = self.den.eval(values)?;
        let num = self.num.eval(values)?;
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes(format_point(&self.den, values)));
        }
        Ok(num.mul(&den.inv().expect("nonzero")))
    }

    /// Substitutes values for a subset of the variables.
    pub fn substitute_partial(&self, values: &BTreeMap<String, FieldElement>) -> Result<RatFunc, ScalarError> {
        let den = self.den.substitute(values);
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes(format_point(&self.den, values)));
        }
        Ok(Self::normalized(self.num.substitute(values), den))
    }

    /// Substitutes rational functions for variables.
    pub fn compose(&self, values: &BTreeMap<String, RatFunc>) -> Result<RatFunc, ScalarError> {
        let eval = |p: &Polynomial| -> RatFunc {
            let mut acc = RatFunc::zero();
            for (m, c) in p.terms() {
                let mut t = RatFunc::constant(c.clone());
                for (v, e) in m.factors() {
                    let base = values.get(&**v).cloned().unwrap_or_else(|| RatFunc::var(v));
                    t = t.mul(&base.pow(*e));
                }
                acc = acc.add(&t);
            }
            acc
        };
        let num = eval(&self.num);
        let den = eval(&self.den);
        num.div(&den).ok_or(ScalarError::DivisionByZero)
    }

    /// Nonconstant denominator, if any.
    pub fn side_condition(&self) -> Option<&Polynomial> {
        (!self.den.is_one()).then_some(&self.den)
    }
}

fn format_point(den: &Polynomial, values: &BTreeMap<String, FieldElement>) -> String {
    let parts: Vec<String> = den
        .variables()
        .iter()
        .filter_map(|v| values.get(&**v).map(|x| format!("{v} = {x}")))
        .collect();
    format!("{{{}}} (denominator {den})", parts.join(", "))
}

/// `true` iff the numerator is the zero polynomial.
pub fn ratfunc_is_zero(r: &RatFunc) -> bool {
    r.is_zero()
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RatFunc {}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() == 1 {
            self.num.to_string()
        } else {
            format!("({})", self.num)
        };
        let bare_den = self.den.num_terms() == 1
            && self.den.leading().is_some_and(|(m, c)| c.is_one() && m.factors().len() == 1);
        if bare_den {
            write!(f, "{num}/{}", self.den)
        } else {
            write!(f, "{num}/({})", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> RatFunc {
        RatFunc::var(name)
    }

    #[test]
    fn cancels_to_polynomial() {
        let x = v("x");
        let one = RatFunc::one();
        let q = x.mul(&x).sub(&one).div(&x.sub(&one)).unwrap();
        assert!(q.is_polynomial());
        assert!(ratfunc_is_zero(&q.sub(&x.add(&one))));
    }

    #[test]
    fn nonzero_polynomial() {
        let l = v("lambda");
        let r = l.mul(&l).add(&l.scale(&FieldElement::from_i64(3))).add(&RatFunc::one());
        assert!(!ratfunc_is_zero(&r));
    }

    #[test]
    fn gaussian_norm() {
        let i = RatFunc::constant(FieldElement::root(-1));
        let one = RatFunc::one();
        let r = one.add(&i).mul(&one.sub(&i)).sub(&RatFunc::from_i64(2));
        assert!(ratfunc_is_zero(&r));
    }

    #[test]
    fn substitution_and_poles() {
        let r33 = v("R33");
        let f = r33.scale(&FieldElement::from_i64(3)).div(&RatFunc::one().add(&r33)).unwrap();
        let mut at = BTreeMap::new();
        at.insert("R33".to_string(), FieldElement::from_i64(2));
        assert_eq!(f.substitute(&at).unwrap(), FieldElement::from_i64(2));
        at.insert("R33".to_string(), FieldElement::from_i64(-1));
        assert!(matches!(f.substitute(&at), Err(ScalarError::DenominatorVanishes(_))));
        assert!(matches!(f.substitute(&BTreeMap::new()), Err(ScalarError::MissingParameter(_))));
    }

    #[test]
    fn display_forms() {
        let r33 = v("R33");
        let f = r33.scale(&FieldElement::from_i64(3)).div(&RatFunc::one().add(&r33)).unwrap();
        assert_eq!(f.to_string(), "3*R33/(R33 + 1)");
        let g = RatFunc::one().div(&v("x")).unwrap();
        assert_eq!(g.to_string(), "1/x");
    }
}
