//! Coefficient expressions: integers, `+ - * / ^ ( )`, parameter names, `i`, `sqrt(k)`.

use num_bigint::BigInt;

use super::field::{FieldDescriptor, FieldElement, Rational};
use super::ratfunc::RatFunc;
use crate::error::ScalarError;

/// Names that cannot be used as parameters.
pub const RESERVED: [&str; 2] = ["i", "sqrt"];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&s)
}

/// Parses `src` over `field`; with `params = Some(..)` every identifier must be declared.
pub fn parse_expr(src: &str, field: &FieldDescriptor, params: Option<&[String]>) -> Result<RatFunc, ScalarError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, field, params };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let r = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FieldDescriptor,
    params: Option<&'a [String]>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ScalarError {
        ScalarError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat(b'/') {
                let d = self.unary()?;
                acc = acc.div(&d).ok_or(ScalarError::DivisionByZero)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ScalarError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ScalarError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<RatFunc, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatFunc::constant(FieldElement::from_rational(Rational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                match name {
                    "i" => Ok(RatFunc::constant(self.field.sqrt_of(-1)?)),
                    "sqrt" => {
                        if !self.eat(b'(') {
                            return Err(self.error("expected `(` after sqrt"));
                        }
                        let negative = self.eat(b'-');
                        self.skip_ws();
                        let k = self.integer()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        let k: i64 = k.try_into().map_err(|_| self.error("radicand too large"))?;
                        Ok(RatFunc::constant(self.field.sqrt_of(if negative { -k } else { k })?))
                    }
                    _ => {
                        if let Some(params) = self.params {
                            if !params.iter().any(|p| p == name) {
                                return Err(ScalarError::UndeclaredParameter(name.to_string()));
                            }
                        }
                        Ok(RatFunc::var(name))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::field::make_field;

    fn q() -> FieldDescriptor {
        FieldDescriptor::rationals()
    }

    #[test]
    fn arithmetic() {
        let r = parse_expr("(x^2 - 1)/(x - 1)", &q(), None).unwrap();
        assert_eq!(r.to_string(), "x + 1");
        let r = parse_expr("1/2*e3 + -3", &q(), None).unwrap();
        assert_eq!(r.to_string(), "1/2*e3 - 3");
    }

    #[test]
    fn roots() {
        let f = make_field(&[-1, 7]).unwrap();
        let r = parse_expr("(4*N22 - N31 - i*N31*sqrt(7))/4", &f, None).unwrap();
        assert_eq!(r.to_string(), "N22 + (-1/4 - 1/4*i*sqrt(7))*N31");
        assert_eq!(
            parse_expr("sqrt(3)", &make_field(&[2]).unwrap(), None),
            Err(ScalarError::UndeclaredRoot(3))
        );
        assert_eq!(parse_expr("i", &q(), None), Err(ScalarError::UndeclaredRoot(-1)));
    }

    #[test]
    fn declared_params() {
        let params = vec!["a".to_string()];
        assert!(parse_expr("a*a", &q(), Some(&params)).is_ok());
        assert_eq!(
            parse_expr("a*b", &q(), Some(&params)),
            Err(ScalarError::UndeclaredParameter("b".into()))
        );
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "1 +", "(x", "x y", "3x", "1/0"] {
            assert!(parse_expr(bad, &q(), None).is_err(), "{bad}");
        }
    }

    #[test]
    fn canonical_strings_reparse() {
        let f = make_field(&[-1, 2]).unwrap();
        for src in ["3*R33/(1+R33)", "-x^2*y + (1+i)*z", "lambda*(-lambda + 2*r22)", "1/(x*y)", "i*(i*lambda + sqrt(2)*lambda)/3"] {
            let r = parse_expr(src, &f, None).unwrap();
            let again = parse_expr(&r.to_string(), &f, None).unwrap();
            assert_eq!(r, again);
            assert_eq!(r.to_string(), again.to_string());
        }
    }
}
