//! Text form of object expressions.
//!
//! ```text
//! object := term ('+' term)* | '0'
//! term   := indec ('[' int ']')? ('^' nat)?
//! indec  := 'P(' nat ')' | 'I(' nat ')' | 'R(' point ',' nat ')'
//!         | 'S1' | 'S2' | 'O(' int ')' | 'Ox(' point ')'
//! point  := '[' rational ':' rational ']'
//! ```
//!
//! `O(n)` is read through the tilting dictionary and `Ox(p)` is `R(p,1)`.
//! [`format_object`] always writes the canonical `P`/`I`/`R` form.

use num::{BigInt, BigUint, One, Zero};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Q};
use crate::objects::{line_bundle_summand, Indec, ObjectExpr, ProjPoint, Summand};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected {token:?}"))
        }
    }

    fn number_text(&mut self, signed: bool) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        if signed && self.pos < bytes.len() && (bytes[self.pos] == b'-' || bytes[self.pos] == b'+') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return self.err("expected a number");
        }
        Ok(&self.src[start..self.pos])
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.pos;
        let text = self.number_text(true)?;
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn nat(&mut self) -> Result<u32> {
        let start = self.pos;
        let text = self.number_text(false)?;
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("natural number out of range")
        })
    }

    fn big_nat(&mut self) -> Result<BigUint> {
        let text = self.number_text(false)?;
        Ok(text.parse().expect("digits only"))
    }

    fn rational(&mut self) -> Result<Q> {
        let start = self.pos;
        let mut text = self.number_text(true)?.to_string();
        if self.eat("/") {
            text.push('/');
            text.push_str(self.number_text(false)?);
        }
        parse_rational(&text).or_else(|e| {
            self.pos = start;
            self.err(e.to_string())
        })
    }

    fn point(&mut self) -> Result<ProjPoint> {
        let start = self.pos;
        self.expect("[")?;
        let lambda = self.rational()?;
        self.expect(":")?;
        let mu = self.rational()?;
        self.expect("]")?;
        ProjPoint::new(lambda, mu).or_else(|_| {
            self.pos = start;
            self.err("point [0:0] is not in P^1")
        })
    }

    fn indec(&mut self) -> Result<(Indec, i64)> {
        if self.eat("S1") {
            return Ok((Indec::S1, 0));
        }
        if self.eat("S2") {
            return Ok((Indec::S2, 0));
        }
        if self.eat("P(") {
            let n = self.nat()?;
            self.expect(")")?;
            return Ok((Indec::Preproj(n), 0));
        }
        if self.eat("I(") {
            let n = self.nat()?;
            self.expect(")")?;
            return Ok((Indec::Preinj(n), 0));
        }
        if self.eat("R(") {
            let x = self.point()?;
            self.expect(",")?;
            let at = self.pos;
            let n = self.nat()?;
            if n == 0 {
                self.pos = at;
                return self.err("regular length must be at least 1");
            }
            self.expect(")")?;
            return Ok((Indec::Regular(x, n), 0));
        }
        if self.eat("Ox(") {
            let x = self.point()?;
            self.expect(")")?;
            return Ok((Indec::Regular(x, 1), 0));
        }
        if self.eat("O(") {
            let at = self.pos;
            let n = self.int()?;
            if n.unsigned_abs() > u32::MAX as u64 / 2 {
                self.pos = at;
                return self.err("line bundle degree out of range");
            }
            self.expect(")")?;
            return Ok(line_bundle_summand(n));
        }
        self.err("expected an indecomposable (P, I, R, S1, S2, O, Ox)")
    }

    fn term(&mut self) -> Result<(Summand, BigUint)> {
        let (indec, base_shift) = self.indec()?;
        let mut shift = base_shift;
        if self.eat("[") {
            shift += self.int()?;
            self.expect("]")?;
        }
        let mut mult = BigUint::one();
        if self.eat("^") {
            let at = self.pos;
            mult = self.big_nat()?;
            if mult.is_zero() {
                self.pos = at;
                return self.err("multiplicity must be at least 1");
            }
        }
        Ok((Summand::new(indec, shift), mult))
    }

    fn object(&mut self) -> Result<ObjectExpr> {
        let mut obj = ObjectExpr::zero();
        if self.peek() == Some('0') {
            self.pos += 1;
        } else {
            loop {
                let (s, m) = self.term()?;
                obj.add_summand(s, m);
                if !self.eat("+") {
                    break;
                }
            }
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(obj)
    }
}

pub fn parse_object(text: &str) -> Result<ObjectExpr> {
    Parser { src: text, pos: 0 }.object()
}

pub fn parse_point(text: &str) -> Result<ProjPoint> {
    let mut p = Parser { src: text, pos: 0 };
    let x = p.point()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(x)
}

fn format_term(s: &Summand, m: &BigUint) -> String {
    let mut out = s.indec.to_string();
    if s.shift != 0 {
        out.push_str(&format!("[{}]", s.shift));
    }
    if !m.is_one() {
        out.push_str(&format!("^{m}"));
    }
    out
}

pub fn format_object(x: &ObjectExpr) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.terms()
        .map(|(s, m)| format_term(s, m))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Integer rendering helper shared by the JSON writers.
pub(crate) fn int_json(n: &BigInt) -> serde_json::Value {
    use num::ToPrimitive;
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::class_of;
    use crate::lattice::KClassA;

    #[test]
    fn grammar_examples() {
        let x = parse_object("P(1)[1] + R([1:2],2)").unwrap();
        assert_eq!(x.num_terms(), 2);
        assert_eq!(format_object(&x), "P(1)[1] + R([1:2],2)");
        assert!(parse_object("0").unwrap().is_zero());
        let s1 = parse_object("O(-1)[1]").unwrap();
        assert_eq!(s1, ObjectExpr::indec(Indec::S1));
        assert_eq!(class_of(&s1), KClassA::new(1, 0));
    }

    #[test]
    fn sugar_and_sums() {
        let x = parse_object(" S2 + O(0) + Ox([2:4]) ^3").unwrap();
        assert_eq!(format_object(&x), "P(0)^2 + R([1:2],1)^3");
        let y = parse_object("R([0:5],2)[-3]^4").unwrap();
        assert_eq!(format_object(&y), "R([0:1],2)[-3]^4");
        let z = parse_object("O(-3)[2]").unwrap();
        assert_eq!(format_object(&z), "I(2)[1]");
        let r = parse_object("R([3:-1/2],1)").unwrap();
        assert_eq!(format_object(&r), "R([1:-1/6],1)");
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("P(1) +", 6),
            ("Q(1)", 0),
            ("R([0:0],1)", 2),
            ("R([1:0],0)", 8),
            ("P(1)^0", 5),
            ("P(1) P(2)", 5),
            ("R([1:1/0],1)", 5),
        ];
        for (text, pos) in cases {
            match parse_object(text) {
                Err(Error::Parse { pos: p, .. }) => assert_eq!(p, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
