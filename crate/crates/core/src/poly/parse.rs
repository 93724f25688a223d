//! Text grammar for polynomials:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'|'/'] factor)*      implicit '*' allowed: 2t1, (..)(..)
//! factor := atom ['^' ['-'] integer]
//! atom   := integer | decimal | t1 | t2 | t3 | '(' expr ')'
//! ```
//!
//! Division is only by nonzero constants or monomials. Negative powers are
//! only allowed on monomials.

use rug::Rational;

use super::{LaurentPoly2, LaurentPoly3};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                if chars.get(i + 1) == Some(&'*') {
                    out.push(Tok::Caret);
                    i += 2;
                } else {
                    out.push(Tok::Star);
                    i += 1;
                }
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Tok::Num(parse_decimal(&text)?));
            }
            't' | 'x' | 'y' | 'z' => {
                if c == 't' {
                    let d = chars.get(i + 1).copied();
                    match d {
                        Some('1') | Some('2') | Some('3') => {
                            out.push(Tok::Var(d.unwrap() as usize - '1' as usize));
                            i += 2;
                        }
                        _ => return Err(Error::Parse(format!("unknown variable at offset {i}"))),
                    }
                } else {
                    out.push(Tok::Var(match c {
                        'x' => 0,
                        'y' => 1,
                        _ => 2,
                    }));
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    return Err(Error::Parse(format!("unknown identifier at offset {i}")));
                }
            }
            _ => return Err(Error::Parse(format!("unexpected character '{c}' at offset {i}"))),
        }
    }
    Ok(out)
}

fn parse_decimal(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad number '{text}'"));
    match text.split_once('.') {
        None => text.parse::<Rational>().map_err(|_| bad()),
        Some((int, frac)) => {
            if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
                return Err(bad());
            }
            let digits = format!("{int}{frac}");
            let num: Rational = digits.parse().map_err(|_| bad())?;
            let den = rug::Integer::from(rug::Integer::u_pow_u(10, frac.len() as u32));
            Ok(num / Rational::from(den))
        }
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<LaurentPoly3> {
        let mut acc = LaurentPoly3::zero();
        let mut sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.add(&t.neg()) };
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly3> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.factor()?;
                    let inv = d
                        .invert_monomial()
                        .ok_or_else(|| Error::Parse("division only by a nonzero monomial".into()))?;
                    acc = acc.mul(&inv);
                }
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentPoly3> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let e = match self.next() {
            Some(Tok::Num(n)) if n.denom() == &1 => n
                .numer()
                .to_u32()
                .filter(|&e| e <= 4096)
                .ok_or_else(|| Error::Parse("exponent out of range".into()))?,
            _ => return Err(Error::Parse("exponent must be an integer".into())),
        };
        let powered = base.pow(e);
        if neg {
            powered
                .invert_monomial()
                .ok_or_else(|| Error::Parse("negative power of a non-monomial".into()))
        } else {
            Ok(powered)
        }
    }

    fn atom(&mut self) -> Result<LaurentPoly3> {
        match self.next() {
            Some(Tok::Num(n)) => {
                let mut p = LaurentPoly3::zero();
                p.add_term([0, 0, 0], n);
                Ok(p)
            }
            Some(Tok::Var(v)) => {
                let mut e = [0; 3];
                e[v] = 1;
                let mut p = LaurentPoly3::zero();
                p.add_term(e, Rational::from(1));
                Ok(p)
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            Some(Tok::Minus) => Ok(self.factor()?.neg()),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse a polynomial in up to three variables. `x, y, z` are accepted as
/// aliases of `t1, t2, t3`.
pub fn parse_laurent3(s: &str) -> Result<LaurentPoly3> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(out)
}

/// Parse a polynomial in `t1, t2`; `t3` is rejected.
pub fn parse_laurent2(s: &str) -> Result<LaurentPoly2> {
    let p = parse_laurent3(s)?;
    if p.uses_t3() {
        return Err(Error::Parse("t3 is not allowed here".into()));
    }
    Ok(LaurentPoly2::from_terms(p.terms().map(|(e, c)| ((e[0], e[1]), c.clone()))))
}

impl std::str::FromStr for LaurentPoly2 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_laurent2(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_four_polynomial() {
        let p = parse_laurent2("(t1^2+1)^2*t2^2 + 2*t1*t2 + 1").unwrap();
        let q = LaurentPoly2::from_int_terms(&[
            (4, 2, 1),
            (2, 2, 2),
            (0, 2, 1),
            (1, 1, 2),
            (0, 0, 1),
        ]);
        assert_eq!(p, q);
    }

    #[test]
    fn implicit_products_rationals_and_laurent() {
        let p = parse_laurent2("2t1 t2 - 3/4 + t1^-1 + 0.5").unwrap();
        let q = LaurentPoly2::from_terms(vec![
            ((1, 1), Rational::from(2)),
            ((0, 0), Rational::from((-1, 4))),
            ((-1, 0), Rational::from(1)),
        ]);
        assert_eq!(p, q);
        assert_eq!(parse_laurent2("x + y + 1").unwrap(), parse_laurent2("t1+t2+1").unwrap());
    }

    #[test]
    fn errors() {
        assert!(parse_laurent2("").is_err());
        assert!(parse_laurent2("t1 +").is_err());
        assert!(parse_laurent2("(t1 + 1").is_err());
        assert!(parse_laurent2("t4").is_err());
        assert!(parse_laurent2("t1 + t3").is_err());
        assert!(parse_laurent2("1/(t1+1)").is_err());
        assert!(parse_laurent2("(t1+1)^-1").is_err());
        assert!(parse_laurent3("1 + t1 + t2 + t3").unwrap().uses_t3());
    }
}
