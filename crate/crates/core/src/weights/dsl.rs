//! Text form of weights:
//!
//! ```text
//! pow:<alpha>            powlog:<alpha>,<beta>      scale:<c>*<expr>
//! prod:<expr>;<expr>     powof:<expr>^<e>           pw:[(x0,x1,<expr>),(x1,x2,<expr>),...]
//! refl:<c>:<expr>        shift:<d>:<expr>           inv:<o>:<expr>
//! tail:up|lo:<endpoint>:<p>:<expr>
//! ```
//!
//! Numbers are decimals, `n/d` rationals, or `inf`.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exponent::{ratio_to_scalar, Exponent, Rational};
use crate::scalar::Scalar;

use super::expr::{PieceExpr, TailSide, WeightExpr};

/// Recursive-descent reader over DSL text, shared with the space-spec grammar.
pub struct DslReader<'a> {
    src: &'a str,
    pos: usize,
}

/// A parsed number: exact when it came from a decimal or rational literal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
    PosInf,
    NegInf,
}

impl Number {
    pub fn to_scalar<T: Scalar>(self) -> T {
        match self {
            Number::Exact(r) => ratio_to_scalar(r),
            Number::Float(x) => T::from_f64(x).unwrap_or_else(T::nan),
            Number::PosInf => T::infinity(),
            Number::NegInf => T::neg_infinity(),
        }
    }
}

impl<'a> DslReader<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".into());
            Err(self.error(format!("expected '{c}', found {found}")))
        }
    }

    pub fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().chars().take_while(|c| c.is_ascii_alphabetic()).count();
        if len == 0 {
            return Err(self.error("expected a keyword"));
        }
        self.pos += len;
        Ok(&self.src[start..self.pos])
    }

    pub fn number(&mut self) -> Result<Number> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        for (lit, val) in [("-inf", Number::NegInf), ("+inf", Number::PosInf), ("inf", Number::PosInf)] {
            if rest.starts_with(lit) {
                self.pos += lit.len();
                return Ok(val);
            }
        }
        let mut len = 0;
        let bytes = rest.as_bytes();
        while len < bytes.len() {
            let c = bytes[len] as char;
            let sign_ok = (c == '-' || c == '+')
                && (len == 0 || matches!(bytes[len - 1] as char, 'e' | 'E' | '/'));
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || c == '/' || sign_ok {
                len += 1;
            } else {
                break;
            }
        }
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        let text = &rest[..len];
        let parsed = parse_number_text(text).ok_or_else(|| Error::Parse {
            pos: start,
            msg: format!("malformed number '{text}'"),
        })?;
        self.pos += len;
        Ok(parsed)
    }

    pub fn scalar<T: Scalar>(&mut self) -> Result<T> {
        Ok(self.number()?.to_scalar())
    }

    /// Positive exponent, exact when written as a decimal or rational; `inf` allowed.
    pub fn exponent(&mut self) -> Result<Exponent> {
        let start = self.pos;
        match self.number()? {
            Number::Exact(r) => Exponent::from_ratio(r).map_err(|e| Error::Parse { pos: start, msg: e.to_string() }),
            Number::PosInf => Ok(Exponent::Infinite),
            Number::Float(x) => crate::exponent::ratio_from_f64(x)
                .ok_or_else(|| Error::Parse { pos: start, msg: format!("exponent {x} not representable") })
                .and_then(|r| Exponent::from_ratio(r).map_err(|e| Error::Parse { pos: start, msg: e.to_string() })),
            Number::NegInf => Err(Error::Parse { pos: start, msg: "exponent must be positive".into() }),
        }
    }

    pub fn weight<T: Scalar>(&mut self) -> Result<WeightExpr<T>> {
        let start = self.pos;
        let kw = self.ident()?;
        self.expect(':')?;
        Ok(match kw {
            "pow" => WeightExpr::Power { alpha: self.scalar()? },
            "powlog" => {
                let alpha = self.scalar()?;
                self.expect(',')?;
                WeightExpr::PowerLog { alpha, beta: self.scalar()? }
            }
            "scale" => {
                let c = self.scalar()?;
                self.expect('*')?;
                WeightExpr::Scaled { c, inner: Box::new(self.weight()?) }
            }
            "prod" => {
                let l = self.weight()?;
                self.expect(';')?;
                let r = self.weight()?;
                WeightExpr::Product(Box::new(l), Box::new(r))
            }
            "powof" => {
                let inner = self.weight()?;
                self.expect('^')?;
                WeightExpr::PowerOf { inner: Box::new(inner), e: self.scalar()? }
            }
            "pw" => {
                self.expect('[')?;
                let mut pieces = Vec::new();
                loop {
                    self.expect('(')?;
                    let lo = self.scalar()?;
                    self.expect(',')?;
                    let hi = self.scalar()?;
                    self.expect(',')?;
                    let expr = self.weight()?;
                    self.expect(')')?;
                    pieces.push(PieceExpr { lo, hi, expr });
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(']')?;
                WeightExpr::Piecewise(pieces)
            }
            "refl" | "shift" | "inv" => {
                let x = self.scalar()?;
                self.expect(':')?;
                let inner = Box::new(self.weight()?);
                match kw {
                    "refl" => WeightExpr::Reflect { center: x, inner },
                    "shift" => WeightExpr::Shift { by: x, inner },
                    _ => WeightExpr::Invert { origin: x, inner },
                }
            }
            "tail" => {
                let side = match self.ident()? {
                    "up" => TailSide::Upper,
                    "lo" => TailSide::Lower,
                    other => return Err(self.error(format!("unknown tail side '{other}'"))),
                };
                self.expect(':')?;
                let endpoint = self.scalar()?;
                self.expect(':')?;
                let p = self.scalar()?;
                self.expect(':')?;
                WeightExpr::NormTail { u: Box::new(self.weight()?), p, side, endpoint }
            }
            other => {
                return Err(Error::Parse { pos: start, msg: format!("unknown weight kind '{other}'") })
            }
        })
    }
}

/// Parses a complete weight expression.
pub fn parse_weight<T: Scalar>(text: &str) -> Result<WeightExpr<T>> {
    let mut r = DslReader::new(text);
    let w = r.weight()?;
    if r.peek().is_some() {
        return Err(r.error("trailing input after weight"));
    }
    Ok(w)
}

fn parse_number_text(text: &str) -> Option<Number> {
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_decimal(n)?;
        let d = parse_decimal(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(Number::Exact(n / d));
    }
    const EXACT: i64 = 1 << 53;
    match parse_decimal(text) {
        Some(r) if r.numer().abs() <= EXACT && *r.denom() <= EXACT => Some(Number::Exact(r)),
        _ => text.parse::<f64>().ok().filter(|x| x.is_finite()).map(Number::Float),
    }
}

/// Exact rational value of a decimal literal such as `-1.25e-3`.
fn parse_decimal(text: &str) -> Option<Rational> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut num: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let mut scale = exp - frac.len() as i32;
    let mut den: i64 = 1;
    while scale > 0 {
        num = num.checked_mul(10)?;
        scale -= 1;
    }
    while scale < 0 {
        den = den.checked_mul(10)?;
        scale += 1;
    }
    if neg {
        num = -num;
    }
    Some(Ratio::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_family() {
        let w: WeightExpr<f64> = parse_weight("prod:powlog:1,2;scale:3*pow:-1").unwrap();
        assert_eq!(
            w,
            WeightExpr::Product(
                Box::new(WeightExpr::PowerLog { alpha: 1.0, beta: 2.0 }),
                Box::new(WeightExpr::Scaled { c: 3.0, inner: Box::new(WeightExpr::Power { alpha: -1.0 }) })
            )
        );
        let w: WeightExpr<f64> = parse_weight("powof:pow:2^1/2").unwrap();
        assert_eq!(w, WeightExpr::Power { alpha: 2.0 }.pow(0.5));
        let w: WeightExpr<f64> = parse_weight("pw:[(0,1,pow:0),(1,inf,pow:-2)]").unwrap();
        match w {
            WeightExpr::Piecewise(p) => {
                assert_eq!(p.len(), 2);
                assert!(p[1].hi.is_infinite());
            }
            _ => panic!("expected piecewise"),
        }
    }

    #[test]
    fn decimal_exponents_are_exact() {
        let mut r = DslReader::new("0.3");
        assert_eq!(r.exponent().unwrap(), Exponent::finite(3, 10).unwrap());
        let mut r = DslReader::new("3/2");
        assert_eq!(r.exponent().unwrap(), Exponent::finite(3, 2).unwrap());
        let mut r = DslReader::new("1e-2");
        assert_eq!(r.exponent().unwrap(), Exponent::finite(1, 100).unwrap());
    }

    #[test]
    fn reports_position() {
        let err = parse_weight::<f64>("prod:pow:1;bogus:2").unwrap_err();
        assert_eq!(err, Error::Parse { pos: 11, msg: "unknown weight kind 'bogus'".into() });
        let err = parse_weight::<f64>("pow:").unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 4, .. }));
    }
}
