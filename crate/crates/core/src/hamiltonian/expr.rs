//! Scalar expressions in spec files: rationals `p/q`, decimals, `sqrt(d)` and
//! the parameter `t`, combined with `+ - * /`, `^` and parentheses.

use dashu_int::{IBig, UBig};
use num_traits::{One, Zero};

use crate::scalar::{squarefree_factor, Field, ParamPoly, Radical, Rational};

/// An exact value parsed from a spec, remembering whether any decimal
/// literal (an approximate input) contributed to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecValue {
    pub value: ParamPoly<Radical>,
    pub approximate: bool,
}

impl SpecValue {
    pub fn exact(value: ParamPoly<Radical>) -> Self {
        SpecValue {
            value,
            approximate: false,
        }
    }

    pub fn constant(value: Radical) -> Self {
        Self::exact(ParamPoly::constant(value))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &SpecValue) -> SpecValue {
        SpecValue {
            value: self.value.clone() + other.value.clone(),
            approximate: self.approximate || other.approximate,
        }
    }

    pub fn sub(&self, other: &SpecValue) -> SpecValue {
        SpecValue {
            value: self.value.clone() - other.value.clone(),
            approximate: self.approximate || other.approximate,
        }
    }

    pub fn mul(&self, other: &SpecValue) -> SpecValue {
        SpecValue {
            value: self.value.clone() * other.value.clone(),
            approximate: self.approximate || other.approximate,
        }
    }
}

/// Parses a decimal literal (`1.25`, `-3e-2`, `7`) as an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: IBig = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = Rational::from(10);
    let mut r = Rational::from_integer(digits);
    if scale >= 0 {
        r *= ten.pow(scale as usize);
    } else {
        r /= ten.pow((-scale) as usize);
    }
    Some(if negative { -r } else { r })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Sqrt(i64),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::Open);
                i += 1
            }
            ')' => {
                out.push(Token::Close);
                i += 1
            }
            't' => {
                out.push(Token::T);
                i += 1
            }
            's' => {
                let rest: String = chars[i..].iter().collect();
                let Some(after) = rest.strip_prefix("sqrt(") else {
                    return Err(format!("unexpected `{rest}`"));
                };
                let close = after.find(')').ok_or("unclosed sqrt(")?;
                let d: i64 = after[..close]
                    .trim()
                    .parse()
                    .map_err(|_| format!("sqrt argument `{}` is not an integer", &after[..close]))?;
                if d == 0 {
                    return Err("sqrt(0) is not a radical".into());
                }
                out.push(Token::Sqrt(d));
                i += "sqrt(".len() + after[..=close].chars().count();
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || ((chars[i] == 'e' || chars[i] == 'E')
                            && i + 1 < chars.len()
                            && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '-' || chars[i + 1] == '+')))
                {
                    if chars[i] == 'e' || chars[i] == 'E' {
                        i += 2;
                    } else {
                        i += 1;
                    }
                }
                out.push(Token::Num(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

/// Which square roots an expression may use and whether `t` is allowed.
pub struct ExprContext<'a> {
    /// Square-free keys generated by the declared radicands.
    pub radical_closure: &'a [i64],
    pub allow_t: bool,
}

struct Parser<'a, 'c> {
    tokens: &'a [Token],
    pos: usize,
    ctx: &'a ExprContext<'c>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<SpecValue, String> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SpecValue, String> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let c = d
                        .value
                        .as_constant()
                        .ok_or("division by an expression in t")?;
                    let inv = c.inv().map_err(|_| "division by zero".to_string())?;
                    acc = acc.mul(&SpecValue {
                        value: ParamPoly::constant(inv),
                        approximate: d.approximate,
                    });
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SpecValue, String> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(SpecValue {
                value: -v.value,
                approximate: v.approximate,
            });
        }
        if self.peek() == Some(&Token::Plus) {
            self.pos += 1;
        }
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let Some(Token::Num(p)) = self.next() else {
                return Err("expected integer exponent after `^`".into());
            };
            let p: u32 = p.parse().map_err(|_| format!("bad exponent `{p}`"))?;
            let mut out = SpecValue {
                value: ParamPoly::one(),
                approximate: base.approximate,
            };
            for _ in 0..p {
                out = out.mul(&base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SpecValue, String> {
        match self.next() {
            Some(Token::Num(s)) => {
                if s.contains(['.', 'e', 'E']) {
                    let r = parse_decimal(&s).ok_or_else(|| format!("bad number `{s}`"))?;
                    Ok(SpecValue {
                        value: ParamPoly::constant(Radical::from_rational(r)),
                        approximate: true,
                    })
                } else {
                    let v: IBig = s.parse().map_err(|_| format!("bad integer `{s}`"))?;
                    Ok(SpecValue::constant(Radical::from_rational(
                        Rational::from_integer(v),
                    )))
                }
            }
            Some(Token::Sqrt(d)) => {
                let (_, free) = squarefree_factor(d);
                if free != 1 && !self.ctx.radical_closure.contains(&free) {
                    return Err(format!("sqrt({d}) uses a radical that was not declared"));
                }
                Ok(SpecValue::constant(Radical::sqrt(d)))
            }
            Some(Token::T) => {
                if !self.ctx.allow_t {
                    return Err("the parameter t is only allowed in the param domain".into());
                }
                Ok(SpecValue::exact(ParamPoly::t()))
            }
            Some(Token::Open) => {
                let v = self.expr()?;
                if self.next() != Some(Token::Close) {
                    return Err("missing `)`".into());
                }
                Ok(v)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

pub fn parse_scalar_expr(text: &str, ctx: &ExprContext<'_>) -> Result<SpecValue, String> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        ctx,
    };
    let v = p.expr()?;
    if p.pos != tokens.len() {
        return Err(format!("trailing input in `{text}`"));
    }
    Ok(v)
}

/// Writes a rational either as `p/q` or, for approximate values, as an exact
/// decimal expansion (decimal inputs always have one).
pub fn format_rational(r: &Rational, approximate: bool) -> String {
    if approximate {
        if let Some(s) = exact_decimal(r) {
            return s;
        }
    }
    format!("{}/{}", r.numer(), r.denom())
}

fn exact_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = UBig::from(2u8);
    let five = UBig::from(5u8);
    let (mut twos, mut fives) = (0u32, 0u32);
    while &den % &two == UBig::ZERO {
        den /= &two;
        twos += 1;
    }
    while &den % &five == UBig::ZERO {
        den /= &five;
        fives += 1;
    }
    if den != UBig::ONE {
        return None;
    }
    let digits = twos.max(fives);
    let scaled = r * Rational::from(10).pow(digits as usize);
    let int = scaled.numer().clone();
    let negative = int < IBig::ZERO;
    let s = if negative { (-&int).to_string() } else { int.to_string() };
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (a, b) = s.split_at(s.len() - digits as usize);
    Some(format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        a,
        if b.is_empty() { "0" } else { b }
    ))
}

/// Writes a spec value in the scalar-expression grammar.
pub fn format_spec_value(v: &SpecValue) -> String {
    let radical = |c: &Radical| -> String {
        if c.coords().is_empty() {
            return "0".into();
        }
        c.coords()
            .iter()
            .map(|(k, r)| {
                let coeff = format_rational(r, v.approximate);
                if k.radicand() == 1 {
                    coeff
                } else {
                    format!("{coeff}*sqrt({})", k.radicand())
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    };
    match v.value.degree() {
        None => "0".into(),
        Some(0) => radical(&v.value.coeffs()[0]),
        Some(_) => v
            .value
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(k, c)| match k {
                0 => format!("({})", radical(c)),
                1 => format!("({})*t", radical(c)),
                _ => format!("({})*t^{k}", radical(c)),
            })
            .collect::<Vec<_>>()
            .join(" + "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(closure: &[i64], allow_t: bool) -> ExprContext<'_> {
        ExprContext {
            radical_closure: closure,
            allow_t,
        }
    }

    #[test]
    fn parses_radical_combinations() {
        let c = ctx(&[2], false);
        let v = parse_scalar_expr("1 + 1*sqrt(2)", &c).unwrap();
        assert_eq!(v.value.as_constant().unwrap(), Radical::from_int(1) + Radical::sqrt(2));
        let w = parse_scalar_expr("-3/4*sqrt(8)", &c).unwrap();
        assert_eq!(
            w.value.as_constant().unwrap(),
            Radical::sqrt(2) * Radical::from_rational(Rational::new((-3).into(), 2.into()))
        );
        assert!(!w.approximate);
        assert!(parse_scalar_expr("sqrt(3)", &c).is_err());
        assert!(parse_scalar_expr("t", &c).is_err());
    }

    #[test]
    fn decimals_are_flagged() {
        let c = ctx(&[], true);
        let v = parse_scalar_expr("1.25e-1 + t^2", &c).unwrap();
        assert!(v.approximate);
        assert_eq!(v.value.coeff(0), Radical::from_rational(Rational::new(1.into(), 8.into())));
        assert_eq!(v.value.degree(), Some(2));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("1.5"), Some(Rational::new(3.into(), 2.into())));
        assert_eq!(parse_decimal("-2e3"), Some(Rational::from_integer((-2000).into())));
        assert_eq!(parse_decimal(".5"), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(parse_decimal("abc"), None);
    }

    #[test]
    fn formatting_round_trips() {
        let c = ctx(&[2], true);
        for text in ["1/3 + 2/1*sqrt(2)", "(1/2)*t + (3/1)*t^2", "0.125"] {
            let v = parse_scalar_expr(text, &c).unwrap();
            let again = parse_scalar_expr(&format_spec_value(&v), &c).unwrap();
            assert_eq!(v, again, "{text}");
        }
    }
}
