//! Polynomials `F(ω₁, …, ωₙ)` in the action symbols, written `w1..wn`.
//!
//! Grammar: a sum of terms separated by `+` or `-`; a term is a product of
//! factors joined by `*` (or `/` before a number); a factor is an integer,
//! `sqrt(d)` or `wk`, optionally raised to a nonnegative integer power.
//! Example: `w1^2 + 1/2*w1*w2 - sqrt(2)*w2`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Field, Radical};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error("cannot parse `{text}`: {message}")]
    Parse { text: String, message: String },
    #[error("symbol w{0} is out of range 1..={1}")]
    OutOfRange(usize, usize),
}

/// A finite polynomial in `n` action symbols, keyed by exponent vectors.
#[derive(Clone, PartialEq)]
pub struct OmegaPoly {
    n: usize,
    terms: BTreeMap<Vec<u16>, Radical>,
}

impl OmegaPoly {
    pub fn zero(n: usize) -> Self {
        OmegaPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The single symbol `ω_{k+1}`.
    pub fn symbol(n: usize, k: usize) -> Self {
        let mut e = vec![0u16; n];
        e[k] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, Radical::one());
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, e: Vec<u16>, c: Radical) {
        assert_eq!(e.len(), self.n);
        let slot = self.terms.entry(e.clone()).or_insert_with(Radical::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Radical)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree in the symbols; 0 for constants and zero.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&p| u32::from(p)).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn parse(text: &str, n: usize) -> Result<Self, OmegaError> {
        let err = |message: &str| OmegaError::Parse {
            text: text.to_string(),
            message: message.to_string(),
        };
        let tokens = tokenize(text).map_err(|m| err(&m))?;
        if tokens.is_empty() {
            return Err(err("empty expression"));
        }
        let mut out = Self::zero(n);
        let mut pos = 0;
        while pos < tokens.len() {
            let mut sign = Radical::one();
            while let Some(Tok::Sign(s)) = tokens.get(pos) {
                if *s < 0 {
                    sign = -sign;
                }
                pos += 1;
            }
            let mut coeff = sign;
            let mut exps = vec![0u16; n];
            let mut divide = false;
            loop {
                let (factor, pw) = match tokens.get(pos) {
                    Some(Tok::Int(v)) => (Factor::Num(Radical::from_int(*v)), 1),
                    Some(Tok::Sqrt(d)) => (Factor::Num(Radical::sqrt(*d)), 1),
                    Some(Tok::Sym(k)) => {
                        if *k == 0 || *k > n {
                            return Err(OmegaError::OutOfRange(*k, n));
                        }
                        (Factor::Sym(k - 1), 1)
                    }
                    _ => return Err(err("expected a number, sqrt(d) or wk")),
                };
                pos += 1;
                let pw = if let Some(Tok::Caret) = tokens.get(pos) {
                    match tokens.get(pos + 1) {
                        Some(Tok::Int(p)) if *p >= 0 => {
                            pos += 2;
                            *p as u32
                        }
                        _ => return Err(err("expected a nonnegative integer power")),
                    }
                } else {
                    pw
                };
                match factor {
                    Factor::Sym(k) => {
                        if divide {
                            return Err(err("cannot divide by a symbol"));
                        }
                        exps[k] += pw as u16;
                    }
                    Factor::Num(mut v) => {
                        let base = v.clone();
                        for _ in 1..pw {
                            v *= &base;
                        }
                        if pw == 0 {
                            v = Radical::one();
                        }
                        if divide {
                            v = v.inv().map_err(|_| err("division by zero"))?;
                        }
                        coeff *= &v;
                    }
                }
                divide = false;
                match tokens.get(pos) {
                    Some(Tok::Star) => pos += 1,
                    Some(Tok::Slash) => {
                        divide = true;
                        pos += 1;
                    }
                    Some(Tok::Sign(_)) | None => break,
                    _ => return Err(err("expected `*`, `/`, `+` or `-`")),
                }
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }
}

impl fmt::Debug for OmegaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OmegaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let (neg, c) = match c.as_rational() {
                Some(r) if r.is_negative() => (true, Radical::from_rational(-r)),
                _ => (false, c.clone()),
            };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let mut factors = Vec::new();
            if c != Radical::one() || e.iter().all(|&p| p == 0) {
                factors.push(match c.as_rational() {
                    Some(r) => r.to_string(),
                    None => format!("({c})"),
                });
            }
            for (k, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(format!("w{}", k + 1)),
                    _ => factors.push(format!("w{}^{p}", k + 1)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

enum Factor {
    Num(Radical),
    Sym(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Sqrt(i64),
    Sym(usize),
    Sign(i8),
    Star,
    Slash,
    Caret,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let int_at = |i: &mut usize| -> Result<i64, String> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| format!("expected an integer at offset {start}"))
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Sign(1));
                i += 1;
            }
            '-' => {
                out.push(Tok::Sign(-1));
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            'w' => {
                i += 1;
                out.push(Tok::Sym(int_at(&mut i)? as usize));
            }
            '0'..='9' => out.push(Tok::Int(int_at(&mut i)?)),
            's' if chars[i..].starts_with(&['s', 'q', 'r', 't', '(']) => {
                i += 5;
                let neg = chars.get(i) == Some(&'-');
                if neg {
                    i += 1;
                }
                let d = int_at(&mut i)?;
                if chars.get(i) != Some(&')') {
                    return Err("missing `)` after sqrt".into());
                }
                i += 1;
                out.push(Tok::Sqrt(if neg { -d } else { d }));
            }
            _ => return Err(format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}
