use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::expr::{format_spec_value, parse_scalar_expr, ExprContext, SpecValue};
use super::SpecError;
use crate::scalar::{squarefree_factor, ConvertCtx, FromExact, ParamPoly, Radical};
use crate::series::{Exponent, GradedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationMode {
    /// Resonant part of the generating function fixed by requiring that
    /// `Σ(ξ_k y_k − η_k x_k)` has no pure-action monomials.
    #[default]
    Phi,
    /// Resonant part of the generating function set to zero.
    Zero,
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizationMode::Phi => "phi",
            NormalizationMode::Zero => "zero",
        })
    }
}

impl FromStr for NormalizationMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "phi" => Ok(NormalizationMode::Phi),
            "zero" => Ok(NormalizationMode::Zero),
            other => Err(format!("unknown mode `{other}` (expected phi or zero)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainTag {
    #[default]
    Exact,
    Param,
    Float(usize),
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainTag::Exact => f.write_str("exact"),
            DomainTag::Param => f.write_str("param"),
            DomainTag::Float(bits) => write!(f, "float{bits}"),
        }
    }
}

impl FromStr for DomainTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "exact" => Ok(DomainTag::Exact),
            "param" => Ok(DomainTag::Param),
            other => match other.strip_prefix("float") {
                Some("") => Ok(DomainTag::Float(crate::scalar::DEFAULT_PRECISION)),
                Some(bits) => bits
                    .parse::<usize>()
                    .ok()
                    .filter(|b| *b >= 53)
                    .map(DomainTag::Float)
                    .ok_or_else(|| format!("bad float precision `{bits}`")),
                None => Err(format!("unknown domain `{other}`")),
            },
        }
    }
}

/// The frequencies `λ_k` of the diagonal quadratic part `Σ λ_k x_k y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector(pub Vec<SpecValue>);

impl FrequencyVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_approximate(&self) -> bool {
        self.0.iter().any(|v| v.approximate)
    }

    /// Exact radical values (frequencies never depend on `t`).
    pub fn exact_values(&self) -> Vec<Radical> {
        self.0
            .iter()
            .map(|v| v.value.as_constant().expect("frequencies are constant"))
            .collect()
    }

    pub fn convert<S: FromExact>(&self, ctx: &ConvertCtx) -> Result<Vec<S::Field>, SpecError>
    where
        S::Field: FromExact,
    {
        self.0
            .iter()
            .map(|v| S::Field::from_exact(&v.value, ctx).map_err(SpecError::Scalar))
            .collect()
    }
}

/// A Hamiltonian `H = Σ λ_k x_k y_k + H₃ + … + H_N` in diagonal variables.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub n: usize,
    pub order: u32,
    /// Declared square-free radicands (`-1` for the imaginary unit).
    pub radicals: Vec<i64>,
    pub lambda: FrequencyVector,
    /// Terms of degree 3..=order, canonical: merged, zero-free.
    pub terms: BTreeMap<Exponent, SpecValue>,
    pub mode: NormalizationMode,
    pub domain: DomainTag,
}

/// Square-free keys generated multiplicatively by the declared radicands.
pub(crate) fn radical_closure(radicals: &[i64]) -> Vec<i64> {
    let mut keys = vec![1i64];
    for &d in radicals {
        let current = keys.clone();
        for k in current {
            let prod = Radical::sqrt(k) * Radical::sqrt(d);
            for (key, _) in prod.coords() {
                if !keys.contains(&key.radicand()) {
                    keys.push(key.radicand());
                }
            }
        }
    }
    keys
}

fn parse_monomial(text: &str, n: usize, line: usize) -> Result<Exponent, SpecError> {
    let mut powers = vec![0u16; 2 * n];
    for tok in text.split_whitespace() {
        let (var, pow) = match tok.split_once('^') {
            Some((v, p)) => (
                v,
                p.parse::<u16>()
                    .map_err(|_| SpecError::syntax(line, format!("bad power in `{tok}`")))?,
            ),
            None => (tok, 1),
        };
        let (block, idx) = if let Some(i) = var.strip_prefix('x') {
            (0, i)
        } else if let Some(i) = var.strip_prefix('y') {
            (1, i)
        } else {
            return Err(SpecError::syntax(line, format!("unknown variable `{var}`")));
        };
        let k: usize = idx
            .parse()
            .ok()
            .filter(|k| (1..=n).contains(k))
            .ok_or_else(|| SpecError::syntax(line, format!("variable `{var}` out of range 1..={n}")))?;
        powers[block * n + k - 1] += pow;
    }
    Ok(Exponent::from_powers(&powers))
}

impl HamiltonianSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut n: Option<usize> = None;
        let mut order: Option<u32> = None;
        let mut radicals: Option<Vec<i64>> = None;
        let mut mode = NormalizationMode::default();
        let mut domain = DomainTag::default();
        let mut lambda_lines: Vec<(usize, usize, String)> = Vec::new();
        let mut term_lines: Vec<(usize, String, String)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SpecError::syntax(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            if key == "n" {
                n = Some(value.parse().map_err(|_| SpecError::syntax(line_no, "n must be a positive integer"))?);
            } else if key == "order" {
                order = Some(value.parse().map_err(|_| SpecError::syntax(line_no, "order must be an integer"))?);
            } else if key == "radicals" {
                let mut list = Vec::new();
                for tok in value.split_whitespace() {
                    let d: i64 = tok
                        .parse()
                        .map_err(|_| SpecError::syntax(line_no, format!("bad radicand `{tok}`")))?;
                    if d == 0 || d == 1 || d < -1 || squarefree_factor(d).0 != 1 {
                        return Err(SpecError::syntax(
                            line_no,
                            format!("radicand {d} must be a square-free integer > 1 or -1"),
                        ));
                    }
                    if list.contains(&d) {
                        return Err(SpecError::ConflictingRadicals(format!("{d} declared twice")));
                    }
                    list.push(d);
                }
                if let Some(prev) = &radicals {
                    if *prev != list {
                        return Err(SpecError::ConflictingRadicals(format!(
                            "line {line_no} redeclares radicals {prev:?} as {list:?}"
                        )));
                    }
                }
                radicals = Some(list);
            } else if key == "mode" {
                mode = value.parse().map_err(|e: String| SpecError::syntax(line_no, e))?;
            } else if key == "domain" {
                domain = value.parse().map_err(|e: String| SpecError::syntax(line_no, e))?;
            } else if let Some(k) = key.strip_prefix("lambda") {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| SpecError::syntax(line_no, format!("bad lambda index in `{key}`")))?;
                lambda_lines.push((line_no, k, value.to_string()));
            } else if let Some(mono) = key.strip_prefix("term") {
                term_lines.push((line_no, mono.trim().to_string(), value.to_string()));
            } else {
                return Err(SpecError::syntax(line_no, format!("unknown key `{key}`")));
            }
        }

        let n = n.filter(|n| *n >= 1).ok_or(SpecError::Missing("n"))?;
        let order = order.ok_or(SpecError::Missing("order"))?;
        if !(2..=255).contains(&order) {
            return Err(SpecError::Invalid(format!("order {order} outside 2..=255")));
        }
        let radicals = radicals.unwrap_or_default();
        let closure = radical_closure(&radicals);
        let allow_t = domain == DomainTag::Param;

        let mut lambda: Vec<Option<SpecValue>> = vec![None; n];
        for (line_no, k, value) in lambda_lines {
            if !(1..=n).contains(&k) {
                return Err(SpecError::syntax(line_no, format!("lambda index {k} out of range 1..={n}")));
            }
            if lambda[k - 1].is_some() {
                return Err(SpecError::syntax(line_no, format!("lambda {k} given twice")));
            }
            let ctx = ExprContext {
                radical_closure: &closure,
                allow_t: false,
            };
            let v = parse_scalar_expr(&value, &ctx).map_err(|m| SpecError::syntax(line_no, m))?;
            if v.is_zero() {
                return Err(SpecError::syntax(line_no, format!("lambda {k} must be nonzero")));
            }
            lambda[k - 1] = Some(v);
        }
        let lambda = lambda
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| SpecError::Invalid(format!("lambda {} missing", k + 1))))
            .collect::<Result<Vec<_>, _>>()?;

        let mut terms: BTreeMap<Exponent, SpecValue> = BTreeMap::new();
        for (line_no, mono, value) in term_lines {
            let e = parse_monomial(&mono, n, line_no)?;
            let d = e.degree();
            if d == 2 {
                return Err(SpecError::NonDiagonalQuadratic { line: line_no });
            }
            if d < 2 {
                return Err(SpecError::syntax(line_no, format!("term of degree {d}; H starts at degree 2")));
            }
            if d > order {
                return Err(SpecError::syntax(line_no, format!("term degree {d} exceeds order {order}")));
            }
            let ctx = ExprContext {
                radical_closure: &closure,
                allow_t,
            };
            let v = parse_scalar_expr(&value, &ctx).map_err(|m| SpecError::syntax(line_no, m))?;
            let merged = match terms.remove(&e) {
                Some(prev) => prev.add(&v),
                None => v,
            };
            if !merged.is_zero() {
                terms.insert(e, merged);
            }
        }

        let spec = HamiltonianSpec {
            n,
            order,
            radicals,
            lambda: FrequencyVector(lambda),
            terms,
            mode,
            domain,
        };
        spec.check_domain()?;
        Ok(spec)
    }

    fn check_domain(&self) -> Result<(), SpecError> {
        let approximate =
            self.lambda.is_approximate() || self.terms.values().any(|v| v.approximate);
        if approximate && !matches!(self.domain, DomainTag::Float(_)) {
            return Err(SpecError::Invalid(
                "decimal (approximate) values are only accepted in a float domain".into(),
            ));
        }
        Ok(())
    }

    /// Writes the spec back in the spec grammar.
    pub fn to_text(&self) -> String {
        let mut out = format!("n = {}\norder = {}\n", self.n, self.order);
        if !self.radicals.is_empty() {
            let list: Vec<String> = self.radicals.iter().map(i64::to_string).collect();
            out.push_str(&format!("radicals = {}\n", list.join(" ")));
        }
        out.push_str(&format!("mode = {}\ndomain = {}\n", self.mode, self.domain));
        for (k, v) in self.lambda.0.iter().enumerate() {
            out.push_str(&format!("lambda {} = {}\n", k + 1, format_spec_value(v)));
        }
        for (e, v) in &self.terms {
            out.push_str(&format!("term {} = {}\n", monomial_text(e), format_spec_value(v)));
        }
        out
    }

    /// `H₃ + … + H_N` as a parameter-polynomial series over the radical field.
    pub fn higher_terms(&self) -> GradedSeries<ParamPoly<Radical>> {
        let mut s = GradedSeries::zero(self.n, self.order);
        for (e, v) in &self.terms {
            s.add_term(e.clone(), &v.value);
        }
        s
    }

    /// The full Hamiltonian in the coefficient domain `S`, truncated at
    /// `order`.
    pub fn hamiltonian<S>(&self, ctx: &ConvertCtx) -> Result<GradedSeries<S>, SpecError>
    where
        S: FromExact,
        S::Field: FromExact,
    {
        let lambda = self.lambda.convert::<S>(ctx)?;
        let mut h = GradedSeries::zero(self.n, self.order);
        for (k, l) in lambda.into_iter().enumerate() {
            let mut alpha = vec![0u16; self.n];
            alpha[k] = 1;
            h.add_term(Exponent::new(&alpha, &alpha), &S::from_field(l));
        }
        for (e, v) in &self.terms {
            let c = S::from_exact(&v.value, ctx).map_err(SpecError::Scalar)?;
            h.add_term(e.clone(), &c);
        }
        Ok(h)
    }

    /// Whether any coefficient depends on `t`.
    pub fn is_parametric(&self) -> bool {
        self.terms.values().any(|v| v.value.degree().unwrap_or(0) > 0)
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self.terms.retain(|e, _| e.degree() <= order);
        self
    }
}

impl FromStr for HamiltonianSpec {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, SpecError> {
        HamiltonianSpec::parse(s)
    }
}

pub(crate) fn monomial_text(e: &Exponent) -> String {
    let n = e.n();
    let mut parts = Vec::new();
    for (block, name) in [(0usize, 'x'), (1, 'y')] {
        for k in 0..n {
            let p = e.power(block * n + k);
            if p > 0 {
                parts.push(format!("{name}{}^{p}", k + 1));
            }
        }
    }
    parts.join(" ")
}
