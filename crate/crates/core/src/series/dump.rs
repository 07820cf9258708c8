//! Text dumps of series: one term per line,
//! `l  a1 .. an  b1 .. bn  coeff`, in canonical monomial order.
//!
//! A dump starts with `# n = <n>` and `# order = <N>` header lines. Dumps of
//! several series (the components of a map) separate them with
//! `# component <k>` lines.

use super::{Exponent, GradedSeries, SeriesError};
use crate::scalar::DumpCoeff;

pub fn write_series<S: DumpCoeff>(s: &GradedSeries<S>) -> String {
    let mut out = format!("# n = {}\n# order = {}\n", s.n(), s.order());
    write_terms(s, &mut out);
    out
}

fn write_terms<S: DumpCoeff>(s: &GradedSeries<S>, out: &mut String) {
    for (e, c) in s.terms() {
        let join = |v: &[u16]| {
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "{}  {}  {}  ",
            e.degree(),
            join(e.alpha()),
            join(e.beta())
        ));
        c.write_coeff(out);
        out.push('\n');
    }
}

/// Writes the components of a map (e.g. `φ₁..φₙ`) into one dump.
pub fn write_components<S: DumpCoeff>(components: &[GradedSeries<S>]) -> String {
    let (n, order) = components
        .first()
        .map_or((0, 0), |s| (s.n(), s.order()));
    let mut out = format!("# n = {n}\n# order = {order}\n");
    for (k, s) in components.iter().enumerate() {
        out.push_str(&format!("# component {}\n", k + 1));
        write_terms(s, &mut out);
    }
    out
}

struct Header {
    n: usize,
    order: u32,
}

fn parse_header(lines: &mut std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'_>>>) -> Result<Header, SeriesError> {
    let mut n = None;
    let mut order = None;
    while let Some((_, line)) = lines.peek() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# n =") {
            n = rest.trim().parse().ok();
        } else if let Some(rest) = line.strip_prefix("# order =") {
            order = rest.trim().parse().ok();
        } else if !line.is_empty() {
            break;
        }
        lines.next();
    }
    match (n, order) {
        (Some(n), Some(order)) => Ok(Header { n, order }),
        _ => Err(SeriesError::Parse {
            line: 1,
            message: "missing `# n =` or `# order =` header".into(),
        }),
    }
}

fn parse_term<S: DumpCoeff>(lineno: usize, line: &str, n: usize) -> Result<(Exponent, S), SeriesError> {
    let err = |message: String| SeriesError::Parse {
        line: lineno + 1,
        message,
    };
    let groups: Vec<&str> = line.splitn(4, "  ").collect();
    if groups.len() != 4 {
        return Err(err(format!("expected `l  alpha  beta  coeff`, got `{line}`")));
    }
    let l: u32 = groups[0]
        .trim()
        .parse()
        .map_err(|_| err(format!("bad degree `{}`", groups[0])))?;
    let ints = |g: &str| -> Result<Vec<u16>, SeriesError> {
        g.split_whitespace()
            .map(|t| t.parse::<u16>().map_err(|_| err(format!("bad exponent `{t}`"))))
            .collect()
    };
    let alpha = ints(groups[1])?;
    let beta = ints(groups[2])?;
    if alpha.len() != n || beta.len() != n {
        return Err(err(format!("expected {n} exponents per block")));
    }
    let e = Exponent::new(&alpha, &beta);
    if e.degree() != l {
        return Err(err(format!("degree {l} does not match exponents {e:?}")));
    }
    let c = S::parse_coeff(groups[3]).map_err(|e| err(e.to_string()))?;
    Ok((e, c))
}

pub fn parse_series<S: DumpCoeff>(text: &str) -> Result<GradedSeries<S>, SeriesError> {
    let mut lines = text.lines().enumerate().peekable();
    let Header { n, order } = parse_header(&mut lines)?;
    let mut s = GradedSeries::zero(n, order);
    for (lineno, line) in lines {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (e, c) = parse_term::<S>(lineno, line, n)?;
        if e.degree() > order {
            return Err(SeriesError::BeyondOrder {
                degree: e.degree(),
                order,
            });
        }
        s.add_term(e, &c);
    }
    Ok(s)
}

pub fn parse_components<S: DumpCoeff>(text: &str) -> Result<Vec<GradedSeries<S>>, SeriesError> {
    let mut lines = text.lines().enumerate().peekable();
    let Header { n, order } = parse_header(&mut lines)?;
    let mut out: Vec<GradedSeries<S>> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with("# component") {
            out.push(GradedSeries::zero(n, order));
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (e, c) = parse_term::<S>(lineno, line, n)?;
        let current = out.last_mut().ok_or(SeriesError::Parse {
            line: lineno + 1,
            message: "term before the first `# component` line".into(),
        })?;
        current.add_term(e, &c);
    }
    Ok(out)
}
