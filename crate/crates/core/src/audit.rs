//! Degree audit over pencils `H_t = (1 − t) H₀ + t H₁`.
//!
//! The whole construction is run with coefficients in `ℚ(√…)[t]`, so the
//! t-degree of every coefficient is known exactly. The claimed bounds are
//! `deg_t K_l, v_l ≤ l − 2` and `deg_t` of the degree-`l` parts of `φ_k`,
//! `ψ_k`, `ξ_k`, `η_k` and of the universal integrals `≤ l − 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{normalize_spec, EngineError, NormalFormArtifacts};
use crate::hamiltonian::{DomainTag, HamiltonianSpec, RandomSpec, SpecError, SpecValue};
use crate::integrals::{first_integrals, inverse_maps, universal_integral, IntegralError, OmegaPoly};
use crate::scalar::{ConvertCtx, Field, ParamPoly, Radical};
use crate::series::{max_param_degree, Exponent, GradedSeries};

type Param = ParamPoly<Radical>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error("pencil members disagree: {0}")]
    Mismatch(String),
    #[error("pencil members must be exact, t-free specs")]
    NotExact,
    #[error("degree {degree} needs at least {needed} interpolation nodes, got {got}")]
    TooFewSamples { degree: u32, needed: usize, got: usize },
    #[error("interpolation node t = {0} is repeated")]
    RepeatedNode(String),
    #[error("degree {degree} is outside 3..={order}")]
    DegreeOutOfRange { degree: u32, order: u32 },
}

/// An affine family `H_t = H₀ + t (H₁ − H₀)` of Hamiltonians sharing `λ`
/// and the truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilSpec {
    pub base: HamiltonianSpec,
    pub direction: HamiltonianSpec,
}

impl PencilSpec {
    pub fn new(base: HamiltonianSpec, direction: HamiltonianSpec) -> Result<Self, AuditError> {
        if base.n != direction.n {
            return Err(AuditError::Mismatch(format!("n = {} vs {}", base.n, direction.n)));
        }
        if base.order != direction.order {
            return Err(AuditError::Mismatch(format!(
                "order = {} vs {}",
                base.order, direction.order
            )));
        }
        if base.lambda.exact_values() != direction.lambda.exact_values() {
            return Err(AuditError::Mismatch("frequencies differ".into()));
        }
        for s in [&base, &direction] {
            let approximate = s.lambda.is_approximate() || s.terms.values().any(|v| v.approximate);
            if s.is_parametric() || approximate {
                return Err(AuditError::NotExact);
            }
        }
        Ok(PencilSpec { base, direction })
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn order(&self) -> u32 {
        self.base.order
    }

    fn radicals(&self) -> Vec<i64> {
        let mut r: BTreeSet<i64> = self.base.radicals.iter().copied().collect();
        r.extend(self.direction.radicals.iter().copied());
        r.into_iter().collect()
    }

    fn merged<T>(&self, f: impl Fn(&Radical, &Radical) -> T) -> BTreeMap<Exponent, T> {
        let keys: BTreeSet<&Exponent> = self.base.terms.keys().chain(self.direction.terms.keys()).collect();
        let value = |s: &HamiltonianSpec, e: &Exponent| {
            s.terms
                .get(e)
                .map_or_else(|| Radical::from_int(0), |v| v.value.coeff(0))
        };
        keys.into_iter()
            .map(|e| (e.clone(), f(&value(&self.base, e), &value(&self.direction, e))))
            .collect()
    }

    /// The family as one spec over `ℚ(√…)[t]`.
    pub fn family(&self) -> HamiltonianSpec {
        let terms = self
            .merged(|a, b| ParamPoly::from_coeffs(vec![a.clone(), b.clone() - a.clone()]))
            .into_iter()
            .filter(|(_, c)| !num_traits::Zero::is_zero(c))
            .map(|(e, c)| (e, SpecValue::exact(c)))
            .collect();
        HamiltonianSpec {
            radicals: self.radicals(),
            terms,
            domain: DomainTag::Param,
            ..self.base.clone()
        }
    }

    /// The member `H_{t₀}` as an exact spec.
    pub fn at(&self, t0: &Radical) -> HamiltonianSpec {
        let terms = self
            .merged(|a, b| a.clone() + t0.clone() * (b.clone() - a.clone()))
            .into_iter()
            .filter(|(_, c)| !num_traits::Zero::is_zero(c))
            .map(|(e, c)| (e, SpecValue::constant(c)))
            .collect();
        HamiltonianSpec {
            radicals: self.radicals(),
            terms,
            domain: DomainTag::Exact,
            ..self.base.clone()
        }
    }
}

/// One line of the audit table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRow {
    pub object: String,
    pub l: u32,
    /// Component index (1-based), or 0 for scalar-valued objects.
    pub k: usize,
    /// `None` when the part is zero (degree −∞).
    pub observed: Option<usize>,
    pub bound: u32,
}

impl AuditRow {
    pub fn passed(&self) -> bool {
        self.observed.is_none_or(|d| d <= self.bound as usize)
    }
}

/// Result of a spot check of the parameter ring against exact runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpotCheck {
    pub l: u32,
    pub nodes: usize,
    /// Largest degree among the interpolants.
    pub max_degree: Option<usize>,
    /// First monomial whose interpolant differs from the parameter run.
    pub mismatch: Option<Exponent>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub spot_checks: Vec<SpotCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(AuditRow::passed) && self.spot_checks.iter().all(|s| s.mismatch.is_none())
    }

    /// Rows for one object, in table order.
    pub fn object<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a AuditRow> + 'a {
        self.rows.iter().filter(move |r| r.object == name)
    }

    /// CSV `object,l,k,observed_deg,bound,verdict`. A zero part reports
    /// `-inf`; spot checks appear as object `interp_K` with the interpolant
    /// degree as the observed value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("object,l,k,observed_deg,bound,verdict\n");
        let deg = |d: Option<usize>| d.map_or_else(|| "-inf".to_string(), |d| d.to_string());
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.object,
                r.l,
                r.k,
                deg(r.observed),
                r.bound,
                verdict(r.passed())
            );
        }
        for s in &self.spot_checks {
            let _ = writeln!(
                out,
                "interp_K,{},0,{},{},{}",
                s.l,
                deg(s.max_degree),
                s.l - 2,
                verdict(s.mismatch.is_none())
            );
        }
        out
    }
}

fn push_rows(rows: &mut Vec<AuditRow>, object: &str, k: usize, s: &GradedSeries<Param>, degrees: impl Iterator<Item = u32>, slack: u32) {
    for l in degrees {
        rows.push(AuditRow {
            object: object.to_string(),
            l,
            k,
            observed: s.part(l).and_then(max_param_degree),
            bound: l - slack,
        });
    }
}

/// Runs the pencil over the parameter ring.
pub fn param_run(pencil: &PencilSpec) -> Result<NormalFormArtifacts<Param>, AuditError> {
    Ok(normalize_spec::<Param>(&pencil.family(), &ConvertCtx::default())?)
}

/// The full audit: normalization, inverse maps, first integrals and the
/// universal integrals `F = ω_k` and `F = ω₁²`.
pub fn audit(pencil: &PencilSpec) -> Result<AuditReport, AuditError> {
    let art = param_run(pencil)?;
    audit_artifacts(&art)
}

pub fn audit_artifacts(art: &NormalFormArtifacts<Param>) -> Result<AuditReport, AuditError> {
    let n = art.n;
    let order = art.order;
    let mut rows = Vec::new();
    push_rows(&mut rows, "K", 0, &art.k, 3..=order, 2);
    push_rows(&mut rows, "v", 0, &art.v, 3..=order, 2);
    let top = art.transform_degree();
    for k in 0..n {
        push_rows(&mut rows, "phi", k + 1, &art.phi[k], 2..=top, 1);
        push_rows(&mut rows, "psi", k + 1, &art.psi[k], 2..=top, 1);
    }
    let inv = inverse_maps(art);
    for k in 0..n {
        push_rows(&mut rows, "xi", k + 1, &inv.xi[k], 2..=inv.order(), 1);
        push_rows(&mut rows, "eta", k + 1, &inv.eta[k], 2..=inv.order(), 1);
    }
    let ps = first_integrals(&inv);
    let mut fs: Vec<OmegaPoly> = (0..n).map(|k| OmegaPoly::symbol(n, k)).collect();
    if order >= 4 {
        fs.push(OmegaPoly::parse("w1^2", n).map_err(IntegralError::from)?);
    }
    for f in &fs {
        let u = universal_integral(f, &ps, &ConvertCtx::default())?;
        push_rows(&mut rows, &format!("F[{}]", f.to_string().replace(' ', "")), 0, &u.p, 2..=order, 1);
    }
    Ok(AuditReport {
        rows,
        spot_checks: Vec::new(),
    })
}

/// Fits the interpolating polynomial through exact runs at each node and
/// compares it with the parameter run, coefficient by coefficient, for
/// `K_l`.
pub fn spot_check_interpolation(
    pencil: &PencilSpec,
    param: &NormalFormArtifacts<Param>,
    l: u32,
    nodes: &[Radical],
) -> Result<SpotCheck, AuditError> {
    if l < 3 || l > pencil.order() {
        return Err(AuditError::DegreeOutOfRange {
            degree: l,
            order: pencil.order(),
        });
    }
    if nodes.len() < l as usize {
        return Err(AuditError::TooFewSamples {
            degree: l,
            needed: l as usize,
            got: nodes.len(),
        });
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[..i].contains(a) {
            return Err(AuditError::RepeatedNode(a.to_string()));
        }
    }
    let runs: Vec<GradedSeries<Radical>> = nodes
        .par_iter()
        .map(|t0| {
            normalize_spec::<Radical>(&pencil.at(t0), &ConvertCtx::default())
                .map(|a| a.k.degree_range(l, l))
                .map_err(AuditError::from)
        })
        .collect::<Result<_, _>>()?;
    let expected = param.k.degree_range(l, l);
    let mut monomials: BTreeSet<Exponent> = expected.terms().map(|(e, _)| e.clone()).collect();
    for r in &runs {
        monomials.extend(r.terms().map(|(e, _)| e.clone()));
    }
    let mut max_degree = None;
    let mut mismatch = None;
    for e in monomials {
        let points: Vec<(Radical, Radical)> = nodes
            .iter()
            .zip(&runs)
            .map(|(t0, r)| (t0.clone(), r.coeff(&e)))
            .collect();
        let fit = ParamPoly::interpolate(&points).map_err(|e| AuditError::Engine(e.into()))?;
        max_degree = max_degree.max(fit.degree());
        if fit != expected.coeff(&e) && mismatch.is_none() {
            mismatch = Some(e);
        }
    }
    Ok(SpotCheck {
        l,
        nodes: nodes.len(),
        max_degree,
        mismatch,
    })
}

/// Whether substituting `t = t₀` into the parameter run reproduces the
/// exact run of `H_{t₀}` bit for bit (`K`, `v`, `φ`, `ψ`). Returns the name
/// of the first differing object.
pub fn evaluation_mismatch(
    pencil: &PencilSpec,
    param: &NormalFormArtifacts<Param>,
    t0: &Radical,
) -> Result<Option<&'static str>, AuditError> {
    let direct = normalize_spec::<Radical>(&pencil.at(t0), &ConvertCtx::default())?;
    let evaluated = param.map_coeffs(|c| c.eval(t0), Radical::clone);
    Ok(if evaluated.k != direct.k {
        Some("K")
    } else if evaluated.v != direct.v {
        Some("v")
    } else if evaluated.phi != direct.phi {
        Some("phi")
    } else if evaluated.psi != direct.psi {
        Some("psi")
    } else {
        None
    })
}

/// One cell of the audit matrix.
#[derive(Debug, Clone)]
pub struct AuditCell {
    pub label: String,
    pub pencil: PencilSpec,
}

/// Frequencies of the default matrix: `(1)` for one degree of freedom and
/// `(1, √2)` for two.
fn default_lambda(n: usize) -> (Vec<Radical>, Vec<i64>) {
    match n {
        1 => (vec![Radical::from_int(1)], vec![]),
        _ => (vec![Radical::from_int(1), Radical::sqrt(2)], vec![2]),
    }
}

/// `n ∈ {1, 2}`, `N ∈ {6, 8, 10}`; both pencil members are dense random
/// Hamiltonians with small rational coefficients drawn from `seed`.
pub fn default_matrix(seed: u64) -> Vec<AuditCell> {
    let mut cells = Vec::new();
    for n in [1usize, 2] {
        for order in [6u32, 8, 10] {
            let (lambda, radicals) = default_lambda(n);
            let shape = RandomSpec::dense(order, lambda, radicals);
            let cell_seed = seed ^ ((n as u64) << 32) ^ u64::from(order);
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
            let base = shape.sample(&mut rng);
            let direction = shape.sample(&mut rng);
            cells.push(AuditCell {
                label: format!("n{n}_N{order}"),
                pencil: PencilSpec::new(base, direction).expect("members share n, N and lambda"),
            });
        }
    }
    cells
}

/// [`audit`] plus interpolation spot checks of every `K_l` that `nodes`
/// exact runs at `t = 0, 1, …, nodes − 1` can determine (`l ≤ nodes`).
pub fn audit_with_spot_checks(pencil: &PencilSpec, nodes: usize) -> Result<AuditReport, AuditError> {
    let art = param_run(pencil)?;
    let mut report = audit_artifacts(&art)?;
    let ts: Vec<Radical> = (0..nodes as i64).map(Radical::from_int).collect();
    let top = pencil.order().min(u32::try_from(nodes).unwrap_or(u32::MAX));
    for l in 3..=top {
        report.spot_checks.push(spot_check_interpolation(pencil, &art, l, &ts)?);
    }
    Ok(report)
}

/// Audits every cell in parallel, with `spot_nodes` interpolation nodes when
/// given; results come back in cell order.
pub fn run_matrix(cells: &[AuditCell], spot_nodes: Option<usize>) -> Vec<(String, Result<AuditReport, AuditError>)> {
    cells
        .par_iter()
        .map(|c| {
            let report = match spot_nodes {
                Some(m) => audit_with_spot_checks(&c.pencil, m),
                None => audit(&c.pencil),
            };
            (c.label.clone(), report)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn spec(text: &str) -> HamiltonianSpec {
        HamiltonianSpec::parse(text).unwrap()
    }

    fn q(a: i64, b: i64) -> Radical {
        Radical::from_rational(Rational::new(a.into(), b.into()))
    }

    fn pencil(base: &str, direction: &str) -> PencilSpec {
        PencilSpec::new(spec(base), spec(direction)).unwrap()
    }

    #[test]
    fn family_is_affine_in_t() {
        let p = pencil(
            "n = 1\norder = 5\nlambda 1 = 1\nterm x1^3 = 2\n",
            "n = 1\norder = 5\nlambda 1 = 1\nterm x1^3 = 5\nterm y1^4 = 1\n",
        );
        let fam = p.family();
        let c = &fam.terms[&Exponent::new(&[3], &[0])].value;
        assert_eq!(c.coeffs(), &[q(2, 1), q(3, 1)]);
        assert_eq!(fam.terms[&Exponent::new(&[0], &[4])].value, ParamPoly::t());
        assert_eq!(p.at(&q(1, 1)), spec("n = 1\norder = 5\nlambda 1 = 1\nterm x1^3 = 5\nterm y1^4 = 1\n"));
    }

    #[test]
    fn members_must_agree() {
        let a = spec("n = 1\norder = 5\nlambda 1 = 1\n");
        let b = spec("n = 1\norder = 6\nlambda 1 = 1\n");
        assert!(matches!(PencilSpec::new(a.clone(), b), Err(AuditError::Mismatch(_))));
        let c = spec("n = 1\norder = 5\nlambda 1 = 2\n");
        assert!(matches!(PencilSpec::new(a, c), Err(AuditError::Mismatch(_))));
    }

    #[test]
    fn constant_pencil_has_degree_zero() {
        let h = "n = 1\norder = 6\nlambda 1 = 1\nterm x1^3 = 1\nterm x1 y1^2 = 1/2\n";
        let report = audit(&pencil(h, h)).unwrap();
        assert!(report.passed());
        assert!(report.rows.iter().all(|r| r.observed.unwrap_or(0) == 0));
    }

    #[test]
    fn late_direction_leaves_low_orders_constant() {
        let report = audit(&pencil(
            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^2 y1 = 1\n",
            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^2 y1 = 1\nterm x1^3 y1^2 = 1\n",
        ))
        .unwrap();
        assert!(report.passed());
        for r in report.object("K").filter(|r| r.l < 5) {
            assert!(r.observed.unwrap_or(0) == 0, "{r:?}");
        }
    }

    #[test]
    fn generic_cubic_pencil_attains_the_bound() {
        let p = pencil(
            "n = 1\norder = 6\nlambda 1 = 1\n",
            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^2 y1 = 1\nterm x1 y1^2 = 1\n",
        );
        let report = audit(&p).unwrap();
        assert!(report.passed(), "{}", report.to_csv());
        let k4 = report.object("K").find(|r| r.l == 4).unwrap();
        assert_eq!(k4.observed, Some(2));
    }

    #[test]
    fn interpolation_agrees_with_parameter_run() {
        let p = pencil(
            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^3 = 1/2\n",
            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^2 y1 = 1\nterm x1 y1^2 = -1\nterm y1^4 = 2\n",
        );
        let art = param_run(&p).unwrap();
        let nodes: Vec<Radical> = (0..5).map(|i| q(i, 1)).collect();
        let s = spot_check_interpolation(&p, &art, 4, &nodes).unwrap();
        assert_eq!(s.mismatch, None);
        assert_eq!(s.max_degree, Some(2));
        let repeated = [q(0, 1), q(1, 1), q(1, 1), q(2, 1)];
        assert!(matches!(
            spot_check_interpolation(&p, &art, 4, &repeated),
            Err(AuditError::RepeatedNode(_))
        ));
        assert!(matches!(
            spot_check_interpolation(&p, &art, 4, &nodes[..3]),
            Err(AuditError::TooFewSamples { .. })
        ));
        for t0 in [q(0, 1), q(-2, 3), q(7, 1)] {
            assert_eq!(evaluation_mismatch(&p, &art, &t0).unwrap(), None);
        }
    }

    #[test]
    fn csv_layout() {
        let report = AuditReport {
            rows: vec![AuditRow {
                object: "K".into(),
                l: 4,
                k: 0,
                observed: None,
                bound: 2,
            }],
            spot_checks: vec![],
        };
        assert_eq!(report.to_csv(), "object,l,k,observed_deg,bound,verdict\nK,4,0,-inf,2,PASS\n");
    }
}
