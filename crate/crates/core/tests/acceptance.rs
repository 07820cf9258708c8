//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Two criteria cannot hold for the `x₁³` example: `x₁y₁ + t x₁³` is
//! `ξ(η + tξ²)`, a symplectic change of variables away from `ξη`, so its
//! normal form is `ξη` for every `t`. Those lines are listed in
//! [`KNOWN_RED`]; they print FAIL like any other, and the run exits nonzero
//! if any other line fails or if one of them starts passing.

use std::process::ExitCode;
use std::time::Instant;

use birkhoff::audit::{audit, default_matrix, param_run, run_matrix, spot_check_interpolation, PencilSpec};
use birkhoff::convergence::{bernstein_check, growth_of_spec, laplacian_residual, GreenDomain};
use birkhoff::engine::{normalize_spec, phi_residual, NormalFormArtifacts};
use birkhoff::hamiltonian::RandomSpec;
use birkhoff::integrals::{
    first_integrals, involution_residuals, inverse_maps, pull_back_and_split, universal_integral, OmegaPoly,
};
use birkhoff::scalar::{ConvertCtx, Field};
use birkhoff::{GradedSeries, HamiltonianSpec, NormalizationMode, Radical, Rational};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const KNOWN_RED: [&str; 2] = ["4b", "9c"];

const BERNSTEIN_SLACK: f64 = 1e-12;
const GREEN_TOL: f64 = 1e-12;
const HARMONIC_TOL: f64 = 1e-6;
/// Radius of `x₁y₁ + x₁²y₁ + x₁y₁²` at `N = 20`, from the first exact run.
const CUBIC_RADIUS_PIN: f64 = 0.252_167_520_070_613_05;
const PIN_TOL: f64 = 1e-12;

struct Line {
    id: &'static str,
    ok: bool,
    text: String,
}

fn spec(text: &str) -> HamiltonianSpec {
    HamiltonianSpec::parse(text).expect("valid spec")
}

fn exact(spec: &HamiltonianSpec) -> NormalFormArtifacts<Radical> {
    normalize_spec::<Radical>(spec, &ConvertCtx::default()).expect("non-resonant spec")
}

fn lambdas() -> [(Vec<Radical>, Vec<i64>); 3] {
    let one = Radical::from_int(1);
    [
        (vec![one.clone()], vec![]),
        (vec![one.clone(), Radical::sqrt(2)], vec![2]),
        (vec![one.clone(), one + Radical::sqrt(2)], vec![2]),
    ]
}

/// Six members for every frequency vector and order: dense for one degree
/// of freedom, a quarter of the monomials for two.
fn random_suite() -> Vec<HamiltonianSpec> {
    let mut suite = Vec::new();
    for (i, (lambda, radicals)) in lambdas().into_iter().enumerate() {
        let density = if lambda.len() == 1 { 1.0 } else { 0.25 };
        for order in [6u32, 8, 10] {
            let shape = RandomSpec::dense(order, lambda.clone(), radicals.clone()).with_density(density);
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * i as u64 + u64::from(order));
            suite.extend((0..6).map(|_| shape.sample(&mut rng)));
        }
    }
    suite
}

fn is_delta(s: &GradedSeries<Radical>, one: bool) -> bool {
    if one {
        s.sub(&GradedSeries::constant(s.n(), s.order(), Radical::one())).unwrap().is_zero()
    } else {
        s.is_zero()
    }
}

/// `{φ_j, φ_k} = 0`, `{ψ_j, ψ_k} = 0`, `{φ_j, ψ_k} = δ_jk` through `through`.
fn symplectic(art: &NormalFormArtifacts<Radical>, through: u32) -> bool {
    let n = art.n;
    (0..n).all(|j| {
        (0..n).all(|k| {
            let b = |a: &GradedSeries<Radical>, c: &GradedSeries<Radical>| a.poisson_bracket(c, through).unwrap();
            is_delta(&b(&art.phi[j], &art.phi[k]), false)
                && is_delta(&b(&art.psi[j], &art.psi[k]), false)
                && is_delta(&b(&art.phi[j], &art.psi[k]), j == k)
        })
    })
}

/// `{P_k, H}`, `{P_j, P_k}` and the non-resonant part of every pulled-back
/// integral, including `ω₁²` where the order allows it. Returns the number
/// of integrals checked.
fn integrals_commute(art: &NormalFormArtifacts<Radical>) -> Result<usize, String> {
    let inv = inverse_maps(art);
    let mut ps = first_integrals(&inv);
    if art.order >= 4 {
        let f = OmegaPoly::parse("w1^2", art.n).unwrap();
        ps.push(universal_integral(&f, &ps, &ConvertCtx::default()).unwrap());
    }
    for p in &ps {
        if !p.bracket_residual(&art.h).unwrap().is_zero() {
            return Err(format!("{{{}, H}} ≠ 0", p.origin));
        }
        let split = pull_back_and_split(&p.p, art).unwrap();
        if let Some(lead) = split.leading {
            return Err(format!("{}: J has {:?}", p.origin, lead.exponent));
        }
    }
    for ((j, k), r) in involution_residuals(&ps[..art.n]).unwrap() {
        if !r.is_zero() {
            return Err(format!("{{P{}, P{}}} ≠ 0", j + 1, k + 1));
        }
    }
    Ok(ps.len())
}

fn suite_criteria(lines: &mut Vec<Line>) {
    let suite = random_suite();
    let count = suite.len();
    let clock = Instant::now();
    let runs: Vec<_> = suite.par_iter().map(exact).collect();
    let composition: Vec<bool> = runs
        .par_iter()
        .map(|a| a.h.compose_truncated(&a.transformation(), a.order).unwrap() == a.k)
        .collect();
    let seconds = clock.elapsed().as_secs_f64();
    let failed = composition.iter().filter(|ok| !**ok).count();
    lines.push(Line {
        id: "1",
        ok: failed == 0 && count >= 50 && seconds <= 300.0,
        text: format!("composition H(φ,ψ) = K exactly through N: {}/{count} random specs ({seconds:.1} s, limit 300 s)", count - failed),
    });

    // φ, ψ through degree N + 1 need a run at order N + 2.
    let symplectic_ok: Vec<bool> = suite
        .par_iter()
        .map(|s| {
            let n = s.order;
            symplectic(&exact(&s.clone().with_order(n + 2)), n)
        })
        .collect();
    let failed = symplectic_ok.iter().filter(|ok| !**ok).count();
    lines.push(Line {
        id: "2",
        ok: failed == 0,
        text: format!("symplecticity of (φ,ψ) exactly through N: {}/{count} specs", count - failed),
    });

    let resonant = runs.iter().all(|a| a.k.terms().all(|(e, _)| e.is_resonant()));
    let normalized = runs.iter().all(|a| phi_residual(a).is_zero());
    let witness = suite.iter().enumerate().find_map(|(i, s)| {
        let mut z = s.clone();
        z.mode = NormalizationMode::Zero;
        let r = phi_residual(&exact(&z));
        let found = r.terms().next().map(|(e, c)| format!("member {i}, {e:?} coefficient {c}"));
        found
    });
    lines.push(Line {
        id: "3",
        ok: resonant && normalized && witness.is_some(),
        text: format!(
            "K resonant-only: {resonant}; phi mode residual zero: {normalized}; zero mode residual witness: {}",
            witness.as_deref().unwrap_or("none")
        ),
    });

    let checks: Vec<Result<usize, String>> = runs.par_iter().map(integrals_commute).collect();
    let first_err = checks.iter().enumerate().find_map(|(i, c)| c.as_ref().err().map(|e| format!("member {i}: {e}")));
    let total: usize = checks.iter().filter_map(|c| c.as_ref().ok()).sum();
    lines.push(Line {
        id: "5",
        ok: first_err.is_none(),
        text: match first_err {
            None => format!("{{P_k,H}} = 0, {{P_j,P_k}} = 0 through N−1 and J = 0 for {total} pulled-back integrals"),
            Some(e) => format!("first-integral suite failed at {e}"),
        },
    });
}

fn audit_criteria(lines: &mut Vec<Line>) {
    let clock = Instant::now();
    let reports = run_matrix(&default_matrix(0), None);
    let seconds = clock.elapsed().as_secs_f64();
    let mut bad = Vec::new();
    let mut rows = 0;
    for (label, r) in &reports {
        match r {
            Ok(r) => {
                rows += r.rows.len();
                if !r.passed() {
                    bad.push(label.clone());
                }
            }
            Err(e) => bad.push(format!("{label} ({e})")),
        }
    }
    lines.push(Line {
        id: "4a",
        ok: bad.is_empty() && seconds <= 600.0,
        text: format!(
            "default audit matrix: {} cells, {rows} degree bounds, failing: [{}] ({seconds:.1} s, limit 600 s)",
            reports.len(),
            bad.join(", ")
        ),
    });

    let k4 = |direction: &str| {
        let base = "n = 1\norder = 6\nlambda 1 = 1\n";
        let p = PencilSpec::new(spec(base), spec(&format!("{base}{direction}"))).unwrap();
        let r = audit(&p).unwrap();
        let observed = r.object("K").find(|row| row.l == 4).and_then(|row| row.observed);
        (r.passed(), observed)
    };
    let (cubic_pass, cubic) = k4("term x1^3 = 1\n");
    let (generic_pass, generic) = k4("term x1^2 y1 = 1\nterm x1 y1^2 = 1\n");
    let show = |d: Option<usize>| d.map_or_else(|| "-inf".to_string(), |d| d.to_string());
    lines.push(Line {
        id: "4b",
        ok: cubic_pass && cubic == Some(2),
        text: format!(
            "x₁³ pencil attains deg_t K₄ = 2: observed {} (bounds {}); x₁²y₁ + x₁y₁² pencil observes {} (bounds {})",
            show(cubic),
            if cubic_pass { "PASS" } else { "FAIL" },
            show(generic),
            if generic_pass { "PASS" } else { "FAIL" },
        ),
    });
}

fn interpolation_criterion(lines: &mut Vec<Line>) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases = Vec::new();
    for i in 0..10 {
        let (lambda, radicals) = lambdas()[i % 3].clone();
        let order = rng.gen_range(5..=7);
        let density = if lambda.len() == 1 { 1.0 } else { 0.25 };
        let shape = RandomSpec::dense(order, lambda, radicals).with_density(density);
        let pencil = PencilSpec::new(shape.sample(&mut rng), shape.sample(&mut rng)).unwrap();
        let l = rng.gen_range(3..=order);
        // l + 1 distinct nodes, more than the l − 1 coefficients of a degree l − 2 polynomial.
        let mut nodes: Vec<Radical> = Vec::new();
        while nodes.len() <= l as usize {
            let t = Radical::from_rational(Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=3).into()));
            if !nodes.contains(&t) {
                nodes.push(t);
            }
        }
        cases.push((pencil, l, nodes));
    }
    let results: Vec<_> = cases
        .par_iter()
        .map(|(p, l, nodes)| {
            let art = param_run(p).unwrap();
            (*l, spot_check_interpolation(p, &art, *l, nodes).unwrap())
        })
        .collect();
    let matched = results.iter().filter(|(_, s)| s.mismatch.is_none()).count();
    let degrees: Vec<String> = results.iter().map(|(l, _)| l.to_string()).collect();
    lines.push(Line {
        id: "6",
        ok: matched == results.len(),
        text: format!(
            "interpolation of exact runs reproduces parameter-ring K_l bit-exactly: {matched}/{} pairs (l = {})",
            results.len(),
            degrees.join(",")
        ),
    });
}

fn outside_points(rng: &mut ChaCha8Rng, domain: &GreenDomain, count: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let t = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let outside = match domain {
            GreenDomain::Disk { center, radius } => (t - center).norm() > radius + 1e-3,
            GreenDomain::Interval { a, b } => t.im.abs() > 1e-3 || t.re < a - 1e-3 || t.re > b + 1e-3,
        };
        if outside {
            pts.push(t);
        }
    }
    pts
}

fn bernstein_criterion(lines: &mut Vec<Line>) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for domain in [GreenDomain::unit_disk(), GreenDomain::unit_interval()] {
        for _ in 0..200 {
            let deg = rng.gen_range(0..=10);
            let p: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let pts = outside_points(&mut rng, &domain, 50);
            let v = bernstein_check(&p, &domain, &pts).unwrap();
            worst = worst.max(v.max_ratio);
            if v.max_ratio > 1.0 + BERNSTEIN_SLACK {
                failures += 1;
            }
        }
    }
    let disk = GreenDomain::unit_disk();
    let mut extremal = 0.0f64;
    for n in 1..=10 {
        let mut p = vec![Complex64::zero(); n + 1];
        p[n] = Complex64::one();
        let pts = outside_points(&mut rng, &disk, 50);
        let v = bernstein_check(&p, &disk, &pts).unwrap();
        extremal = extremal.max((v.max_ratio - 1.0).abs());
    }
    lines.push(Line {
        id: "7",
        ok: failures == 0 && extremal <= BERNSTEIN_SLACK,
        text: format!(
            "Bernstein inequality on 400 random polynomials × 50 points: max ratio {worst:.15}; tⁿ extremal |ratio − 1| = {extremal:.1e}"
        ),
    });
}

fn green_criterion(lines: &mut Vec<Line>) {
    let disk = GreenDomain::unit_disk();
    let seg = GreenDomain::unit_interval();
    let i = Complex64::i();
    let errors = [
        (disk.green(Complex64::new(2.0, 0.0)).unwrap() - 2f64.ln()).abs(),
        seg.green(Complex64::new(1.0, 0.0)).unwrap().abs(),
        seg.green(Complex64::new(-1.0, 0.0)).unwrap().abs(),
        (seg.green(i).unwrap() - (1.0 + 2f64.sqrt()).ln()).abs(),
        (seg.green(-i).unwrap() - (1.0 + 2f64.sqrt()).ln()).abs(),
    ];
    let closed = errors.iter().cloned().fold(0.0, f64::max);
    let mut harmonic = 0.0f64;
    for t in [Complex64::new(2.0, 0.5), Complex64::new(-1.5, -1.5), Complex64::new(0.0, 3.0)] {
        for d in [&disk, &seg] {
            harmonic = harmonic.max(laplacian_residual(d, t, 1e-4).unwrap().abs());
        }
    }
    lines.push(Line {
        id: "8",
        ok: closed <= GREEN_TOL && harmonic <= HARMONIC_TOL,
        text: format!("Green closed forms max error {closed:.1e}; discrete harmonicity residual {harmonic:.1e}"),
    });
}

fn growth_criteria(lines: &mut Vec<Line>) {
    let radius = |terms: &str| {
        let s = spec(&format!("n = 1\norder = 20\nlambda 1 = 1\n{terms}"));
        growth_of_spec(&s, 1.0, &ConvertCtx::default()).unwrap().radius_estimate()
    };
    let quadratic = radius("");
    let quartic = radius("term x1^2 y1^2 = 1\n");
    lines.push(Line {
        id: "9a",
        ok: quadratic == f64::INFINITY && quartic == f64::INFINITY,
        text: format!("radius of x₁y₁: {quadratic}; of x₁y₁ + x₁²y₁²: {quartic}"),
    });
    let cubic = radius("term x1^3 = 1\n");
    lines.push(Line {
        id: "9c",
        ok: cubic.is_finite() && cubic > 0.0,
        text: format!("x₁y₁ + x₁³ at N = 20 has a finite radius estimate: {cubic}"),
    });
    let generic = radius("term x1^2 y1 = 1\nterm x1 y1^2 = 1\n");
    lines.push(Line {
        id: "9d",
        ok: ((generic - CUBIC_RADIUS_PIN) / CUBIC_RADIUS_PIN).abs() <= PIN_TOL,
        text: format!("x₁y₁ + x₁²y₁ + x₁y₁² at N = 20: radius {generic:.18} (pinned {CUBIC_RADIUS_PIN:.18})"),
    });
}

fn performance_criterion(lines: &mut Vec<Line>) {
    let timed = |s: HamiltonianSpec| {
        let clock = Instant::now();
        exact(&s);
        clock.elapsed().as_secs_f64()
    };
    let [one, two, _] = lambdas();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let small = timed(RandomSpec::dense(20, one.0, one.1).sample(&mut rng));
    let large = timed(RandomSpec::dense(12, two.0, two.1).sample(&mut rng));
    lines.push(Line {
        id: "10",
        ok: small <= 60.0 && large <= 300.0,
        text: format!("dense exact runs: 1-DOF N = 20 in {small:.1} s (limit 60 s), 2-DOF N = 12 in {large:.1} s (limit 300 s)"),
    });
}

fn main() -> ExitCode {
    let clock = Instant::now();
    let mut lines = Vec::new();
    suite_criteria(&mut lines);
    audit_criteria(&mut lines);
    interpolation_criterion(&mut lines);
    bernstein_criterion(&mut lines);
    green_criterion(&mut lines);
    growth_criteria(&mut lines);
    performance_criterion(&mut lines);
    lines.sort_by_key(|l| {
        let digits: String = l.id.chars().take_while(char::is_ascii_digit).collect();
        (digits.parse::<u32>().unwrap_or(0), l.id)
    });

    let mut unexpected = Vec::new();
    for l in &lines {
        let known = KNOWN_RED.contains(&l.id);
        let tag = match (l.ok, known) {
            (true, false) => "",
            (false, true) => "  [known: normal form is ξη for every t]",
            (true, true) => "  [known red now passes]",
            (false, false) => "",
        };
        println!("{} {:>3}  {}{tag}", if l.ok { "PASS" } else { "FAIL" }, l.id, l.text);
        if l.ok == known {
            unexpected.push(l.id);
        }
    }
    let red = lines.iter().filter(|l| !l.ok).count();
    println!(
        "{} criteria, {} PASS, {red} FAIL ({} known), {:.1} s",
        lines.len(),
        lines.len() - red,
        KNOWN_RED.len(),
        clock.elapsed().as_secs_f64()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected verdicts: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
