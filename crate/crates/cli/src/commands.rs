use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use birkhoff::audit::{run_matrix, AuditCell, AuditError, PencilSpec};
use birkhoff::convergence::{
    extrapolate, family_scan, growth_of_spec, normalize_at, parse_complex, scan_to_csv, ConvergenceError, GrowthReport,
    ScanGrid,
};
use birkhoff::engine::{normalize_spec, EngineError, NormalFormArtifacts};
use birkhoff::hamiltonian::{check_nonresonant, DomainTag, NonResonance};
use birkhoff::integrals::{
    first_integrals, involution_residuals, inverse_maps, pull_back_and_split, residual_by_degree, universal_integral,
    FirstIntegral, IntegralError, OmegaPoly,
};
use birkhoff::scalar::{ConvertCtx, DumpCoeff, FromExact, DEFAULT_PRECISION};
use birkhoff::series::dump::{write_components, write_series};
use birkhoff::{BigFloat, ComplexFloat, HamiltonianSpec, NormalizationMode, ParamPoly, Radical};
use clap::Args;

use crate::{CliError, Run};

fn engine_error(e: EngineError) -> CliError {
    match e {
        EngineError::Resonance { alpha, beta } => {
            CliError::Input(format!("frequencies are resonant: witness alpha={alpha:?} beta={beta:?}"))
        }
        EngineError::Spec(e) => CliError::Input(e.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn audit_error(e: AuditError) -> CliError {
    match e {
        AuditError::Engine(e) => engine_error(e),
        AuditError::Spec(_) | AuditError::Mismatch(_) | AuditError::NotExact => CliError::Input(e.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn convergence_error(e: ConvergenceError) -> CliError {
    match e {
        ConvergenceError::Engine(e) => engine_error(e),
        ConvergenceError::Audit(e) => audit_error(e),
        ConvergenceError::Extrapolation(m) => CliError::Internal(m),
        other => CliError::Input(other.to_string()),
    }
}

fn integral_error(e: IntegralError) -> CliError {
    match e {
        IntegralError::Engine(e) => engine_error(e),
        IntegralError::Omega(_) | IntegralError::DegreeTooHigh { .. } | IntegralError::SymbolCount { .. } => {
            CliError::Input(e.to_string())
        }
        other => CliError::Internal(other.to_string()),
    }
}

/// Overrides shared by the single-spec commands.
#[derive(Debug, Args)]
pub struct SpecOverrides {
    /// Truncation order `N`, replacing the spec's.
    #[arg(long)]
    order: Option<u32>,
    /// Coefficient domain: `exact`, `param`, `float` or `float<bits>`.
    #[arg(long)]
    domain: Option<DomainTag>,
}

fn load_spec(path: &Path, over: &SpecOverrides, run: &mut Run) -> Result<HamiltonianSpec, CliError> {
    let text = crate::output::read_input(path, &mut run.inputs)?;
    let mut spec =
        HamiltonianSpec::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(order) = over.order {
        if !(2..=255).contains(&order) {
            return Err(CliError::Input(format!("order {order} outside 2..=255")));
        }
        spec = spec.with_order(order);
    }
    if let Some(domain) = over.domain {
        spec.domain = domain;
    }
    // `float` without an explicit width takes the run precision.
    if spec.domain == DomainTag::Float(DEFAULT_PRECISION) {
        spec.domain = DomainTag::Float(run.precision);
    }
    Ok(spec)
}

fn ctx_for(spec: &HamiltonianSpec, run: &Run) -> ConvertCtx {
    match spec.domain {
        DomainTag::Float(bits) => ConvertCtx { precision: bits },
        _ => ConvertCtx { precision: run.precision },
    }
}

/// Float specs declaring `sqrt(-1)` need complex coefficients.
fn needs_complex(spec: &HamiltonianSpec) -> bool {
    spec.radicals.contains(&-1)
}

fn nonresonance_line(spec: &HamiltonianSpec) -> Result<String, CliError> {
    match check_nonresonant(&spec.lambda, spec.order) {
        NonResonance::Fail { alpha, beta } => Err(CliError::Input(format!(
            "frequencies are resonant up to order {}: witness alpha={alpha:?} beta={beta:?}",
            spec.order
        ))),
        pass => Ok(format!("non-resonance through order {}: {pass}", spec.order)),
    }
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Hamiltonian spec file.
    spec: PathBuf,
    #[command(flatten)]
    over: SpecOverrides,
    /// Normalization of the resonant part of the generating function: `phi` or `zero`.
    #[arg(long)]
    mode: Option<NormalizationMode>,
}

fn write_artifacts<S: DumpCoeff>(art: &NormalFormArtifacts<S>, header: &str, run: &mut Run) -> Result<(), CliError> {
    run.out.write("K.dump", &write_series(&art.k))?;
    run.out.write("v.dump", &write_series(&art.v))?;
    run.out.write("phi.dump", &write_components(&art.phi))?;
    run.out.write("psi.dump", &write_components(&art.psi))?;
    let mut log = String::from(header);
    let _ = writeln!(log, "# mode: {}", art.mode);
    let _ = writeln!(log, "# transformation exact through degree {}", art.transform_degree());
    if let Some(d) = &art.min_divisor {
        let _ = writeln!(log, "# smallest divisor: {:e} at {:?}", d.magnitude, d.exponent);
    }
    log.push_str(&art.log.to_text());
    run.out.write("log.txt", &log)?;
    println!(
        "K: {} terms, v: {} terms, wrote {}",
        art.k.num_terms(),
        art.v.num_terms(),
        run.out.written().join(", ")
    );
    Ok(())
}

fn normalize_as<S>(spec: &HamiltonianSpec, ctx: &ConvertCtx, header: &str, run: &mut Run) -> Result<(), CliError>
where
    S: FromExact + DumpCoeff,
    S::Field: FromExact,
{
    let art = normalize_spec::<S>(spec, ctx).map_err(engine_error)?;
    write_artifacts(&art, header, run)
}

pub fn normalize(args: &NormalizeArgs, run: &mut Run) -> Result<(), CliError> {
    let mut spec = load_spec(&args.spec, &args.over, run)?;
    if let Some(mode) = args.mode {
        spec.mode = mode;
    }
    let verdict = nonresonance_line(&spec)?;
    println!("{verdict}");
    let header = format!("# {verdict}\n# domain: {}\n", spec.domain);
    let ctx = ctx_for(&spec, run);
    match spec.domain {
        DomainTag::Exact => normalize_as::<Radical>(&spec, &ctx, &header, run),
        DomainTag::Param => normalize_as::<ParamPoly<Radical>>(&spec, &ctx, &header, run),
        DomainTag::Float(_) if needs_complex(&spec) => normalize_as::<ComplexFloat>(&spec, &ctx, &header, run),
        DomainTag::Float(_) => normalize_as::<BigFloat>(&spec, &ctx, &header, run),
    }
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    /// Hamiltonian spec file.
    spec: PathBuf,
    #[command(flatten)]
    over: SpecOverrides,
    /// Rate of the probe `r_l ρ₀^{-l}`.
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
}

fn growth_summary(g: &GrowthReport) -> String {
    let mut s = String::new();
    match g.fit {
        Some(f) => {
            let _ = write!(
                s,
                "radius estimate {:.6e} from degrees {}..={} ({} points, slope {:.6} +- {})",
                f.radius(),
                f.lo,
                f.hi,
                f.points,
                f.slope,
                f.slope_stderr.map_or_else(|| "n/a".into(), |e| format!("{e:.2e}")),
            );
        }
        None => s.push_str("radius estimate inf (no growth in the upper half of the degrees)"),
    }
    let _ = write!(s, "; probe tail {:.6e} at rho0 = {}", g.probe_tail(), g.rho0);
    if let Some(d) = g.min_divisor {
        let _ = write!(s, "; smallest divisor {d:.6e}");
    }
    s
}

pub fn growth(args: &GrowthArgs, run: &mut Run) -> Result<(), CliError> {
    let spec = load_spec(&args.spec, &args.over, run)?;
    println!("{}", nonresonance_line(&spec)?);
    let report = growth_of_spec(&spec, args.rho0, &ctx_for(&spec, run)).map_err(convergence_error)?;
    run.out.write("growth.csv", &report.to_csv())?;
    let mut probe = String::from("l,q_l\n");
    for (l, q) in &report.probe {
        let _ = writeln!(probe, "{l},{q:.17e}");
    }
    run.out.write("probe.csv", &probe)?;
    println!("{}", growth_summary(&report));
    Ok(())
}

#[derive(Debug, Args)]
pub struct IntegralsArgs {
    /// Hamiltonian spec file.
    spec: PathBuf,
    #[command(flatten)]
    over: SpecOverrides,
    /// Action polynomial `F(w1, …, wn)` whose integral `F(P₁, …, Pₙ)` is built; repeatable.
    #[arg(long)]
    universal: Vec<String>,
    /// Print the largest coefficient of every homogeneous part of `{P, H}`.
    #[arg(long)]
    check_bracket: bool,
}

pub fn integrals(args: &IntegralsArgs, run: &mut Run) -> Result<(), CliError> {
    let spec = load_spec(&args.spec, &args.over, run)?;
    println!("{}", nonresonance_line(&spec)?);
    let ctx = ctx_for(&spec, run);
    match spec.domain {
        DomainTag::Exact => integrals_as::<Radical>(&spec, &ctx, args, run),
        DomainTag::Param => integrals_as::<ParamPoly<Radical>>(&spec, &ctx, args, run),
        DomainTag::Float(_) if needs_complex(&spec) => integrals_as::<ComplexFloat>(&spec, &ctx, args, run),
        DomainTag::Float(_) => integrals_as::<BigFloat>(&spec, &ctx, args, run),
    }
}

fn integrals_as<S>(spec: &HamiltonianSpec, ctx: &ConvertCtx, args: &IntegralsArgs, run: &mut Run) -> Result<(), CliError>
where
    S: FromExact + DumpCoeff,
    S::Field: FromExact,
{
    let fs = args
        .universal
        .iter()
        .map(|text| OmegaPoly::parse(text, spec.n).map_err(|e| integral_error(e.into())))
        .collect::<Result<Vec<_>, _>>()?;
    let art = normalize_spec::<S>(spec, ctx).map_err(engine_error)?;
    let inv = inverse_maps(&art);
    let ps = first_integrals(&inv);
    let mut all: Vec<FirstIntegral<S>> = ps.clone();
    for f in &fs {
        all.push(universal_integral(f, &ps, ctx).map_err(integral_error)?);
    }

    run.out.write("xi.dump", &write_components(&inv.xi))?;
    run.out.write("eta.dump", &write_components(&inv.eta))?;
    let basic: Vec<_> = ps.iter().map(|p| p.p.clone()).collect();
    run.out.write("integrals.dump", &write_components(&basic))?;
    for (j, u) in all[ps.len()..].iter().enumerate() {
        let mut text = format!("# F = {}\n", u.origin);
        text.push_str(&write_series(&u.p));
        run.out.write(&format!("universal_{}.dump", j + 1), &text)?;
    }

    // Exact domains must vanish identically; float runs are held to half
    // their precision.
    let tolerance = if S::is_exact() {
        0.0
    } else {
        2f64.powi(-(ctx.precision.min(2000) as i32) / 2)
    };
    let mut ok = true;
    let mut bracket = String::from("integral,partner,degree,max_residual\n");
    let mut report = Vec::new();
    for p in &all {
        let r = p.bracket_residual(&art.h).map_err(|e| integral_error(e.into()))?;
        let through = r.order();
        let table = residual_by_degree(&r, through);
        let worst = table.iter().map(|(_, m)| *m).fold(0.0, f64::max);
        ok &= worst <= tolerance;
        for (d, m) in &table {
            let _ = writeln!(bracket, "{},H,{d},{m:e}", p.origin);
        }
        report.push(format!("{{{}, H}} through degree {through}: max residual {worst:e}", p.origin));
        if args.check_bracket {
            for (d, m) in &table {
                println!("  {{{}, H}} degree {d}: {m:e}", p.origin);
            }
        }
    }
    for ((j, k), r) in involution_residuals(&ps).map_err(|e| integral_error(e.into()))? {
        let table = residual_by_degree(&r, r.order());
        let worst = table.iter().map(|(_, m)| *m).fold(0.0, f64::max);
        ok &= worst <= tolerance;
        for (d, m) in &table {
            let _ = writeln!(bracket, "{},{},{d},{m:e}", ps[j].origin, ps[k].origin);
        }
        report.push(format!("{{{}, {}}}: max residual {worst:e}", ps[j].origin, ps[k].origin));
    }
    let mut resonant = String::from("integral,j_terms,leading_monomial,divisor_magnitude\n");
    for p in &all {
        let split = pull_back_and_split(&p.p, &art).map_err(|e| integral_error(e.into()))?;
        let worst = split.j.terms().map(|(_, c)| c.magnitude()).fold(0.0, f64::max);
        ok &= worst <= tolerance;
        match &split.leading {
            Some(lead) if worst > tolerance => {
                let _ = writeln!(
                    resonant,
                    "{},{},{:?},{:e}",
                    p.origin,
                    split.j.num_terms(),
                    lead.exponent,
                    <S::Field as birkhoff::scalar::Coeff>::magnitude(&lead.divisor)
                );
                report.push(format!("{}: non-resonant part J starts at {:?}", p.origin, lead.exponent));
            }
            _ => {
                let _ = writeln!(resonant, "{},0,,", p.origin);
                report.push(format!("{}: J = 0", p.origin));
            }
        }
    }
    run.out.write("bracket.csv", &bracket)?;
    run.out.write("resonant_split.csv", &resonant)?;
    for line in &report {
        println!("{line}");
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Fail("an integral does not commute with H or has a non-resonant part".into()))
    }
}

/// Reads a pencil from two spec files, or from one file holding both members
/// separated by a line `---`.
fn load_pencil(paths: &[PathBuf], order: Option<u32>, run: &mut Run) -> Result<(String, PencilSpec), CliError> {
    let parse = |text: &str, what: &str| {
        HamiltonianSpec::parse(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
    };
    let label = paths
        .first()
        .and_then(|p| p.file_stem())
        .map_or_else(|| "pencil".into(), |s| s.to_string_lossy().into_owned());
    let (base, direction) = match paths {
        [one] => {
            let text = crate::output::read_input(one, &mut run.inputs)?;
            let mut parts = text.split("\n---");
            let base = parts.next().unwrap_or_default();
            let Some(direction) = parts.next() else {
                return Err(CliError::Input(format!(
                    "{}: missing direction spec (give two files, or separate the members with a `---` line)",
                    one.display()
                )));
            };
            let direction = direction.split_once('\n').map_or("", |(_, rest)| rest);
            (parse(base, "base")?, parse(direction, "direction")?)
        }
        [b, d] => {
            let base = crate::output::read_input(b, &mut run.inputs)?;
            let direction = crate::output::read_input(d, &mut run.inputs)?;
            (parse(&base, "base")?, parse(&direction, "direction")?)
        }
        [] => return Err(CliError::Input("no pencil given".into())),
        _ => return Err(CliError::Input("a pencil has exactly two members".into())),
    };
    let (base, direction) = match order {
        Some(n) => (base.with_order(n), direction.with_order(n)),
        None => (base, direction),
    };
    Ok((label, PencilSpec::new(base, direction).map_err(audit_error)?))
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Pencil: base and direction spec files, or one file with both
    /// separated by `---`. Without it the default matrix is audited.
    pencil: Vec<PathBuf>,
    /// Truncation order, replacing the specs'.
    #[arg(long)]
    order: Option<u32>,
    /// Interpolate `K_l` from this many exact runs at `t = 0, 1, …` and
    /// compare with the parameter run.
    #[arg(long, value_name = "NODES")]
    spot_check: Option<usize>,
    /// Seed of the default matrix.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn audit(args: &AuditArgs, run: &mut Run) -> Result<(), CliError> {
    if args.spot_check.is_some_and(|m| m < 3) {
        return Err(CliError::Input("--spot-check needs at least 3 nodes".into()));
    }
    let cells = if args.pencil.is_empty() {
        run.seed = Some(args.seed);
        let cells = birkhoff::audit::default_matrix(args.seed);
        match args.order {
            Some(n) => cells
                .into_iter()
                .map(|c| {
                    let pencil = PencilSpec::new(c.pencil.base.with_order(n), c.pencil.direction.with_order(n))
                        .map_err(audit_error)?;
                    Ok(AuditCell { pencil, ..c })
                })
                .collect::<Result<Vec<_>, CliError>>()?,
            None => cells,
        }
    } else {
        let (label, pencil) = load_pencil(&args.pencil, args.order, run)?;
        vec![AuditCell { label, pencil }]
    };
    let results = run_matrix(&cells, args.spot_check);
    let mut csv = String::from("cell,object,l,k,observed_deg,bound,verdict\n");
    let mut all_passed = true;
    for (label, result) in results {
        let report = result.map_err(audit_error)?;
        for line in report.to_csv().lines().skip(1) {
            let _ = writeln!(csv, "{label},{line}");
        }
        let failed = report.rows.iter().filter(|r| !r.passed()).count()
            + report.spot_checks.iter().filter(|s| s.mismatch.is_some()).count();
        println!(
            "{label}: {} ({} bound rows, {} spot checks, {failed} failing)",
            if report.passed() { "PASS" } else { "FAIL" },
            report.rows.len(),
            report.spot_checks.len()
        );
        all_passed &= report.passed();
    }
    run.out.write("audit.csv", &csv)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Fail("a degree bound or spot check failed; see audit.csv".into()))
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Pencil: base and direction spec files, or one file with both
    /// separated by `---`.
    #[arg(required = true)]
    pencil: Vec<PathBuf>,
    /// `disk:c:R:M` (centre and four rings of M points up to radius R) or
    /// `interval:a:b:M` (M Chebyshev nodes).
    #[arg(long)]
    grid: String,
    /// Truncation order; defaults to 20 for one degree of freedom and 12 otherwise.
    #[arg(long)]
    order: Option<u32>,
    /// Rate of the probe `r_l ρ₀^{-l}`.
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    /// Off-grid point for the Bernstein extrapolation, e.g. `3` or `1+2i`.
    #[arg(long)]
    probe: Option<String>,
}

pub fn scan(args: &ScanArgs, run: &mut Run) -> Result<(), CliError> {
    let grid = ScanGrid::parse(&args.grid).map_err(convergence_error)?;
    let (_, pencil) = load_pencil(&args.pencil, None, run)?;
    let order = args.order.unwrap_or(if pencil.n() == 1 { 20 } else { 12 });
    let pencil = PencilSpec::new(pencil.base.with_order(order), pencil.direction.with_order(order))
        .map_err(audit_error)?;
    let t_star = match &args.probe {
        Some(text) => parse_complex(text).ok_or_else(|| CliError::Input(format!("bad probe point `{text}`")))?,
        None => grid.default_probe(),
    };
    let ctx = ConvertCtx { precision: run.precision };
    let rows = family_scan(&pencil, &grid.points(), args.rho0, &ctx).map_err(convergence_error)?;
    run.out.write("scan.csv", &scan_to_csv(&rows))?;
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    println!("scanned {} points at order {order}, {failures} engine failures", rows.len());

    if grid.resolvable_degree() + 2 < order as usize {
        eprintln!(
            "note: {} boundary nodes cannot resolve t-degree {}; extrapolation skipped",
            grid.resolvable_degree() + 1,
            order - 2
        );
        return Ok(());
    }
    let direct = normalize_at(&pencil, t_star, &ctx).map_err(engine_error)?;
    let ex = match extrapolate(&grid, &rows, t_star, &direct.k) {
        Ok(ex) => ex,
        Err(ConvergenceError::Extrapolation(m)) => {
            eprintln!("note: extrapolation skipped: {m}");
            return Ok(());
        }
        Err(e) => return Err(convergence_error(e)),
    };
    run.out.write("extrapolation.csv", &ex.to_csv())?;
    println!(
        "Bernstein extrapolation to t* = {t_star} (g = {:.6}): {}",
        ex.green,
        if ex.passed() { "PASS" } else { "FAIL" }
    );
    if ex.passed() {
        Ok(())
    } else {
        Err(CliError::Fail("an observed coefficient exceeds its Bernstein bound".into()))
    }
}
