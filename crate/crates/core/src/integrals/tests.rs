use super::*;
use crate::engine::normalize_spec;
use crate::hamiltonian::HamiltonianSpec;
use num_traits::Zero;

use crate::scalar::{Radical, Rational};

fn q(a: i64, b: i64) -> Radical {
    Radical::from_rational(Rational::new(a.into(), b.into()))
}

fn run(text: &str) -> NormalFormArtifacts<Radical> {
    normalize_spec::<Radical>(&HamiltonianSpec::parse(text).unwrap(), &ConvertCtx::default()).unwrap()
}

fn series(n: usize, order: u32, terms: &[(&[u16], &[u16], Radical)]) -> GradedSeries<Radical> {
    GradedSeries::from_terms(
        n,
        order,
        terms.iter().map(|(a, b, c)| (Exponent::new(a, b), c.clone())),
    )
    .unwrap()
}

const TWO_DOF: &str = "n = 2\norder = 7\nradicals = 2\nlambda 1 = 1\nlambda 2 = sqrt(2)\n\
    term x1^2 y2 = 1/2\nterm x1 y1 y2 = -1\nterm x2^3 = 3\nterm x1 x2 y1 y2 = 2/3\nterm y1^4 = 1\n";

#[test]
fn identity_generating_function_inverts_to_identity() {
    let art = run("n = 1\norder = 6\nlambda 1 = 1\n");
    let inv = inverse_maps(&art);
    assert_eq!(inv.xi[0], GradedSeries::variable(1, 0, 5));
    assert_eq!(inv.eta[0], GradedSeries::variable(1, 1, 5));
    let p = first_integrals(&inv);
    assert_eq!(p[0].p, series(1, 6, &[(&[1], &[1], q(1, 1))]));
}

#[test]
fn cubic_generating_function_by_hand() {
    // y = v_x = η + 3x², ξ = v_η = x.
    let v = series(1, 6, &[(&[1], &[1], q(1, 1)), (&[3], &[0], q(1, 1))]);
    let inv = inverse_of_generating(&v, 6);
    assert_eq!(inv.xi[0], GradedSeries::variable(1, 0, 5));
    assert_eq!(inv.eta[0], series(1, 5, &[(&[0], &[1], q(1, 1)), (&[2], &[0], q(-3, 1))]));
}

#[test]
fn cubic_first_integral_is_the_hamiltonian() {
    // v = xη − x³/3 gives η = y + x², so P = x(y + x²) = H.
    let art = run("n = 1\norder = 5\nlambda 1 = 1\nterm x1^3 = 1\n");
    let inv = inverse_maps(&art);
    let p = first_integrals(&inv);
    assert_eq!(p[0].p, series(1, 5, &[(&[1], &[1], q(1, 1)), (&[3], &[0], q(1, 1))]));
    assert!(p[0].bracket_residual(&art.h).unwrap().is_zero());
}

#[test]
fn inverse_round_trips_through_transform_degree() {
    for text in [
        "n = 1\norder = 8\nlambda 1 = 1\nterm x1^3 = 1\nterm x1 y1^2 = -2\nterm x1^2 y1^2 = 1/3\n",
        TWO_DOF,
    ] {
        let art = run(text);
        let inv = inverse_maps(&art);
        let through = inv.order();
        let x_of = |s: &GradedSeries<Radical>| s.compose_truncated(&inv.substitution(), through).unwrap();
        for k in 0..art.n {
            assert_eq!(x_of(&art.phi[k]), GradedSeries::variable(art.n, k, through));
            assert_eq!(x_of(&art.psi[k]), GradedSeries::variable(art.n, art.n + k, through));
            let back = inv.xi[k].compose_truncated(&art.transformation(), through).unwrap();
            assert_eq!(back, GradedSeries::variable(art.n, k, through));
        }
    }
}

#[test]
fn two_dof_integrals_commute_with_h_and_each_other() {
    let art = run(TWO_DOF);
    let inv = inverse_maps(&art);
    let ps = first_integrals(&inv);
    for p in &ps {
        let r = p.bracket_residual(&art.h).unwrap();
        assert!(r.is_zero(), "{{P, H}} = {r:?}");
        assert_eq!(r.order(), art.order - 1);
    }
    for (_, r) in involution_residuals(&ps).unwrap() {
        assert!(r.is_zero());
    }
}

#[test]
fn pulled_back_integrals_are_resonant() {
    let art = run(TWO_DOF);
    let ps = first_integrals(&inverse_maps(&art));
    for (k, p) in ps.iter().enumerate() {
        let split = pull_back_and_split(&p.p, &art).unwrap();
        assert!(split.j.is_zero());
        assert!(split.leading.is_none());
        // P_k(φ, ψ) = ξ_k η_k exactly.
        let mut e = vec![0u16; 2];
        e[k] = 1;
        assert_eq!(split.t, series(2, art.order, &[(&e, &e, q(1, 1))]));
    }
}

#[test]
fn universal_integrals() {
    let art = run(TWO_DOF);
    let ps = first_integrals(&inverse_maps(&art));
    let ctx = ConvertCtx::default();
    let w1 = universal_integral(&OmegaPoly::parse("w1", 2).unwrap(), &ps, &ctx).unwrap();
    assert_eq!(w1.p, ps[0].p);
    let sum = universal_integral(&OmegaPoly::parse("w1 + w2", 2).unwrap(), &ps, &ctx).unwrap();
    assert_eq!(sum.p, ps[0].p.add(&ps[1].p).unwrap());
    let f = OmegaPoly::parse("w1^2 + 1/2*w1*w2 - w2", 2).unwrap();
    let u = universal_integral(&f, &ps, &ctx).unwrap();
    assert!(u.bracket_residual(&art.h).unwrap().is_zero());
    assert!(pull_back_and_split(&u.p, &art).unwrap().j.is_zero());
    let too_high = OmegaPoly::parse("w1^4", 2).unwrap();
    assert!(matches!(
        universal_integral(&too_high, &ps, &ctx),
        Err(IntegralError::DegreeTooHigh { degree: 4, order: 7, max: 3 })
    ));
}

#[test]
fn cubic_square_integral() {
    let art = run("n = 1\norder = 9\nlambda 1 = 1\nterm x1^3 = 1\nterm y1^3 = 2\n");
    let ps = first_integrals(&inverse_maps(&art));
    let f = OmegaPoly::parse("w1^2", 1).unwrap();
    let u = universal_integral(&f, &ps, &ConvertCtx::default()).unwrap();
    assert_eq!(u.p, ps[0].p.mul_truncated(&ps[0].p, 9).unwrap());
    assert!(u.bracket_residual(&art.h).unwrap().is_zero());
}

#[test]
fn decomposition_by_support() {
    let qs = series(2, 6, &[(&[1, 0], &[1, 0], q(1, 1)), (&[2, 0], &[1, 1], q(1, 1))]);
    let (t, j) = decompose_resonant(&qs);
    assert_eq!(t, series(2, 6, &[(&[1, 0], &[1, 0], q(1, 1))]));
    assert_eq!(j, series(2, 6, &[(&[2, 0], &[1, 1], q(1, 1))]));
    assert_eq!(t.add(&j).unwrap(), qs);
    let art = run(TWO_DOF);
    assert!(decompose_resonant(&art.k).1.is_zero());
}

#[test]
fn non_integral_reports_its_leading_monomial() {
    let art = run(TWO_DOF);
    let cand = series(2, 7, &[(&[1, 0], &[0, 1], q(1, 1)), (&[1, 0], &[1, 0], q(1, 1))]);
    assert!(!cand.poisson_bracket(&art.h, 6).unwrap().is_zero());
    let split = pull_back_and_split(&cand, &art).unwrap();
    let lead = split.leading.unwrap();
    assert_eq!(lead.exponent, Exponent::new(&[1, 0], &[0, 1]));
    assert_eq!(lead.divisor, q(1, 1) - Radical::sqrt(2));
    assert!(!lead.divisor.is_zero());
}

#[test]
fn residual_table_lists_every_degree() {
    let s = series(1, 6, &[(&[1], &[1], q(-3, 1)), (&[3], &[0], q(1, 2))]);
    assert_eq!(residual_by_degree(&s, 3), vec![(0, 0.0), (1, 0.0), (2, 3.0), (3, 0.5)]);
}
