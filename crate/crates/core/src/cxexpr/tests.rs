use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64;
use proptest::prelude::*;

use crate::error::{EvalErrorKind, ParseErrorKind};
use crate::numdiff;

use super::ComplexExpr;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn parses_bare_variable() {
    assert_eq!(ComplexExpr::parse("z").unwrap(), ComplexExpr::Z);
}

#[test]
fn parses_literals_products_and_conj() {
    let e = ComplexExpr::parse("(1+2i)*z^2 + conj(z)").unwrap();
    let expected = ComplexExpr::add(
        ComplexExpr::mul(
            ComplexExpr::Const(c(1.0, 2.0)),
            ComplexExpr::pow(ComplexExpr::Z, c(2.0, 0.0)),
        ),
        ComplexExpr::Z.conj_expr(),
    );
    assert_eq!(e, expected);
}

#[test]
fn dangling_operator_reports_offset() {
    let err = ComplexExpr::parse("z +").unwrap_err();
    assert_eq!(err.offset, 3);
}

#[test]
fn empty_input_is_rejected() {
    let err = ComplexExpr::parse("   ").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::EmptyInput);
}

#[test]
fn unknown_identifier_is_rejected() {
    let err = ComplexExpr::parse("2*w").unwrap_err();
    assert_eq!(err.offset, 2);
    assert!(matches!(err.kind, ParseErrorKind::UnknownIdentifier(ref n) if n == "w"));
}

#[test]
fn non_constant_exponent_is_rejected() {
    let err = ComplexExpr::parse("z^z").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::NonConstantExponent);
}

#[test]
fn evaluates_square() {
    let e = ComplexExpr::parse("z^2").unwrap();
    assert_eq!(e.eval(c(1.0, 1.0)).unwrap(), c(0.0, 2.0));
}

#[test]
fn evaluates_conj() {
    let e = ComplexExpr::parse("conj(z)").unwrap();
    assert_eq!(e.eval(c(3.0, -4.0)).unwrap(), c(3.0, 4.0));
}

#[test]
fn division_by_zero_reports_pole_at_point() {
    let e = ComplexExpr::parse("1/z").unwrap();
    let err = e.eval(c(0.0, 0.0)).unwrap_err();
    assert_eq!(err.kind, EvalErrorKind::Pole);
    assert_eq!(err.at, c(0.0, 0.0));
}

#[test]
fn log_of_zero_reports_branch_point() {
    let e = ComplexExpr::parse("log(z)").unwrap();
    let err = e.eval(c(0.0, 0.0)).unwrap_err();
    assert_eq!(err.kind, EvalErrorKind::BranchPoint);
}

#[test]
fn dz_of_square_is_two_z() {
    let d = ComplexExpr::parse("z^2").unwrap().wirtinger_dz();
    for &z in &[c(0.3, 0.1), c(-0.5, 0.8), c(2.0, -1.0)] {
        assert!((d.eval(z).unwrap() - 2.0 * z).norm() < 1e-15);
    }
}

#[test]
fn dz_of_conj_is_zero() {
    let d = ComplexExpr::parse("conj(z)").unwrap().wirtinger_dz();
    assert_eq!(d.constant_value(), Some(c(0.0, 0.0)));
}

#[test]
fn dzbar_of_modulus_squared_is_z() {
    let d = ComplexExpr::parse("z*conj(z)").unwrap().wirtinger_dzbar();
    for &z in &[c(0.2, -0.4), c(1.0, 1.0)] {
        assert!((d.eval(z).unwrap() - z).norm() < 1e-15);
    }
}

#[test]
fn principal_branch_of_sqrt_and_log() {
    let s = ComplexExpr::parse("sqrt(z)").unwrap();
    // principal sqrt of -1 is +i
    assert!((s.eval(c(-1.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
    let l = ComplexExpr::parse("log(z)").unwrap();
    // principal log of i is iπ/2
    let v = l.eval(c(0.0, 1.0)).unwrap();
    assert!((v - c(0.0, core::f64::consts::FRAC_PI_2)).norm() < 1e-15);
}

#[test]
fn non_integer_power_uses_principal_log() {
    let e = ComplexExpr::parse("z^0.5").unwrap();
    let s = ComplexExpr::parse("sqrt(z)").unwrap();
    for &z in &[c(0.3, 0.4), c(-0.5, 0.2), c(2.0, -3.0)] {
        let via_pow = e.eval(z).unwrap();
        let via_sqrt = s.eval(z).unwrap();
        assert!((via_pow - via_sqrt).norm() < 1e-12 * via_sqrt.norm().max(1.0));
    }
}

/// Expressions exercising every node kind, paired with sample points that
/// stay away from poles and branch cuts.
fn checked_corpus() -> Vec<(&'static str, Vec<Complex64>)> {
    let inner = alloc::vec![c(0.31, 0.17), c(-0.42, 0.55), c(0.05, -0.61)];
    let right = alloc::vec![c(0.6, 0.2), c(0.4, -0.3)];
    alloc::vec![
        ("z^3 - 2*z + (0.5+0.5i)", inner.clone()),
        ("exp(z)*conj(z)", inner.clone()),
        ("1/(z - 2)", inner.clone()),
        ("conj(z)^2*z", inner.clone()),
        ("exp(conj(z))", inner.clone()),
        ("log(z + 2)", inner.clone()),
        ("sqrt(z + 2)", inner.clone()),
        ("(z + conj(z))^2", inner.clone()),
        ("z/(1 - z*conj(z))", inner.clone()),
        ("conj(z/(1 - z))", right.clone()),
        ("exp(z^2) - conj(z)/(conj(z) - 3)", inner.clone()),
        ("sqrt(exp(z) + 2)", inner.clone()),
        ("log(2 + z*conj(z))", inner),
    ]
}

#[test]
fn symbolic_derivatives_match_finite_differences() {
    for (text, points) in checked_corpus() {
        let e = ComplexExpr::parse(text).unwrap();
        let dz = e.wirtinger_dz();
        let dzbar = e.wirtinger_dzbar();
        for z in points {
            let h = numdiff::default_step(z);
            let (fd_dz, fd_dzbar) = numdiff::wirtinger_fd(|w| e.eval(w), z, h).unwrap();
            let sym_dz = dz.eval(z).unwrap();
            let sym_dzbar = dzbar.eval(z).unwrap();
            assert!(
                (sym_dz - fd_dz).norm() <= 1e-6 * sym_dz.norm().max(1.0),
                "dz mismatch for `{text}` at {z}: sym {sym_dz}, fd {fd_dz}"
            );
            assert!(
                (sym_dzbar - fd_dzbar).norm() <= 1e-6 * sym_dzbar.norm().max(1.0),
                "dzbar mismatch for `{text}` at {z}: sym {sym_dzbar}, fd {fd_dzbar}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// property tests
// ---------------------------------------------------------------------------

fn leaf() -> impl Strategy<Value = ComplexExpr> {
    prop_oneof![
        3 => Just(ComplexExpr::Z),
        2 => (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| ComplexExpr::Const(c(re, im))),
    ]
}

/// Random trees over a pole- and cut-free operator subset.
fn tree() -> impl Strategy<Value = ComplexExpr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ComplexExpr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ComplexExpr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ComplexExpr::mul(a, b)),
            inner.clone().prop_map(|a| a.conj_expr()),
            inner.clone().prop_map(ComplexExpr::neg),
            inner.clone().prop_map(ComplexExpr::exp),
            (inner.clone(), 0u8..4).prop_map(|(a, n)| ComplexExpr::pow(a, c(n as f64, 0.0))),
            // denominator shifted well away from the sampled disk
            (inner.clone(), inner).prop_map(|(a, b)| {
                ComplexExpr::div(a, ComplexExpr::add(b, ComplexExpr::Const(c(7.0, 1.0))))
            }),
        ]
    })
}

fn sample_point() -> impl Strategy<Value = Complex64> {
    (-0.7..0.7f64, -0.7..0.7f64).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prop_symbolic_matches_fd(e in tree(), z in sample_point()) {
        let value = e.eval(z);
        prop_assume!(value.is_ok());
        prop_assume!(value.unwrap().norm() < 1e6);
        let h = numdiff::default_step(z);
        let fd = numdiff::wirtinger_fd(|w| e.eval(w), z, h);
        prop_assume!(fd.is_ok());
        let (fd_dz, fd_dzbar) = fd.unwrap();
        let sym_dz = e.wirtinger_dz().eval(z).unwrap();
        let sym_dzbar = e.wirtinger_dzbar().eval(z).unwrap();
        prop_assert!((sym_dz - fd_dz).norm() <= 1e-6 * sym_dz.norm().max(1.0));
        prop_assert!((sym_dzbar - fd_dzbar).norm() <= 1e-6 * sym_dzbar.norm().max(1.0));
    }

    #[test]
    fn prop_holomorphic_has_zero_dzbar(e in tree(), z in sample_point()) {
        prop_assume!(e.is_analytic());
        let d = e.wirtinger_dzbar();
        prop_assume!(d.eval(z).is_ok());
        prop_assert!(d.eval(z).unwrap().norm() < 1e-12);
    }

    #[test]
    fn prop_conj_duality(e in tree(), z in sample_point()) {
        // evaluate(dzbar(e), z) == conj(evaluate(dz(conj(e)), z))
        let lhs = e.wirtinger_dzbar().eval(z);
        let rhs = e.conj_expr().wirtinger_dz().eval(z);
        prop_assume!(lhs.is_ok() && rhs.is_ok());
        let (lhs, rhs) = (lhs.unwrap(), rhs.unwrap().conj());
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn prop_print_parse_round_trip(e in tree(), z in sample_point()) {
        let text = e.to_string();
        let back = ComplexExpr::parse(&text)
            .unwrap_or_else(|err| panic!("`{text}` failed to re-parse: {err}"));
        match (e.eval(z), back.eval(z)) {
            (Ok(a), Ok(b)) => prop_assert!(
                (a - b).norm() <= 1e-12 * a.norm().max(1.0),
                "round trip of `{}` changed value: {} vs {}", text, a, b
            ),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "round trip of `{text}` changed outcome: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn display_examples_are_stable() {
    let e = ComplexExpr::parse("(1+2i)*z^2 + conj(z)").unwrap();
    assert_eq!(format!("{e}"), "(1+2i)*z^2 + conj(z)");
    let d = ComplexExpr::parse("z^2").unwrap().wirtinger_dz();
    assert_eq!(format!("{d}"), "2*z");
}
