//! Cross-module invariants: the estimate chains connecting criterion
//! margins, divided differences and measured Beltrami coefficients.

use schlicht_core::beltrami::{
    self, mu_fd, rho_bound, rho_bound_display, teichmuller_eta,
};
use schlicht_core::criteria::{
    k_condition_check, make_criterion, sup_ratio, CriterionKind, CriterionParams,
};
use schlicht_core::cxexpr::ComplexExpr;
use schlicht_core::extensions::{build_extension, BuildOptions, ExtensionTag};
use schlicht_core::maps::{
    delta_univalence_radius, divided_difference_sup, AnnulusGrid, DiskGrid, HarmonicMap, Subject,
};
use schlicht_core::weights::SigmaWeight;
use schlicht_core::Complex64;

fn expr(s: &str) -> ComplexExpr {
    ComplexExpr::parse(s).unwrap()
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pipeline_map() -> HarmonicMap {
    HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), c64(1.0, 0.0)).unwrap()
}

fn measured_margin(map: &HarmonicMap) -> (f64, f64) {
    let cr = make_criterion(
        CriterionKind::MainHarmonicSigma,
        &Subject::Harmonic(map.clone()),
        Some(&SigmaWeight::becker()),
        CriterionParams::default(),
    )
    .unwrap();
    let report = sup_ratio(&cr, &DiskGrid::polar(64, 128), 1.0).unwrap();
    (report.k_hat, report.omega_sup.unwrap())
}

#[test]
fn divided_difference_is_bounded_by_inverse_delta() {
    let map = pipeline_map();
    let (k_hat, omega_sup) = measured_margin(&map);
    let dd = divided_difference_sup(&map, 64).unwrap();
    let inverse_delta = (k_hat + omega_sup) / (1.0 + k_hat * omega_sup);
    assert!(
        dd <= inverse_delta + 1e-9,
        "divided differences {dd} exceed 1/δ = {inverse_delta}"
    );
    assert!(inverse_delta < 1.0);
    // 1/δ agrees with the univalence radius
    let delta = delta_univalence_radius(k_hat, omega_sup).unwrap();
    assert!((delta * inverse_delta - 1.0).abs() < 1e-12);
}

#[test]
fn exterior_mu_respects_rho_chain_pointwise() {
    let map = pipeline_map();
    let weight = SigmaWeight::becker();
    let ext = build_extension(
        ExtensionTag::HarmonicLambda,
        &Subject::Harmonic(map.clone()),
        Some(&weight),
        None,
        &BuildOptions { grid: DiskGrid::polar(64, 128), ..BuildOptions::default() },
    )
    .unwrap();
    let cert = ext.certificate();
    let (k_hat, omega_sup) = (cert.report.k_hat, cert.report.omega_sup.unwrap());
    assert!(k_condition_check(k_hat, omega_sup));

    let omega = map.dilatation().unwrap();
    let omega_p = omega.wirtinger_dz();
    let rho0 = rho_bound(k_hat, 1.0, omega_sup, 0.0).unwrap();
    for w in AnnulusGrid::geometric(24, 48, 1.001, 8.0).unwrap().points() {
        let z = c64(1.0, 0.0) / w.conj();
        let s = weight.sigma().eval(z).unwrap();
        let szb = weight.sigma_zbar().eval(z).unwrap();
        let wv = omega.eval(z).unwrap();
        let x = (s / szb * omega_p.eval(z).unwrap() / (1.0 - wv.norm_sqr())).norm();
        assert!(x <= k_hat + 1e-9, "|ω*| = {x} exceeds k̂ = {k_hat} at z = {z}");
        let x = x.min(k_hat);
        let mu = mu_fd(&ext, w).unwrap().norm();
        let rho_x = rho_bound(k_hat, 1.0, omega_sup, x).unwrap();
        assert!(mu <= rho_x + 1e-6, "|μ({w})| = {mu} above ρ({x}) = {rho_x}");
        assert!(rho_x <= rho0 + 1e-6);
        // the tighter chain coefficient still dominates the measurement
        let disp_x = rho_bound_display(k_hat, 1.0, omega_sup, x).unwrap();
        assert!(mu <= disp_x + 1e-6, "|μ({w})| = {mu} above display bound {disp_x}");
    }
}

#[test]
fn teichmuller_eta_chain_holds() {
    let h = expr("z + 0.15*z^2");
    let alpha = c64(0.3, 0.2);
    let map = HarmonicMap::teichmuller(h, alpha).unwrap();
    let weight = SigmaWeight::becker();
    let ext = build_extension(
        ExtensionTag::Teichmuller,
        &Subject::Harmonic(map),
        Some(&weight),
        None,
        &BuildOptions { grid: DiskGrid::polar(64, 128), ..BuildOptions::default() },
    )
    .unwrap();
    let k_hat = ext.certificate().report.k_hat;
    assert!(ext.is_certified());

    let annulus = AnnulusGrid::geometric(24, 48, 1.001, 8.0).unwrap();
    let k2 = (alpha.norm() + k_hat) / (1.0 + alpha.norm() * k_hat);
    for w in annulus.points() {
        let z = c64(1.0, 0.0) / w.conj();
        let eta = teichmuller_eta(&ext, z).unwrap();
        assert!(eta.norm() <= k_hat + 1e-9, "|η({z})| = {} above k̂ = {k_hat}", eta.norm());
        let mu = mu_fd(&ext, w).unwrap().norm();
        assert!(mu <= k2 + 1e-6, "|μ({w})| = {mu} above k₂ = {k2}");
    }
    // interior dilatation modulus is |α| for a Teichmüller map
    for z in DiskGrid::polar(8, 16).points() {
        let mu = mu_fd(&ext, z).unwrap().norm();
        assert!((mu - alpha.norm()).abs() < 1e-8);
    }
}

#[test]
fn certification_gate_matches_k_condition() {
    let map = pipeline_map();
    let (k_hat, omega_sup) = measured_margin(&map);
    assert!(k_condition_check(k_hat, omega_sup));
    // the K-formula denominator is positive exactly when the gate holds
    let formula = beltrami::k_formula(beltrami::KFormula::Harmonic {
        k: k_hat,
        lambda_abs: 1.0,
        omega_sup,
    });
    assert!(formula.is_ok());
    let blocked = beltrami::k_formula(beltrami::KFormula::Harmonic {
        k: 0.6,
        lambda_abs: 1.0,
        omega_sup: 0.3,
    });
    assert!(blocked.is_err());
}
