//! Beltrami-coefficient measurement and K-bound certification.
//!
//! The Beltrami coefficient `μ = F_z̄/F_z` of a plane extension is measured
//! two ways: by the finite-difference Wirtinger stencil on the extension
//! evaluator (`mu_fd`, works anywhere off `∂△`), and for exterior points by
//! the closed quotient obtained from the reflected formula
//! (`mu_analytic_exterior`). With `w = 1/z̄` and `G(z) = f_λ(z) + U_λ(z)`,
//!
//! ```text
//! |μ_F(w)| = |G_z(z)| / |G_z̄(z)|
//!   G_z  = h' + (h″σ − h'σ_z)/σ² − λ·conj(g')·conj(σ_z̄)/conj(σ)²
//!   G_z̄ = λ·conj(g') + λ·(conj(g″)conj(σ) − conj(g')conj(σ_z))/conj(σ)² − h'σ_z̄/σ²
//! ```
//!
//! and for Teichmüller extensions the same quotient collapses to
//! `|(α + η)/(1 + conj(α)·η)|` with the weight ratio `η`.
//!
//! Certification compares measured suprema of `|μ|` against the explicit
//! bound `(K−1)/(K+1)` of the matching K-formula, and records the pointwise
//! ρ-chain margins alongside.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::extensions::{ExtensionTag, PlaneExtension};
use crate::maps::{AnnulusGrid, DiskGrid, MapForm};
use crate::numdiff;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Absolute tolerance used by the certification comparison; dominated by
/// the truncation error of the finite-difference stencil.
pub const CERT_TOL: f64 = 1e-6;

/// `μ = F_z̄/F_z` by finite differences on the extension evaluator.
///
/// The step is `1e−6·|z|`, capped at a quarter of the distance to `∂△` so
/// the stencil never crosses the boundary.
pub fn mu_fd(ext: &PlaneExtension, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    let mut h = 1e-6 * r;
    if r < 1.0 {
        h = h.min((1.0 - r) / 4.0);
    } else {
        h = h.min((r - 1.0) / 4.0);
    }
    if h <= 0.0 {
        return Err(Error::BoundaryPoint { at: z });
    }
    let (fz, fzbar) = numdiff::wirtinger_fd(|w| ext.evaluate(w), z, h)?;
    if fz.norm() < 1e-12 {
        return Err(Error::DegenerateDerivative { at: z });
    }
    Ok(fzbar / fz)
}

/// `|μ(w)|` for an exterior point from the closed quotient of the reflected
/// formula. Agrees with `|mu_fd(w)|` wherever both are defined.
pub fn mu_analytic_exterior(ext: &PlaneExtension, w: Complex64) -> Result<f64> {
    if w.norm() <= 1.0 {
        return Err(Error::InvalidArgument { what: "mu_analytic_exterior needs |w| > 1" });
    }
    let z = c64(1.0, 0.0) / w.conj();
    let weight = ext
        .weight()
        .ok_or(Error::MissingWeight { criterion: "mu_analytic_exterior" })?;
    let s = weight.sigma().eval(z)?;
    let s_z = weight.sigma_z().eval(z)?;
    let s_zb = weight.sigma_zbar().eval(z)?;
    if s == c64(0.0, 0.0) {
        return Err(Error::DegenerateNormalizer { at: z });
    }
    let map = ext.map();
    let hp_e = map.h().wirtinger_dz();
    let hp = hp_e.eval(z)?;
    let hpp = hp_e.wirtinger_dz().eval(z)?;

    if let MapForm::Teichmuller { alpha } = map.form() {
        let eta = teichmuller_eta(ext, z)?;
        let quotient = (alpha + eta) / (c64(1.0, 0.0) + alpha.conj() * eta);
        return Ok(quotient.norm());
    }

    let lambda = map.lambda();
    let gp_e = map.g().wirtinger_dz();
    let gp = gp_e.eval(z)?;
    let gpp = gp_e.wirtinger_dz().eval(z)?;
    let s2 = s * s;
    let s2c = s.conj() * s.conj();
    let num = hp + (hpp * s - hp * s_z) / s2 - lambda * gp.conj() * s_zb.conj() / s2c;
    let den = lambda * gp.conj() + lambda * (gpp.conj() * s.conj() - gp.conj() * s_z.conj()) / s2c
        - hp * s_zb / s2;
    if den.norm() < 1e-14 {
        return Err(Error::DegenerateDerivative { at: w });
    }
    Ok((num / den).norm())
}

/// The weight ratio `η` of the Teichmüller exterior quotient at an interior
/// point:
///
/// ```text
/// η = (−σ²/σ_z̄ − (σ/σ_z̄)(h″/h') + σ_z/σ_z̄)
///     / ((σ²/conj(σ)²)·(conj(σ_z̄)/σ_z̄)·(conj(h')/h'))
/// ```
///
/// When the Teichmüller criterion holds at margin `k`, `|η| ≤ k` on `△`.
pub fn teichmuller_eta(ext: &PlaneExtension, z: Complex64) -> Result<Complex64> {
    let weight = ext
        .weight()
        .ok_or(Error::MissingWeight { criterion: "teichmuller_eta" })?;
    let s = weight.sigma().eval(z)?;
    let s_z = weight.sigma_z().eval(z)?;
    let s_zb = weight.sigma_zbar().eval(z)?;
    if s == c64(0.0, 0.0) || s_zb == c64(0.0, 0.0) {
        return Err(Error::DegenerateNormalizer { at: z });
    }
    let hp_e = ext.map().h().wirtinger_dz();
    let hp = hp_e.eval(z)?;
    let hpp = hp_e.wirtinger_dz().eval(z)?;
    if hp == c64(0.0, 0.0) {
        return Err(Error::CriticalPoint { at: z });
    }
    let num = -s * s / s_zb - (s / s_zb) * (hpp / hp) + s_z / s_zb;
    let den = (s * s / (s.conj() * s.conj())) * (s_zb.conj() / s_zb) * (hp.conj() / hp);
    if den.norm() < 1e-14 {
        return Err(Error::DegenerateDerivative { at: z });
    }
    Ok(num / den)
}

/// `ρ(x)` on `[0, k]`:
/// `(k + |λ|‖ω‖ − (1−‖ω‖)x) / (1 − k|λ|‖ω‖ − (1−‖ω‖)x)`.
pub fn rho_bound(k: f64, lambda_abs: f64, omega_sup: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k)
        || !(0.0..=1.0).contains(&lambda_abs)
        || !(0.0..1.0).contains(&omega_sup)
        || !(0.0..=k.max(0.0)).contains(&x)
    {
        return Err(Error::InvalidArgument { what: "rho_bound arguments out of range" });
    }
    let denominator = 1.0 - k * lambda_abs * omega_sup - (1.0 - omega_sup) * x;
    if denominator <= 0.0 {
        return Err(Error::BoundInapplicable { denominator });
    }
    Ok((k + lambda_abs * omega_sup - (1.0 - omega_sup) * x) / denominator)
}

/// `ρ` with the alternative numerator coefficient `(1 − |λ|‖ω‖)` carried by
/// the estimate chain; tighter than [`rho_bound`] for `|λ| ≤ 1` and equal
/// at `x = 0`.
pub fn rho_bound_display(k: f64, lambda_abs: f64, omega_sup: f64, x: f64) -> Result<f64> {
    let denominator = 1.0 - k * lambda_abs * omega_sup - (1.0 - omega_sup) * x;
    if denominator <= 0.0 {
        return Err(Error::BoundInapplicable { denominator });
    }
    Ok((k + lambda_abs * omega_sup - (1.0 - lambda_abs * omega_sup) * x) / denominator)
}

/// Which K-formula applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KFormula {
    /// `K = (1+k)/(1−k)`.
    Analytic { k: f64 },
    /// `K = (1 + k + |λ|‖ω‖(1−k)) / (1 − k − |λ|‖ω‖(1+k))`.
    Harmonic { k: f64, lambda_abs: f64, omega_sup: f64 },
    /// `K = (1+k)(1+|α|) / ((1−k)(1−|α|))`.
    Teichmuller { k: f64, alpha_abs: f64 },
}

/// A maximal dilatation `K` together with `(K−1)/(K+1)`, the sup-|μ| level
/// it corresponds to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBound {
    pub k_big: f64,
    pub mu_bound: f64,
}

pub fn k_formula(formula: KFormula) -> Result<KBound> {
    let k_big = match formula {
        KFormula::Analytic { k } => {
            if !(0.0..1.0).contains(&k) {
                return Err(Error::HypothesesViolated { what: "analytic K needs k < 1" });
            }
            (1.0 + k) / (1.0 - k)
        }
        KFormula::Harmonic { k, lambda_abs, omega_sup } => {
            let den = 1.0 - k - lambda_abs * omega_sup * (1.0 + k);
            if !(0.0..1.0).contains(&k) || den <= 0.0 {
                return Err(Error::HypothesesViolated {
                    what: "harmonic K needs k + |λ|‖ω‖(1+k) < 1",
                });
            }
            (1.0 + k + lambda_abs * omega_sup * (1.0 - k)) / den
        }
        KFormula::Teichmuller { k, alpha_abs } => {
            if !(0.0..1.0).contains(&k) || !(0.0..1.0).contains(&alpha_abs) {
                return Err(Error::HypothesesViolated {
                    what: "teichmuller K needs k < 1 and |α| < 1",
                });
            }
            (1.0 + k) * (1.0 + alpha_abs) / ((1.0 - k) * (1.0 - alpha_abs))
        }
    };
    Ok(KBound { k_big, mu_bound: (k_big - 1.0) / (k_big + 1.0) })
}

/// Sampled region of a μ-measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuMethod {
    /// Finite differences on the extension evaluator.
    Fd,
    /// Closed exterior quotient; samples store `|μ|` in the real part.
    Analytic,
}

/// μ samples over one region.
#[derive(Debug, Clone)]
pub struct BeltramiGrid {
    pub region: Region,
    pub method: MuMethod,
    pub samples: Vec<(Complex64, Complex64)>,
    pub sup_abs_mu: f64,
    pub witness: Complex64,
}

/// Measures `μ` by finite differences on a disk grid.
pub fn measure_interior(ext: &PlaneExtension, grid: &DiskGrid) -> Result<BeltramiGrid> {
    let mut samples = Vec::with_capacity(grid.len());
    let mut sup = 0.0f64;
    let mut witness = c64(0.0, 0.0);
    for z in grid.points() {
        let mu = mu_fd(ext, z)?;
        if mu.norm() > sup {
            sup = mu.norm();
            witness = z;
        }
        samples.push((z, mu));
    }
    Ok(BeltramiGrid { region: Region::Interior, method: MuMethod::Fd, samples, sup_abs_mu: sup, witness })
}

/// Measures `μ` by finite differences on an exterior annulus.
pub fn measure_exterior_fd(ext: &PlaneExtension, grid: &AnnulusGrid) -> Result<BeltramiGrid> {
    let mut samples = Vec::with_capacity(grid.len());
    let mut sup = 0.0f64;
    let mut witness = c64(0.0, 0.0);
    for z in grid.points() {
        let mu = mu_fd(ext, z)?;
        if mu.norm() > sup {
            sup = mu.norm();
            witness = z;
        }
        samples.push((z, mu));
    }
    Ok(BeltramiGrid { region: Region::Exterior, method: MuMethod::Fd, samples, sup_abs_mu: sup, witness })
}

/// Measures `|μ|` by the closed exterior quotient.
pub fn measure_exterior_analytic(ext: &PlaneExtension, grid: &AnnulusGrid) -> Result<BeltramiGrid> {
    let mut samples = Vec::with_capacity(grid.len());
    let mut sup = 0.0f64;
    let mut witness = c64(0.0, 0.0);
    for z in grid.points() {
        let mu = mu_analytic_exterior(ext, z)?;
        if mu > sup {
            sup = mu;
            witness = z;
        }
        samples.push((z, c64(mu, 0.0)));
    }
    Ok(BeltramiGrid {
        region: Region::Exterior,
        method: MuMethod::Analytic,
        samples,
        sup_abs_mu: sup,
        witness,
    })
}

/// Certification outcome for a plane extension.
#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub sup_mu_interior: f64,
    pub sup_mu_exterior: f64,
    pub witness_interior: Complex64,
    pub witness_exterior: Complex64,
    /// `(K−1)/(K+1)` of the applicable formula, when its hypotheses hold.
    pub bound: Option<f64>,
    pub k_big: Option<f64>,
    /// All sampled `|μ|` stayed below 1.
    pub quasiconformal: bool,
    pub non_qc_witness: Option<Complex64>,
    /// Measured suprema lie within [`CERT_TOL`] of the bound.
    pub certified: bool,
    /// `min over exterior samples of ρ(|ω*|) − |μ|` (printed ρ).
    pub margin_rho: Option<f64>,
    /// Same margin against the tighter chain numerator.
    pub margin_display: Option<f64>,
}

/// The K-formula matching an extension's construction and build evidence.
pub fn k_formula_for(ext: &PlaneExtension) -> Result<KBound> {
    let cert = ext.certificate();
    let k = cert.report.k_hat;
    match ext.tag() {
        ExtensionTag::Ahlfors | ExtensionTag::AhlforsWeill => k_formula(KFormula::Analytic { k }),
        ExtensionTag::HarmonicLambda => k_formula(KFormula::Harmonic {
            k,
            lambda_abs: cert.lambda.norm(),
            omega_sup: cert.report.omega_sup.unwrap_or(0.0),
        }),
        ExtensionTag::Teichmuller => k_formula(KFormula::Teichmuller {
            k,
            alpha_abs: cert.alpha.map(|a| a.norm()).unwrap_or(0.0),
        }),
    }
}

/// Measures both regions and compares against the explicit K-bound.
pub fn max_dilatation(
    ext: &PlaneExtension,
    interior: &DiskGrid,
    exterior: &AnnulusGrid,
) -> Result<CertificationReport> {
    let inner = measure_interior(ext, interior)?;
    let outer = measure_exterior_fd(ext, exterior)?;

    let mut quasiconformal = true;
    let mut non_qc_witness = None;
    for grid in [&inner, &outer] {
        for (z, mu) in &grid.samples {
            if mu.norm() >= 1.0 {
                quasiconformal = false;
                non_qc_witness.get_or_insert(*z);
            }
        }
    }

    let kb = k_formula_for(ext).ok();
    let (bound, k_big) = match kb {
        Some(b) => (Some(b.mu_bound), Some(b.k_big)),
        None => (None, None),
    };
    let certified = quasiconformal
        && ext.is_certified()
        && match bound {
            Some(b) => {
                inner.sup_abs_mu <= b + CERT_TOL && outer.sup_abs_mu <= b + CERT_TOL
            }
            None => false,
        };

    let (margin_rho, margin_display) = chain_margins(ext, &outer);

    Ok(CertificationReport {
        sup_mu_interior: inner.sup_abs_mu,
        sup_mu_exterior: outer.sup_abs_mu,
        witness_interior: inner.witness,
        witness_exterior: outer.witness,
        bound,
        k_big,
        quasiconformal,
        non_qc_witness,
        certified,
        margin_rho,
        margin_display,
    })
}

/// Pointwise ρ-chain margins over the exterior samples:
/// `min ρ(|ω*(z)|) − |μ(w)|` with `ω* = (σ/σ_z̄)·ω'/(1−|ω|²)`.
fn chain_margins(ext: &PlaneExtension, outer: &BeltramiGrid) -> (Option<f64>, Option<f64>) {
    let cert = ext.certificate();
    let k = cert.report.k_hat;
    if !(0.0..1.0).contains(&k) {
        return (None, None);
    }
    let lambda_abs = match ext.tag() {
        ExtensionTag::Ahlfors | ExtensionTag::AhlforsWeill => 0.0,
        ExtensionTag::HarmonicLambda => cert.lambda.norm(),
        ExtensionTag::Teichmuller => return teich_margins(ext, outer, k),
    };
    let omega_sup = cert.report.omega_sup.unwrap_or(0.0);
    let weight = match ext.weight() {
        Some(w) => w.clone(),
        None => return (None, None),
    };
    let omega = match ext.map().with_lambda(c64(1.0, 0.0)).and_then(|m| m.dilatation()) {
        Ok(o) => o,
        Err(_) => return (None, None),
    };
    let omega_p = omega.wirtinger_dz();

    let mut min_rho = f64::INFINITY;
    let mut min_disp = f64::INFINITY;
    for (w_pt, mu) in &outer.samples {
        let z = c64(1.0, 0.0) / w_pt.conj();
        let x = (|| -> Result<f64> {
            let s = weight.sigma().eval(z)?;
            let szb = weight.sigma_zbar().eval(z)?;
            let wv = omega.eval(z)?;
            let d = 1.0 - wv.norm_sqr();
            if szb == c64(0.0, 0.0) || d <= 0.0 {
                return Err(Error::DegenerateNormalizer { at: z });
            }
            Ok((s / szb * omega_p.eval(z)? / d).norm())
        })()
        .unwrap_or(f64::NAN);
        if !x.is_finite() {
            return (None, None);
        }
        let x = x.min(k);
        match (
            rho_bound(k, lambda_abs, omega_sup, x),
            rho_bound_display(k, lambda_abs, omega_sup, x),
        ) {
            (Ok(rho), Ok(disp)) => {
                min_rho = min_rho.min(rho - mu.norm());
                min_disp = min_disp.min(disp - mu.norm());
            }
            _ => return (None, None),
        }
    }
    (Some(min_rho), Some(min_disp))
}

/// Teichmüller chain: `|μ| ≤ (|α| + |η|)/(1 + |α||η|)` with `|η| ≤ k`.
fn teich_margins(ext: &PlaneExtension, outer: &BeltramiGrid, k: f64) -> (Option<f64>, Option<f64>) {
    let alpha_abs = match ext.certificate().alpha {
        Some(a) => a.norm(),
        None => return (None, None),
    };
    let bound = (alpha_abs + k) / (1.0 + alpha_abs * k);
    let mut min_margin = f64::INFINITY;
    for (_, mu) in &outer.samples {
        min_margin = min_margin.min(bound - mu.norm());
    }
    (Some(min_margin), Some(min_margin))
}
