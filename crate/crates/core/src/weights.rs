//! Admissible σ-weights for the Ahlfors-type criteria.
//!
//! A weight is a continuous function `σ` on the punctured disk together with
//! its Wirtinger derivatives, subject to three admissibility conditions:
//! (1) `σ_z` and `σ_z̄` exist a.e., (2) `1/σ → 0` on `∂△`, and
//! (3) `σ_z̄/σ² ≠ 0`. The catalog covers the weights that reproduce the
//! classical criteria; `custom` accepts any expression in `z` and `conj(z)`.
//!
//! Weights of the `schwarzian_*` kinds are composites `σ = v − ½P` built
//! from a base weight `v` and the pre-Schwarzian of a map context. The base
//! `v` is kept alongside the composite because the Schwarzian-form criteria
//! are phrased directly in terms of `v`, `v_z` and `v_z̄`.
//!
//! `z = 0` is a singular point of the catalog weights and is excluded from
//! every sampling grid.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cxexpr::ComplexExpr;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::maps::{DiskGrid, Subject};
use crate::numdiff;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `z̄/(1−|z|²)` as an expression.
fn becker_expr() -> ComplexExpr {
    let z = ComplexExpr::var();
    ComplexExpr::div(
        z.conj_expr(),
        ComplexExpr::sub(ComplexExpr::one(), ComplexExpr::mul(z.clone(), z.conj_expr())),
    )
}

/// Catalog tag of a weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `σ = z̄/(1−|z|²)`.
    Becker,
    /// `σ = (c+1)·z̄/(1−|z|²)`.
    AhlforsC { c: Complex64 },
    /// `σ = z̄/(1−|z|²) − ½P`.
    AhlforsWeill,
    /// `σ = v − ½P` for a user-supplied `v`.
    SchwarzianV,
    /// `σ = c·z̄/(1−|z|²) − ½P`.
    SchwarzianC { c: Complex64 },
    /// Any expression in `z` and `conj(z)`.
    Custom,
}

impl WeightKind {
    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::Becker => "becker",
            WeightKind::AhlforsC { .. } => "ahlfors_c",
            WeightKind::AhlforsWeill => "ahlfors_weill",
            WeightKind::SchwarzianV => "schwarzian_v",
            WeightKind::SchwarzianC { .. } => "schwarzian_c",
            WeightKind::Custom => "custom",
        }
    }
}

/// The base weight `v` of a Schwarzian-form composite.
#[derive(Debug, Clone)]
pub struct VParts {
    pub v: Field,
    pub v_z: Field,
    pub v_zbar: Field,
}

/// An admissible weight with its Wirtinger derivatives.
#[derive(Debug, Clone)]
pub struct SigmaWeight {
    kind: WeightKind,
    sigma: Field,
    sigma_z: Field,
    sigma_zbar: Field,
    v_parts: Option<VParts>,
}

impl SigmaWeight {
    /// The classical weight `σ = z̄/(1−|z|²)`.
    pub fn becker() -> SigmaWeight {
        Self::from_expr(WeightKind::Becker, becker_expr(), None, None)
    }

    /// The one-parameter family `σ = (c+1)·z̄/(1−|z|²)`.
    pub fn ahlfors_c(c: Complex64) -> SigmaWeight {
        let sigma = ComplexExpr::mul(
            ComplexExpr::constant(c + c64(1.0, 0.0)),
            becker_expr(),
        );
        Self::from_expr(WeightKind::AhlforsC { c }, sigma, None, None)
    }

    /// `σ = z̄/(1−|z|²) − ½P` for the given map context.
    pub fn ahlfors_weill(ctx: &Subject) -> Result<SigmaWeight> {
        Self::composite(WeightKind::AhlforsWeill, becker_expr(), ctx)
    }

    /// `σ = v − ½P` for a user-supplied base weight `v`.
    pub fn schwarzian_v(v: ComplexExpr, ctx: &Subject) -> Result<SigmaWeight> {
        Self::composite(WeightKind::SchwarzianV, v, ctx)
    }

    /// `σ = c·z̄/(1−|z|²) − ½P`.
    pub fn schwarzian_c(c: Complex64, ctx: &Subject) -> Result<SigmaWeight> {
        let v = ComplexExpr::mul(ComplexExpr::constant(c), becker_expr());
        Self::composite(WeightKind::SchwarzianC { c }, v, ctx)
    }

    /// A user-supplied weight. Derivative expressions are symbolic Wirtinger
    /// derivatives of `sigma` when not given explicitly. The weight is
    /// rejected if it fails an admissibility condition on the default grid.
    pub fn custom(
        sigma: ComplexExpr,
        sigma_z: Option<ComplexExpr>,
        sigma_zbar: Option<ComplexExpr>,
    ) -> Result<SigmaWeight> {
        let weight = Self::custom_unchecked(sigma, sigma_z, sigma_zbar);
        let report = check_admissibility(&weight, &DiskGrid::polar(32, 64))?;
        match report.first_failure() {
            None => Ok(weight),
            Some((condition, witness)) => Err(Error::Inadmissible { condition, witness }),
        }
    }

    /// A user-supplied weight without the admissibility gate; useful for
    /// examining failing weights through [`check_admissibility`].
    pub fn custom_unchecked(
        sigma: ComplexExpr,
        sigma_z: Option<ComplexExpr>,
        sigma_zbar: Option<ComplexExpr>,
    ) -> SigmaWeight {
        Self::from_expr(WeightKind::Custom, sigma, sigma_z, sigma_zbar)
    }

    fn from_expr(
        kind: WeightKind,
        sigma: ComplexExpr,
        sigma_z: Option<ComplexExpr>,
        sigma_zbar: Option<ComplexExpr>,
    ) -> SigmaWeight {
        let sigma_z = sigma_z.unwrap_or_else(|| sigma.wirtinger_dz());
        let sigma_zbar = sigma_zbar.unwrap_or_else(|| sigma.wirtinger_dzbar());
        SigmaWeight {
            kind,
            sigma: Field::from_expr(&sigma),
            sigma_z: Field::from_expr(&sigma_z),
            sigma_zbar: Field::from_expr(&sigma_zbar),
            v_parts: None,
        }
    }

    /// Builds `σ = v − ½P` with symbolic derivatives when the context is
    /// analytic and finite-difference derivatives when it is harmonic
    /// (`P_f` is not an expression tree).
    fn composite(kind: WeightKind, v: ComplexExpr, ctx: &Subject) -> Result<SigmaWeight> {
        let v_parts = VParts {
            v: Field::from_expr(&v),
            v_z: Field::from_expr(&v.wirtinger_dz()),
            v_zbar: Field::from_expr(&v.wirtinger_dzbar()),
        };
        let half = c64(0.5, 0.0);
        match ctx {
            Subject::Analytic(phi) => {
                let p = crate::maps::pre_schwarzian_analytic(phi)?;
                let sigma = ComplexExpr::sub(
                    v,
                    ComplexExpr::mul(ComplexExpr::constant(half), p),
                );
                let sigma_z = sigma.wirtinger_dz();
                let sigma_zbar = sigma.wirtinger_dzbar();
                Ok(SigmaWeight {
                    kind,
                    sigma: Field::from_expr(&sigma),
                    sigma_z: Field::from_expr(&sigma_z),
                    sigma_zbar: Field::from_expr(&sigma_zbar),
                    v_parts: Some(v_parts),
                })
            }
            Subject::Harmonic(map) => {
                let p = map.pre_schwarzian()?;
                let v_field = v_parts.v.clone();
                let sigma = Field::new(move |z| Ok(v_field.eval(z)? - half * p.eval(z)?));
                let (sz, szb) = (sigma.clone(), sigma.clone());
                let sigma_z = Field::new(move |z| fd_step(&sz, z).map(|(dz, _)| dz));
                let sigma_zbar = Field::new(move |z| fd_step(&szb, z).map(|(_, dzb)| dzb));
                Ok(SigmaWeight { kind, sigma, sigma_z, sigma_zbar, v_parts: Some(v_parts) })
            }
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn sigma(&self) -> &Field {
        &self.sigma
    }

    pub fn sigma_z(&self) -> &Field {
        &self.sigma_z
    }

    pub fn sigma_zbar(&self) -> &Field {
        &self.sigma_zbar
    }

    /// The base `v` of a Schwarzian composite, if this weight has one.
    pub fn v_parts(&self) -> Option<&VParts> {
        self.v_parts.as_ref()
    }

    /// The triple seen by v-form criteria: the base `v` for composites,
    /// otherwise the weight itself.
    pub fn as_v(&self) -> VParts {
        match &self.v_parts {
            Some(parts) => parts.clone(),
            None => VParts {
                v: self.sigma.clone(),
                v_z: self.sigma_z.clone(),
                v_zbar: self.sigma_zbar.clone(),
            },
        }
    }
}

/// FD step for map-dependent weights, capped away from `∂△` so the stencil
/// never crosses the boundary.
fn fd_step(f: &Field, z: Complex64) -> Result<(Complex64, Complex64)> {
    let mut h = numdiff::default_step(z);
    let r = z.norm();
    if r < 1.0 {
        h = h.min((1.0 - r) / 4.0);
    }
    numdiff::wirtinger_fd(|w| f.eval(w), z, h)
}

/// Outcome of the numerical admissibility checks.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// (1): σ, σ_z, σ_z̄ evaluated at every grid point.
    pub derivatives_exist: bool,
    /// (2): `|σ|` exceeds the blow-up threshold at `r = 1 − 2^{−20}` on all
    /// sampled rays.
    pub blows_up_on_boundary: bool,
    /// (3): `|σ_z̄/σ²|` stays above `1e−12` on the grid.
    pub zbar_nonvanishing: bool,
    /// Minimum over 16 rays of `|σ(r_j e^{iθ})|` at `r_j = 1 − 2^{−j}`,
    /// `j = 1..=20`.
    pub growth_samples: Vec<f64>,
    /// Minimum of `|σ_z̄/σ²|` over the grid.
    pub min_zbar_over_sigma_sq: f64,
    /// Witness of the first failing condition, if any.
    pub witness: Option<(u8, Complex64)>,
}

impl AdmissibilityReport {
    pub fn all_pass(&self) -> bool {
        self.derivatives_exist && self.blows_up_on_boundary && self.zbar_nonvanishing
    }

    pub fn first_failure(&self) -> Option<(u8, Complex64)> {
        self.witness
    }
}

/// Threshold for "`1/σ = 0` on `∂△`": `|σ|` at `r = 1 − 2^{−20}` must reach
/// this value on every sampled ray. (The classical `z̄/(1−|z|²)` weight
/// reaches ≈ 5.2·10⁵ there, which calibrates the scale.)
pub const BLOWUP_THRESHOLD: f64 = 1e5;

const BLOWUP_RAYS: usize = 16;
const BLOWUP_DEPTH: u32 = 20;

/// Runs the three admissibility checks on a grid.
pub fn check_admissibility(w: &SigmaWeight, grid: &DiskGrid) -> Result<AdmissibilityReport> {
    let mut derivatives_exist = true;
    let mut zbar_nonvanishing = true;
    let mut min_ratio = f64::INFINITY;
    let mut witness = None;

    for z in grid.points() {
        let triple = (|| -> Result<(Complex64, Complex64, Complex64)> {
            Ok((w.sigma.eval(z)?, w.sigma_z.eval(z)?, w.sigma_zbar.eval(z)?))
        })();
        match triple {
            Err(_) => {
                derivatives_exist = false;
                witness.get_or_insert((1, z));
            }
            Ok((s, _, szb)) => {
                let s2 = s.norm_sqr();
                if s2 == 0.0 {
                    // σ = 0 makes σ_z̄/σ² blow up, not vanish; skip
                    continue;
                }
                let ratio = szb.norm() / s2;
                if ratio < min_ratio {
                    min_ratio = ratio;
                }
                if ratio <= 1e-12 && zbar_nonvanishing {
                    zbar_nonvanishing = false;
                    witness.get_or_insert((3, z));
                }
            }
        }
    }

    let mut growth_samples = Vec::with_capacity(BLOWUP_DEPTH as usize);
    let mut blows_up_on_boundary = true;
    let mut blowup_witness = None;
    for j in 1..=BLOWUP_DEPTH {
        let r = 1.0 - (-(j as f64)).exp2();
        let mut min_abs = f64::INFINITY;
        let mut min_at = c64(r, 0.0);
        for k in 0..BLOWUP_RAYS {
            let theta = core::f64::consts::TAU * k as f64 / BLOWUP_RAYS as f64;
            let z = c64(r * theta.cos(), r * theta.sin());
            match w.sigma.eval(z) {
                Ok(s) => {
                    if s.norm() < min_abs {
                        min_abs = s.norm();
                        min_at = z;
                    }
                }
                Err(_) => {
                    derivatives_exist = false;
                    witness.get_or_insert((1, z));
                }
            }
        }
        if j == BLOWUP_DEPTH && min_abs < BLOWUP_THRESHOLD {
            blows_up_on_boundary = false;
            blowup_witness = Some((2, min_at));
        }
        growth_samples.push(min_abs);
    }
    if witness.is_none() {
        witness = blowup_witness;
    }

    Ok(AdmissibilityReport {
        derivatives_exist,
        blows_up_on_boundary,
        zbar_nonvanishing,
        growth_samples,
        min_zbar_over_sigma_sq: min_ratio,
        witness,
    })
}
