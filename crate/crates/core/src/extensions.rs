//! Explicit piecewise extensions of a disk map to the plane.
//!
//! Every construction shares one shape: the map itself inside the disk and
//! the reflected formula `F(z) = f(1/z̄) + U(1/z̄)` outside, where the
//! correction term is
//!
//! ```text
//! U(z) = h'(z)/σ(z) + λ·conj(g'(z))/conj(σ(z))        (z ∈ △ \ {0})
//! ```
//!
//! For an analytic subject (`g ≡ 0`) this is the classical `u = φ'/σ`; for
//! a Teichmüller map (stored with `g = conj(α)·h`) it coincides with the
//! `U_α` of the Teichmüller construction. The Ahlfors–Weill extension is
//! built from its own closed display
//! `E_φ(ξ) = φ(ξ) + (1−|ξ|²)φ'(ξ)/(ξ̄ − ½(1−|ξ|²)P_φ(ξ))`, which equals the
//! reflected route for the weight `σ = z̄/(1−|z|²) − ½P_φ`.
//!
//! Building an extension measures the matching criterion first; a failed
//! criterion does not abort the build (exploratory use) but the result is
//! stamped not certified.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::criteria::{
    make_criterion, sup_ratio, CriterionKind, CriterionParams, CriterionReport,
};
use crate::cxexpr::ComplexExpr;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::maps::{pre_schwarzian_analytic, DiskGrid, HarmonicMap, MapForm, Subject};
use crate::weights::SigmaWeight;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which construction an extension came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionTag {
    /// Analytic reflection `φ(1/z̄) + u(1/z̄)` with a σ-weight.
    Ahlfors,
    /// The closed Ahlfors–Weill form (Schwarzian hypothesis).
    AhlforsWeill,
    /// The λ-family `F_λ` of a harmonic map.
    HarmonicLambda,
    /// The Teichmüller construction `F_α`.
    Teichmuller,
}

impl ExtensionTag {
    pub fn name(&self) -> &'static str {
        match self {
            ExtensionTag::Ahlfors => "ahlfors",
            ExtensionTag::AhlforsWeill => "ahlfors_weill",
            ExtensionTag::HarmonicLambda => "harmonic_lambda",
            ExtensionTag::Teichmuller => "teichmuller",
        }
    }

    pub fn from_name(name: &str) -> Option<ExtensionTag> {
        Some(match name {
            "ahlfors" => ExtensionTag::Ahlfors,
            "ahlfors_weill" => ExtensionTag::AhlforsWeill,
            "harmonic_lambda" => ExtensionTag::HarmonicLambda,
            "teichmuller" => ExtensionTag::Teichmuller,
            _ => return None,
        })
    }
}

/// Criterion evidence captured when the extension was built.
#[derive(Debug, Clone)]
pub struct BuildCertificate {
    pub criterion: CriterionKind,
    pub report: CriterionReport,
    /// Family parameter of the built member (`1` for analytic subjects).
    pub lambda: Complex64,
    /// Teichmüller parameter, when the subject is in that form.
    pub alpha: Option<Complex64>,
}

impl BuildCertificate {
    /// `true` when the measured margin leaves room below 1.
    pub fn passed(&self) -> bool {
        self.report.pass
    }
}

/// Build-time knobs.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Starting grid of the criterion sweep.
    pub grid: DiskGrid,
    /// Margin the criterion is checked against (a value below 1).
    pub target_k: f64,
    /// Outer radius of the evaluation annulus.
    pub r_max: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { grid: DiskGrid::polar(128, 512), target_k: 1.0 - 1e-9, r_max: 16.0 }
    }
}

/// A two-sided plane map: the disk map inside, the reflected formula outside.
#[derive(Debug, Clone)]
pub struct PlaneExtension {
    tag: ExtensionTag,
    map: HarmonicMap,
    weight: Option<SigmaWeight>,
    interior: Field,
    exterior: Field,
    u_term: Field,
    r_max: f64,
    certificate: BuildCertificate,
}

/// Builds the extension named by `tag`.
///
/// * `Ahlfors` — analytic subject plus σ-weight.
/// * `AhlforsWeill` — analytic subject; the weight argument is ignored.
/// * `HarmonicLambda` — harmonic subject plus σ-weight; `lambda` picks the
///   family member (default `1`).
/// * `Teichmuller` — subject must be a Teichmüller-form map plus σ-weight.
pub fn build_extension(
    tag: ExtensionTag,
    subject: &Subject,
    weight: Option<&SigmaWeight>,
    lambda: Option<Complex64>,
    options: &BuildOptions,
) -> Result<PlaneExtension> {
    match tag {
        ExtensionTag::Ahlfors | ExtensionTag::AhlforsWeill => {
            let phi = match subject {
                Subject::Analytic(phi) => phi.clone(),
                Subject::Harmonic(map) if map.is_analytic_map() => map.h().clone(),
                Subject::Harmonic(_) => {
                    return Err(Error::WrongSubject { criterion: tag.name(), needs: "analytic" })
                }
            };
            build_analytic(tag, phi, weight, options)
        }
        ExtensionTag::HarmonicLambda => {
            let map = match subject {
                Subject::Harmonic(map) => map.clone(),
                Subject::Analytic(_) => {
                    return Err(Error::WrongSubject { criterion: tag.name(), needs: "harmonic" })
                }
            };
            let weight = weight.ok_or(Error::MissingWeight { criterion: tag.name() })?;
            let member = match lambda {
                Some(l) => map.with_lambda(l)?,
                None => map.clone(),
            };
            build_harmonic(tag, map, member, weight, CriterionKind::MainHarmonicSigma, options)
        }
        ExtensionTag::Teichmuller => {
            let map = match subject {
                Subject::Harmonic(map) if matches!(map.form(), MapForm::Teichmuller { .. }) => {
                    map.clone()
                }
                _ => {
                    return Err(Error::WrongSubject {
                        criterion: tag.name(),
                        needs: "harmonic (teichmuller form)",
                    })
                }
            };
            let weight = weight.ok_or(Error::MissingWeight { criterion: tag.name() })?;
            build_harmonic(tag, map.clone(), map, weight, CriterionKind::Teichmuller, options)
        }
    }
}

fn build_analytic(
    tag: ExtensionTag,
    phi: ComplexExpr,
    weight: Option<&SigmaWeight>,
    options: &BuildOptions,
) -> Result<PlaneExtension> {
    let subject = Subject::Analytic(phi.clone());
    let (criterion_kind, weight_owned) = match tag {
        ExtensionTag::Ahlfors => {
            let w = weight.ok_or(Error::MissingWeight { criterion: tag.name() })?;
            (CriterionKind::AhlforsSigma, w.clone())
        }
        _ => (CriterionKind::Nehari, SigmaWeight::ahlfors_weill(&subject)?),
    };
    let cr = make_criterion(
        criterion_kind,
        &subject,
        if criterion_kind == CriterionKind::Nehari { None } else { Some(&weight_owned) },
        CriterionParams::default(),
    )?;
    let report = sup_ratio(&cr, &options.grid, options.target_k)?;
    let map = HarmonicMap::analytic(phi.clone())?;
    let u_term = u_field(&map, &weight_owned);

    let exterior = match tag {
        ExtensionTag::AhlforsWeill => {
            // E_φ(ξ) = φ(ξ) + (1−|ξ|²)φ'(ξ)/(ξ̄ − ½(1−|ξ|²)P_φ(ξ)) at ξ = 1/z̄
            let p = pre_schwarzian_analytic(&phi)?;
            let phi_p = phi.wirtinger_dz();
            let phi_c = phi.clone();
            Field::new(move |z| {
                let xi = c64(1.0, 0.0) / z.conj();
                let d = 1.0 - xi.norm_sqr();
                let den = xi.conj() - 0.5 * d * p.eval(xi)?;
                if den == c64(0.0, 0.0) {
                    return Err(Error::DegenerateNormalizer { at: z });
                }
                Ok(phi_c.eval(xi)? + d * phi_p.eval(xi)? / den)
            })
        }
        _ => reflected_exterior(&map, &u_term),
    };

    let interior = {
        let m = map.clone();
        Field::new(move |z| m.eval(z))
    };
    Ok(PlaneExtension {
        tag,
        map,
        weight: Some(weight_owned),
        interior,
        exterior,
        u_term,
        r_max: options.r_max,
        certificate: BuildCertificate {
            criterion: criterion_kind,
            report,
            lambda: c64(1.0, 0.0),
            alpha: None,
        },
    })
}

fn build_harmonic(
    tag: ExtensionTag,
    base: HarmonicMap,
    member: HarmonicMap,
    weight: &SigmaWeight,
    criterion_kind: CriterionKind,
    options: &BuildOptions,
) -> Result<PlaneExtension> {
    // the criterion hypothesis is on the base map f = h + conj(g)
    let base_canonical = base.with_lambda(c64(1.0, 0.0))?;
    let subject = match base.form() {
        MapForm::Teichmuller { .. } => Subject::Harmonic(base.clone()),
        MapForm::Hg => Subject::Harmonic(base_canonical),
    };
    let cr = make_criterion(criterion_kind, &subject, Some(weight), CriterionParams::default())?;
    let report = sup_ratio(&cr, &options.grid, options.target_k)?;

    let alpha = match member.form() {
        MapForm::Teichmuller { alpha } => Some(alpha),
        MapForm::Hg => None,
    };
    let u_term = u_field(&member, weight);
    let exterior = reflected_exterior(&member, &u_term);
    let interior = {
        let m = member.clone();
        Field::new(move |z| m.eval(z))
    };
    Ok(PlaneExtension {
        tag,
        map: member.clone(),
        weight: Some(weight.clone()),
        interior,
        exterior,
        u_term,
        r_max: options.r_max,
        certificate: BuildCertificate {
            criterion: criterion_kind,
            report,
            lambda: member.lambda(),
            alpha,
        },
    })
}

/// `U(z) = h'(z)/σ(z) + λ·conj(g'(z))/conj(σ(z))`.
fn u_field(map: &HarmonicMap, weight: &SigmaWeight) -> Field {
    let hp = map.h().wirtinger_dz();
    let gp = map.g().wirtinger_dz();
    let lambda = map.lambda();
    let sigma = weight.sigma().clone();
    Field::new(move |z| {
        let s = sigma.eval(z)?;
        if s == c64(0.0, 0.0) {
            return Err(Error::DegenerateNormalizer { at: z });
        }
        Ok(hp.eval(z)? / s + lambda * gp.eval(z)?.conj() / s.conj())
    })
}

/// `F(z) = f(1/z̄) + U(1/z̄)` for `|z| > 1`.
fn reflected_exterior(map: &HarmonicMap, u_term: &Field) -> Field {
    let m = map.clone();
    let u = u_term.clone();
    Field::new(move |z| {
        let w = c64(1.0, 0.0) / z.conj();
        Ok(m.eval(w)? + u.eval(w)?)
    })
}

impl PlaneExtension {
    pub fn tag(&self) -> ExtensionTag {
        self.tag
    }

    /// The disk map the extension was built from (the λ-member for families).
    pub fn map(&self) -> &HarmonicMap {
        &self.map
    }

    pub fn weight(&self) -> Option<&SigmaWeight> {
        self.weight.as_ref()
    }

    pub fn certificate(&self) -> &BuildCertificate {
        &self.certificate
    }

    /// `true` when the matching criterion held at build time.
    pub fn is_certified(&self) -> bool {
        self.certificate.passed()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Interior evaluator `f` (defined on `|z| < 1`).
    pub fn interior(&self) -> &Field {
        &self.interior
    }

    /// Exterior evaluator `f(1/z̄) + U(1/z̄)` (defined on `|z| > 1`).
    pub fn exterior(&self) -> &Field {
        &self.exterior
    }

    /// The correction term `U` on the punctured disk.
    pub fn u_term(&self) -> &Field {
        &self.u_term
    }

    /// Region dispatch: interior for `|z| < 1`, exterior for
    /// `1 < |z| ≤ r_max`. Points of `∂△` are not evaluated here; use
    /// [`boundary_trace`].
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if r < 1.0 {
            self.interior.eval(z)
        } else if r == 1.0 {
            Err(Error::BoundaryPoint { at: z })
        } else if r <= self.r_max {
            self.exterior.eval(z)
        } else {
            Err(Error::OutOfRange { at: z, r_max: self.r_max })
        }
    }
}

/// Two polylines straddling the unit circle and their maximum pointwise gap.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub eps: f64,
    /// `F((1−ε)e^{iθ_k})` at `n` equispaced angles.
    pub inner: Vec<Complex64>,
    /// `F((1+ε)e^{iθ_k})` at the same angles.
    pub outer: Vec<Complex64>,
    /// `max_k |outer_k − inner_k|`, the continuity indicator.
    pub max_gap: f64,
}

/// Samples the extension on the circles `|z| = 1 ± ε`.
pub fn boundary_trace(ext: &PlaneExtension, n: usize, eps: f64) -> Result<BoundaryTrace> {
    if n < 16 {
        return Err(Error::InvalidArgument { what: "boundary trace needs at least 16 samples" });
    }
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::InvalidArgument { what: "trace offset must lie in (0, 1e-2]" });
    }
    let mut inner = Vec::with_capacity(n);
    let mut outer = Vec::with_capacity(n);
    let mut max_gap = 0.0f64;
    for k in 0..n {
        let theta = core::f64::consts::TAU * k as f64 / n as f64;
        let dir = c64(theta.cos(), theta.sin());
        let zi = (1.0 - eps) * dir;
        let zo = (1.0 + eps) * dir;
        let vi = ext.interior.eval(zi)?;
        let vo = ext.exterior.eval(zo)?;
        let gap = (vo - vi).norm();
        if gap > max_gap {
            max_gap = gap;
        }
        inner.push(vi);
        outer.push(vo);
    }
    Ok(BoundaryTrace { eps, inner, outer, max_gap })
}

/// Smallest pairwise distance among trace samples (injectivity evidence).
pub fn min_pairwise_distance(points: &[Complex64]) -> f64 {
    if points.len() < 2 {
        return f64::INFINITY;
    }
    let mut sorted: Vec<Complex64> = points.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite samples"));
    let mut best = f64::INFINITY;
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            if sorted[j].re - sorted[i].re >= best {
                break;
            }
            let d = (sorted[j] - sorted[i]).norm();
            if d < best {
                best = d;
            }
        }
    }
    best
}
