//! Sense-preserving harmonic mappings `f = h + λ·conj(g)` and their
//! derivative invariants.
//!
//! The analytic part `h` and co-analytic part `g` are expression trees; the
//! dilatation `ω = g'/h'`, the pre-Schwarzian `P_f = P_h − ω̄ω'/(1−|ω|²)`
//! and the Schwarzian `S_f` are derived from them. `P_f` and `S_f` depend on
//! `z̄` through `|ω|²`, so they are exposed as pointwise evaluators rather
//! than expression trees.
//!
//! Harmonic Teichmüller mappings `f = h + α·conj(h)` are stored with the
//! co-analytic part pre-conjugated (`g = conj(α)·h`), which makes the
//! canonical decomposition, the λ-family extension and the Teichmüller
//! extension formulas agree verbatim.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cxexpr::ComplexExpr;
use crate::error::{Error, Result};
use crate::field::Field;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// sampling grids
// ---------------------------------------------------------------------------

/// Polar sampling grid of the unit disk.
///
/// The radial schedule is the union of a dyadic-uniform family
/// `j/2^m (m = ⌊log₂ n⌋)` covering the interior and a geometric tail
/// `r_j = 1 − 2^(−j·s)` with `s = 64/n_radial` clustering toward the
/// boundary, truncated at the exclusion band `1 − ε_b`. Criterion ratio
/// fields peak near `∂△` when a singular weight is involved and in the
/// interior when it is not; the hybrid schedule covers both regimes.
///
/// Doubling the requested resolution halves both spacings, so a refined
/// grid contains every point of the coarse one; suprema estimated on the
/// family are monotone non-decreasing under refinement.
#[derive(Debug, Clone)]
pub struct DiskGrid {
    radii: Vec<f64>,
    n_angular: usize,
    n_radial: usize,
    exclusion: f64,
}

impl DiskGrid {
    /// Default width of the boundary exclusion band.
    pub const DEFAULT_EXCLUSION: f64 = 1e-6;

    /// Builds the default hybrid schedule. Panics if `n_angular < 4` or
    /// `n_radial == 0`; use [`DiskGrid::try_polar`] for validated input.
    pub fn polar(n_radial: usize, n_angular: usize) -> DiskGrid {
        Self::try_polar(n_radial, n_angular, Self::DEFAULT_EXCLUSION).expect("valid grid shape")
    }

    pub fn try_polar(n_radial: usize, n_angular: usize, exclusion: f64) -> Result<DiskGrid> {
        if n_angular < 4 {
            return Err(Error::InvalidArgument { what: "n_angular must be at least 4" });
        }
        if n_radial == 0 {
            return Err(Error::InvalidArgument { what: "n_radial must be positive" });
        }
        if !(exclusion > 0.0 && exclusion < 1.0) {
            return Err(Error::InvalidArgument { what: "exclusion band must lie in (0,1)" });
        }
        let cap = 1.0 - exclusion;
        let mut radii = Vec::new();
        // uniform dyadic part: j/2^m, exact binary fractions
        let m = usize::BITS - 1 - n_radial.leading_zeros();
        let denom = (1u64 << m) as f64;
        for j in 1..(1u64 << m) {
            let r = j as f64 / denom;
            if r >= cap {
                break;
            }
            radii.push(r);
        }
        // geometric boundary tail
        let step = 64.0 / n_radial as f64;
        for j in 1..=n_radial {
            let r = 1.0 - (-(step * j as f64)).exp2();
            if r >= cap {
                break;
            }
            radii.push(r);
        }
        radii.sort_by(|a, b| a.partial_cmp(b).expect("radii are finite"));
        radii.dedup();
        Ok(DiskGrid { radii, n_angular, n_radial, exclusion })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    /// Requested radial resolution (the schedule parameter, not the number of
    /// radii kept after truncation at the exclusion band).
    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.n_angular
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Grid points in deterministic radius-major order.
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.n_angular;
        self.radii.iter().flat_map(move |&r| {
            (0..n).map(move |k| {
                let theta = core::f64::consts::TAU * k as f64 / n as f64;
                c64(r * theta.cos(), r * theta.sin())
            })
        })
    }

    /// The next grid in the nested refinement family (both counts doubled).
    pub fn refined(&self) -> DiskGrid {
        Self::try_polar(self.n_radial * 2, self.n_angular * 2, self.exclusion)
            .expect("refinement of a valid grid is valid")
    }
}

/// Geometric sampling of the annulus `r_min ≤ |z| ≤ r_max`; used for
/// measuring extensions outside the closed disk.
#[derive(Debug, Clone)]
pub struct AnnulusGrid {
    radii: Vec<f64>,
    n_angular: usize,
}

impl AnnulusGrid {
    pub fn geometric(n_radial: usize, n_angular: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if n_angular < 4 || n_radial == 0 {
            return Err(Error::InvalidArgument { what: "annulus grid too small" });
        }
        if !(r_min > 1.0 && r_max > r_min) {
            return Err(Error::InvalidArgument { what: "annulus must satisfy 1 < r_min < r_max" });
        }
        let mut radii = Vec::with_capacity(n_radial);
        if n_radial == 1 {
            radii.push(r_min);
        } else {
            let ratio = (r_max / r_min).ln() / (n_radial - 1) as f64;
            for j in 0..n_radial {
                radii.push(r_min * (ratio * j as f64).exp());
            }
        }
        Ok(AnnulusGrid { radii, n_angular })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.n_angular
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.n_angular;
        self.radii.iter().flat_map(move |&r| {
            (0..n).map(move |k| {
                let theta = core::f64::consts::TAU * k as f64 / n as f64;
                c64(r * theta.cos(), r * theta.sin())
            })
        })
    }
}

// ---------------------------------------------------------------------------
// harmonic mappings
// ---------------------------------------------------------------------------

/// How the map was constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapForm {
    /// `f = h + λ·conj(g)` with independent analytic parts.
    Hg,
    /// `f = h + α·conj(h)`, a harmonic Teichmüller mapping.
    Teichmuller { alpha: Complex64 },
}

/// A sense-preserving harmonic mapping of the unit disk.
#[derive(Debug, Clone)]
pub struct HarmonicMap {
    h: ComplexExpr,
    g: ComplexExpr,
    lambda: Complex64,
    form: MapForm,
}

impl HarmonicMap {
    /// Builds `f_λ = h + λ·conj(g)`. Both parts must be analytic and
    /// `|λ| ≤ 1`.
    pub fn new(h: ComplexExpr, g: ComplexExpr, lambda: Complex64) -> Result<Self> {
        if !h.is_analytic() {
            return Err(Error::NotAnalytic { part: "h" });
        }
        if !g.is_analytic() {
            return Err(Error::NotAnalytic { part: "g" });
        }
        if lambda.norm() > 1.0 + 1e-15 {
            return Err(Error::Parameter { name: "lambda", value: lambda });
        }
        Ok(HarmonicMap { h, g, lambda, form: MapForm::Hg })
    }

    /// Builds the harmonic Teichmüller mapping `f = h + α·conj(h)` with
    /// `|α| < 1`. The stored co-analytic part is `conj(α)·h`, so that
    /// `f = h + conj(g)` holds verbatim.
    pub fn teichmuller(h: ComplexExpr, alpha: Complex64) -> Result<Self> {
        if !h.is_analytic() {
            return Err(Error::NotAnalytic { part: "h" });
        }
        if alpha.norm() >= 1.0 {
            return Err(Error::Parameter { name: "alpha", value: alpha });
        }
        let g = ComplexExpr::mul(ComplexExpr::constant(alpha.conj()), h.clone());
        Ok(HarmonicMap { h, g, lambda: c64(1.0, 0.0), form: MapForm::Teichmuller { alpha } })
    }

    /// Wraps an analytic function as the harmonic map with `g ≡ 0`.
    pub fn analytic(phi: ComplexExpr) -> Result<Self> {
        Self::new(phi, ComplexExpr::zero(), c64(1.0, 0.0))
    }

    pub fn h(&self) -> &ComplexExpr {
        &self.h
    }

    pub fn g(&self) -> &ComplexExpr {
        &self.g
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn form(&self) -> MapForm {
        self.form
    }

    /// `true` when the co-analytic part is identically zero, i.e. the map is
    /// an analytic function.
    pub fn is_analytic_map(&self) -> bool {
        self.g.constant_value() == Some(c64(0.0, 0.0))
    }

    /// The same parts with a different family parameter.
    pub fn with_lambda(&self, lambda: Complex64) -> Result<Self> {
        Self::new(self.h.clone(), self.g.clone(), lambda)
    }

    /// `f(z) = h(z) + λ·conj(g(z))`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let h = self.h.eval(z)?;
        let g = self.g.eval(z)?;
        Ok(h + self.lambda * g.conj())
    }

    /// The effective co-analytic part `conj(λ)·g` of the canonical
    /// decomposition `f = h + conj(conj(λ)·g)`.
    pub fn co_analytic_effective(&self) -> ComplexExpr {
        ComplexExpr::mul(ComplexExpr::constant(self.lambda.conj()), self.g.clone())
    }

    /// Second complex dilatation `ω = g'/h'` of the stored parts.
    ///
    /// For Teichmüller maps this is the constant `conj(α)`.
    pub fn dilatation(&self) -> Result<ComplexExpr> {
        if let MapForm::Teichmuller { alpha } = self.form {
            return Ok(ComplexExpr::constant(alpha.conj()));
        }
        let hp = self.h.wirtinger_dz();
        if hp.constant_value() == Some(c64(0.0, 0.0)) {
            return Err(Error::DegenerateMap);
        }
        Ok(ComplexExpr::div(self.g.wirtinger_dz(), hp))
    }

    /// Effective dilatation `conj(λ)·ω` of `f_λ`.
    pub fn dilatation_effective(&self) -> Result<ComplexExpr> {
        Ok(ComplexExpr::mul(
            ComplexExpr::constant(self.lambda.conj()),
            self.dilatation()?,
        ))
    }

    /// Jacobian `|h'|² − |(conj(λ)·g)'|²` at a point.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        let hp = self.h.wirtinger_dz().eval(z)?;
        let gp = self.g.wirtinger_dz().eval(z)?;
        Ok(hp.norm_sqr() - (self.lambda.conj() * gp).norm_sqr())
    }

    /// Checks `|g'| < |h'|` at every grid point, returning the first witness
    /// of failure.
    pub fn check_sense_preserving(&self, grid: &DiskGrid) -> Result<()> {
        let hp = self.h.wirtinger_dz();
        let gp_eff = self.co_analytic_effective().wirtinger_dz();
        for z in grid.points() {
            let hpv = hp.eval(z)?;
            let gpv = gp_eff.eval(z)?;
            if gpv.norm() >= hpv.norm() {
                let omega_abs =
                    if hpv.norm() == 0.0 { f64::INFINITY } else { gpv.norm() / hpv.norm() };
                return Err(Error::Orientation { at: z, omega_abs });
            }
        }
        Ok(())
    }

    /// Pointwise evaluator for `P_f = P_h − ω̄ω'/(1−|ω|²)` with the
    /// effective dilatation of `f_λ`.
    pub fn pre_schwarzian(&self) -> Result<Field> {
        let hp = self.h.wirtinger_dz();
        if hp.constant_value() == Some(c64(0.0, 0.0)) {
            return Err(Error::DegenerateMap);
        }
        let ph = ComplexExpr::div(hp.wirtinger_dz(), hp.clone());
        let omega = self.dilatation_effective()?;
        let omega_p = omega.wirtinger_dz();
        Ok(Field::new(move |z| {
            if hp.eval(z)? == c64(0.0, 0.0) {
                return Err(Error::CriticalPoint { at: z });
            }
            let w = omega.eval(z)?;
            let w2 = w.norm_sqr();
            if w2 >= 1.0 {
                return Err(Error::Orientation { at: z, omega_abs: w2.sqrt() });
            }
            let wp = omega_p.eval(z)?;
            Ok(ph.eval(z)? - w.conj() * wp / (1.0 - w2))
        }))
    }

    /// Pointwise evaluator for the harmonic Schwarzian
    /// `S_f = S_h + ω̄/(1−|ω|²)·(P_h·ω' − ω″) − (3/2)(ω̄ω'/(1−|ω|²))²`.
    pub fn schwarzian(&self) -> Result<Field> {
        let hp = self.h.wirtinger_dz();
        if hp.constant_value() == Some(c64(0.0, 0.0)) {
            return Err(Error::DegenerateMap);
        }
        let ph = ComplexExpr::div(hp.wirtinger_dz(), hp.clone());
        let sh = ComplexExpr::sub(
            ph.wirtinger_dz(),
            ComplexExpr::mul(
                ComplexExpr::constant(c64(0.5, 0.0)),
                ComplexExpr::pow(ph.clone(), c64(2.0, 0.0)),
            ),
        );
        let omega = self.dilatation_effective()?;
        let omega_p = omega.wirtinger_dz();
        let omega_pp = omega_p.wirtinger_dz();
        Ok(Field::new(move |z| {
            if hp.eval(z)? == c64(0.0, 0.0) {
                return Err(Error::CriticalPoint { at: z });
            }
            let w = omega.eval(z)?;
            let w2 = w.norm_sqr();
            if w2 >= 1.0 {
                return Err(Error::Orientation { at: z, omega_abs: w2.sqrt() });
            }
            let wp = omega_p.eval(z)?;
            let wpp = omega_pp.eval(z)?;
            let phv = ph.eval(z)?;
            let front = w.conj() / (1.0 - w2);
            let tail = w.conj() * wp / (1.0 - w2);
            Ok(sh.eval(z)? + front * (phv * wp - wpp) - 1.5 * tail * tail)
        }))
    }

    /// The affine combination `f_a = f + a·conj(f)` with `|a| < 1`,
    /// recombined into canonical form: analytic part `h + a·G`, co-analytic
    /// part `G + conj(a)·h`, where `G = conj(λ)·g`.
    pub fn affine_transform(&self, a: Complex64) -> Result<HarmonicMap> {
        if a.norm() >= 1.0 {
            return Err(Error::Parameter { name: "a", value: a });
        }
        let g_eff = self.co_analytic_effective();
        let h_new = ComplexExpr::add(
            self.h.clone(),
            ComplexExpr::mul(ComplexExpr::constant(a), g_eff.clone()),
        );
        let g_new = ComplexExpr::add(
            g_eff,
            ComplexExpr::mul(ComplexExpr::constant(a.conj()), self.h.clone()),
        );
        HarmonicMap::new(h_new, g_new, c64(1.0, 0.0))
    }
}

/// The function a weight or criterion is built from.
#[derive(Debug, Clone)]
pub enum Subject {
    /// A locally univalent analytic function `φ`.
    Analytic(ComplexExpr),
    /// A sense-preserving harmonic mapping.
    Harmonic(HarmonicMap),
}

impl Subject {
    /// Pointwise pre-Schwarzian of the subject (`P_φ` or `P_f`).
    pub fn pre_schwarzian_field(&self) -> Result<Field> {
        match self {
            Subject::Analytic(phi) => {
                Ok(Field::from_expr(&pre_schwarzian_analytic(phi)?))
            }
            Subject::Harmonic(map) => map.pre_schwarzian(),
        }
    }

    /// Symbolic pre-Schwarzian, available only for analytic subjects.
    pub fn pre_schwarzian_expr(&self) -> Option<Result<ComplexExpr>> {
        match self {
            Subject::Analytic(phi) => Some(pre_schwarzian_analytic(phi)),
            Subject::Harmonic(_) => None,
        }
    }
}

// ---------------------------------------------------------------------------
// analytic pre-Schwarzian and Schwarzian
// ---------------------------------------------------------------------------

/// `P_φ = φ″/φ′` as an expression.
pub fn pre_schwarzian_analytic(phi: &ComplexExpr) -> Result<ComplexExpr> {
    if !phi.is_analytic() {
        return Err(Error::NotAnalytic { part: "phi" });
    }
    let p = phi.wirtinger_dz();
    if p.constant_value() == Some(c64(0.0, 0.0)) {
        return Err(Error::DegenerateMap);
    }
    Ok(ComplexExpr::div(p.wirtinger_dz(), p))
}

/// `S_φ = (P_φ)' − ½(P_φ)²` as an expression.
pub fn schwarzian_analytic(phi: &ComplexExpr) -> Result<ComplexExpr> {
    let p = pre_schwarzian_analytic(phi)?;
    Ok(ComplexExpr::sub(
        p.wirtinger_dz(),
        ComplexExpr::mul(
            ComplexExpr::constant(c64(0.5, 0.0)),
            ComplexExpr::pow(p, c64(2.0, 0.0)),
        ),
    ))
}

/// `‖P_φ‖ = sup |P_φ|(1−|z|²)` estimated on a grid.
pub fn pre_schwarzian_norm(phi: &ComplexExpr, grid: &DiskGrid) -> Result<f64> {
    let p = pre_schwarzian_analytic(phi)?;
    let mut sup = 0.0f64;
    for z in grid.points() {
        let v = p.eval(z)?.norm() * (1.0 - z.norm_sqr());
        if v > sup {
            sup = v;
        }
    }
    Ok(sup)
}

/// `‖S_φ‖ = sup |S_φ|(1−|z|²)²` estimated on a grid.
pub fn schwarzian_norm(phi: &ComplexExpr, grid: &DiskGrid) -> Result<f64> {
    let s = schwarzian_analytic(phi)?;
    let mut sup = 0.0f64;
    for z in grid.points() {
        let w = 1.0 - z.norm_sqr();
        let v = s.eval(z)?.norm() * w * w;
        if v > sup {
            sup = v;
        }
    }
    Ok(sup)
}

/// Grid supremum of `|ω|` for the effective dilatation of `f`.
pub fn omega_sup(map: &HarmonicMap, grid: &DiskGrid) -> Result<f64> {
    let omega = map.dilatation_effective()?;
    let mut sup = 0.0f64;
    for z in grid.points() {
        let v = omega.eval(z)?.norm();
        if v > sup {
            sup = v;
        }
    }
    Ok(sup)
}

// ---------------------------------------------------------------------------
// disk geometry helpers
// ---------------------------------------------------------------------------

/// Result of sandwiching `|T(z)|` for `T(z) = (z+|ε|)/(1+|ε|z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusBound {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

/// Evaluates the Möbius sandwich
/// `||ε|−|z||/(1−|ε||z|) ≤ |T(z)| ≤ (|ε|+|z|)/(1+|ε||z|)`.
pub fn mobius_bound_check(epsilon: Complex64, z: Complex64) -> Result<MobiusBound> {
    let e = epsilon.norm();
    let r = z.norm();
    if e >= 1.0 {
        return Err(Error::Parameter { name: "epsilon", value: epsilon });
    }
    if r >= 1.0 {
        return Err(Error::Parameter { name: "z", value: z });
    }
    let t = (z + e) / (1.0 + e * z);
    Ok(MobiusBound {
        lower: (e - r).abs() / (1.0 - e * r),
        value: t.norm(),
        upper: (e + r) / (1.0 + e * r),
    })
}

/// Univalence radius `δ = (1 + k‖ω‖∞)/(k + ‖ω‖∞)` for the affine family
/// `h_a = h + a·g`; `+∞` (unbounded) when `k = ‖ω‖∞ = 0`.
pub fn delta_univalence_radius(k: f64, omega_sup: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Parameter { name: "k", value: c64(k, 0.0) });
    }
    if !(0.0..1.0).contains(&omega_sup) {
        return Err(Error::Parameter { name: "omega_sup", value: c64(omega_sup, 0.0) });
    }
    if k + omega_sup == 0.0 {
        return Ok(f64::INFINITY);
    }
    let delta = (1.0 + k * omega_sup) / (k + omega_sup);
    debug_assert!(delta > 1.0 - 1e-12);
    debug_assert!(omega_sup == 0.0 || delta <= 1.0 / omega_sup + 1e-12);
    Ok(delta)
}

/// Brute-force supremum of `|g(α)−g(β)|/|h(α)−h(β)|` over distinct pairs of
/// `samples` boundary points (taken at radius `1 − 1e−9`).
pub fn divided_difference_sup(map: &HarmonicMap, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidArgument { what: "need at least two boundary samples" });
    }
    let r = 1.0 - 1e-9;
    let mut hv = Vec::with_capacity(samples);
    let mut gv = Vec::with_capacity(samples);
    let mut pts = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = core::f64::consts::TAU * k as f64 / samples as f64;
        let z = c64(r * theta.cos(), r * theta.sin());
        pts.push(z);
        hv.push(map.h.eval(z)?);
        gv.push(map.g.eval(z)?);
    }
    let mut sup = 0.0f64;
    for i in 0..samples {
        for j in (i + 1)..samples {
            let dh = hv[i] - hv[j];
            if dh == c64(0.0, 0.0) {
                return Err(Error::NonUnivalent { a: pts[i], b: pts[j] });
            }
            let ratio = (gv[i] - gv[j]).norm() / dh.norm();
            if ratio > sup {
                sup = ratio;
            }
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;

    fn expr(s: &str) -> ComplexExpr {
        ComplexExpr::parse(s).unwrap()
    }

    fn small_grid() -> DiskGrid {
        DiskGrid::polar(32, 64)
    }

    #[test]
    fn grid_radii_increase_and_stay_inside() {
        let grid = DiskGrid::polar(128, 512);
        let radii = grid.radii();
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
        assert!(radii.iter().all(|&r| r > 0.0 && r < 1.0 - 0.9 * DiskGrid::DEFAULT_EXCLUSION));
        assert!(radii.last().copied().unwrap() > 0.999_99);
    }

    #[test]
    fn refined_grid_is_nested() {
        let coarse = DiskGrid::polar(32, 64);
        let fine = coarse.refined();
        for r in coarse.radii() {
            assert!(fine.radii().iter().any(|s| (s - r).abs() < 1e-15));
        }
        assert_eq!(fine.n_angular(), 128);
    }

    #[test]
    fn grid_rejects_degenerate_shapes() {
        assert!(DiskGrid::try_polar(16, 3, 1e-6).is_err());
        assert!(DiskGrid::try_polar(0, 64, 1e-6).is_err());
    }

    #[test]
    fn dilatation_of_scaled_identity_is_constant() {
        let f = HarmonicMap::new(expr("z"), expr("(0.4+0.1i)*z"), Complex64::new(1.0, 0.0))
            .unwrap();
        let omega = f.dilatation().unwrap();
        assert_eq!(omega.constant_value(), Some(Complex64::new(0.4, 0.1)));
    }

    #[test]
    fn dilatation_of_half_square_is_z() {
        let f = HarmonicMap::new(expr("z"), expr("z^2/2"), Complex64::new(1.0, 0.0)).unwrap();
        let omega = f.dilatation().unwrap();
        for &z in &[Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.1)] {
            assert!((omega.eval(z).unwrap() - z).norm() < 1e-15);
        }
    }

    #[test]
    fn dilatation_matches_finite_differences_on_f() {
        // ω = conj(f_z̄)/f_z for f = h + conj(g)
        let f = HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), Complex64::new(1.0, 0.0))
            .unwrap();
        let omega = f.dilatation().unwrap();
        let z = Complex64::new(0.5, 0.0);
        let expected = Complex64::new(0.2 * 0.5, 0.0) / Complex64::new(1.0 + 0.3 * 0.5, 0.0);
        assert!((omega.eval(z).unwrap() - expected).norm() < 1e-15);
        let (fz, fzbar) =
            numdiff::wirtinger_fd(|w| f.eval(w), z, numdiff::default_step(z)).unwrap();
        let fd_omega = fzbar.conj() / fz;
        assert!((omega.eval(z).unwrap() - fd_omega).norm() < 1e-8);
    }

    #[test]
    fn degenerate_analytic_part_is_rejected() {
        let f = HarmonicMap::new(expr("1"), expr("z"), Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(f.dilatation(), Err(Error::DegenerateMap)));
    }

    #[test]
    fn conj_in_parts_is_rejected() {
        assert!(matches!(
            HarmonicMap::new(expr("conj(z)"), expr("0"), Complex64::new(1.0, 0.0)),
            Err(Error::NotAnalytic { part: "h" })
        ));
    }

    #[test]
    fn pre_schwarzian_of_identity_and_exp() {
        let p = pre_schwarzian_analytic(&expr("z")).unwrap();
        assert_eq!(p.constant_value(), Some(Complex64::new(0.0, 0.0)));
        let p = pre_schwarzian_analytic(&expr("exp(z)")).unwrap();
        let s = schwarzian_analytic(&expr("exp(z)")).unwrap();
        for &z in &[Complex64::new(0.1, 0.7), Complex64::new(-0.4, -0.2)] {
            assert!((p.eval(z).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            assert!((s.eval(z).unwrap() - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn schwarzian_annihilates_mobius() {
        let s = schwarzian_analytic(&expr("z/(1 - z)")).unwrap();
        for z in small_grid().points() {
            assert!(s.eval(z).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn harmonic_pre_schwarzian_reduces_to_analytic_for_zero_g() {
        let phi = expr("z + 0.2*z^3");
        let map = HarmonicMap::analytic(phi.clone()).unwrap();
        let pf = map.pre_schwarzian().unwrap();
        let ph = pre_schwarzian_analytic(&phi).unwrap();
        for z in small_grid().points() {
            let a = pf.eval(z).unwrap();
            let b = ph.eval(z).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn teichmuller_pre_schwarzian_equals_p_h() {
        let h = expr("z + 0.15*z^2");
        let map = HarmonicMap::teichmuller(h.clone(), Complex64::new(0.3, 0.2)).unwrap();
        let pf = map.pre_schwarzian().unwrap();
        let ph = pre_schwarzian_analytic(&h).unwrap();
        for z in small_grid().points() {
            let diff = (pf.eval(z).unwrap() - ph.eval(z).unwrap()).norm();
            assert!(diff < 1e-12, "diff {diff} at {z}");
        }
    }

    #[test]
    fn harmonic_pre_schwarzian_closed_form_value() {
        // h = z, g = z²/2: P_f(0.3) = −0.3/(1−0.09)
        let map = HarmonicMap::new(expr("z"), expr("z^2/2"), Complex64::new(1.0, 0.0)).unwrap();
        let pf = map.pre_schwarzian().unwrap();
        let z = Complex64::new(0.3, 0.0);
        let expected = Complex64::new(-0.3 / 0.91, 0.0);
        assert!((pf.eval(z).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn harmonic_schwarzian_reduces_to_analytic_for_zero_g() {
        let phi = expr("z + 0.2*z^3");
        let map = HarmonicMap::analytic(phi.clone()).unwrap();
        let sf = map.schwarzian().unwrap();
        let sh = schwarzian_analytic(&phi).unwrap();
        for z in DiskGrid::polar(8, 16).points() {
            assert!((sf.eval(z).unwrap() - sh.eval(z).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn harmonic_schwarzian_matches_raw_formula() {
        // h = z + 0.15z², g = 0.1z²: all ingredients in closed form
        let map = HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), Complex64::new(1.0, 0.0))
            .unwrap();
        let sf = map.schwarzian().unwrap();
        for z in DiskGrid::polar(8, 16).points() {
            let hp = 1.0 + 0.3 * z;
            let ph = 0.3 / hp;
            let sh = -0.135 / (hp * hp);
            let omega = 0.2 * z / hp;
            let omega_p = 0.2 / (hp * hp);
            let omega_pp = -0.12 / (hp * hp * hp);
            let front = omega.conj() / (1.0 - omega.norm_sqr());
            let tail = front * omega_p;
            let expected = sh + front * (ph * omega_p - omega_pp) - 1.5 * tail * tail;
            let got = sf.eval(z).unwrap();
            assert!(
                (got - expected).norm() <= 1e-12 * expected.norm().max(1.0),
                "S_f mismatch at {z}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn harmonic_pre_schwarzian_matches_fd_of_log_jacobian() {
        let map = HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), Complex64::new(1.0, 0.0))
            .unwrap();
        let pf = map.pre_schwarzian().unwrap();
        let log_j = |z: Complex64| -> Result<Complex64> {
            Ok(Complex64::new(map.jacobian(z)?.ln(), 0.0))
        };
        for z in DiskGrid::polar(8, 16).points() {
            let sym = pf.eval(z).unwrap();
            let fd = numdiff::fd_dz(log_j, z, numdiff::default_step(z)).unwrap();
            assert!(
                (sym - fd).norm() <= 1e-6 * sym.norm().max(1.0),
                "at {z}: closed form {sym}, fd {fd}"
            );
        }
    }

    #[test]
    fn affine_transform_with_zero_is_identity() {
        let map = HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), Complex64::new(1.0, 0.0))
            .unwrap();
        let moved = map.affine_transform(Complex64::new(0.0, 0.0)).unwrap();
        for z in DiskGrid::polar(8, 8).points() {
            assert!((map.eval(z).unwrap() - moved.eval(z).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn affine_transform_preserves_pre_schwarzian() {
        let map = HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), Complex64::new(1.0, 0.0))
            .unwrap();
        let a = Complex64::new(0.3, 0.1);
        let moved = map.affine_transform(a).unwrap();
        let pf = map.pre_schwarzian().unwrap();
        let pfa = moved.pre_schwarzian().unwrap();
        for z in small_grid().points() {
            let diff = (pf.eval(z).unwrap() - pfa.eval(z).unwrap()).norm();
            assert!(diff < 1e-8, "P_f changed by {diff} at {z}");
        }
    }

    #[test]
    fn affine_transform_preserves_dilatation_term() {
        let map = HarmonicMap::new(expr("z + 0.15*z^2"), expr("0.1*z^2"), Complex64::new(1.0, 0.0))
            .unwrap();
        let a = Complex64::new(0.3, 0.1);
        let moved = map.affine_transform(a).unwrap();
        let (omega, omega_a) = (map.dilatation().unwrap(), moved.dilatation().unwrap());
        let (dp, dpa) = (omega.wirtinger_dz(), omega_a.wirtinger_dz());
        for z in small_grid().points() {
            let lhs = dpa.eval(z).unwrap().norm() / (1.0 - omega_a.eval(z).unwrap().norm_sqr());
            let rhs = dp.eval(z).unwrap().norm() / (1.0 - omega.eval(z).unwrap().norm_sqr());
            assert!((lhs - rhs).abs() < 1e-8, "dilatation term changed at {z}");
        }
    }

    #[test]
    fn affine_transform_rejects_large_parameter() {
        let map = HarmonicMap::analytic(expr("z")).unwrap();
        assert!(map.affine_transform(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn mobius_bound_degenerate_cases() {
        let z = Complex64::new(0.3, -0.2);
        let b = mobius_bound_check(Complex64::new(0.0, 0.0), z).unwrap();
        assert!((b.lower - z.norm()).abs() < 1e-15);
        assert!((b.value - z.norm()).abs() < 1e-15);
        assert!((b.upper - z.norm()).abs() < 1e-15);
        let e = Complex64::new(0.5, 0.1);
        let b = mobius_bound_check(e, Complex64::new(0.0, 0.0)).unwrap();
        assert!((b.lower - e.norm()).abs() < 1e-15);
        assert!((b.value - e.norm()).abs() < 1e-15);
        assert!((b.upper - e.norm()).abs() < 1e-15);
    }

    #[test]
    fn mobius_bound_sandwiches_value() {
        let b = mobius_bound_check(Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.3)).unwrap();
        assert!((b.lower - 0.2 / 0.85).abs() < 1e-15);
        assert!((b.upper - 0.8 / 1.15).abs() < 1e-15);
        assert!(b.lower <= b.value && b.value <= b.upper);
        for &(e, z) in &[
            (Complex64::new(0.2, 0.3), Complex64::new(-0.4, 0.1)),
            (Complex64::new(-0.7, 0.1), Complex64::new(0.2, 0.6)),
        ] {
            let b = mobius_bound_check(e, z).unwrap();
            assert!(b.lower <= b.value + 1e-15 && b.value <= b.upper + 1e-15);
        }
    }

    #[test]
    fn delta_radius_examples() {
        assert!((delta_univalence_radius(0.5, 0.5).unwrap() - 1.25).abs() < 1e-15);
        let d = delta_univalence_radius(0.2, 0.3).unwrap();
        assert!((d - 1.06 / 0.5).abs() < 1e-15);
        assert!(d <= 1.0 / 0.3);
        // k → 1⁻ drives δ → 1⁺
        let d = delta_univalence_radius(1.0 - 1e-9, 0.5).unwrap();
        assert!(d > 1.0 && d < 1.0 + 1e-8);
        assert_eq!(delta_univalence_radius(0.0, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn divided_difference_constant_ratio() {
        let alpha = Complex64::new(0.35, 0.2);
        let g = ComplexExpr::mul(ComplexExpr::constant(alpha), expr("z"));
        let map = HarmonicMap::new(expr("z"), g, Complex64::new(1.0, 0.0)).unwrap();
        let sup = divided_difference_sup(&map, 32).unwrap();
        assert!((sup - alpha.norm()).abs() < 1e-12);
        let trivial = HarmonicMap::analytic(expr("z")).unwrap();
        assert_eq!(divided_difference_sup(&trivial, 32).unwrap(), 0.0);
    }

    #[test]
    fn divided_difference_detects_collision() {
        // constant h collides at every pair of boundary samples
        let map = HarmonicMap::new(expr("1"), expr("z"), Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(divided_difference_sup(&map, 16), Err(Error::NonUnivalent { .. })));
    }

    #[test]
    fn norms_are_monotone_under_refinement() {
        let phi = expr("z + 0.2*z^2");
        let coarse = DiskGrid::polar(16, 32);
        let fine = coarse.refined();
        let n0 = pre_schwarzian_norm(&phi, &coarse).unwrap();
        let n1 = pre_schwarzian_norm(&phi, &fine).unwrap();
        assert!(n1 >= n0);
        let s0 = schwarzian_norm(&phi, &coarse).unwrap();
        let s1 = schwarzian_norm(&phi, &fine).unwrap();
        assert!(s1 >= s0);
    }

    #[test]
    fn sense_preserving_check_finds_witness() {
        let good = HarmonicMap::new(expr("z"), expr("0.5*z"), Complex64::new(1.0, 0.0)).unwrap();
        assert!(good.check_sense_preserving(&small_grid()).is_ok());
        let bad = HarmonicMap::new(expr("z"), expr("z^2"), Complex64::new(1.0, 0.0)).unwrap();
        let err = bad.check_sense_preserving(&small_grid()).unwrap_err();
        assert!(matches!(err, Error::Orientation { .. }));
    }

    #[test]
    fn lambda_scales_effective_dilatation() {
        let map = HarmonicMap::new(expr("z"), expr("z^2/2"), Complex64::new(0.0, 0.5)).unwrap();
        let eff = map.dilatation_effective().unwrap();
        let z = Complex64::new(0.4, 0.1);
        let expected = Complex64::new(0.0, -0.5) * z;
        assert!((eff.eval(z).unwrap() - expected).norm() < 1e-15);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn prop_schwarzian_annihilates_random_mobius(
            a_re in -2.0..2.0f64, a_im in -2.0..2.0f64,
            b_re in -2.0..2.0f64, b_im in -2.0..2.0f64,
            c_re in -0.5..0.5f64, c_im in -0.5..0.5f64,
        ) {
            use proptest::prelude::prop_assume;
            let a = Complex64::new(a_re, a_im);
            let b = Complex64::new(b_re, b_im);
            let c = Complex64::new(c_re, c_im);
            let d = Complex64::new(2.0, 0.5); // pole kept outside the closed disk
            prop_assume!((a * d - b * c).norm() > 0.1);
            let phi = ComplexExpr::div(
                ComplexExpr::add(
                    ComplexExpr::mul(ComplexExpr::constant(a), ComplexExpr::var()),
                    ComplexExpr::constant(b),
                ),
                ComplexExpr::add(
                    ComplexExpr::mul(ComplexExpr::constant(c), ComplexExpr::var()),
                    ComplexExpr::constant(d),
                ),
            );
            let s = schwarzian_analytic(&phi).unwrap();
            for z in DiskGrid::polar(8, 16).points() {
                proptest::prop_assert!(s.eval(z).unwrap().norm() < 1e-9);
            }
        }
    }
}
