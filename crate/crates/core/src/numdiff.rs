//! Finite-difference Wirtinger derivatives.
//!
//! The symmetric 4-point stencil
//!
//! ```text
//! f_z  ≈ ¼ [ (f(z+h) − f(z−h))/h − i·(f(z+ih) − f(z−ih))/h ]
//! f_z̄ ≈ ¼ [ (f(z+h) − f(z−h))/h + i·(f(z+ih) − f(z−ih))/h ]
//! ```
//!
//! is O(h²) accurate and shares its four samples between the two
//! derivatives. It is the numerical oracle for the symbolic rules in
//! [`crate::cxexpr`] and the production path for quantities that are not
//! expression trees (map-dependent σ-weights, Beltrami coefficients of
//! plane extensions).

use num_complex::Complex64;

/// Default step for a stencil centred at `z`: `1e-6 · max(1, |z|)`.
pub fn default_step(z: Complex64) -> f64 {
    1e-6 * z.norm().max(1.0)
}

/// Both Wirtinger derivatives `(f_z, f_z̄)` of `f` at `z` with step `h`.
pub fn wirtinger_fd<F, E>(f: F, z: Complex64, h: f64) -> Result<(Complex64, Complex64), E>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    let re = Complex64::new(h, 0.0);
    let im = Complex64::new(0.0, h);
    let dx = (f(z + re)? - f(z - re)?) / h;
    let dy = (f(z + im)? - f(z - im)?) / h;
    let i_dy = Complex64::new(0.0, 1.0) * dy;
    Ok(((dx - i_dy) * 0.25, (dx + i_dy) * 0.25))
}

/// `∂f/∂z` only.
pub fn fd_dz<F, E>(f: F, z: Complex64, h: f64) -> Result<Complex64, E>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    wirtinger_fd(f, z, h).map(|(dz, _)| dz)
}

/// `∂f/∂z̄` only.
pub fn fd_dzbar<F, E>(f: F, z: Complex64, h: f64) -> Result<Complex64, E>
where
    F: Fn(Complex64) -> Result<Complex64, E>,
{
    wirtinger_fd(f, z, h).map(|(_, dzbar)| dzbar)
}
