//! Pointwise complex fields on subsets of the plane.
//!
//! Quantities like the harmonic pre-Schwarzian depend on `z̄` through `|ω|²`
//! and are therefore not expression trees; they are represented as shareable
//! pure evaluators. A [`Field`] is immutable and safe to evaluate from many
//! threads at once.

use alloc::sync::Arc;

use num_complex::Complex64;

use crate::cxexpr::ComplexExpr;
use crate::error::{Error, Result};

/// A pure pointwise evaluator `z ↦ w`.
#[derive(Clone)]
pub struct Field(Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>);

impl Field {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Field(Arc::new(f))
    }

    /// Wraps an expression tree as a field.
    pub fn from_expr(e: &ComplexExpr) -> Self {
        let e = e.clone();
        Field::new(move |z| e.eval(z).map_err(Error::from))
    }

    /// A constant field.
    pub fn constant(w: Complex64) -> Self {
        Field::new(move |_| Ok(w))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.0)(z)
    }
}

impl core::fmt::Debug for Field {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Field(..)")
    }
}

/// A pure pointwise evaluator `z ↦ x` with real values (criterion sides,
/// moduli, ratio fields).
#[derive(Clone)]
pub struct ScalarField(Arc<dyn Fn(Complex64) -> Result<f64> + Send + Sync>);

impl ScalarField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Complex64) -> Result<f64> + Send + Sync + 'static,
    {
        ScalarField(Arc::new(f))
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        (self.0)(z)
    }
}

impl core::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("ScalarField(..)")
    }
}
