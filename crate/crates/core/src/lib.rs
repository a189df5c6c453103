//! Numerical toolkit for univalence criteria and quasiconformal extensions of
//! planar harmonic mappings.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`cxexpr`] — closed-form complex expressions in `z` and `conj(z)` with
//!   symbolic Wirtinger differentiation,
//! * [`maps`] — sense-preserving harmonic mappings `f = h + λ·conj(g)`, their
//!   dilatation and (pre-)Schwarzian derivatives, and polar sampling grids,
//! * [`weights`] — admissible σ-weights used by the Ahlfors-type criteria,
//! * [`criteria`] — pointwise criterion ratio fields and their disk suprema,
//! * [`extensions`] — explicit piecewise extensions of a map to the plane,
//! * [`beltrami`] — Beltrami-coefficient measurement and K-bound certification.
//!
//! Everything in this crate is pure and deterministic: the same inputs produce
//! bit-identical reports. The crate is `no_std`-compatible (with `alloc`);
//! disable the default `std` feature for embedded use.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod beltrami;
pub mod criteria;
pub mod cxexpr;
pub mod error;
pub mod extensions;
pub mod field;
pub mod maps;
pub mod numdiff;
pub mod weights;

pub use error::{Error, EvalError, ParseError, Result};
pub use num_complex::Complex64;
