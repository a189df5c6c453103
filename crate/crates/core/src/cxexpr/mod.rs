//! Closed-form complex expressions in `z` and `conj(z)`.
//!
//! An expression is an immutable tree built from complex literals, the
//! variable `z`, `conj(·)`, the arithmetic operators `+ - * / ^` and the
//! functions `exp`, `log`, `sqrt`. `log` and `sqrt` use principal branches
//! (cut along the negative real axis), and a power with non-integer exponent
//! means `exp(w·log(base))` with the principal `log`.
//!
//! Expressions support symbolic differentiation with respect to the formal
//! Wirtinger operators `∂/∂z` and `∂/∂z̄` via [`ComplexExpr::wirtinger_dz`]
//! and [`ComplexExpr::wirtinger_dzbar`]. No algebraic simplification beyond
//! constant folding is performed; derivative correctness is checked by
//! evaluation, not by tree shape.

mod parser;
mod wirtinger;

use alloc::boxed::Box;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{EvalError, EvalErrorKind, ParseError, Result};

/// A parsed closed-form expression in `z` and `conj(z)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexExpr {
    /// A complex literal.
    Const(Complex64),
    /// The variable `z`.
    Z,
    /// Complex conjugate of a subexpression.
    Conj(Box<ComplexExpr>),
    /// Unary negation.
    Neg(Box<ComplexExpr>),
    Add(Box<ComplexExpr>, Box<ComplexExpr>),
    Sub(Box<ComplexExpr>, Box<ComplexExpr>),
    Mul(Box<ComplexExpr>, Box<ComplexExpr>),
    Div(Box<ComplexExpr>, Box<ComplexExpr>),
    /// `base ^ exponent`; the exponent is always a literal.
    Pow(Box<ComplexExpr>, Complex64),
    Exp(Box<ComplexExpr>),
    Log(Box<ComplexExpr>),
    Sqrt(Box<ComplexExpr>),
}

use ComplexExpr::*;

/// `true` if `w` is an exactly representable integer of small magnitude.
fn as_small_int(w: Complex64) -> Option<i32> {
    if w.im == 0.0 && w.re.fract() == 0.0 && w.re.abs() <= 1e9 {
        Some(w.re as i32)
    } else {
        None
    }
}

// the arithmetic constructors share names with the `core::ops` traits on
// purpose: they are associated smart constructors, not operators
#[allow(clippy::should_implement_trait)]
impl ComplexExpr {
    /// Parses an expression from its textual form.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parser::parse(text)
    }

    pub fn constant(w: Complex64) -> Self {
        Const(w)
    }

    pub fn var() -> Self {
        Z
    }

    pub fn zero() -> Self {
        Const(Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Const(Complex64::new(1.0, 0.0))
    }

    /// The literal value, if the whole tree is a constant.
    pub fn constant_value(&self) -> Option<Complex64> {
        match self {
            Const(w) => Some(*w),
            _ => None,
        }
    }

    /// `true` when the tree contains no `conj` node.
    pub fn is_analytic(&self) -> bool {
        match self {
            Const(_) | Z => true,
            Conj(_) => false,
            Neg(u) | Exp(u) | Log(u) | Sqrt(u) => u.is_analytic(),
            Pow(u, _) => u.is_analytic(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.is_analytic() && b.is_analytic(),
        }
    }

    /// `true` when the tree contains no occurrence of `z` at all.
    pub fn is_constant_tree(&self) -> bool {
        match self {
            Const(_) => true,
            Z => false,
            Conj(u) | Neg(u) | Exp(u) | Log(u) | Sqrt(u) => u.is_constant_tree(),
            Pow(u, _) => u.is_constant_tree(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.is_constant_tree() && b.is_constant_tree()
            }
        }
    }

    /// Evaluates the expression at a point, using principal branches.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        match self {
            Const(w) => Ok(*w),
            Z => Ok(z),
            Conj(u) => Ok(u.eval(z)?.conj()),
            Neg(u) => Ok(-u.eval(z)?),
            Add(a, b) => Ok(a.eval(z)? + b.eval(z)?),
            Sub(a, b) => Ok(a.eval(z)? - b.eval(z)?),
            Mul(a, b) => Ok(a.eval(z)? * b.eval(z)?),
            Div(a, b) => {
                let den = b.eval(z)?;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(EvalError { at: z, kind: EvalErrorKind::Pole });
                }
                Ok(a.eval(z)? / den)
            }
            Pow(base, w) => {
                let b = base.eval(z)?;
                pow_value(b, *w, z)
            }
            Exp(u) => Ok(u.eval(z)?.exp()),
            Log(u) => {
                let v = u.eval(z)?;
                if v == Complex64::new(0.0, 0.0) {
                    return Err(EvalError { at: z, kind: EvalErrorKind::BranchPoint });
                }
                Ok(v.ln())
            }
            Sqrt(u) => Ok(u.eval(z)?.sqrt()),
        }
    }

    /// Complex conjugate as an expression (folded for constants).
    pub fn conj_expr(&self) -> Self {
        match self {
            Const(w) => Const(w.conj()),
            Conj(u) => (**u).clone(),
            other => Conj(Box::new(other.clone())),
        }
    }

    // ----- smart constructors -------------------------------------------
    //
    // These fold constants and drop arithmetic neutral elements so that
    // derivative trees stay small. They never reassociate or otherwise
    // rewrite non-constant structure.

    pub fn add(a: Self, b: Self) -> Self {
        match (a.constant_value(), b.constant_value()) {
            (Some(x), Some(y)) => return Const(x + y),
            (Some(x), None) if x == Complex64::new(0.0, 0.0) => return b,
            (None, Some(y)) if y == Complex64::new(0.0, 0.0) => return a,
            _ => {}
        }
        Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Self, b: Self) -> Self {
        match (a.constant_value(), b.constant_value()) {
            (Some(x), Some(y)) => return Const(x - y),
            (None, Some(y)) if y == Complex64::new(0.0, 0.0) => return a,
            (Some(x), None) if x == Complex64::new(0.0, 0.0) => return Self::neg(b),
            _ => {}
        }
        Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Self, b: Self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match (a.constant_value(), b.constant_value()) {
            (Some(x), Some(y)) => return Const(x * y),
            (Some(x), None) if x == zero => return Const(zero),
            (None, Some(y)) if y == zero => return Const(zero),
            (Some(x), None) if x == one => return b,
            (None, Some(y)) if y == one => return a,
            _ => {}
        }
        Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Self, b: Self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match (a.constant_value(), b.constant_value()) {
            (Some(x), Some(y)) if y != zero => return Const(x / y),
            (None, Some(y)) if y == one => return a,
            (Some(x), None) if x == zero => return Const(zero),
            _ => {}
        }
        Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Self) -> Self {
        match a {
            Const(w) => Const(-w),
            Neg(u) => *u,
            other => Neg(Box::new(other)),
        }
    }

    pub fn pow(base: Self, exponent: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        if exponent == one {
            return base;
        }
        if exponent == Complex64::new(0.0, 0.0) {
            return Const(one);
        }
        if let Some(b) = base.constant_value() {
            if let Ok(v) = pow_value(b, exponent, Complex64::new(0.0, 0.0)) {
                return Const(v);
            }
        }
        Pow(Box::new(base), exponent)
    }

    pub fn exp(a: Self) -> Self {
        match a.constant_value() {
            Some(w) => Const(w.exp()),
            None => Exp(Box::new(a)),
        }
    }

    pub fn log(a: Self) -> Self {
        match a.constant_value() {
            Some(w) if w != Complex64::new(0.0, 0.0) => Const(w.ln()),
            _ => Log(Box::new(a)),
        }
    }

    pub fn sqrt(a: Self) -> Self {
        match a.constant_value() {
            Some(w) => Const(w.sqrt()),
            None => Sqrt(Box::new(a)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }
}

fn pow_value(base: Complex64, w: Complex64, at: Complex64) -> Result<Complex64, EvalError> {
    let zero = Complex64::new(0.0, 0.0);
    if let Some(n) = as_small_int(w) {
        if base == zero {
            return match n {
                0 => Ok(Complex64::new(1.0, 0.0)),
                n if n > 0 => Ok(zero),
                _ => Err(EvalError { at, kind: EvalErrorKind::Pole }),
            };
        }
        return Ok(base.powi(n));
    }
    if base == zero {
        // exp(w·log 0) is undefined
        return Err(EvalError { at, kind: EvalErrorKind::BranchPoint });
    }
    Ok(base.powc(w))
}

/// Prints a complex literal so that the parser reads the same value back.
fn write_literal(f: &mut fmt::Formatter<'_>, w: Complex64) -> fmt::Result {
    if w.im == 0.0 {
        if w.re < 0.0 {
            write!(f, "({})", w.re)
        } else {
            write!(f, "{}", w.re)
        }
    } else if w.re == 0.0 {
        if w.im < 0.0 {
            write!(f, "({}i)", w.im)
        } else {
            write!(f, "{}i", w.im)
        }
    } else if w.im < 0.0 {
        write!(f, "({}-{}i)", w.re, -w.im)
    } else {
        write!(f, "({}+{}i)", w.re, w.im)
    }
}

impl fmt::Display for ComplexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &ComplexExpr, min_prec: u8) -> fmt::Result {
            if e.precedence() < min_prec {
                write!(f, "(")?;
                fmt::Display::fmt(e, f)?;
                write!(f, ")")
            } else {
                fmt::Display::fmt(e, f)
            }
        }
        match self {
            Const(w) => write_literal(f, *w),
            Z => write!(f, "z"),
            Conj(u) => write!(f, "conj({u})"),
            Neg(u) => {
                write!(f, "-")?;
                child(f, u, 3)
            }
            Add(a, b) => {
                child(f, a, 1)?;
                write!(f, " + ")?;
                child(f, b, 2)
            }
            Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " - ")?;
                child(f, b, 2)
            }
            Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            Pow(base, w) => {
                child(f, base, 5)?;
                write!(f, "^")?;
                write_literal(f, *w)
            }
            Exp(u) => write!(f, "exp({u})"),
            Log(u) => write!(f, "log({u})"),
            Sqrt(u) => write!(f, "sqrt({u})"),
        }
    }
}

impl FromStr for ComplexExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Self::parse(s)
    }
}

impl From<Complex64> for ComplexExpr {
    fn from(w: Complex64) -> Self {
        Const(w)
    }
}

/// Convenience wrapper used in tests and by the CLI.
pub fn parse(text: &str) -> Result<ComplexExpr, ParseError> {
    ComplexExpr::parse(text)
}

#[cfg(test)]
mod tests;
