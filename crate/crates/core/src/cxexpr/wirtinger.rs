//! Symbolic Wirtinger differentiation.
//!
//! The two formal operators treat `z` and `conj(z)` as independent:
//! `∂z/∂z = 1`, `∂conj(z)/∂z = 0`, `∂z/∂z̄ = 0`, `∂conj(z)/∂z̄ = 1`, and
//! conjugation swaps them: `∂/∂z conj(u) = conj(∂u/∂z̄)`. `exp`, `log`,
//! `sqrt` and constant powers differentiate through the holomorphic chain
//! rule (valid off their branch cuts).

use num_complex::Complex64;

use super::ComplexExpr;

#[derive(Clone, Copy)]
enum Op {
    Dz,
    Dzbar,
}

fn derive(e: &ComplexExpr, op: Op) -> ComplexExpr {
    use ComplexExpr as E;
    match e {
        E::Const(_) => E::zero(),
        E::Z => match op {
            Op::Dz => E::one(),
            Op::Dzbar => E::zero(),
        },
        E::Conj(u) => {
            let flipped = match op {
                Op::Dz => derive(u, Op::Dzbar),
                Op::Dzbar => derive(u, Op::Dz),
            };
            flipped.conj_expr()
        }
        E::Neg(u) => E::neg(derive(u, op)),
        E::Add(a, b) => E::add(derive(a, op), derive(b, op)),
        E::Sub(a, b) => E::sub(derive(a, op), derive(b, op)),
        E::Mul(a, b) => E::add(
            E::mul(derive(a, op), (**b).clone()),
            E::mul((**a).clone(), derive(b, op)),
        ),
        E::Div(a, b) => {
            // (a'b - ab') / b^2
            let num = E::sub(
                E::mul(derive(a, op), (**b).clone()),
                E::mul((**a).clone(), derive(b, op)),
            );
            E::div(num, E::pow((**b).clone(), Complex64::new(2.0, 0.0)))
        }
        E::Pow(base, w) => {
            // w·base^(w-1)·base'
            let lowered = E::pow((**base).clone(), w - Complex64::new(1.0, 0.0));
            E::mul(E::mul(E::Const(*w), lowered), derive(base, op))
        }
        E::Exp(u) => E::mul(E::exp((**u).clone()), derive(u, op)),
        E::Log(u) => E::div(derive(u, op), (**u).clone()),
        E::Sqrt(u) => E::div(
            derive(u, op),
            E::mul(E::Const(Complex64::new(2.0, 0.0)), E::sqrt((**u).clone())),
        ),
    }
}

impl ComplexExpr {
    /// Symbolic derivative with respect to the Wirtinger operator `∂/∂z`.
    pub fn wirtinger_dz(&self) -> ComplexExpr {
        derive(self, Op::Dz)
    }

    /// Symbolic derivative with respect to the Wirtinger operator `∂/∂z̄`.
    pub fn wirtinger_dzbar(&self) -> ComplexExpr {
        derive(self, Op::Dzbar)
    }
}
