//! Closed-form composites of rational data in `(z, z̄)`.
//!
//! An [`Expr`] is evaluated by feeding a jet for the chart variable through
//! the tree, so every node is differentiated exactly by the jet rules.
//! Composition (`Compose`) substitutes one expression for the variable of
//! another, which is how chart transitions and maps `w(z)` are expressed.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::jet::ComplexJet2;
use crate::rational::RationalFunction;

#[derive(Clone, Debug)]
pub enum Expr {
    /// The chart variable.
    Var,
    Const(Complex64),
    /// A rational function applied to a sub-expression.
    Rational(Arc<RationalFunction>, Arc<Expr>),
    Conj(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Powf(Arc<Expr>, f64),
    Log(Arc<Expr>),
    Exp(Arc<Expr>),
    /// `outer(inner)`: evaluate `outer` with its variable replaced by `inner`.
    Compose(Arc<Expr>, Arc<Expr>),
}

impl Expr {
    pub fn var() -> Self {
        Expr::Var
    }

    pub fn constant(c: Complex64) -> Self {
        Expr::Const(c)
    }

    pub fn real(c: f64) -> Self {
        Expr::Const(c.into())
    }

    pub fn zero() -> Self {
        Expr::Const(Complex64::new(0.0, 0.0))
    }

    /// `f(z)` for a rational `f` of the chart variable.
    pub fn rational(f: RationalFunction) -> Self {
        if f.is_zero() {
            return Expr::zero();
        }
        Expr::Rational(Arc::new(f), Arc::new(Expr::Var))
    }

    /// `f(inner)`.
    pub fn rational_of(f: RationalFunction, inner: Expr) -> Self {
        if f.is_zero() {
            return Expr::zero();
        }
        Expr::Rational(Arc::new(f), Arc::new(inner))
    }

    /// `|z|²`.
    pub fn abs_sq_var() -> Self {
        Expr::Var * Expr::Var.conj()
    }

    /// Structural zero test; does not evaluate.
    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Const(c) => *c == Complex64::new(0.0, 0.0),
            Expr::Mul(a, b) => a.is_zero() || b.is_zero(),
            Expr::Add(a, b) => a.is_zero() && b.is_zero(),
            Expr::Conj(a) => a.is_zero(),
            Expr::Div(a, _) => a.is_zero(),
            Expr::Compose(outer, _) => outer.is_zero(),
            _ => false,
        }
    }

    fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Expr::Const(c) => Expr::Const(c.conj()),
            Expr::Conj(inner) => Arc::unwrap_or_clone(inner),
            e => Expr::Conj(Arc::new(e)),
        }
    }

    pub fn div(self, rhs: Expr) -> Self {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::Div(Arc::new(self), Arc::new(rhs))
    }

    pub fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Expr::real(1.0);
        }
        if p == 1.0 {
            return self;
        }
        Expr::Powf(Arc::new(self), p)
    }

    pub fn ln(self) -> Self {
        Expr::Log(Arc::new(self))
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Arc::new(self))
    }

    /// `self ∘ inner`.
    pub fn compose(self, inner: Expr) -> Self {
        match self {
            Expr::Var => inner,
            Expr::Const(c) => Expr::Const(c),
            e => Expr::Compose(Arc::new(e), Arc::new(inner)),
        }
    }

    /// Evaluates with the chart variable replaced by the jet `var`.
    pub fn eval_with(&self, var: &ComplexJet2) -> Result<ComplexJet2> {
        Ok(match self {
            Expr::Var => *var,
            Expr::Const(c) => ComplexJet2::constant(*c),
            Expr::Rational(f, inner) => f.apply(&inner.eval_with(var)?)?,
            Expr::Conj(a) => a.eval_with(var)?.conj(),
            Expr::Add(a, b) => a.eval_with(var)? + b.eval_with(var)?,
            Expr::Mul(a, b) => {
                let x = a.eval_with(var)?;
                if x == ComplexJet2::zero() {
                    return Ok(x);
                }
                x * b.eval_with(var)?
            }
            Expr::Div(a, b) => (a.eval_with(var)? / b.eval_with(var)?)?,
            Expr::Powf(a, p) => a.eval_with(var)?.powf(*p)?,
            Expr::Log(a) => a.eval_with(var)?.ln()?,
            Expr::Exp(a) => a.eval_with(var)?.exp(),
            Expr::Compose(outer, inner) => outer.eval_with(&inner.eval_with(var)?)?,
        })
    }

    /// Full second-order jet at the point `z` of the chart.
    pub fn jet(&self, z: Complex64) -> Result<ComplexJet2> {
        self.eval_with(&ComplexJet2::variable(z))
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet(z)?.value)
    }
}

/// Jet of a composite real or complex expression at `z`.
pub fn jet_mixed_eval(expr: &Expr, z: Complex64) -> Result<ComplexJet2> {
    expr.jet(z)
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return Expr::Const(a + b);
        }
        Expr::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self * Expr::real(-1.0)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a * b),
            (Some(a), None) if a == Complex64::new(1.0, 0.0) => rhs,
            (None, Some(b)) if b == Complex64::new(1.0, 0.0) => self,
            _ => Expr::Mul(Arc::new(self), Arc::new(rhs)),
        }
    }
}

impl Mul<Complex64> for Expr {
    type Output = Expr;
    fn mul(self, c: Complex64) -> Expr {
        Expr::Const(c) * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mixed_examples() {
        let j = jet_mixed_eval(&Expr::abs_sq_var(), c(2.0, 0.0)).unwrap();
        assert_eq!(j.value, c(4.0, 0.0));
        assert_eq!(j.d_z, c(2.0, 0.0));
        assert_eq!(j.d_zbar, c(2.0, 0.0));
        assert_eq!(j.d_zzbar, c(1.0, 0.0));

        let e = (Expr::real(1.0) + Expr::abs_sq_var()).ln();
        let j = jet_mixed_eval(&e, c(1.0, 0.0)).unwrap();
        assert!((j.d_zzbar - c(0.25, 0.0)).norm() < 1e-15);

        let j = jet_mixed_eval(&Expr::real(4.0), c(0.3, 0.1)).unwrap();
        assert_eq!(j, ComplexJet2::constant(c(4.0, 0.0)));
    }

    #[test]
    fn composition_applies_chain_rule() {
        // f(w) = w w̄ composed with w = z²: |z|⁴, ∂_z∂_z̄ = 4|z|²
        let e = Expr::abs_sq_var().compose(Expr::rational(RationalFunction::monomial(c(1.0, 0.0), 2)));
        let z = c(0.5, -0.5);
        let j = e.jet(z).unwrap();
        assert!((j.value - c(z.norm_sqr().powi(2), 0.0)).norm() < 1e-15);
        assert!((j.d_zzbar - c(4.0 * z.norm_sqr(), 0.0)).norm() < 1e-14);
        assert!((j.d_z - 2.0 * z * z.conj() * z.conj()).norm() < 1e-14);
    }

    #[test]
    fn zero_simplification() {
        let e = Expr::zero() * Expr::var().ln();
        assert!(e.is_zero());
        let e = Expr::var() + Expr::zero();
        assert!(matches!(e, Expr::Var));
    }
}
