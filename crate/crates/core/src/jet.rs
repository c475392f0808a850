//! Second-order Wirtinger jets.
//!
//! A [`ComplexJet2`] carries the value of a function of `(z, z̄)` together
//! with its exact Wirtinger derivatives `∂_z`, `∂_z̄`, `∂_z∂_z`, `∂_z∂_z̄` and
//! `∂_z̄∂_z̄`. Arithmetic on jets applies the Wirtinger product and chain
//! rules, so composite expressions are differentiated exactly.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Value and Wirtinger derivatives up to second order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexJet2 {
    pub value: Complex64,
    pub d_z: Complex64,
    pub d_zbar: Complex64,
    pub d_zz: Complex64,
    pub d_zzbar: Complex64,
    pub d_zbarzbar: Complex64,
}

impl ComplexJet2 {
    pub fn constant(value: Complex64) -> Self {
        Self {
            value,
            d_z: ZERO,
            d_zbar: ZERO,
            d_zz: ZERO,
            d_zzbar: ZERO,
            d_zbarzbar: ZERO,
        }
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    /// The coordinate function `z` itself, seeded at `z`.
    pub fn variable(z: Complex64) -> Self {
        Self {
            d_z: ONE,
            ..Self::constant(z)
        }
    }

    /// Jet of the complex conjugate function.
    ///
    /// `∂_z(f̄) = conj(∂_z̄ f)` and likewise for the second derivatives.
    pub fn conj(&self) -> Self {
        Self {
            value: self.value.conj(),
            d_z: self.d_zbar.conj(),
            d_zbar: self.d_z.conj(),
            d_zz: self.d_zbarzbar.conj(),
            d_zzbar: self.d_zzbar.conj(),
            d_zbarzbar: self.d_zz.conj(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            value: self.value * s,
            d_z: self.d_z * s,
            d_zbar: self.d_zbar * s,
            d_zz: self.d_zz * s,
            d_zzbar: self.d_zzbar * s,
            d_zbarzbar: self.d_zbarzbar * s,
        }
    }

    /// Compose a holomorphic scalar function `F` with this jet, given
    /// `F(g)`, `F'(g)` and `F''(g)` at the current value `g`.
    pub fn compose_holomorphic(&self, f0: Complex64, f1: Complex64, f2: Complex64) -> Self {
        Self {
            value: f0,
            d_z: f1 * self.d_z,
            d_zbar: f1 * self.d_zbar,
            d_zz: f2 * self.d_z * self.d_z + f1 * self.d_zz,
            d_zzbar: f2 * self.d_z * self.d_zbar + f1 * self.d_zzbar,
            d_zbarzbar: f2 * self.d_zbar * self.d_zbar + f1 * self.d_zbarzbar,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.value == ZERO || !self.value.is_finite() {
            return Err(Error::DivisionByZero);
        }
        let inv = self.value.inv();
        Ok(self.compose_holomorphic(inv, -inv * inv, 2.0 * inv * inv * inv))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose_holomorphic(e, e, e)
    }

    /// Natural logarithm. Only defined here for values on the positive real
    /// axis (up to round-off), which is where metric factors live.
    pub fn ln(&self) -> Result<Self> {
        self.check_positive()?;
        let v = self.value;
        Ok(self.compose_holomorphic(v.ln(), v.inv(), -(v * v).inv()))
    }

    /// Real power of a positive real-valued jet.
    pub fn powf(&self, p: f64) -> Result<Self> {
        self.check_positive()?;
        let v = self.value.re;
        let f0 = v.powf(p);
        let f1 = p * v.powf(p - 1.0);
        let f2 = p * (p - 1.0) * v.powf(p - 2.0);
        Ok(self.compose_holomorphic(f0.into(), f1.into(), f2.into()))
    }

    fn check_positive(&self) -> Result<()> {
        let v = self.value;
        if !(v.re > 0.0) || v.im.abs() > 1e-9 * v.re.max(1.0) || !v.re.is_finite() {
            return Err(Error::NonPositiveBase(v));
        }
        Ok(())
    }

    /// `∂_x` of the underlying function: `∂_z + ∂_z̄`.
    pub fn d_x(&self) -> Complex64 {
        self.d_z + self.d_zbar
    }

    /// `∂_y` of the underlying function: `i(∂_z − ∂_z̄)`.
    pub fn d_y(&self) -> Complex64 {
        Complex64::i() * (self.d_z - self.d_zbar)
    }

    pub fn is_finite(&self) -> bool {
        [
            self.value,
            self.d_z,
            self.d_zbar,
            self.d_zz,
            self.d_zzbar,
            self.d_zbarzbar,
        ]
        .iter()
        .all(|c| c.is_finite())
    }
}

impl Default for ComplexJet2 {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Complex64> for ComplexJet2 {
    fn from(c: Complex64) -> Self {
        Self::constant(c)
    }
}

impl From<f64> for ComplexJet2 {
    fn from(c: f64) -> Self {
        Self::constant(c.into())
    }
}

impl Add for ComplexJet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            d_z: self.d_z + o.d_z,
            d_zbar: self.d_zbar + o.d_zbar,
            d_zz: self.d_zz + o.d_zz,
            d_zzbar: self.d_zzbar + o.d_zzbar,
            d_zbarzbar: self.d_zbarzbar + o.d_zbarzbar,
        }
    }
}

impl AddAssign for ComplexJet2 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for ComplexJet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for ComplexJet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for ComplexJet2 {
    type Output = Self;
    fn mul(self, g: Self) -> Self {
        let f = self;
        Self {
            value: f.value * g.value,
            d_z: f.d_z * g.value + f.value * g.d_z,
            d_zbar: f.d_zbar * g.value + f.value * g.d_zbar,
            d_zz: f.d_zz * g.value + 2.0 * f.d_z * g.d_z + f.value * g.d_zz,
            d_zzbar: f.d_zzbar * g.value
                + f.d_z * g.d_zbar
                + f.d_zbar * g.d_z
                + f.value * g.d_zzbar,
            d_zbarzbar: f.d_zbarzbar * g.value
                + 2.0 * f.d_zbar * g.d_zbar
                + f.value * g.d_zbarzbar,
        }
    }
}

impl Mul<Complex64> for ComplexJet2 {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

impl Div for ComplexJet2 {
    type Output = Result<Self>;
    fn div(self, g: Self) -> Result<Self> {
        Ok(self * g.recip()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn z_times_zbar() {
        let z = ComplexJet2::variable(c(2.0, 0.0));
        let j = z * z.conj();
        assert_eq!(j.value, c(4.0, 0.0));
        assert_eq!(j.d_z, c(2.0, 0.0));
        assert_eq!(j.d_zbar, c(2.0, 0.0));
        assert_eq!(j.d_zzbar, c(1.0, 0.0));
        assert_eq!(j.d_zz, ZERO);
    }

    #[test]
    fn log_one_plus_abs_squared() {
        // ∂_z∂_z̄ log(1+|z|²) = 1/(1+|z|²)², which is 0.25 at z = 1
        let z = ComplexJet2::variable(c(1.0, 0.0));
        let j = (ComplexJet2::from(1.0) + z * z.conj()).ln().unwrap();
        assert!((j.d_zzbar - c(0.25, 0.0)).norm() < 1e-15);
        assert!((j.d_z - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn conj_is_involutive() {
        let z = ComplexJet2::variable(c(0.3, -0.7));
        let f = (z * z * z.conj()).exp();
        let back = f.conj().conj();
        assert_eq!(f, back);
    }

    #[test]
    fn powf_rejects_negative_base() {
        let j = ComplexJet2::constant(c(-1.0, 0.0));
        assert!(matches!(j.powf(0.5), Err(Error::NonPositiveBase(_))));
        assert!(ComplexJet2::zero().recip().is_err());
    }

    #[test]
    fn real_function_reality_invariants() {
        let z = ComplexJet2::variable(c(0.4, 1.1));
        let s = z * z.conj();
        let f = (ComplexJet2::from(4.0) / (ComplexJet2::from(1.0) + s) .powf(2.0).unwrap()).unwrap();
        assert!(f.value.im.abs() < 1e-15);
        assert!((f.d_zbar - f.d_z.conj()).norm() < 1e-15);
        assert!((f.d_zbarzbar - f.d_zz.conj()).norm() < 1e-15);
        assert!(f.d_zzbar.im.abs() < 1e-15);
    }
}
