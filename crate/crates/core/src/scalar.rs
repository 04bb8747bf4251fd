//! Scalar abstraction shared by every formula in the crate.
//!
//! All physics is written once, generically over [`Scalar`]. Plain `f64`
//! gives values; [`Jet`] gives exact first derivatives. Jets nest
//! (`Jet<Jet<f64>>`), which is how the base Hamiltonian (itself a
//! derivative with respect to `kappa2`) gets its own phase-space gradient.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real-like number closed under the elementary functions used here.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Lift a constant.
    fn cst(v: f64) -> Self;
    /// The order-0 real value, used for branch selection and guards.
    fn value(&self) -> f64;

    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn asin(self) -> Self;
    fn asinh(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn sq(self) -> Self {
        self * self
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn asin(self) -> Self {
        f64::asin(self)
    }
    #[inline]
    fn asinh(self) -> Self {
        f64::asinh(self)
    }
}

/// First-order jet `val + der·η` with `η² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T = f64> {
    pub val: T,
    pub der: T,
}

impl<T: Scalar> Jet<T> {
    pub fn new(val: T, der: T) -> Self {
        Jet { val, der }
    }

    /// A constant: derivative zero.
    pub fn constant(val: T) -> Self {
        Jet { val, der: T::zero() }
    }

    /// The seeded independent variable: derivative one.
    pub fn variable(val: T) -> Self {
        Jet { val, der: T::one() }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Jet {
            val: f,
            der: self.der * df,
        }
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Jet::new(self.val + o.val, self.der + o.der)
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Jet::new(self.val - o.val, self.der - o.der)
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Jet::new(self.val * o.val, self.val * o.der + self.der * o.val)
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let q = self.val / o.val;
        Jet::new(q, (self.der - q * o.der) / o.val)
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Jet::new(-self.val, -self.der)
    }
}

impl<T: Scalar> Add<f64> for Jet<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: f64) -> Self {
        Jet::new(self.val + o, self.der)
    }
}

impl<T: Scalar> Sub<f64> for Jet<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: f64) -> Self {
        Jet::new(self.val - o, self.der)
    }
}

impl<T: Scalar> Mul<f64> for Jet<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Jet::new(self.val * o, self.der * o)
    }
}

impl<T: Scalar> Div<f64> for Jet<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        Jet::new(self.val / o, self.der / o)
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn cst(v: f64) -> Self {
        Jet::constant(T::cst(v))
    }

    fn value(&self) -> f64 {
        self.val.value()
    }

    fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e)
    }

    fn exp_m1(self) -> Self {
        self.chain(self.val.exp_m1(), self.val.exp())
    }

    fn ln(self) -> Self {
        self.chain(self.val.ln(), self.val.recip())
    }

    fn ln_1p(self) -> Self {
        self.chain(self.val.ln_1p(), (self.val + 1.0).recip())
    }

    fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        self.chain(s, (s * 2.0).recip())
    }

    fn sin(self) -> Self {
        self.chain(self.val.sin(), self.val.cos())
    }

    fn cos(self) -> Self {
        self.chain(self.val.cos(), -self.val.sin())
    }

    fn sinh(self) -> Self {
        self.chain(self.val.sinh(), self.val.cosh())
    }

    fn cosh(self) -> Self {
        self.chain(self.val.cosh(), self.val.sinh())
    }

    fn asin(self) -> Self {
        let d = (T::one() - self.val.sq()).sqrt().recip();
        self.chain(self.val.asin(), d)
    }

    fn asinh(self) -> Self {
        let d = (T::one() + self.val.sq()).sqrt().recip();
        self.chain(self.val.asinh(), d)
    }
}

/// Derivative of `f` at `x` by a single forward pass.
pub fn derivative<F>(f: F, x: f64) -> f64
where
    F: Fn(Jet) -> Jet,
{
    f(Jet::variable(x)).der
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::variable(3.0);
        let y = x * x / (x + 1.0);
        // d/dx x²/(x+1) = (x² + 2x)/(x+1)²
        assert!((y.der - 15.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn constants_have_no_derivative() {
        let c = Jet::<f64>::cst(2.5);
        let y = (c.sin() * c.exp()).sqrt().asinh();
        assert_eq!(y.der, 0.0);
    }

    #[test]
    fn nested_jets_give_second_derivatives() {
        // f(x) = exp(x) sin(x); f'' = 2 exp(x) cos(x)
        let x0 = 0.7;
        let x = Jet::variable(Jet::variable(x0));
        let y = x.exp() * x.sin();
        let second = y.der.der;
        assert!((second - 2.0 * x0.exp() * x0.cos()).abs() < 1e-14);
    }

    #[test]
    fn elementary_derivatives() {
        let x = 0.4;
        type Case = (fn(Jet) -> Jet, f64);
        let cases: [Case; 6] = [
            (|j| j.asin(), 1.0 / (1.0 - x * x).sqrt()),
            (|j| j.asinh(), 1.0 / (1.0 + x * x).sqrt()),
            (|j| j.ln_1p(), 1.0 / (1.0 + x)),
            (|j| j.exp_m1(), x.exp()),
            (|j| j.cosh(), x.sinh()),
            (|j| j.ln(), 1.0 / x),
        ];
        for (f, expected) in cases {
            assert!((derivative(f, x) - expected).abs() < 1e-14);
        }
    }
}
