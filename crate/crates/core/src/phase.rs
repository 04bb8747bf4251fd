//! Canonical phase space `(q1, q2, p1, p2)` and the exact-derivative
//! bracket engine.
//!
//! A [`PhaseFunction`] is evaluated generically, so lifting one coordinate
//! to a [`Jet`] yields its partial derivative without truncation error.

use crate::error::Result;
use crate::scalar::{Jet, Scalar};

/// Index layout of a phase point: two coordinates then two momenta.
pub const Q1: usize = 0;
pub const Q2: usize = 1;
pub const P1: usize = 2;
pub const P2: usize = 3;

/// A function on the four-dimensional canonical phase space.
pub trait PhaseFunction {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S>;
}

impl<F: PhaseFunction + ?Sized> PhaseFunction for &F {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        (**self).eval(x)
    }
}

/// Projection onto one canonical coordinate.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl PhaseFunction for Coordinate {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        Ok(x[self.0])
    }
}

/// Pointwise product of two phase functions.
#[derive(Clone, Copy, Debug)]
pub struct Product<F, G>(pub F, pub G);

impl<F: PhaseFunction, G: PhaseFunction> PhaseFunction for Product<F, G> {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        Ok(self.0.eval(x)? * self.1.eval(x)?)
    }
}

/// Gradient by one forward jet pass per coordinate.
pub fn gradient<S: Scalar, F: PhaseFunction>(f: &F, x: &[S; 4]) -> Result<[S; 4]> {
    let mut grad = [S::zero(); 4];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut lifted = x.map(Jet::constant);
        lifted[i] = Jet::variable(x[i]);
        *g = f.eval(&lifted)?.der;
    }
    Ok(grad)
}

/// Value and gradient together.
pub fn value_and_gradient<S: Scalar, F: PhaseFunction>(f: &F, x: &[S; 4]) -> Result<(S, [S; 4])> {
    let value = f.eval(x)?;
    Ok((value, gradient(f, x)?))
}

/// `{f, g} = Σ ∂f/∂qᵢ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qᵢ`.
pub fn poisson_bracket<S: Scalar, F: PhaseFunction, G: PhaseFunction>(
    f: &F,
    g: &G,
    x: &[S; 4],
) -> Result<S> {
    let df = gradient(f, x)?;
    let dg = gradient(g, x)?;
    Ok(df[Q1] * dg[P1] - df[P1] * dg[Q1] + df[Q2] * dg[P2] - df[P2] * dg[Q2])
}

/// Hamilton's equations `q̇ = ∂H/∂p`, `ṗ = −∂H/∂q`.
pub fn hamiltonian_vector_field<S: Scalar, H: PhaseFunction>(h: &H, x: &[S; 4]) -> Result<[S; 4]> {
    let d = gradient(h, x)?;
    Ok([d[P1], d[P2], -d[Q1], -d[Q2]])
}

/// Central-difference gradient; test oracle for the jet engine.
pub fn finite_difference_gradient<F: PhaseFunction>(f: &F, x: &[f64; 4], step: f64) -> Result<[f64; 4]> {
    let mut grad = [0.0; 4];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut plus = *x;
        let mut minus = *x;
        plus[i] += step;
        minus[i] -= step;
        *g = (f.eval(&plus)? - f.eval(&minus)?) / (2.0 * step);
    }
    Ok(grad)
}
