//! Beltrami and polar charts, the metric, and Gaussian curvature.
//!
//! Beltrami position `(x, y) = (√2 q2, √2 q1)`. The radial relation is
//! `C1(r) = exp(−½κ1 ρ²)` with `ρ² = x² + κ2 y²`; the angular one fixes
//! `S2(θ)` from the ratio of the two exponential forms. Every map is
//! written through `expm1c`/`log1mc`, so the contracted spaces are plain
//! evaluations.
//!
//! For `κ2 ≤ 0` the chart covers the wedge `x > 0` (with `ρ² > 0`); for
//! `κ2 = 1` the full punctured plane, with `θ ∈ (−π, π]`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::coalgebra::BeltramiState;
use crate::error::{Error, Result};
use crate::kernels::{expm1c, gasin, gcos, gsin, log1mc, KERNEL_GUARD};
use crate::scalar::{Jet, Scalar};
use crate::signature::CKSignature;

/// Polar phase point `(r, θ, p_r, p_θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub r: f64,
    pub theta: f64,
    pub pr: f64,
    pub ptheta: f64,
}

impl PolarState {
    pub fn new(r: f64, theta: f64, pr: f64, ptheta: f64) -> Self {
        PolarState { r, theta, pr, ptheta }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.r, self.theta, self.pr, self.ptheta]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        PolarState::new(x[0], x[1], x[2], x[3])
    }
}

/// Diagonal metric components at radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricAt {
    pub g_rr: f64,
    pub g_thth: f64,
    /// Angular part with the `κ2` factor stripped.
    pub fiber_g_thth: f64,
}

// expm1c(−w), the profile (1 − e^{−w})/w.
fn decay<S: Scalar>(w: S) -> S {
    expm1c(-w)
}

/// `(x, y) ↦ (r, θ)` on any scalar.
pub fn to_polar_with<S: Scalar>(x: S, y: S, k1: f64, k2: f64) -> Result<(S, S)> {
    if x.value() == 0.0 && y.value() == 0.0 {
        return Ok((S::zero(), S::zero()));
    }
    let rho2 = x * x + y * y * k2;
    if rho2.value() <= 0.0 {
        return Err(Error::ChartDomain(format!(
            "x² + κ2·y² = {} is not positive at (x, y) = ({}, {})",
            rho2.value(),
            x.value(),
            y.value()
        )));
    }
    if k2 <= 0.0 && x.value() <= 0.0 {
        return Err(Error::ChartDomain(format!(
            "the κ2 = {k2} chart needs x > 0, got x = {}",
            x.value()
        )));
    }
    let k1s = S::cst(k1);
    let half_chord = (rho2 * decay(rho2 * (k1 * 0.5)) * 0.25).sqrt();
    let r = gasin(k1s, half_chord)? * 2.0;

    let s2 = y * (decay(y * y * (k1 * k2)) / (rho2 * decay(rho2 * k1))).sqrt();
    let mut theta = gasin(S::cst(k2), s2)?;
    if k2 > 0.0 && x.value() < 0.0 {
        theta = if y.value() >= 0.0 {
            -theta + PI
        } else {
            -theta - PI
        };
    }
    Ok((r, theta))
}

/// `(r, θ) ↦ (x, y)` on any scalar.
pub fn from_polar_with<S: Scalar>(r: S, theta: S, k1: f64, k2: f64) -> Result<(S, S)> {
    if r.value() < 0.0 {
        return Err(Error::ChartDomain(format!("negative radius {}", r.value())));
    }
    if k1 > 0.0 && r.value() >= PI {
        return Err(Error::ChartDomain(format!("radius {} outside (0, π)", r.value())));
    }
    if r.value() == 0.0 {
        return Ok((S::zero(), S::zero()));
    }
    let k1s = S::cst(k1);
    let half = gsin(k1s, r * 0.5);
    let a = half * half * 2.0;
    let rho2 = a * log1mc(a * k1)? * 2.0;
    let s2 = gsin(S::cst(k2), theta);
    let c2 = gcos(S::cst(k2), theta);
    let profile = rho2 * decay(rho2 * k1);
    let b = s2 * s2 * profile;
    let y = s2 * (profile * log1mc(b * (k1 * k2))?).sqrt();
    let x2 = rho2 - y * y * k2;
    if x2.value() < 0.0 {
        return Err(Error::ChartDomain(format!("no real x for (r, θ) = ({}, {})", r.value(), theta.value())));
    }
    let mut x = x2.sqrt();
    if k2 > 0.0 && c2.value() < 0.0 {
        x = -x;
    }
    Ok((x, y))
}

pub fn beltrami_to_polar(x: f64, y: f64, sig: CKSignature) -> Result<(f64, f64)> {
    to_polar_with(x, y, sig.k1(), sig.k2())
}

pub fn polar_to_beltrami(r: f64, theta: f64, sig: CKSignature) -> Result<(f64, f64)> {
    from_polar_with(r, theta, sig.k1(), sig.k2())
}

fn jacobian<F>(map: F, u: f64, v: f64) -> Result<[[f64; 2]; 2]>
where
    F: Fn(Jet, Jet) -> Result<(Jet, Jet)>,
{
    let (a_u, b_u) = map(Jet::variable(u), Jet::constant(v))?;
    let (a_v, b_v) = map(Jet::constant(u), Jet::variable(v))?;
    Ok([[a_u.der, a_v.der], [b_u.der, b_v.der]])
}

fn singular_check(j: &[[f64; 2]; 2], at: &str) -> Result<()> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !det.is_finite() || det.abs() < KERNEL_GUARD {
        return Err(Error::JacobianSingular(format!("det = {det:e} at {at}")));
    }
    Ok(())
}

/// Cotangent lift to the polar chart: `p_r = ∂x/∂r p_x + ∂y/∂r p_y`,
/// `p_θ = ∂x/∂θ p_x + ∂y/∂θ p_y`.
pub fn momenta_to_polar(r: f64, theta: f64, px: f64, py: f64, sig: CKSignature) -> Result<(f64, f64)> {
    let (k1, k2) = (sig.k1(), sig.k2());
    let j = jacobian(|a, b| from_polar_with(a, b, k1, k2), r, theta)?;
    singular_check(&j, &format!("(r, θ) = ({r}, {theta})"))?;
    Ok((j[0][0] * px + j[1][0] * py, j[0][1] * px + j[1][1] * py))
}

/// Cotangent lift to the Beltrami chart: `p_x = ∂r/∂x p_r + ∂θ/∂x p_θ`,
/// `p_y = ∂r/∂y p_r + ∂θ/∂y p_θ`.
pub fn momenta_to_beltrami(x: f64, y: f64, pr: f64, ptheta: f64, sig: CKSignature) -> Result<(f64, f64)> {
    let (k1, k2) = (sig.k1(), sig.k2());
    let j = jacobian(|a, b| to_polar_with(a, b, k1, k2), x, y)?;
    singular_check(&j, &format!("(x, y) = ({x}, {y})"))?;
    Ok((j[0][0] * pr + j[1][0] * ptheta, j[0][1] * pr + j[1][1] * ptheta))
}

/// Full phase-space map from Beltrami to polar variables.
pub fn beltrami_state_to_polar(s: &BeltramiState, sig: CKSignature) -> Result<PolarState> {
    let (x, y) = (SQRT_2 * s.q2, SQRT_2 * s.q1);
    let (px, py) = (s.p2 / SQRT_2, s.p1 / SQRT_2);
    let (r, theta) = beltrami_to_polar(x, y, sig)?;
    let (pr, ptheta) = momenta_to_polar(r, theta, px, py, sig)?;
    Ok(PolarState::new(r, theta, pr, ptheta))
}

pub fn polar_state_to_beltrami(s: &PolarState, sig: CKSignature) -> Result<BeltramiState> {
    let (x, y) = polar_to_beltrami(s.r, s.theta, sig)?;
    let (px, py) = momenta_to_beltrami(x, y, s.pr, s.ptheta, sig)?;
    Ok(BeltramiState::new(y / SQRT_2, x / SQRT_2, SQRT_2 * py, SQRT_2 * px))
}

/// `g_rr = 1/C1`, `g_θθ = κ2·S1²/C1`.
pub fn metric_at(r: f64, sig: CKSignature) -> Result<MetricAt> {
    let c1 = gcos(sig.k1(), r);
    if c1 <= KERNEL_GUARD {
        return Err(Error::ChartDomain(format!("C1(r) = {c1} is not positive at r = {r}")));
    }
    let s1 = gsin(sig.k1(), r);
    let fiber = s1 * s1 / c1;
    Ok(MetricAt {
        g_rr: 1.0 / c1,
        g_thth: sig.k2() * fiber,
        fiber_g_thth: fiber,
    })
}

/// Step of the central differences in [`gaussian_curvature`].
pub const CURVATURE_STEP: f64 = 1e-4;

fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Gaussian curvature of `E dr² + G dθ²`,
/// `K = −1/(2√(EG)) d/dr(G'/√(EG))`, from central differences of
/// [`metric_at`]. The `κ2` factor cancels, so `G` is the fiber part.
pub fn gaussian_curvature(r: f64, sig: CKSignature) -> Result<f64> {
    if sig.is_degenerate() {
        return Err(Error::DegenerateMetric);
    }
    let h = CURVATURE_STEP;
    if r <= h || gsin(sig.k1(), r).abs() < KERNEL_GUARD {
        return Err(Error::ChartDomain(format!("curvature needs r > {h}, got {r}")));
    }
    metric_at(r + h, sig)?;
    let e = |t: f64| 1.0 / gcos(sig.k1(), t);
    let g = |t: f64| {
        let s = gsin(sig.k1(), t);
        s * s / gcos(sig.k1(), t)
    };
    let d1 = |f: &dyn Fn(f64) -> f64| richardson(|h| (f(r + h) - f(r - h)) / (2.0 * h), h);
    let d2 = |f: &dyn Fn(f64) -> f64| richardson(|h| (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h), h);

    let (ev, gv) = (e(r), g(r));
    let (de, dg, ddg) = (d1(&e), d1(&g), d2(&g));
    let w = ev * gv;
    let dw = de * gv + ev * dg;
    // d/dr(G'/√w) = G''/√w − G'·w'/(2 w^{3/2})
    let inner = ddg / w.sqrt() - dg * dw / (2.0 * w * w.sqrt());
    Ok(-inner / (2.0 * w.sqrt()))
}
