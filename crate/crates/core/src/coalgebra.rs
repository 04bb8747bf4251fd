//! Two-particle symplectic realization of `sl_z(2; j)`.
//!
//! Generators `J-`, `J3`, `J+` on the Beltrami phase space, their bracket
//! relations, and the Casimir computed two ways: from the generators and
//! directly as a function of the canonical variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{shz, sinhc};
use crate::phase::{gradient, PhaseFunction, P1, P2, Q1, Q2};
use crate::scalar::Scalar;
use crate::signature::{CKSignature, Kappas};

/// `|qᵢ|` below this with `bᵢ ≠ 0` is treated as hitting the barrier wall.
pub const BARRIER_GUARD: f64 = 1e-10;

/// Beltrami phase point `(q1, q2, p1, p2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeltramiState {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl BeltramiState {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        BeltramiState { q1, q2, p1, p2 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q1, self.q2, self.p1, self.p2]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        BeltramiState::new(x[Q1], x[Q2], x[P1], x[P2])
    }
}

/// Model constants. None of them is rescaled by the contraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Deformation parameter.
    pub z: f64,
    pub b1: f64,
    pub b2: f64,
    /// Smorodinsky-Winternitz oscillator constant.
    pub beta0: f64,
    /// Kepler-Coulomb coupling in Beltrami coordinates.
    pub gamma: f64,
    /// Kepler-Coulomb coupling in polar coordinates.
    pub k: f64,
    /// Overall Hamiltonian sign, `+1` or `-1`.
    pub sign: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            z: 0.0,
            b1: 0.0,
            b2: 0.0,
            beta0: 0.0,
            gamma: 0.0,
            k: 0.0,
            sign: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("z", self.z),
            ("b1", self.b1),
            ("b2", self.b2),
            ("beta0", self.beta0),
            ("gamma", self.gamma),
            ("k", self.k),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::InvalidParams(format!(
                "sign must be +1 or -1, got {}",
                self.sign
            )));
        }
        Ok(())
    }
}

/// Values of `(J-, J3, J+)` at a phase point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generators<S = f64> {
    pub jminus: S,
    pub j3: S,
    pub jplus: S,
}

pub(crate) fn check_barriers<S: Scalar>(x: &[S; 4], m: &ModelParams) -> Result<()> {
    for (index, b, q) in [(1, m.b1, x[Q1]), (2, m.b2, x[Q2])] {
        if b != 0.0 && q.value().abs() < BARRIER_GUARD {
            return Err(Error::BarrierSingularity {
                index,
                value: q.value(),
            });
        }
    }
    Ok(())
}

/// Generators on an arbitrary scalar with explicit contraction values.
pub fn generators_with<S: Scalar>(
    x: &[S; 4],
    m: &ModelParams,
    kap: &Kappas<S>,
) -> Result<Generators<S>> {
    check_barriers(x, m)?;
    let [q1, q2, p1, p2] = *x;
    let (q1s, q2s) = (q1 * q1, q2 * q2);
    // a = k1 k2 z q1², c = k1 z q2²
    let a = kap.k1 * kap.k2_inner * q1s * m.z;
    let c = kap.k1 * q2s * m.z;
    let (sa, sc) = (sinhc(a), sinhc(c));
    let (ec, ema) = (c.exp(), (-a).exp());

    let jminus = q2s + kap.k2 * q1s;
    let j3 = sa * q1 * p1 * ec + sc * q2 * p2 * ema;

    let first = if m.b1 != 0.0 {
        sa * p1 * p1 + S::cst(m.b1) / (q1s * sa)
    } else {
        sa * p1 * p1
    };
    let second = if m.b2 != 0.0 {
        sc * p2 * p2 + S::cst(m.b2) / (q2s * sc)
    } else {
        sc * p2 * p2
    };
    let jplus = first * ec + kap.k2 * second * ema;

    Ok(Generators { jminus, j3, jplus })
}

pub fn generators(s: &BeltramiState, m: &ModelParams, sig: CKSignature) -> Result<Generators> {
    generators_with(&s.to_array(), m, &Kappas::of(sig))
}

/// Casimir of the abstract coalgebra evaluated on generator values.
pub fn casimir_coalgebra_with<S: Scalar>(gen: &Generators<S>, m: &ModelParams, kap: &Kappas<S>) -> S {
    shz(kap.k1 * m.z, gen.jminus) * gen.jplus - kap.k2 * gen.j3 * gen.j3
}

pub fn casimir_coalgebra(gen: &Generators, m: &ModelParams, sig: CKSignature) -> f64 {
    casimir_coalgebra_with(gen, m, &Kappas::of(sig))
}

/// Two-particle Casimir written directly in the canonical variables.
///
/// The `sinh/sinh` ratio terms are carried as `q²·sinhc/(q²·sinhc)` so the
/// contraction limits are plain evaluations.
pub fn casimir_two_particle_with<S: Scalar>(x: &[S; 4], m: &ModelParams, kap: &Kappas<S>) -> Result<S> {
    check_barriers(x, m)?;
    let [q1, q2, p1, p2] = *x;
    let (q1s, q2s) = (q1 * q1, q2 * q2);
    let a = kap.k1 * kap.k2_inner * q1s * m.z;
    let c = kap.k1 * q2s * m.z;
    let (sa, sc) = (sinhc(a), sinhc(c));
    let mixed = (c - a).exp();

    let angular = kap.k2 * q1 * p2 - q2 * p1;
    let kinetic = sa * sc * angular * angular * mixed;
    let barriers = kap.k2 * ((c * 2.0).exp() * m.b1 + (a * -2.0).exp() * m.b2);

    let mut ratio = S::zero();
    if m.b1 != 0.0 {
        ratio = ratio + q2s * sc * m.b1 / (q1s * sa);
    }
    if m.b2 != 0.0 {
        ratio = ratio + kap.k2 * kap.k2 * q1s * sa * m.b2 / (q2s * sc);
    }
    Ok(kinetic + barriers + ratio * mixed)
}

pub fn casimir_two_particle(s: &BeltramiState, m: &ModelParams, sig: CKSignature) -> Result<f64> {
    casimir_two_particle_with(&s.to_array(), m, &Kappas::of(sig))
}

/// Selects one generator as a phase function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Minus,
    Three,
    Plus,
}

/// A generator component as a [`PhaseFunction`] on Beltrami phase space.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorFn {
    pub which: Generator,
    pub params: ModelParams,
    pub kappas: Kappas<f64>,
}

impl GeneratorFn {
    pub fn new(which: Generator, params: ModelParams, sig: CKSignature) -> Self {
        GeneratorFn {
            which,
            params,
            kappas: Kappas::of(sig),
        }
    }
}

impl PhaseFunction for GeneratorFn {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        let g = generators_with(x, &self.params, &self.kappas.lift())?;
        Ok(match self.which {
            Generator::Minus => g.jminus,
            Generator::Three => g.j3,
            Generator::Plus => g.jplus,
        })
    }
}

/// The two-particle Casimir as a [`PhaseFunction`].
#[derive(Clone, Copy, Debug)]
pub struct TwoParticleCasimir {
    pub params: ModelParams,
    pub kappas: Kappas<f64>,
}

impl TwoParticleCasimir {
    pub fn new(params: ModelParams, sig: CKSignature) -> Self {
        TwoParticleCasimir {
            params,
            kappas: Kappas::of(sig),
        }
    }
}

impl PhaseFunction for TwoParticleCasimir {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        casimir_two_particle_with(x, &self.params, &self.kappas.lift())
    }
}

/// Residuals of the three bracket relations:
/// `{J-,J+} − 4κ2 J3`, `{J3,J+} − 2J+ cosh(κ1 z J-)`, `{J3,J-} + 2 shz(κ1 z, J-)`.
pub fn bracket_residuals(s: &BeltramiState, m: &ModelParams, sig: CKSignature) -> Result<[f64; 3]> {
    bracket_residuals_in::<f64>(s, m, sig)
}

/// Residuals of every coalgebra identity at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// The three bracket relations, as in [`bracket_residuals`].
    pub brackets: [f64; 3],
    /// `{C, J-}`, `{C, J3}`, `{C, J+}` for the two-particle Casimir.
    pub commutators: [f64; 3],
    /// Direct Casimir minus the Casimir evaluated on the generators.
    pub dual_path: f64,
}

fn bracket_of<S: Scalar>(df: &[S; 4], dg: &[S; 4]) -> S {
    df[Q1] * dg[P1] - df[P1] * dg[Q1] + df[Q2] * dg[P2] - df[P2] * dg[Q2]
}

/// All identity residuals, evaluated in the arithmetic of `S`.
pub fn identity_residuals_in<S: Scalar>(
    s: &BeltramiState,
    m: &ModelParams,
    sig: CKSignature,
) -> Result<IdentityResiduals> {
    let x = s.to_array().map(S::cst);
    let kap = Kappas::of(sig).lift::<S>();
    let g = generators_with(&x, m, &kap)?;
    let dm = gradient(&GeneratorFn::new(Generator::Minus, *m, sig), &x)?;
    let d3 = gradient(&GeneratorFn::new(Generator::Three, *m, sig), &x)?;
    let dp = gradient(&GeneratorFn::new(Generator::Plus, *m, sig), &x)?;
    let dc = gradient(&TwoParticleCasimir::new(*m, sig), &x)?;

    let w = kap.k1 * g.jminus * m.z;
    let r1 = bracket_of(&dm, &dp) - kap.k2 * g.j3 * 4.0;
    let r2 = bracket_of(&d3, &dp) - g.jplus * w.cosh() * 2.0;
    let r3 = bracket_of(&d3, &dm) + shz(kap.k1 * m.z, g.jminus) * 2.0;

    let direct = casimir_two_particle_with(&x, m, &kap)?;
    let dual = direct - casimir_coalgebra_with(&g, m, &kap);
    Ok(IdentityResiduals {
        brackets: [r1.value(), r2.value(), r3.value()],
        commutators: [
            bracket_of(&dc, &dm).value(),
            bracket_of(&dc, &d3).value(),
            bracket_of(&dc, &dp).value(),
        ],
        dual_path: dual.value(),
    })
}

/// [`bracket_residuals`] evaluated in the arithmetic of `S`.
pub fn bracket_residuals_in<S: Scalar>(s: &BeltramiState, m: &ModelParams, sig: CKSignature) -> Result<[f64; 3]> {
    Ok(identity_residuals_in::<S>(s, m, sig)?.brackets)
}
