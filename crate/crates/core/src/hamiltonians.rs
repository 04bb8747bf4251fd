//! Hamiltonian catalog: free, Smorodinsky-Winternitz and Kepler-Coulomb
//! systems in Beltrami and polar coordinates, and the base/fiber split
//! on degenerate-metric spaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coalgebra::{generators_with, ModelParams};
use crate::error::{Error, Result};
use crate::kernels::{expm1c, gcos, gsin, gtan, shz, KERNEL_GUARD};
use crate::phase::PhaseFunction;
use crate::scalar::{Jet, Scalar};
use crate::signature::{CKSignature, Kappas};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Free,
    /// Smorodinsky-Winternitz.
    SW,
    /// Kepler-Coulomb.
    KC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Integrable,
    Superintegrable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    Beltrami,
    Polar,
}

macro_rules! name_enum {
    ($ty:ty, $($variant:path => $name:literal $(| $alias:literal)*),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name $(| $alias)* => Ok($variant),)+
                    other => Err(Error::InvalidInput(format!(
                        "unknown {} '{}'", stringify!($ty).to_ascii_lowercase(), other
                    ))),
                }
            }
        }
    };
}

name_enum!(Family, Family::Free => "free", Family::SW => "sw" | "smorodinsky-winternitz", Family::KC => "kc" | "kepler-coulomb");
name_enum!(Variant, Variant::Integrable => "integrable" | "i", Variant::Superintegrable => "superintegrable" | "s" | "super");
name_enum!(Coords, Coords::Beltrami => "beltrami", Coords::Polar => "polar");

/// A fully specified Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub family: Family,
    pub variant: Variant,
    pub coords: Coords,
    pub params: ModelParams,
    pub sig: CKSignature,
}

impl HamiltonianSpec {
    pub fn new(
        family: Family,
        variant: Variant,
        coords: Coords,
        params: ModelParams,
        sig: CKSignature,
    ) -> Result<Self> {
        params.validate()?;
        Ok(HamiltonianSpec {
            family,
            variant,
            coords,
            params,
            sig,
        })
    }

    /// Evaluates with explicit contraction values. `x` is `(q1, q2, p1, p2)`
    /// or `(r, θ, p_r, p_θ)` depending on `coords`.
    pub fn eval_with<S: Scalar>(&self, x: &[S; 4], kap: &Kappas<S>) -> Result<S> {
        let h = match self.coords {
            Coords::Beltrami => beltrami_hamiltonian(x, &self.params, kap, self.family, self.variant)?,
            Coords::Polar => polar_hamiltonian(x, &self.params, kap, self.family, self.variant)?,
        };
        Ok(h * self.params.sign)
    }

    /// The constant of motion paired with this Hamiltonian.
    pub fn casimir(&self) -> Casimir {
        Casimir {
            coords: self.coords,
            params: self.params,
            kappas: Kappas::of(self.sig),
        }
    }
}

impl PhaseFunction for HamiltonianSpec {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        self.eval_with(x, &Kappas::of(self.sig).lift())
    }
}

/// The two-particle Casimir (Beltrami) or the angular Casimir (polar).
#[derive(Clone, Copy, Debug)]
pub struct Casimir {
    pub coords: Coords,
    pub params: ModelParams,
    pub kappas: Kappas<f64>,
}

impl PhaseFunction for Casimir {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        let kap = self.kappas.lift();
        match self.coords {
            Coords::Beltrami => crate::coalgebra::casimir_two_particle_with(x, &self.params, &kap),
            Coords::Polar => casimir_polar_with(x, &self.params, &kap),
        }
    }
}

fn beltrami_hamiltonian<S: Scalar>(
    x: &[S; 4],
    m: &ModelParams,
    kap: &Kappas<S>,
    family: Family,
    variant: Variant,
) -> Result<S> {
    let g = generators_with(x, m, kap)?;
    let kinetic = g.jplus * 0.5;
    let potential = match family {
        Family::Free => S::zero(),
        Family::SW => kap.k2 * shz(kap.k1 * m.z, g.jminus) * m.beta0,
        Family::KC => -kap.k2 * kc_beltrami_factor(g.jminus, kap.k1 * m.z)? * m.gamma,
    };
    let h = kinetic + potential;
    Ok(match variant {
        Variant::Integrable => h,
        Variant::Superintegrable => h * (kap.k1 * g.jminus * m.z).exp(),
    })
}

/// `sqrt(2w/(e^{2wJ} − 1))·e^{2wJ}` written as `e^{u}/sqrt(J·expm1c(u))`,
/// `u = 2wJ`, so `w = 0` gives `1/sqrt(J)`.
fn kc_beltrami_factor<S: Scalar>(jminus: S, w: S) -> Result<S> {
    let u = w * jminus * 2.0;
    let radicand = jminus * expm1c(u);
    if radicand.value() <= 0.0 {
        return Err(Error::Domain(format!(
            "Kepler-Coulomb radicand {} is not positive (J- = {})",
            radicand.value(),
            jminus.value()
        )));
    }
    Ok(u.exp() / radicand.sqrt())
}

fn guard(v: f64, what: &str, at: f64) -> Result<()> {
    if v.abs() < KERNEL_GUARD {
        Err(Error::Domain(format!("{what} vanishes (|{what}| = {:e}) at {at}", v.abs())))
    } else {
        Ok(())
    }
}

/// Angular Casimir `p_θ² + 4b1/S2(θ)² + 4κ2 b2/C2(θ)²`.
pub fn casimir_polar_with<S: Scalar>(x: &[S; 4], m: &ModelParams, kap: &Kappas<S>) -> Result<S> {
    let theta = x[1];
    let ptheta = x[3];
    let mut c = ptheta * ptheta;
    if m.b1 != 0.0 {
        let s2 = gsin(kap.k2_inner, theta);
        guard(s2.value(), "S2(theta)", theta.value())?;
        c = c + S::cst(4.0 * m.b1) / (s2 * s2);
    }
    if m.b2 != 0.0 {
        let c2 = gcos(kap.k2_inner, theta);
        guard(c2.value(), "C2(theta)", theta.value())?;
        c = c + kap.k2 * m.b2 * 4.0 / (c2 * c2);
    }
    Ok(c)
}

pub fn casimir_polar(s: &crate::geometry::PolarState, m: &ModelParams, sig: CKSignature) -> Result<f64> {
    casimir_polar_with(&s.to_array(), m, &Kappas::of(sig))
}

/// Radial potential `g(r)` of the integrable polar form.
fn polar_potential<S: Scalar>(r: S, m: &ModelParams, k1: S, family: Family) -> Result<S> {
    Ok(match family {
        Family::Free => S::zero(),
        Family::SW => {
            let t1 = gtan(k1, r)?;
            gcos(k1, r) * t1 * t1 * m.beta0
        }
        Family::KC => {
            let t1 = gtan(k1, r)?;
            -gcos(k1, r) / t1 * m.k
        }
    })
}

fn polar_hamiltonian<S: Scalar>(
    x: &[S; 4],
    m: &ModelParams,
    kap: &Kappas<S>,
    family: Family,
    variant: Variant,
) -> Result<S> {
    let [r, _theta, pr, _ptheta] = *x;
    let s1 = gsin(kap.k1, r);
    let c1 = gcos(kap.k1, r);
    guard(s1.value(), "S1(r)", r.value())?;
    let cas = casimir_polar_with(x, m, kap)?;
    let g = polar_potential(r, m, kap.k1, family)?;
    let integrable = kap.k2 * c1 * pr * pr * 0.5 + c1 / (s1 * s1 * 2.0) * cas + kap.k2 * g;
    match variant {
        Variant::Integrable => Ok(integrable),
        Variant::Superintegrable => {
            guard(c1.value(), "C1(r)", r.value())?;
            Ok(integrable / c1)
        }
    }
}

/// Free Hamiltonian `½J+` or `½J+·e^{κ1 z J-}` in Beltrami coordinates.
pub fn h_free(
    s: &crate::coalgebra::BeltramiState,
    m: &ModelParams,
    sig: CKSignature,
    variant: Variant,
) -> Result<f64> {
    HamiltonianSpec::new(Family::Free, variant, Coords::Beltrami, *m, sig)?.eval(&s.to_array())
}

pub fn h_sw(
    s: &crate::coalgebra::BeltramiState,
    m: &ModelParams,
    sig: CKSignature,
    variant: Variant,
) -> Result<f64> {
    HamiltonianSpec::new(Family::SW, variant, Coords::Beltrami, *m, sig)?.eval(&s.to_array())
}

pub fn h_kc(
    s: &crate::coalgebra::BeltramiState,
    m: &ModelParams,
    sig: CKSignature,
    variant: Variant,
) -> Result<f64> {
    HamiltonianSpec::new(Family::KC, variant, Coords::Beltrami, *m, sig)?.eval(&s.to_array())
}

pub fn h_polar(
    s: &crate::geometry::PolarState,
    m: &ModelParams,
    sig: CKSignature,
    family: Family,
    variant: Variant,
) -> Result<f64> {
    HamiltonianSpec::new(family, variant, Coords::Polar, *m, sig)?.eval(&s.to_array())
}

/// Which half of a base/fiber split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitOrder {
    /// Order-0 part at `κ2 = 0`.
    Fiber,
    /// Coefficient of the `κ2` prefactor.
    Base,
}

/// One half of a split Hamiltonian, usable as a phase function.
#[derive(Clone, Copy, Debug)]
pub struct SplitPart {
    pub spec: HamiltonianSpec,
    pub order: SplitOrder,
}

impl PhaseFunction for SplitPart {
    fn eval<S: Scalar>(&self, x: &[S; 4]) -> Result<S> {
        let k1 = self.spec.sig.k1();
        match self.order {
            SplitOrder::Fiber => {
                let kap = Kappas::continuous(k1, 0.0).lift();
                self.spec.eval_with(x, &kap)
            }
            SplitOrder::Base => {
                let lifted = x.map(Jet::constant);
                let kap = Kappas {
                    k1: Jet::cst(k1),
                    k2: Jet::variable(S::zero()),
                    k2_inner: Jet::cst(0.0),
                };
                Ok(self.spec.eval_with(&lifted, &kap)?.der)
            }
        }
    }
}

/// Fiber and base Hamiltonians of a degenerate-metric system.
///
/// The full Hamiltonian is evaluated with the `κ2` prefactor lifted to the
/// jet `0 + 1·η`: the order-0 part is the fiber Hamiltonian, the
/// `η`-coefficient the base Hamiltonian. Kernel arguments keep the
/// nilpotent value `κ2 = 0`.
#[derive(Clone, Copy, Debug)]
pub struct BaseFiberSplit {
    pub spec: HamiltonianSpec,
}

impl BaseFiberSplit {
    pub fn fiber(&self) -> SplitPart {
        SplitPart {
            spec: self.spec,
            order: SplitOrder::Fiber,
        }
    }

    pub fn base(&self) -> SplitPart {
        SplitPart {
            spec: self.spec,
            order: SplitOrder::Base,
        }
    }

    /// `(fiber, base)` from a single jet pass.
    pub fn evaluate(&self, x: &[f64; 4]) -> Result<(f64, f64)> {
        let lifted = x.map(Jet::constant);
        let kap = Kappas {
            k1: Jet::cst(self.spec.sig.k1()),
            k2: Jet::variable(0.0),
            k2_inner: Jet::cst(0.0),
        };
        let h = self.spec.eval_with(&lifted, &kap)?;
        Ok((h.val, h.der))
    }
}

pub fn split_base_fiber(spec: &HamiltonianSpec) -> Result<BaseFiberSplit> {
    if spec.sig.kappa2() != 0 {
        return Err(Error::NotDegenerate(spec.sig.kappa2()));
    }
    Ok(BaseFiberSplit { spec: *spec })
}
