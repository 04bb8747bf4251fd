//! The nine two-dimensional Cayley-Klein spaces.
//!
//! A space is named by `(kappa1, kappa2) = (j1², j2²)`. `kappa1` is the
//! curvature sign, `kappa2` the metric signature; `kappa2 = 0` is a
//! degenerate (fiber-bundle) metric.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The pair `(kappa1, kappa2)`, each exactly one of `{+1, 0, -1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct CKSignature {
    kappa1: i8,
    kappa2: i8,
}

fn component(v: i64) -> Result<i8> {
    match v {
        -1..=1 => Ok(v as i8),
        _ => Err(Error::InvalidSignature(v)),
    }
}

impl CKSignature {
    pub fn new(kappa1: i64, kappa2: i64) -> Result<Self> {
        Ok(CKSignature {
            kappa1: component(kappa1)?,
            kappa2: component(kappa2)?,
        })
    }

    pub const fn kappa1(&self) -> i8 {
        self.kappa1
    }

    pub const fn kappa2(&self) -> i8 {
        self.kappa2
    }

    pub fn k1(&self) -> f64 {
        f64::from(self.kappa1)
    }

    pub fn k2(&self) -> f64 {
        f64::from(self.kappa2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.kappa2 == 0
    }

    pub fn space(&self) -> Space {
        Space::ALL
            .into_iter()
            .find(|s| s.signature() == *self)
            .expect("every signature names a space")
    }

    /// All nine signatures in [`Space::ALL`] order.
    pub fn all() -> [CKSignature; 9] {
        Space::ALL.map(|s| s.signature())
    }
}

impl TryFrom<(i64, i64)> for CKSignature {
    type Error = Error;
    fn try_from((a, b): (i64, i64)) -> Result<Self> {
        CKSignature::new(a, b)
    }
}

impl From<CKSignature> for (i64, i64) {
    fn from(s: CKSignature) -> Self {
        (i64::from(s.kappa1), i64::from(s.kappa2))
    }
}

impl fmt::Display for CKSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.kappa1, self.kappa2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    Sphere,
    Hyperbolic,
    AntiDeSitter,
    DeSitter,
    Euclidean,
    Minkowski,
    NewtonPlus,
    NewtonMinus,
    Galilei,
}

impl Space {
    pub const ALL: [Space; 9] = [
        Space::Sphere,
        Space::Hyperbolic,
        Space::AntiDeSitter,
        Space::DeSitter,
        Space::Euclidean,
        Space::Minkowski,
        Space::NewtonPlus,
        Space::NewtonMinus,
        Space::Galilei,
    ];

    pub const fn signature(self) -> CKSignature {
        let (kappa1, kappa2) = match self {
            Space::Sphere => (1, 1),
            Space::Hyperbolic => (-1, 1),
            Space::AntiDeSitter => (1, -1),
            Space::DeSitter => (-1, -1),
            Space::Euclidean => (0, 1),
            Space::Minkowski => (0, -1),
            Space::NewtonPlus => (1, 0),
            Space::NewtonMinus => (-1, 0),
            Space::Galilei => (0, 0),
        };
        CKSignature { kappa1, kappa2 }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Space::Sphere => "sphere",
            Space::Hyperbolic => "hyperbolic",
            Space::AntiDeSitter => "anti-de-sitter",
            Space::DeSitter => "de-sitter",
            Space::Euclidean => "euclidean",
            Space::Minkowski => "minkowski",
            Space::NewtonPlus => "newton-plus",
            Space::NewtonMinus => "newton-minus",
            Space::Galilei => "galilei",
        }
    }

    /// Overall Hamiltonian sign preset: the Lorentzian spaces
    /// (`kappa2 = -1`) use `-H`.
    pub const fn default_sign(self) -> f64 {
        if self.signature().kappa2 == -1 {
            -1.0
        } else {
            1.0
        }
    }

    pub const fn is_degenerate(self) -> bool {
        self.signature().kappa2 == 0
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let space = match key.as_str() {
            "sphere" | "s2" => Space::Sphere,
            "hyperbolic" | "lobachevsky" | "h2" => Space::Hyperbolic,
            "anti-de-sitter" | "ads" => Space::AntiDeSitter,
            "de-sitter" | "ds" => Space::DeSitter,
            "euclidean" | "e2" => Space::Euclidean,
            "minkowski" | "m" => Space::Minkowski,
            "newton-plus" | "newton+" => Space::NewtonPlus,
            "newton-minus" | "newton-" => Space::NewtonMinus,
            "galilei" | "galilean" | "g" => Space::Galilei,
            _ => return Err(Error::InvalidInput(format!("unknown space '{s}'"))),
        };
        Ok(space)
    }
}

/// Contraction parameters as they enter a formula.
///
/// `k2` multiplies explicit `j2²` prefactors; `k2_inner` is the value
/// seen inside kernel arguments (`sinhc(k1·k2·z·q1²)`, `gsin(k2, θ)`).
/// They coincide except when extracting the base Hamiltonian, where
/// the prefactor is lifted to a jet while kernels keep their nilpotent
/// value `0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kappas<S> {
    pub k1: S,
    pub k2: S,
    pub k2_inner: S,
}

impl Kappas<f64> {
    pub fn of(sig: CKSignature) -> Self {
        Kappas::continuous(sig.k1(), sig.k2())
    }

    /// Arbitrary real `(kappa1, kappa2)`, for continuity studies.
    pub fn continuous(k1: f64, k2: f64) -> Self {
        Kappas {
            k1,
            k2,
            k2_inner: k2,
        }
    }

    pub fn lift<S: Scalar>(&self) -> Kappas<S> {
        Kappas {
            k1: S::cst(self.k1),
            k2: S::cst(self.k2),
            k2_inner: S::cst(self.k2_inner),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn nine_distinct_signatures() {
        let set: HashSet<_> = CKSignature::all().into_iter().collect();
        assert_eq!(set.len(), 9);
        for sig in CKSignature::all() {
            assert_eq!(sig.space().signature(), sig);
        }
    }

    #[test]
    fn rejects_out_of_range_components() {
        assert_eq!(CKSignature::new(2, 0), Err(Error::InvalidSignature(2)));
        assert!(CKSignature::new(0, -3).is_err());
    }

    #[test]
    fn presets() {
        assert_eq!(Space::Galilei.signature(), CKSignature::new(0, 0).unwrap());
        assert!(Space::Galilei.is_degenerate());
        assert_eq!(Space::Minkowski.default_sign(), -1.0);
        assert_eq!(Space::Sphere.default_sign(), 1.0);
        assert_eq!("AdS".parse::<Space>().unwrap(), Space::AntiDeSitter);
        for s in Space::ALL {
            assert_eq!(s.name().parse::<Space>().unwrap(), s);
        }
    }

    #[test]
    fn serde_round_trip() {
        let sig = CKSignature::new(-1, 0).unwrap();
        let text = serde_json::to_string(&sig).unwrap();
        assert_eq!(text, "[-1,0]");
        let back: CKSignature = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sig);
        assert!(serde_json::from_str::<CKSignature>("[5,0]").is_err());
    }
}
