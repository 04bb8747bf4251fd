//! Signature-aware scalar kernels.
//!
//! Each kernel is the analytic family in `kappa = j²`, e.g.
//! `gsin(kappa, x) = sin(j x)/j = Σ (-kappa)ⁿ x^{2n+1}/(2n+1)!`.
//! Near `kappa·x² = 0` the truncated series is evaluated directly, so the
//! contraction point `kappa = 0` is an ordinary evaluation and jets in
//! `kappa` differentiate through it.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Below this `|kappa x²|` the trig kernels use their power series.
const TRIG_SERIES_SWITCH: f64 = 1e-2;
/// Below this `|u|` `sinhc` and `expm1c` use their power series.
const SINHC_SERIES_SWITCH: f64 = 1e-4;
/// Default guard for divisions by a kernel value.
pub const KERNEL_GUARD: f64 = 1e-12;

// (-1)^n / (2n+1)!
const SIN_SERIES: [f64; 8] = [
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362_880.0,
    -1.0 / 39_916_800.0,
    1.0 / 6_227_020_800.0,
    -1.0 / 1_307_674_368_000.0,
];

// (-1)^n / (2n)!
const COS_SERIES: [f64; 8] = [
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40_320.0,
    -1.0 / 3_628_800.0,
    1.0 / 479_001_600.0,
    -1.0 / 87_178_291_200.0,
];

// Taylor coefficients of asin(y)/y in y².
const ASIN_SERIES: [f64; 6] = [
    1.0,
    1.0 / 6.0,
    3.0 / 40.0,
    5.0 / 112.0,
    35.0 / 1152.0,
    63.0 / 2816.0,
];

fn horner<S: Scalar>(coeffs: &[f64], u: S) -> S {
    let mut acc = S::cst(coeffs[coeffs.len() - 1]);
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc * u + c;
    }
    acc
}

/// `S_kappa(x)`: `sin x`, `x`, `sinh x` for `kappa = +1, 0, -1`.
pub fn gsin<S: Scalar>(kappa: S, x: S) -> S {
    let u = kappa * x * x;
    let k = kappa.value();
    if u.value().abs() < TRIG_SERIES_SWITCH {
        x * horner(&SIN_SERIES, u)
    } else if k > 0.0 {
        let j = kappa.sqrt();
        (j * x).sin() / j
    } else {
        let j = (-kappa).sqrt();
        (j * x).sinh() / j
    }
}

/// `C_kappa(x)`: `cos x`, `1`, `cosh x` for `kappa = +1, 0, -1`.
pub fn gcos<S: Scalar>(kappa: S, x: S) -> S {
    let u = kappa * x * x;
    let k = kappa.value();
    if u.value().abs() < TRIG_SERIES_SWITCH {
        horner(&COS_SERIES, u)
    } else if k > 0.0 {
        (kappa.sqrt() * x).cos()
    } else {
        ((-kappa).sqrt() * x).cosh()
    }
}

/// `T_kappa(x) = S_kappa(x) / C_kappa(x)`.
pub fn gtan<S: Scalar>(kappa: S, x: S) -> Result<S> {
    let c = gcos(kappa, x);
    if c.value().abs() < KERNEL_GUARD {
        return Err(Error::Domain(format!(
            "gtan: |gcos(kappa, x)| = {:e} below guard at x = {}",
            c.value().abs(),
            x.value()
        )));
    }
    Ok(gsin(kappa, x) / c)
}

/// Inverse of `gsin` in its second argument on the principal branch.
pub fn gasin<S: Scalar>(kappa: S, s: S) -> Result<S> {
    let u = kappa * s * s;
    if u.value().abs() < 1e-3 {
        return Ok(s * horner(&ASIN_SERIES, u));
    }
    if kappa.value() > 0.0 {
        let j = kappa.sqrt();
        let y = j * s;
        if y.value().abs() > 1.0 {
            return Err(Error::ChartDomain(format!(
                "gasin: |sqrt(kappa) s| = {} exceeds 1",
                y.value().abs()
            )));
        }
        Ok(y.asin() / j)
    } else {
        let j = (-kappa).sqrt();
        Ok((j * s).asinh() / j)
    }
}

/// `sinh(u)/u` with the removable singularity at zero.
pub fn sinhc<S: Scalar>(u: S) -> S {
    if u.value().abs() < SINHC_SERIES_SWITCH {
        let u2 = u * u;
        (u2 * (1.0 / 120.0) + 1.0 / 6.0) * u2 + 1.0
    } else {
        u.sinh() / u
    }
}

/// `sinh(a x)/a`, equal to `x` at `a = 0`.
pub fn shz<S: Scalar>(a: S, x: S) -> S {
    x * sinhc(a * x)
}

/// `(eᵘ - 1)/u` with the removable singularity at zero.
pub fn expm1c<S: Scalar>(u: S) -> S {
    if u.value().abs() < SINHC_SERIES_SWITCH {
        (((u * (1.0 / 120.0) + 1.0 / 24.0) * u + 1.0 / 6.0) * u + 0.5) * u + 1.0
    } else {
        u.exp_m1() / u
    }
}

/// `-ln(1 - w)/w` with the removable singularity at zero; requires `w < 1`.
pub fn log1mc<S: Scalar>(w: S) -> Result<S> {
    if w.value() >= 1.0 {
        return Err(Error::ChartDomain(format!(
            "log1mc: argument {} is not below 1",
            w.value()
        )));
    }
    if w.value().abs() < SINHC_SERIES_SWITCH {
        Ok((((w * 0.2 + 0.25) * w + 1.0 / 3.0) * w + 0.5) * w + 1.0)
    } else {
        Ok(-(-w).ln_1p() / w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Jet;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    // Independent oracles: exponentials only.
    fn sinh_ref(x: f64) -> f64 {
        (x.exp() - (-x).exp()) / 2.0
    }
    fn cosh_ref(x: f64) -> f64 {
        (x.exp() + (-x).exp()) / 2.0
    }

    const KAPPAS: [f64; 3] = [1.0, 0.0, -1.0];

    #[test]
    fn gsin_examples() {
        assert_eq!(gsin(0.0, 2.5), 2.5);
        assert!((gsin(1.0, FRAC_PI_2) - 1.0).abs() < 1e-15);
        let s = gsin(-1.0, 1.0);
        assert!((s - sinh_ref(1.0)).abs() < 1e-15);
        assert!((s - 1.175_201_193_643_801_4).abs() < 1e-15);
    }

    #[test]
    fn gcos_and_gtan_examples() {
        assert_eq!(gcos(0.0, 7.3), 1.0);
        assert_eq!(gtan(0.0, 0.4).unwrap(), 0.4);
        assert!((gcos(-1.0, 1.0) - cosh_ref(1.0)).abs() < 1e-15);
        assert!((gcos(-1.0, 1.0) - 1.543_080_634_815_243_7).abs() < 1e-15);
        assert!((gtan(1.0, FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gtan_guard() {
        assert!(matches!(gtan(1.0, FRAC_PI_2), Err(Error::Domain(_))));
    }

    #[test]
    fn sinhc_examples() {
        assert_eq!(sinhc(0.0), 1.0);
        assert!((sinhc(1.0) - sinh_ref(1.0)).abs() < 1e-15);
        assert!((sinhc(1e-9_f64) - 1.0).abs() < 1e-17);
    }

    #[test]
    fn sinhc_branches_agree_at_switch() {
        let below = sinhc(SINHC_SERIES_SWITCH * (1.0 - 1e-12));
        let above = sinhc(SINHC_SERIES_SWITCH * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-15);
        assert!(below >= 1.0);
    }

    #[test]
    fn shz_examples() {
        assert_eq!(shz(0.0, 3.7), 3.7);
        assert!((shz(1.0, 1.0) - sinh_ref(1.0)).abs() < 1e-15);
        assert!((shz(-0.5, 2.0) - sinh_ref(-1.0) / -0.5).abs() < 1e-15);
        assert!((shz(-0.5, 2.0) - 2.350_402_387_287_602_8).abs() < 1e-14);
    }

    #[test]
    fn expm1c_and_log1mc_limits() {
        assert_eq!(expm1c(0.0), 1.0);
        assert!((expm1c(1.0) - (1.0f64.exp() - 1.0)).abs() < 1e-15);
        assert!((expm1c(-3e-5) - ((-3e-5f64).exp() - 1.0) / -3e-5).abs() < 1e-12);
        assert_eq!(log1mc(0.0).unwrap(), 1.0);
        assert!((log1mc(0.5).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-15);
        assert!(log1mc(1.0).is_err());
    }

    #[test]
    fn gasin_inverts_gsin() {
        for k in KAPPAS {
            for i in -20..=20 {
                let x = f64::from(i) * 0.07;
                let back = gasin(k, gsin(k, x)).unwrap();
                assert!((back - x).abs() < 1e-13, "k={k} x={x} back={back}");
            }
        }
        assert!(gasin(1.0, 1.5).is_err());
    }

    #[test]
    fn jet_chain_rule_matches_closed_form_derivatives() {
        for k in KAPPAS {
            for i in -30..=30 {
                let x = f64::from(i) * 0.1;
                let ds = gsin(Jet::cst(k), Jet::variable(x)).der;
                let dc = gcos(Jet::cst(k), Jet::variable(x)).der;
                assert!((ds - gcos(k, x)).abs() < 1e-12);
                assert!((dc + k * gsin(k, x)).abs() < 1e-12);
            }
        }
        for i in -30..=30 {
            let u = f64::from(i) * 0.1 + 0.05;
            let d = sinhc(Jet::variable(u)).der;
            let closed = (u * cosh_ref(u) - sinh_ref(u)) / (u * u);
            assert!((d - closed).abs() < 1e-12);
        }
        // derivative of sinhc at 0 vanishes, second derivative is 1/3
        assert_eq!(sinhc(Jet::variable(0.0)).der, 0.0);
        let second = sinhc(Jet::variable(Jet::variable(0.0))).der.der;
        assert!((second - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_jet_extracts_first_order_coefficient() {
        // d/dkappa gsin(kappa, x) at kappa = 0 is -x³/6
        let x = 1.3;
        let d = gsin(Jet::variable(0.0), Jet::cst(x)).der;
        assert!((d + x * x * x / 6.0).abs() < 1e-15);
        let d = gcos(Jet::variable(0.0), Jet::cst(x)).der;
        assert!((d + x * x / 2.0).abs() < 1e-15);
    }

    #[test]
    fn lifted_reals_have_zero_derivative() {
        let c = |v: f64| Jet::<f64>::cst(v);
        assert_eq!(gsin(c(-1.0), c(0.8)).der, 0.0);
        assert_eq!(shz(c(0.3), c(2.0)).der, 0.0);
        assert_eq!(expm1c(c(0.3)).der, 0.0);
    }

    proptest! {
        #[test]
        fn parity(x in -3.0f64..3.0, ki in 0usize..3) {
            let k = KAPPAS[ki];
            prop_assert_eq!(gsin(k, -x), -gsin(k, x));
            prop_assert_eq!(gcos(k, -x), gcos(k, x));
            prop_assert_eq!(sinhc(-x), sinhc(x));
        }

        #[test]
        fn pythagorean_identity(x in -3.0f64..3.0, ki in 0usize..3) {
            let k = KAPPAS[ki];
            let r = gcos(k, x).powi(2) + k * gsin(k, x).powi(2) - 1.0;
            prop_assert!(r.abs() < 1e-12, "residual {r}");
        }

        #[test]
        fn kappa_continuity(x in -3.0f64..3.0, sign in prop::bool::ANY) {
            let d: f64 = if sign { 1e-6 } else { -1e-6 };
            let bound = d.abs() * x.abs().powi(3) / 6.0 * 1.1;
            prop_assert!((gsin(d, x) - x).abs() <= bound);
            prop_assert!((gcos(d, x) - 1.0).abs() <= d.abs() * x * x / 2.0 * 1.1);
        }

        #[test]
        fn sinhc_at_least_one(u in -20.0f64..20.0) {
            prop_assert!(sinhc(u) >= 1.0);
        }
    }
}
