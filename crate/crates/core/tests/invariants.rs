use cayley_klein::coalgebra::{BeltramiState, ModelParams};
use cayley_klein::geometry::{beltrami_state_to_polar, polar_state_to_beltrami, PolarState};
use cayley_klein::hamiltonians::{Coords, Family, HamiltonianSpec, Variant};
use cayley_klein::kernels::gcos;
use cayley_klein::phase::{poisson_bracket, PhaseFunction};
use cayley_klein::{CKSignature, Space};
use proptest::prelude::*;

const FAMILIES: [Family; 3] = [Family::Free, Family::SW, Family::KC];

fn sig() -> impl Strategy<Value = CKSignature> {
    (0usize..9).prop_map(|i| Space::ALL[i].signature())
}

fn params() -> impl Strategy<Value = ModelParams> {
    (-0.5f64..0.5, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(
        |(z, b1, b2, beta0, gamma, k)| ModelParams {
            z,
            b1,
            b2,
            beta0,
            gamma,
            k,
            ..ModelParams::default()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hamiltonian_commutes_with_its_casimir(
        sig in sig(),
        m in params(),
        fi in 0usize..3,
        q1 in 0.3f64..0.6,
        q2 in 0.7f64..1.3,
        p1 in -0.5f64..0.5,
        p2 in -0.5f64..0.5,
    ) {
        let spec = HamiltonianSpec::new(FAMILIES[fi], Variant::Integrable, Coords::Beltrami, m, sig).unwrap();
        let x = [q1, q2, p1, p2];
        let c = spec.casimir();
        let scale = (1.0 + spec.eval(&x).unwrap().abs()) * (1.0 + c.eval(&x).unwrap().abs());
        let br = poisson_bracket(&spec, &c, &x).unwrap();
        prop_assert!(br.abs() < 1e-8 * scale, "{{H, C}} = {br:e}");
    }

    #[test]
    fn superintegrable_is_integrable_over_gcos(
        sig in sig(),
        m in params(),
        fi in 0usize..3,
        r in 0.3f64..1.2,
        theta in 0.3f64..1.2,
        pr in -1.0f64..1.0,
        ptheta in -1.0f64..1.0,
    ) {
        let x = [r, theta, pr, ptheta];
        let h = |v| HamiltonianSpec::new(FAMILIES[fi], v, Coords::Polar, m, sig).unwrap().eval(&x).unwrap();
        let hi = h(Variant::Integrable);
        prop_assert!((h(Variant::Superintegrable) * gcos(sig.k1(), r) - hi).abs() <= 1e-13 * (1.0 + hi.abs()));
    }

    #[test]
    fn phase_space_chart_round_trip(
        sig in sig(),
        r in 0.3f64..1.2,
        theta in 0.3f64..1.2,
        pr in -1.0f64..1.0,
        ptheta in -1.0f64..1.0,
    ) {
        let s = PolarState::new(r, theta, pr, ptheta);
        let bel = polar_state_to_beltrami(&s, sig);
        // outside the chart image for κ2 = −1
        prop_assume!(bel.is_ok());
        let back = beltrami_state_to_polar(&bel.unwrap(), sig).unwrap();
        for (a, b) in s.to_array().iter().zip(back.to_array()) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    // Beltrami positions are (y, x)/√2, so the Beltrami kinetic term
    // carries twice the polar normalization.
    #[test]
    fn free_motion_is_chart_independent(
        sig in sig(),
        r in 0.3f64..1.2,
        theta in 0.3f64..1.2,
        pr in -1.0f64..1.0,
        ptheta in -1.0f64..1.0,
    ) {
        let m = ModelParams { z: -1.0, b1: 0.0, b2: 0.0, ..ModelParams::default() };
        let polar = PolarState::new(r, theta, pr, ptheta);
        let bel = polar_state_to_beltrami(&polar, sig);
        prop_assume!(bel.is_ok());
        let bel: BeltramiState = bel.unwrap();
        let h = |coords, x: [f64; 4]| {
            HamiltonianSpec::new(Family::Free, Variant::Integrable, coords, m, sig).unwrap().eval(&x).unwrap()
        };
        let (hp, hb) = (h(Coords::Polar, polar.to_array()), h(Coords::Beltrami, bel.to_array()));
        prop_assert!((2.0 * hp - hb).abs() < 1e-10 * (1.0 + hb.abs()), "{hp} vs {hb}");
    }
}
