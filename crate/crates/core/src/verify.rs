//! Seeded verification suites and their JSON report.
//!
//! Every suite is a deterministic function of `(samples, seed)`. Each
//! `(check, signature)` cell draws from its own ChaCha stream, so adding a
//! check never perturbs the samples of another.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coalgebra::{generators_with, identity_residuals_in, BeltramiState, ModelParams};
use crate::ddouble::DoubleDouble;
use crate::dynamics::{
    base_flow, closed_form, conic_residual, hamiltonian_flow, integrate, oracle_deviation, ClosedFormKind, ConicConstants,
    Integrator, Trajectory,
};
use crate::error::{Error, Result};
use crate::geometry::{
    beltrami_state_to_polar, from_polar_with, gaussian_curvature, metric_at, polar_state_to_beltrami, to_polar_with,
    PolarState,
};
use crate::hamiltonians::{split_base_fiber, Coords, Family, HamiltonianSpec, Variant};
use crate::kernels::{expm1c, gasin, gcos, gsin, gtan, log1mc, shz, sinhc};
use crate::phase::{hamiltonian_vector_field, poisson_bracket, PhaseFunction, Q1, Q2};
use crate::scalar::{Jet, Scalar};
use crate::signature::{CKSignature, Kappas, Space};

pub const BRACKET_TOL: f64 = 1e-9;
pub const CASIMIR_TOL: f64 = 1e-9;
pub const DUAL_PATH_TOL: f64 = 1e-10;
pub const DRIFT_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-6;
pub const FIBER_TOL: f64 = 1e-12;
pub const BASE_ENERGY_TOL: f64 = 1e-8;
pub const SPLIT_TOL: f64 = 1e-12;
pub const SUPER_TOL: f64 = 1e-13;
pub const CHART_TOL: f64 = 1e-10;
pub const DEFINITION_TOL: f64 = 1e-12;
pub const CURVATURE_TOL: f64 = 1e-4;
pub const CONTINUITY_TOL: f64 = 1e-5;

/// Contraction offset used by the continuity suite.
pub const CONTINUITY_DELTA: f64 = 1e-6;

/// Initial data with `|H0|` below this are redrawn, so relative drift is
/// measured against a non-degenerate energy scale.
pub const MIN_ENERGY_SCALE: f64 = 0.1;

const FLOW_DT: f64 = 1e-3;
const DRIFT_STEPS: usize = 10_000;
const ORACLE_STEPS: usize = 5_000;
const ORACLE_HORIZON: f64 = 5.0;
const MAX_DRAWS: usize = 400;
const BARRIER_RANGE: (f64, f64) = (1e-3, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Brackets,
    Casimir,
    Split,
    Oracle,
    Geometry,
    Continuity,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Brackets,
        Suite::Casimir,
        Suite::Split,
        Suite::Oracle,
        Suite::Geometry,
        Suite::Continuity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Brackets => "brackets",
            Suite::Casimir => "casimir",
            Suite::Split => "split",
            Suite::Oracle => "oracle",
            Suite::Geometry => "geometry",
            Suite::Continuity => "continuity",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|v| v.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// One pass/fail line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub space: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A value that is reported but not held to a tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub space: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    pub pass: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Default)]
struct Collector {
    checks: Vec<Check>,
    observations: Vec<Observation>,
}

impl Collector {
    fn check(&mut self, name: &str, space: &str, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            space: space.to_string(),
            max_residual: residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        });
    }

    fn observe(&mut self, name: &str, space: &str, value: f64) {
        self.observations.push(Observation {
            name: name.to_string(),
            space: space.to_string(),
            value,
        });
    }
}

/// Running maximum of absolute values; a NaN or an error poisons it.
#[derive(Clone, Copy, Debug, Default)]
struct MaxAbs(f64);

impl MaxAbs {
    fn add(&mut self, v: f64) {
        self.0 = if v.is_nan() { f64::NAN } else { self.0.max(v.abs()) };
    }

    fn add_result(&mut self, v: Result<f64>) {
        self.add(v.unwrap_or(f64::NAN));
    }
}

fn stream(seed: u64, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 8) | index as u64);
    rng
}

fn space_name(sig: CKSignature) -> &'static str {
    sig.space().name()
}

/// Runs one suite, or all of them.
pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Report {
    let mut out = Collector::default();
    let wanted = |s: Suite| suite == s || suite == Suite::All;
    if wanted(Suite::Brackets) || wanted(Suite::Casimir) {
        coalgebra_checks(&mut out, samples, seed, wanted(Suite::Brackets), wanted(Suite::Casimir));
    }
    if wanted(Suite::Split) {
        split_checks(&mut out, samples, seed);
    }
    if wanted(Suite::Oracle) {
        oracle_checks(&mut out, seed);
    }
    if wanted(Suite::Geometry) {
        geometry_checks(&mut out, samples, seed);
    }
    if wanted(Suite::Continuity) {
        continuity_checks(&mut out, samples, seed);
    }
    let pass = out.checks.iter().all(|c| c.pass);
    Report {
        suite: suite.name().to_string(),
        seed,
        samples,
        checks: out.checks,
        observations: out.observations,
        pass,
    }
}

pub const Z_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
pub const B_GRID: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];

/// `q ∈ [0.5, 2]²`, `p ∈ [−1, 1]²`.
pub fn sample_beltrami(rng: &mut ChaCha8Rng) -> BeltramiState {
    BeltramiState::new(
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

/// Bracket relations, Casimir commutation and the two Casimir paths,
/// evaluated in double-double arithmetic. Gradient terms reach ~1e10 on
/// the `κ2 = −1` spaces at `|z| = 1`, where `f64` rounding alone exceeds
/// the absolute tolerances.
fn coalgebra_checks(out: &mut Collector, samples: usize, seed: u64, brackets: bool, casimir: bool) {
    for (i, sig) in CKSignature::all().into_iter().enumerate() {
        let mut rng = stream(seed, 1, i);
        let (mut br, mut cm, mut dp) = (MaxAbs::default(), MaxAbs::default(), MaxAbs::default());
        for z in Z_GRID {
            for (b1, b2) in B_GRID {
                let m = ModelParams {
                    z,
                    b1,
                    b2,
                    ..ModelParams::default()
                };
                for _ in 0..samples {
                    let s = sample_beltrami(&mut rng);
                    match identity_residuals_in::<DoubleDouble>(&s, &m, sig) {
                        Ok(r) => {
                            r.brackets.iter().for_each(|v| br.add(*v));
                            r.commutators.iter().for_each(|v| cm.add(*v));
                            dp.add(r.dual_path);
                        }
                        Err(_) => [&mut br, &mut cm, &mut dp].into_iter().for_each(|a| a.add(f64::NAN)),
                    }
                }
            }
        }
        let space = space_name(sig);
        if brackets {
            out.check("bracket_relations", space, br.0, BRACKET_TOL);
        }
        if casimir {
            out.check("casimir_commutation", space, cm.0, CASIMIR_TOL);
            out.check("dual_path_casimir", space, dp.0, DUAL_PATH_TOL);
        }
    }
}

fn k1_trig(k1: f64, r: f64) -> (f64, f64) {
    match k1 {
        k if k > 0.0 => (r.sin(), r.cos()),
        k if k < 0.0 => (r.sinh(), r.cosh()),
        _ => (r, 1.0),
    }
}

/// `sinh(w x)/w`, `x` at `w = 0`.
fn sinh_over(w: f64, x: f64) -> f64 {
    if w == 0.0 {
        x
    } else {
        (w * x).sinh() / w
    }
}

/// Fiber `½(p1² + b1/q1²) e^{κ1 z q2²}` of the Beltrami system at `κ2 = 0`.
fn beltrami_fiber_ref(x: &[f64; 4], m: &ModelParams, k1: f64) -> f64 {
    let [q1, q2, p1, _] = *x;
    m.sign * 0.5 * (p1 * p1 + m.b1 / (q1 * q1)) * (k1 * m.z * q2 * q2).exp()
}

/// Base of the integrable Beltrami system at `κ2 = 0`.
fn beltrami_base_ref(x: &[f64; 4], m: &ModelParams, k1: f64, family: Family) -> f64 {
    let [_, q2, _, p2] = *x;
    let w = k1 * m.z;
    let q2s = q2 * q2;
    let barrier = if w == 0.0 { m.b2 / q2s } else { w * m.b2 / (w * q2s).sinh() };
    let kinetic = 0.5 * (sinh_over(w, q2s) / q2s * p2 * p2 + barrier);
    let potential = match family {
        Family::Free => 0.0,
        Family::SW => m.beta0 * sinh_over(w, q2s),
        Family::KC => {
            if w == 0.0 {
                -m.gamma / q2
            } else {
                let e = (2.0 * w * q2s).exp();
                -m.gamma * (2.0 * w / (e - 1.0)).sqrt() * e
            }
        }
    };
    m.sign * (kinetic + potential)
}

fn polar_g_ref(r: f64, m: &ModelParams, k1: f64, family: Family) -> f64 {
    let (s1, c1) = k1_trig(k1, r);
    match family {
        Family::Free => 0.0,
        Family::SW => m.beta0 * s1 * s1 / c1,
        Family::KC => -m.k * c1 * c1 / s1,
    }
}

/// `(fiber, base)` of the polar system at `κ2 = 0`.
fn polar_split_ref(x: &[f64; 4], m: &ModelParams, k1: f64, family: Family, variant: Variant) -> (f64, f64) {
    let [r, theta, pr, pt] = *x;
    let (s1, c1) = k1_trig(k1, r);
    let angular = pt * pt + 4.0 * m.b1 / (theta * theta);
    let (fiber, base) = match variant {
        Variant::Integrable => (
            c1 / (2.0 * s1 * s1) * angular,
            c1 * (0.5 * pr * pr + 2.0 * m.b2 / (s1 * s1)) + polar_g_ref(r, m, k1, family),
        ),
        Variant::Superintegrable => {
            let t1 = s1 / c1;
            let potential = match family {
                Family::Free => 0.0,
                Family::SW => m.beta0 * t1 * t1,
                Family::KC => -m.k / t1,
            };
            (angular / (2.0 * s1 * s1), 0.5 * pr * pr + 2.0 * m.b2 / (s1 * s1) + potential)
        }
    };
    (m.sign * fiber, m.sign * base)
}

fn sample_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams {
        z: rng.gen_range(-1.0..1.0),
        b1: rng.gen_range(0.0..1.0),
        b2: rng.gen_range(0.0..1.0),
        beta0: rng.gen_range(0.0..1.0),
        gamma: rng.gen_range(0.0..1.0),
        k: rng.gen_range(0.0..1.0),
        sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
    }
}

/// `r, θ ∈ [0.3, 1.2]`, momenta in `[−1, 1]`.
pub fn sample_polar(rng: &mut ChaCha8Rng) -> PolarState {
    PolarState::new(
        rng.gen_range(0.3..1.2),
        rng.gen_range(0.3..1.2),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

const FAMILIES: [Family; 3] = [Family::Free, Family::SW, Family::KC];
const VARIANTS: [Variant; 2] = [Variant::Integrable, Variant::Superintegrable];

fn split_checks(out: &mut Collector, samples: usize, seed: u64) {
    let degenerate = CKSignature::all().into_iter().filter(|s| s.is_degenerate());
    for (i, sig) in degenerate.enumerate() {
        let k1 = sig.k1();
        let mut rng = stream(seed, 2, i);
        let (mut bel, mut pol_i, mut pol_s, mut same_fiber) =
            (MaxAbs::default(), MaxAbs::default(), MaxAbs::default(), MaxAbs::default());
        for _ in 0..samples {
            let m = sample_params(&mut rng);
            let xb = sample_beltrami(&mut rng).to_array();
            let xp = sample_polar(&mut rng).to_array();
            for family in FAMILIES {
                let spec = HamiltonianSpec::new(family, Variant::Integrable, Coords::Beltrami, m, sig);
                match spec.and_then(|h| split_base_fiber(&h)?.evaluate(&xb)) {
                    Ok((f, b)) => {
                        bel.add(f - beltrami_fiber_ref(&xb, &m, k1));
                        bel.add(b - beltrami_base_ref(&xb, &m, k1, family));
                    }
                    Err(_) => bel.add(f64::NAN),
                }
                for variant in VARIANTS {
                    let acc = match variant {
                        Variant::Integrable => &mut pol_i,
                        Variant::Superintegrable => &mut pol_s,
                    };
                    let spec = HamiltonianSpec::new(family, variant, Coords::Polar, m, sig);
                    match spec.and_then(|h| split_base_fiber(&h)?.evaluate(&xp)) {
                        Ok((f, b)) => {
                            let (fr, br) = polar_split_ref(&xp, &m, k1, family, variant);
                            acc.add(f - fr);
                            acc.add(b - br);
                        }
                        Err(_) => acc.add(f64::NAN),
                    }
                }
            }
            let fiber = |family| -> Result<f64> {
                let h = HamiltonianSpec::new(family, Variant::Superintegrable, Coords::Polar, m, sig)?;
                Ok(split_base_fiber(&h)?.evaluate(&xp)?.0)
            };
            same_fiber.add_result(fiber(Family::SW).and_then(|a| Ok(a - fiber(Family::KC)?)));
        }
        let space = space_name(sig);
        out.check("split_beltrami", space, bel.0, SPLIT_TOL);
        out.check("split_polar_integrable", space, pol_i.0, SPLIT_TOL);
        out.check("split_polar_superintegrable", space, pol_s.0, SPLIT_TOL);
        out.check("fiber_sw_equals_kc", space, same_fiber.0, SPLIT_TOL);
    }

    for (i, sig) in CKSignature::all().into_iter().enumerate() {
        let mut rng = stream(seed, 3, i);
        let mut rel = MaxAbs::default();
        for _ in 0..samples {
            let m = sample_params(&mut rng);
            let x = sample_polar(&mut rng).to_array();
            for family in FAMILIES {
                let value = |variant| HamiltonianSpec::new(family, variant, Coords::Polar, m, sig)?.eval(&x);
                rel.add_result(value(Variant::Superintegrable).and_then(|hs| {
                    Ok(hs * gcos(sig.k1(), x[0]) - value(Variant::Integrable)?)
                }));
            }
        }
        out.check("superintegrable_relation", space_name(sig), rel.0, SUPER_TOL);
    }
}

/// Seeded parameters and initial data for a conservation run. Beltrami
/// draws keep `q1 < q2`, so `J- > 0` on every signature. Barrier
/// constants are log-uniform on `[1e-3, 1]`: on the `κ2 = −1` spaces a
/// strong `b1` drives `q1` into the light cone within the horizon.
pub fn flow_scenario(rng: &mut ChaCha8Rng, coords: Coords, sig: CKSignature) -> (ModelParams, [f64; 4]) {
    let mut barrier = || rng.gen_range(BARRIER_RANGE.0.ln()..BARRIER_RANGE.1.ln()).exp();
    let (b1, b2) = (barrier(), barrier());
    let m = ModelParams {
        z: rng.gen_range(-0.5..0.5),
        b1,
        b2,
        beta0: rng.gen_range(0.1..1.0),
        gamma: rng.gen_range(0.1..1.0),
        k: rng.gen_range(0.1..1.0),
        sign: sig.space().default_sign(),
    };
    let (a, b) = match coords {
        Coords::Beltrami => (rng.gen_range(0.3..0.6), rng.gen_range(0.7..1.3)),
        Coords::Polar => (rng.gen_range(0.4..1.2), rng.gen_range(0.4..1.0)),
    };
    let x = [a, b, rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
    (m, x)
}

/// Largest phase-space speed `|X_H|∞` allowed along a conservation orbit.
pub const MAX_PHASE_SPEED: f64 = 20.0;

/// Reports why a phase point is outside the regular region of `spec`:
/// the Hamiltonian vector field is undefined or faster than
/// [`MAX_PHASE_SPEED`]. Barrier collisions, the light cone `J- = 0` and
/// the edge of the deformed chart all show up this way; plain unbounded
/// motion does not.
pub fn irregularity(spec: &HamiltonianSpec, x: &[f64; 4]) -> Option<String> {
    match hamiltonian_vector_field(spec, x) {
        Ok(v) => {
            let speed = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            (speed.is_nan() || speed > MAX_PHASE_SPEED).then(|| format!("phase speed {speed:e}"))
        }
        Err(e) => Some(e.to_string()),
    }
}

/// Draws scenarios until one flows for the whole horizon without an event,
/// with `|H0| ≥ MIN_ENERGY_SCALE` and with no [`irregularity`] along the orbit.
pub fn conserving_flow(
    rng: &mut ChaCha8Rng,
    family: Family,
    variant: Variant,
    coords: Coords,
    sig: CKSignature,
    steps: usize,
) -> Option<(HamiltonianSpec, Trajectory)> {
    for _ in 0..MAX_DRAWS {
        let (m, x0) = flow_scenario(rng, coords, sig);
        let Ok(spec) = HamiltonianSpec::new(family, variant, coords, m, sig) else {
            continue;
        };
        match spec.eval(&x0) {
            Ok(h) if h.abs() >= MIN_ENERGY_SCALE => {}
            _ => continue,
        }
        let guard = |x: &[f64; 4]| irregularity(&spec, x);
        if let Ok(tr) = integrate(&spec, &spec.casimir(), &guard, x0, FLOW_DT, steps, Integrator::Rk4) {
            if tr.event.is_none() {
                return Some((spec, tr));
            }
        }
    }
    None
}

fn oracle_checks(out: &mut Collector, seed: u64) {
    // Conservation along every catalog flow. Beltrami coordinates cover
    // every (family, variant, signature); polar cells count when a regular
    // orbit exists, which fails for instance for the integrable polar flows
    // on the curved spaces: they reach the chart edge in finite time.
    let mut missing_polar = 0usize;
    for (i, sig) in CKSignature::all().into_iter().enumerate() {
        let mut rng = stream(seed, 4, i);
        let (mut energy, mut casimir, mut frozen) = (MaxAbs::default(), MaxAbs::default(), MaxAbs::default());
        for coords in [Coords::Beltrami, Coords::Polar] {
            for family in FAMILIES {
                for variant in VARIANTS {
                    match conserving_flow(&mut rng, family, variant, coords, sig, DRIFT_STEPS) {
                        Some((_, tr)) => {
                            energy.add(tr.energy_drift());
                            casimir.add(tr.casimir_drift());
                            if sig.is_degenerate() {
                                // q2 in Beltrami, r in polar coordinates
                                let idx = if coords == Coords::Beltrami { Q2 } else { 0 };
                                let x0 = tr.states[0][idx];
                                tr.states.iter().for_each(|x| frozen.add(x[idx] - x0));
                            }
                        }
                        None if coords == Coords::Polar => missing_polar += 1,
                        None => [&mut energy, &mut casimir].into_iter().for_each(|a| a.add(f64::NAN)),
                    }
                }
            }
        }
        let space = space_name(sig);
        out.check("energy_drift", space, energy.0, DRIFT_TOL);
        out.check("casimir_drift", space, casimir.0, DRIFT_TOL);
        if sig.is_degenerate() {
            out.check("fiber_constancy", space, frozen.0, FIBER_TOL);
        }
    }
    out.observe("polar_cells_without_regular_orbit", "all", missing_polar as f64);

    let free = |m: ModelParams, sig| HamiltonianSpec::new(Family::Free, Variant::Integrable, Coords::Beltrami, m, sig);
    let draw = |rng: &mut ChaCha8Rng, sig: CKSignature| {
        let m = ModelParams {
            z: rng.gen_range(-0.5..0.5),
            b1: rng.gen_range(0.2..1.0),
            b2: rng.gen_range(0.2..1.0),
            sign: sig.space().default_sign(),
            ..ModelParams::default()
        };
        let s0 = BeltramiState::new(
            rng.gen_range(0.5..1.5),
            rng.gen_range(0.5..1.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
        (m, s0)
    };
    let flat = [Space::Euclidean, Space::Minkowski, Space::Galilei].map(Space::signature);
    for (i, sig) in flat.into_iter().enumerate() {
        let mut rng = stream(seed, 5, i);
        let (mut q1, mut q2, mut conic) = (MaxAbs::default(), MaxAbs::default(), MaxAbs::default());
        for _ in 0..3 {
            let (m, s0) = draw(&mut rng, sig);
            let run = free(m, sig).and_then(|h| hamiltonian_flow(&h, s0.to_array(), FLOW_DT, ORACLE_STEPS, Integrator::Rk4));
            let dev = |kind, idx, tr: &Trajectory| -> Result<f64> {
                Ok(oracle_deviation(tr, idx, &closed_form(kind, &m, sig, &s0)?, ORACLE_HORIZON))
            };
            match run {
                Ok(tr) if tr.event.is_none() => {
                    q1.add_result(dev(ClosedFormKind::FlatQ1, Q1, &tr));
                    q2.add_result(dev(ClosedFormKind::FlatQ2, Q2, &tr));
                }
                _ => [&mut q1, &mut q2].into_iter().for_each(|a| a.add(f64::NAN)),
            }
            let (m, s0) = conic_scenario(&mut rng, sig);
            let res = free(m, sig)
                .and_then(|h| hamiltonian_flow(&h, s0.to_array(), FLOW_DT, ORACLE_STEPS, Integrator::Rk4))
                .and_then(|tr| Ok(conic_residual(&tr, &ConicConstants::from_state(&s0, &m, sig)?)));
            conic.add_result(res);
        }
        let space = space_name(sig);
        out.check("oracle_flat_q1", space, q1.0, ORACLE_TOL);
        out.check("oracle_flat_q2", space, q2.0, ORACLE_TOL);
        out.check("conic_residual", space, conic.0, ORACLE_TOL);
    }

    let fibers = [Space::NewtonPlus, Space::NewtonMinus, Space::Galilei].map(Space::signature);
    for (i, sig) in fibers.into_iter().enumerate() {
        let mut rng = stream(seed, 6, i);
        let mut dev = MaxAbs::default();
        for _ in 0..3 {
            let (m, s0) = draw(&mut rng, sig);
            dev.add_result(free(m, sig).and_then(|h| {
                let tr = hamiltonian_flow(&h, s0.to_array(), FLOW_DT, ORACLE_STEPS, Integrator::Rk4)?;
                let sol = closed_form(ClosedFormKind::NewtonFiber, &m, sig, &s0)?;
                Ok(oracle_deviation(&tr, Q1, &sol, ORACLE_HORIZON))
            }));
        }
        out.check("oracle_newton_fiber", space_name(sig), dev.0, ORACLE_TOL);
    }

    let sig = Space::Galilei.signature();
    let mut rng = stream(seed, 7, 0);
    let (mut dev, mut drift) = (MaxAbs::default(), MaxAbs::default());
    for _ in 0..3 {
        let (m, s0) = draw(&mut rng, sig);
        let run = free(m, sig).and_then(|h| {
            let split = split_base_fiber(&h)?;
            let tr = base_flow(&split, s0.to_array(), FLOW_DT, ORACLE_STEPS, Integrator::Rk4)?;
            let sol = closed_form(ClosedFormKind::BaseQ2, &m, sig, &s0)?;
            Ok((oracle_deviation(&tr, Q2, &sol, ORACLE_HORIZON), tr.energy_drift()))
        });
        match run {
            Ok((d, e)) => {
                dev.add(d);
                drift.add(e);
            }
            Err(_) => [&mut dev, &mut drift].into_iter().for_each(|a| a.add(f64::NAN)),
        }
    }
    out.check("oracle_base_q2", space_name(sig), dev.0, ORACLE_TOL);
    out.check("base_energy_constancy", space_name(sig), drift.0, BASE_ENERGY_TOL);
}

/// Flat free initial data whose two coordinates share the turning time,
/// built from the closed forms at a random phase `t = −t0`.
pub fn conic_scenario(rng: &mut ChaCha8Rng, sig: CKSignature) -> (ModelParams, BeltramiState) {
    let m = ModelParams {
        b1: rng.gen_range(0.2..1.0),
        b2: rng.gen_range(0.2..1.0),
        sign: sig.space().default_sign(),
        ..ModelParams::default()
    };
    let t0: f64 = rng.gen_range(-1.0..1.0);
    let k2 = sig.k2();
    // q² = b/E + f E t0², q q̇ = −f E t0, q̇ = sign·(velocity factor)·p
    let e1: f64 = rng.gen_range(0.5..2.0);
    let q1 = (m.b1 / e1 + e1 * t0 * t0).sqrt();
    let p1 = -e1 * t0 / q1 * m.sign;
    let (q2, p2) = if k2 == 0.0 {
        (rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5))
    } else {
        let e2: f64 = rng.gen_range(0.5..2.0);
        let q2 = (m.b2 / e2 + e2 * t0 * t0).sqrt();
        (q2, -e2 * t0 / q2 / k2 * m.sign)
    };
    (m, BeltramiState::new(q1, q2, p1, p2))
}

/// Beltrami position sample inside the polar chart of `sig`.
pub fn sample_chart_point(rng: &mut ChaCha8Rng, sig: CKSignature) -> BeltramiState {
    let p1 = rng.gen_range(-1.0..1.0);
    let p2 = rng.gen_range(-1.0..1.0);
    loop {
        let (q1, q2): (f64, f64) = match sig.kappa2() {
            1 => (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            0 => (rng.gen_range(-1.5..1.5), rng.gen_range(0.3..1.5)),
            _ => {
                let q2: f64 = rng.gen_range(0.3..1.5);
                (rng.gen_range(-0.9..0.9) * q2, q2)
            }
        };
        if q1.hypot(q2) > 0.3 && (sig.kappa2() <= 0 || q2.abs() > 0.05) {
            return BeltramiState::new(q1, q2, p1, p2);
        }
    }
}

/// A Beltrami chart function (`x`, `y`, `p_x` or `p_y`) of the polar
/// phase point, for canonicity checks.
#[derive(Clone, Copy, Debug)]
pub struct Transported {
    pub sig: CKSignature,
    /// 0: x, 1: y, 2: p_x, 3: p_y.
    pub component: usize,
}

impl PhaseFunction for Transported {
    fn eval<S: Scalar>(&self, z: &[S; 4]) -> Result<S> {
        let (k1, k2) = (self.sig.k1(), self.sig.k2());
        let (x, y) = from_polar_with(z[0], z[1], k1, k2)?;
        match self.component {
            0 => Ok(x),
            1 => Ok(y),
            c => {
                let wrt_x = c == 2;
                let (jx, jy) = if wrt_x {
                    (Jet::variable(x), Jet::constant(y))
                } else {
                    (Jet::constant(x), Jet::variable(y))
                };
                let (r, t) = to_polar_with(jx, jy, k1, k2)?;
                Ok(r.der * z[2] + t.der * z[3])
            }
        }
    }
}

fn geometry_checks(out: &mut Collector, samples: usize, seed: u64) {
    for (i, sig) in CKSignature::all().into_iter().enumerate() {
        let mut rng = stream(seed, 8, i);
        let (mut trip, mut def, mut canon) = (MaxAbs::default(), MaxAbs::default(), MaxAbs::default());
        for _ in 0..samples {
            let s = sample_chart_point(&mut rng, sig);
            match beltrami_state_to_polar(&s, sig).and_then(|p| Ok((p, polar_state_to_beltrami(&p, sig)?))) {
                Ok((p, back)) => {
                    s.to_array().iter().zip(back.to_array()).for_each(|(a, b)| trip.add(a - b));
                    let rho2 = 2.0 * (s.q2 * s.q2 + sig.k2() * s.q1 * s.q1);
                    def.add(gcos(sig.k1(), p.r) - (-0.5 * sig.k1() * rho2).exp());
                    let z = p.to_array();
                    for (a, b, want) in [(0, 2, 1.0), (1, 3, 1.0), (0, 3, 0.0), (1, 2, 0.0), (0, 1, 0.0), (2, 3, 0.0)] {
                        let f = Transported { sig, component: a };
                        let g = Transported { sig, component: b };
                        canon.add_result(poisson_bracket(&f, &g, &z).map(|v| v - want));
                    }
                }
                Err(_) => trip.add(f64::NAN),
            }
        }
        let space = space_name(sig);
        out.check("chart_round_trip", space, trip.0, CHART_TOL);
        out.check("radial_definition", space, def.0, DEFINITION_TOL);
        out.check("bracket_preservation", space, canon.0, CHART_TOL);
    }

    let r_grid: Vec<f64> = (1..=10).map(|i| 0.1 * f64::from(i)).collect();
    let sphere = Space::Sphere.signature();
    let mut curv = MaxAbs::default();
    for &r in &r_grid {
        curv.add_result(gaussian_curvature(r, sphere).map(|k| k + r.sin().powi(2) / (2.0 * r.cos())));
    }
    out.check("curvature_closed_form", Space::Sphere.name(), curv.0, CURVATURE_TOL);

    let galilei = Space::Galilei.signature();
    let mut split = MaxAbs::default();
    for &r in r_grid.iter().chain(&[2.0, 5.0]) {
        match metric_at(r, galilei) {
            Ok(g) => {
                split.add(g.g_rr - 1.0);
                split.add(g.fiber_g_thth - r * r);
                split.add(g.g_thth);
            }
            Err(_) => split.add(f64::NAN),
        }
    }
    out.check("galilei_metric_split", Space::Galilei.name(), split.0, 0.0);

    for space in [Space::Hyperbolic, Space::DeSitter] {
        if let Ok(k) = gaussian_curvature(0.5, space.signature()) {
            out.observe("curvature_r0.5", space.name(), k);
        }
    }

    // Beltrami/polar Casimir proportionality under the chart map, b = 0
    for (i, sig) in CKSignature::all().into_iter().enumerate() {
        if sig.is_degenerate() {
            continue;
        }
        let mut rng = stream(seed, 9, i);
        let m = ModelParams {
            z: -1.0,
            ..ModelParams::default()
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..samples.min(200) {
            let s = sample_chart_point(&mut rng, sig);
            let ratio = beltrami_state_to_polar(&s, sig).and_then(|p| {
                let cb = crate::coalgebra::casimir_two_particle(&s, &m, sig)?;
                let cp = crate::hamiltonians::casimir_polar(&p, &m, sig)?;
                Ok(cb / cp)
            });
            if let Ok(v) = ratio {
                if v.is_finite() {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        out.observe("casimir_ratio_min", space_name(sig), lo);
        out.observe("casimir_ratio_max", space_name(sig), hi);
    }
}

fn continuity_checks(out: &mut Collector, samples: usize, seed: u64) {
    let d = CONTINUITY_DELTA;
    let mut rng = stream(seed, 10, 0);
    let mut kern = MaxAbs::default();
    for _ in 0..samples {
        let x: f64 = rng.gen_range(-3.0..3.0);
        let s: f64 = rng.gen_range(-0.9..0.9);
        let w: f64 = rng.gen_range(-0.9..0.9);
        for k in [d, -d] {
            kern.add(gsin(k, x) - gsin(0.0, x));
            kern.add(gcos(k, x) - gcos(0.0, x));
            kern.add_result(gtan(k, x).and_then(|a| Ok(a - gtan(0.0, x)?)));
            kern.add_result(gasin(k, s).and_then(|a| Ok(a - gasin(0.0, s)?)));
            kern.add(shz(k, x) - shz(0.0, x));
            kern.add(sinhc(k * x) - sinhc(0.0));
            kern.add(expm1c(k * x) - expm1c(0.0));
            kern.add_result(log1mc(k * w).and_then(|a| Ok(a - log1mc(0.0)?)));
        }
    }
    out.check("continuity_kernels", "all", kern.0, CONTINUITY_TOL);

    let mut rng = stream(seed, 10, 1);
    let (mut gens, mut hams) = (MaxAbs::default(), MaxAbs::default());
    for _ in 0..samples {
        let m = continuity_params(&mut rng);
        let xb = [
            rng.gen_range(0.5..1.0),
            rng.gen_range(0.5..1.0),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ];
        let xp = [
            rng.gen_range(0.5..1.0),
            rng.gen_range(0.5..1.0),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ];
        for lattice in [-1.0, 0.0, 1.0] {
            for (near, at) in [
                (Kappas::continuous(d, lattice), Kappas::continuous(0.0, lattice)),
                (Kappas::continuous(-d, lattice), Kappas::continuous(0.0, lattice)),
                (Kappas::continuous(lattice, d), Kappas::continuous(lattice, 0.0)),
                (Kappas::continuous(lattice, -d), Kappas::continuous(lattice, 0.0)),
            ] {
                match (generators_with(&xb, &m, &near), generators_with(&xb, &m, &at)) {
                    (Ok(a), Ok(b)) => {
                        gens.add(a.jminus - b.jminus);
                        gens.add(a.j3 - b.j3);
                        gens.add(a.jplus - b.jplus);
                    }
                    _ => gens.add(f64::NAN),
                }
                let sig = CKSignature::new(0, 0).expect("valid signature");
                for family in FAMILIES {
                    for variant in VARIANTS {
                        for (coords, x) in [(Coords::Beltrami, xb), (Coords::Polar, xp)] {
                            let spec = HamiltonianSpec {
                                family,
                                variant,
                                coords,
                                params: m,
                                sig,
                            };
                            hams.add_result(
                                spec.eval_with(&x, &near).and_then(|a| Ok(a - spec.eval_with(&x, &at)?)),
                            );
                        }
                    }
                }
            }
        }
    }
    out.check("continuity_generators", "all", gens.0, CONTINUITY_TOL);
    out.check("continuity_hamiltonians", "all", hams.0, CONTINUITY_TOL);
}

/// Parameters of the continuity test box.
pub fn continuity_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams {
        z: rng.gen_range(-0.5..0.5),
        b1: rng.gen_range(0.0..0.5),
        b2: rng.gen_range(0.0..0.5),
        beta0: rng.gen_range(0.0..0.5),
        gamma: rng.gen_range(0.0..0.5),
        k: rng.gen_range(0.0..0.5),
        sign: 1.0,
    }
}
