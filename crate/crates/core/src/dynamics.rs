//! Hamiltonian flows with exact-gradient vector fields, conserved-quantity
//! logging, and closed-form trajectories of the flat and contracted
//! systems.

use serde::{Deserialize, Serialize};

use crate::coalgebra::{BeltramiState, ModelParams, BARRIER_GUARD};
use crate::error::{Error, Result};
use crate::hamiltonians::{BaseFiberSplit, Casimir, Coords, HamiltonianSpec};
use crate::phase::{hamiltonian_vector_field, PhaseFunction, P1, Q1, Q2};
use crate::signature::CKSignature;

/// `|qᵢ|` (or the polar angle/radius) below this with a live barrier ends a flow.
pub const SINGULARITY_GUARD: f64 = 1e-6;

const MIDPOINT_TOL: f64 = 1e-12;
const MIDPOINT_MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    #[default]
    Rk4,
    ImplicitMidpoint,
}

impl std::str::FromStr for Integrator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rk4" => Ok(Integrator::Rk4),
            "implicit-midpoint" | "midpoint" | "im" => Ok(Integrator::ImplicitMidpoint),
            other => Err(Error::InvalidInput(format!("unknown integrator '{other}'"))),
        }
    }
}

/// Why a flow stopped before its requested length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FlowEvent {
    SingularityReached { time: f64, reason: String },
    NonFiniteState { time: f64 },
}

/// Sampled flow. `states[i]` is the phase point at `times[i]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 4]>,
    pub energy: Vec<f64>,
    pub casimir: Vec<f64>,
    pub event: Option<FlowEvent>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<[f64; 4]> {
        self.states.last().copied()
    }

    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }

    pub fn casimir_drift(&self) -> f64 {
        relative_drift(&self.casimir)
    }

    fn push(&mut self, t: f64, x: [f64; 4], h: f64, c: f64) {
        self.times.push(t);
        self.states.push(x);
        self.energy.push(h);
        self.casimir.push(c);
    }
}

/// `max |vᵢ − v₀| / |v₀|`, or the absolute deviation when `v₀ = 0`.
pub fn relative_drift(values: &[f64]) -> f64 {
    let Some(&v0) = values.first() else {
        return 0.0;
    };
    let dev = values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
    if v0 == 0.0 {
        dev
    } else {
        dev / v0.abs()
    }
}

/// Chart-boundary test applied after every step.
pub type Guard<'a> = &'a dyn Fn(&[f64; 4]) -> Option<String>;

fn rk4_step<H: PhaseFunction>(h: &H, x: &[f64; 4], dt: f64) -> Result<[f64; 4]> {
    let add = |a: &[f64; 4], k: &[f64; 4], s: f64| std::array::from_fn(|i| a[i] + s * k[i]);
    let k1 = hamiltonian_vector_field(h, x)?;
    let k2 = hamiltonian_vector_field(h, &add(x, &k1, dt / 2.0))?;
    let k3 = hamiltonian_vector_field(h, &add(x, &k2, dt / 2.0))?;
    let k4 = hamiltonian_vector_field(h, &add(x, &k3, dt))?;
    Ok(std::array::from_fn(|i| {
        x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

/// Fixed-point iteration; returns the last iterate if it has not
/// converged after the iteration cap.
fn midpoint_step<H: PhaseFunction>(h: &H, x: &[f64; 4], dt: f64) -> Result<[f64; 4]> {
    let f0 = hamiltonian_vector_field(h, x)?;
    let mut next: [f64; 4] = std::array::from_fn(|i| x[i] + dt * f0[i]);
    for _ in 0..MIDPOINT_MAX_ITER {
        let mid: [f64; 4] = std::array::from_fn(|i| 0.5 * (x[i] + next[i]));
        let f = hamiltonian_vector_field(h, &mid)?;
        let candidate: [f64; 4] = std::array::from_fn(|i| x[i] + dt * f[i]);
        let change = (0..4).map(|i| (candidate[i] - next[i]).abs()).fold(0.0, f64::max);
        next = candidate;
        if change < MIDPOINT_TOL {
            break;
        }
    }
    Ok(next)
}

/// Integrates `h` from `x0`, logging `h` and `monitor` at every sample.
///
/// Evaluation failures and guard trips after the first sample end the
/// flow with a recorded event; a failure at `x0` is an error.
pub fn integrate<H: PhaseFunction, C: PhaseFunction>(
    h: &H,
    monitor: &C,
    guard: Guard<'_>,
    x0: [f64; 4],
    dt: f64,
    steps: usize,
    integrator: Integrator,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    if let Some(reason) = guard(&x0) {
        return Err(Error::Domain(format!("initial state: {reason}")));
    }
    let mut traj = Trajectory::default();
    traj.push(0.0, x0, h.eval(&x0)?, monitor.eval(&x0)?);
    let mut x = x0;
    for n in 1..=steps {
        let t = n as f64 * dt;
        let stepped = match integrator {
            Integrator::Rk4 => rk4_step(h, &x, dt),
            Integrator::ImplicitMidpoint => midpoint_step(h, &x, dt),
        };
        let next = match stepped {
            Ok(v) => v,
            Err(e) => {
                traj.event = Some(FlowEvent::SingularityReached {
                    time: t,
                    reason: e.to_string(),
                });
                break;
            }
        };
        if next.iter().any(|v| !v.is_finite()) {
            traj.event = Some(FlowEvent::NonFiniteState { time: t });
            break;
        }
        if let Some(reason) = guard(&next) {
            traj.event = Some(FlowEvent::SingularityReached { time: t, reason });
            break;
        }
        let values = h.eval(&next).and_then(|e| Ok((e, monitor.eval(&next)?)));
        match values {
            Ok((e, c)) if e.is_finite() && c.is_finite() => traj.push(t, next, e, c),
            Ok(_) => {
                traj.event = Some(FlowEvent::NonFiniteState { time: t });
                break;
            }
            Err(e) => {
                traj.event = Some(FlowEvent::SingularityReached {
                    time: t,
                    reason: e.to_string(),
                });
                break;
            }
        }
        x = next;
    }
    Ok(traj)
}

fn barrier_guard(coords: Coords, m: ModelParams) -> impl Fn(&[f64; 4]) -> Option<String> {
    move |x: &[f64; 4]| match coords {
        Coords::Beltrami => [(1, m.b1, x[Q1]), (2, m.b2, x[Q2])]
            .into_iter()
            .find(|(_, b, q)| *b != 0.0 && q.abs() < SINGULARITY_GUARD)
            .map(|(i, _, q)| format!("q{i} = {q:e} reached the barrier")),
        Coords::Polar => {
            if x[0].abs() < SINGULARITY_GUARD {
                Some(format!("r = {:e} reached the origin", x[0]))
            } else if m.b1 != 0.0 && x[1].abs() < SINGULARITY_GUARD {
                Some(format!("theta = {:e} reached the barrier", x[1]))
            } else {
                None
            }
        }
    }
}

/// Flow of a catalog Hamiltonian, monitoring its Casimir.
pub fn hamiltonian_flow(
    spec: &HamiltonianSpec,
    s0: [f64; 4],
    dt: f64,
    steps: usize,
    integrator: Integrator,
) -> Result<Trajectory> {
    let guard = barrier_guard(spec.coords, spec.params);
    integrate(spec, &spec.casimir(), &guard, s0, dt, steps, integrator)
}

/// Fiber constant of a split system: `p1² + b1/q1²` in Beltrami
/// coordinates, the angular Casimir at `κ2 = 0` in polar ones.
#[derive(Clone, Copy, Debug)]
struct FiberConstant {
    coords: Coords,
    params: ModelParams,
    sig: CKSignature,
}

impl PhaseFunction for FiberConstant {
    fn eval<S: crate::Scalar>(&self, x: &[S; 4]) -> Result<S> {
        match self.coords {
            Coords::Beltrami => {
                let mut c = x[P1] * x[P1];
                if self.params.b1 != 0.0 {
                    c = c + S::cst(self.params.b1) / (x[Q1] * x[Q1]);
                }
                Ok(c)
            }
            Coords::Polar => Casimir {
                coords: Coords::Polar,
                params: self.params,
                kappas: crate::Kappas::of(self.sig),
            }
            .eval(x),
        }
    }
}

/// Flow of the base Hamiltonian in its own time `τ`.
pub fn base_flow(
    split: &BaseFiberSplit,
    s0: [f64; 4],
    dtau: f64,
    steps: usize,
    integrator: Integrator,
) -> Result<Trajectory> {
    let spec = split.spec;
    let guard = barrier_guard(spec.coords, spec.params);
    let monitor = FiberConstant {
        coords: spec.coords,
        params: spec.params,
        sig: spec.sig,
    };
    integrate(&split.base(), &monitor, &guard, s0, dtau, steps, integrator)
}

/// Flow of the fiber Hamiltonian (the full Hamiltonian at `κ2 = 0`).
pub fn fiber_flow(
    split: &BaseFiberSplit,
    s0: [f64; 4],
    dt: f64,
    steps: usize,
    integrator: Integrator,
) -> Result<Trajectory> {
    let spec = split.spec;
    let guard = barrier_guard(spec.coords, spec.params);
    let monitor = FiberConstant {
        coords: spec.coords,
        params: spec.params,
        sig: spec.sig,
    };
    integrate(&split.fiber(), &monitor, &guard, s0, dt, steps, integrator)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormKind {
    /// `q1` of the flat (`κ1 = 0`) free system.
    FlatQ1,
    /// `q2` of the flat free system.
    FlatQ2,
    /// `q1` of the Newtonian fiber (`κ2 = 0`).
    NewtonFiber,
    /// `q2` of the flat base system, in base time `τ`.
    BaseQ2,
}

/// `q²(t) = b_eff/E + factor·E·(t − t0)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSolution {
    pub kind: ClosedFormKind,
    /// Constant of motion; `None` when the data do not determine it.
    pub energy: Option<f64>,
    pub b_eff: f64,
    pub t0: f64,
    pub factor: f64,
    /// `q²` at `t = 0`, used when the motion is frozen.
    pub q0_sq: f64,
}

impl ClosedFormSolution {
    pub fn q_sq(&self, t: f64) -> f64 {
        match self.energy {
            Some(e) if e != 0.0 => self.b_eff / e + self.factor * e * (t - self.t0).powi(2),
            _ => self.q0_sq,
        }
    }
}

/// Motion `q̈ = b/q³` with velocity `v` started at `q`.
fn quadratic_motion(kind: ClosedFormKind, q: f64, v: f64, b: f64, factor: f64) -> Result<ClosedFormSolution> {
    if b != 0.0 && q.abs() < BARRIER_GUARD {
        let index = match kind {
            ClosedFormKind::FlatQ1 | ClosedFormKind::NewtonFiber => 1,
            ClosedFormKind::FlatQ2 | ClosedFormKind::BaseQ2 => 2,
        };
        return Err(Error::BarrierSingularity { index, value: q });
    }
    let energy = if factor == 0.0 { 0.0 } else { v * v / factor + b / (q * q) };
    if b > 0.0 && energy <= 0.0 {
        return Err(Error::Domain(format!("constant of motion {energy} is not positive")));
    }
    let t0 = if energy == 0.0 { 0.0 } else { -q * v / (factor * energy) };
    Ok(ClosedFormSolution {
        kind,
        energy: Some(energy),
        b_eff: b,
        t0,
        factor,
        q0_sq: q * q,
    })
}

/// Closed-form solution for the free system from a Beltrami initial state.
pub fn closed_form(
    kind: ClosedFormKind,
    m: &ModelParams,
    sig: CKSignature,
    s0: &BeltramiState,
) -> Result<ClosedFormSolution> {
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{kind:?} needs {what}, got {sig}")))
        }
    };
    match kind {
        ClosedFormKind::FlatQ1 => {
            need(sig.kappa1() == 0, "κ1 = 0")?;
            quadratic_motion(kind, s0.q1, m.sign * s0.p1, m.b1, 1.0)
        }
        ClosedFormKind::FlatQ2 => {
            need(sig.kappa1() == 0, "κ1 = 0")?;
            let k2 = sig.k2();
            if k2 != 0.0 {
                // κ2² E2 = q̇2² + κ2² b2/q2², q̇2 = κ2 p2
                return quadratic_motion(kind, s0.q2, m.sign * k2 * s0.p2, m.b2, k2 * k2);
            }
            // frozen fiber line: E2 from q2⁰ = √(b2/E2), unset when b2 = 0
            if m.b2 != 0.0 && s0.q2.abs() < BARRIER_GUARD {
                return Err(Error::BarrierSingularity { index: 2, value: s0.q2 });
            }
            Ok(ClosedFormSolution {
                kind,
                energy: (m.b2 != 0.0).then(|| m.b2 / (s0.q2 * s0.q2)),
                b_eff: m.b2,
                t0: 0.0,
                factor: 0.0,
                q0_sq: s0.q2 * s0.q2,
            })
        }
        ClosedFormKind::NewtonFiber => {
            need(sig.kappa2() == 0, "κ2 = 0")?;
            let c = sig.k1() * m.z * s0.q2 * s0.q2;
            // q̇1 = p1 e^{c}
            quadratic_motion(kind, s0.q1, m.sign * s0.p1 * c.exp(), m.b1 * (2.0 * c).exp(), 1.0)
        }
        ClosedFormKind::BaseQ2 => {
            need(sig.kappa1() == 0 && sig.kappa2() == 0, "κ1 = κ2 = 0")?;
            quadratic_motion(kind, s0.q2, m.sign * s0.p2, m.b2, 1.0)
        }
    }
}

/// Constants entering the flat-space conic identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicConstants {
    pub e1: f64,
    pub e2: f64,
    pub b1: f64,
    /// `b2/E2`, the squared turning value of `q2`.
    pub q2_turn_sq: f64,
    pub k2: f64,
}

impl ConicConstants {
    pub fn from_state(s0: &BeltramiState, m: &ModelParams, sig: CKSignature) -> Result<Self> {
        let flat1 = closed_form(ClosedFormKind::FlatQ1, m, sig, s0)?;
        let flat2 = closed_form(ClosedFormKind::FlatQ2, m, sig, s0)?;
        let e1 = flat1.energy.unwrap_or(0.0);
        let (e2, q2_turn_sq) = match flat2.energy {
            Some(e) if e != 0.0 => (e, m.b2 / e),
            _ => (0.0, s0.q2 * s0.q2),
        };
        Ok(ConicConstants {
            e1,
            e2,
            b1: m.b1,
            q2_turn_sq,
            k2: sig.k2(),
        })
    }
}

/// `max |E1 q2² − κ2² E2 q1² − (b2 E1/E2 − κ2² b1 E2/E1)|` over the samples.
///
/// Exact for flat free flows whose two coordinates share the turning time.
pub fn conic_residual(traj: &Trajectory, c: &ConicConstants) -> f64 {
    let k2sq = c.k2 * c.k2;
    let b1_over_e1 = if c.e1 == 0.0 { 0.0 } else { c.b1 / c.e1 };
    let rhs = c.e1 * c.q2_turn_sq - k2sq * c.e2 * b1_over_e1;
    traj.states
        .iter()
        .map(|x| (c.e1 * x[Q2] * x[Q2] - k2sq * c.e2 * x[Q1] * x[Q1] - rhs).abs())
        .fold(0.0, f64::max)
}

/// Sup-norm distance between the numerical `q²` and a closed form.
pub fn oracle_deviation(traj: &Trajectory, index: usize, sol: &ClosedFormSolution, t_max: f64) -> f64 {
    traj.times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t <= t_max + 1e-12)
        .map(|(t, x)| (x[index] * x[index] - sol.q_sq(*t)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{split_base_fiber, Family, Variant};
    use crate::phase::P2;

    fn sig(a: i64, b: i64) -> CKSignature {
        CKSignature::new(a, b).unwrap()
    }

    fn free(m: ModelParams, s: CKSignature) -> HamiltonianSpec {
        HamiltonianSpec::new(Family::Free, Variant::Integrable, Coords::Beltrami, m, s).unwrap()
    }

    #[test]
    fn straight_line() {
        let h = free(ModelParams::default(), sig(0, 1));
        let tr = hamiltonian_flow(&h, [0.0, 0.0, 1.0, 0.0], 1e-3, 1000, Integrator::Rk4).unwrap();
        assert_eq!(tr.len(), 1001);
        for (t, x) in tr.times.iter().zip(&tr.states) {
            assert!((x[Q1] - t).abs() < 1e-12);
            assert_eq!(x[Q2], 0.0);
        }
        assert!(tr.energy_drift() < 1e-14);
    }

    #[test]
    fn galilei_fiber_line_is_frozen() {
        let m = ModelParams {
            b1: 1.0,
            b2: 3.0,
            ..ModelParams::default()
        };
        let h = free(m, sig(0, 0));
        let tr = hamiltonian_flow(&h, [1.0, 1.3, 0.2, 5.0], 1e-3, 2000, Integrator::Rk4).unwrap();
        assert!(tr.states.iter().all(|x| x[Q2] == 1.3));
    }

    #[test]
    fn newton_fiber_oracle() {
        let m = ModelParams {
            z: 0.5,
            b1: 1.0,
            ..ModelParams::default()
        };
        let s = sig(1, 0);
        let s0 = BeltramiState::new(1.0, 1.0, 0.0, 0.3);
        let tr = hamiltonian_flow(&free(m, s), s0.to_array(), 1e-3, 5000, Integrator::Rk4).unwrap();
        let sol = closed_form(ClosedFormKind::NewtonFiber, &m, s, &s0).unwrap();
        assert!(oracle_deviation(&tr, Q1, &sol, 5.0) < 1e-6);
        assert!(tr.states.iter().all(|x| x[Q2] == 1.0));
    }

    #[test]
    fn closed_form_examples() {
        let m = ModelParams {
            b1: 1.0,
            ..ModelParams::default()
        };
        let s0 = BeltramiState::new(1.0, 1.0, 0.0, 0.0);
        let sol = closed_form(ClosedFormKind::FlatQ1, &m, sig(0, 1), &s0).unwrap();
        assert_eq!(sol.energy, Some(1.0));
        assert_eq!(sol.q_sq(2.0), 5.0);
        assert_eq!(sol.q_sq(sol.t0), 1.0);

        let m = ModelParams {
            z: 0.5,
            b1: 2.0,
            ..ModelParams::default()
        };
        let sol = closed_form(ClosedFormKind::NewtonFiber, &m, sig(1, 0), &s0).unwrap();
        assert!((sol.b_eff - 2.0 * 1f64.exp()).abs() < 1e-15);
        let m0 = ModelParams { z: 0.0, ..m };
        assert_eq!(closed_form(ClosedFormKind::NewtonFiber, &m0, sig(1, 0), &s0).unwrap().b_eff, 2.0);
        assert!(closed_form(ClosedFormKind::FlatQ1, &m, sig(1, 1), &s0).is_err());
    }

    #[test]
    fn fiber_line_energy() {
        let s0 = BeltramiState::new(1.0, 2.0, 0.0, 0.7);
        let with = ModelParams {
            b2: 1.0,
            ..ModelParams::default()
        };
        let sol = closed_form(ClosedFormKind::FlatQ2, &with, sig(0, 0), &s0).unwrap();
        assert_eq!(sol.energy, Some(0.25));
        assert_eq!(sol.q_sq(3.0), 4.0);
        let sol = closed_form(ClosedFormKind::FlatQ2, &ModelParams::default(), sig(0, 0), &s0).unwrap();
        assert_eq!(sol.energy, None);
        assert_eq!(sol.q_sq(3.0), 4.0);
    }

    #[test]
    fn euclidean_conic() {
        let m = ModelParams {
            b1: 1.0,
            b2: 1.0,
            ..ModelParams::default()
        };
        let s0 = BeltramiState::new(1.0, 2.0, 0.0, 0.0);
        for k2 in [1, -1, 0] {
            let s = sig(0, k2);
            let tr = hamiltonian_flow(&free(m, s), s0.to_array(), 1e-3, 5000, Integrator::Rk4).unwrap();
            let c = ConicConstants::from_state(&s0, &m, s).unwrap();
            assert!(conic_residual(&tr, &c) < 1e-6, "{s}");
        }
        // symmetric data: right-hand side vanishes
        let sym = BeltramiState::new(1.0, 1.0, 0.0, 0.0);
        let c = ConicConstants::from_state(&sym, &m, sig(0, 1)).unwrap();
        assert_eq!(c.e1 * c.q2_turn_sq - c.e2 * c.b1 / c.e1, 0.0);
    }

    #[test]
    fn base_flow_matches_base_oracle() {
        let m = ModelParams {
            b1: 1.0,
            b2: 1.0,
            ..ModelParams::default()
        };
        let s = sig(0, 0);
        let split = split_base_fiber(&free(m, s)).unwrap();
        let s0 = BeltramiState::new(1.0, 1.5, 0.2, 0.4);
        let tr = base_flow(&split, s0.to_array(), 1e-3, 5000, Integrator::Rk4).unwrap();
        let sol = closed_form(ClosedFormKind::BaseQ2, &m, s, &s0).unwrap();
        assert!(oracle_deviation(&tr, Q2, &sol, 5.0) < 1e-6);
        assert!(tr.energy_drift() < 1e-8);
        // fiber variables do not move under the base flow
        assert!(tr.states.iter().all(|x| x[Q1] == 1.0 && x[P1] == 0.2));

        let free_base = split_base_fiber(&free(ModelParams::default(), s)).unwrap();
        let tr = base_flow(&free_base, [1.0, 0.5, 0.0, 1.0], 1e-3, 1000, Integrator::Rk4).unwrap();
        let last = tr.last_state().unwrap();
        assert!((last[Q2] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn barrier_hit_is_recorded() {
        let m = ModelParams {
            b1: 1e-14,
            ..ModelParams::default()
        };
        let h = free(m, sig(0, 1));
        let tr = hamiltonian_flow(&h, [0.5, 1.0, -1.0, 0.0], 1e-3, 2000, Integrator::Rk4).unwrap();
        assert!(matches!(tr.event, Some(FlowEvent::SingularityReached { .. })));
        assert!(tr.len() < 2001);
        assert!(hamiltonian_flow(&h, [0.0, 1.0, 0.0, 0.0], 1e-3, 10, Integrator::Rk4).is_err());
    }

    #[test]
    fn conservation_on_curved_spaces() {
        let m = ModelParams {
            z: 0.3,
            b1: 0.5,
            b2: 0.8,
            beta0: 0.4,
            ..ModelParams::default()
        };
        for s in [sig(1, 1), sig(-1, -1), sig(1, 0)] {
            let h = HamiltonianSpec::new(Family::SW, Variant::Superintegrable, Coords::Beltrami, m, s).unwrap();
            let tr = hamiltonian_flow(&h, [0.9, 1.1, 0.2, -0.3], 1e-3, 2000, Integrator::Rk4).unwrap();
            assert!(tr.event.is_none());
            assert!(tr.energy_drift() < 1e-8, "{s}");
            assert!(tr.casimir_drift() < 1e-8, "{s}");
        }
    }

    #[test]
    fn implicit_midpoint_conserves_quadratic_energy() {
        let h = free(ModelParams::default(), sig(0, 1));
        let tr = hamiltonian_flow(&h, [0.3, 0.1, 1.0, -0.5], 1e-2, 500, Integrator::ImplicitMidpoint).unwrap();
        assert!(tr.energy_drift() < 1e-12);
    }

    #[test]
    fn time_reversal() {
        let m = ModelParams {
            z: 0.2,
            b1: 0.5,
            b2: 0.5,
            beta0: 1.0,
            ..ModelParams::default()
        };
        let h = HamiltonianSpec::new(Family::SW, Variant::Integrable, Coords::Beltrami, m, sig(1, 1)).unwrap();
        let x0 = [0.8, 1.2, 0.3, -0.2];
        let fwd = hamiltonian_flow(&h, x0, 1e-3, 200, Integrator::Rk4).unwrap();
        let mut end = fwd.last_state().unwrap();
        end[P1] = -end[P1];
        end[P2] = -end[P2];
        let back = hamiltonian_flow(&h, end, 1e-3, 200, Integrator::Rk4).unwrap();
        let x = back.last_state().unwrap();
        for i in [Q1, Q2] {
            assert!((x[i] - x0[i]).abs() < 1e-8);
        }
        for i in [P1, P2] {
            assert!((x[i] + x0[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn drift_helper() {
        assert_eq!(relative_drift(&[2.0, 2.5, 1.0]), 0.5);
        assert_eq!(relative_drift(&[0.0, 1e-3]), 1e-3);
        assert_eq!(relative_drift(&[]), 0.0);
    }

    #[test]
    fn rejects_bad_step() {
        let h = free(ModelParams::default(), sig(0, 1));
        assert!(hamiltonian_flow(&h, [0.3, 0.1, 1.0, -0.5], 0.0, 5, Integrator::Rk4).is_err());
    }
}
