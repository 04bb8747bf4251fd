//! `ckint` command-line front end.
//!
//! Exit codes: 0 when everything passed, 1 when a verification check
//! failed (the report is still written), 2 for usage and domain errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::coalgebra::{BeltramiState, ModelParams};
use crate::dynamics::{
    base_flow, closed_form, conic_residual, fiber_flow, hamiltonian_flow, ClosedFormKind, ConicConstants, FlowEvent,
    Integrator, Trajectory,
};
use crate::error::{Error, Result};
use crate::geometry::{gaussian_curvature, metric_at};
use crate::hamiltonians::{split_base_fiber, Coords, Family, HamiltonianSpec, Variant};
use crate::phase::PhaseFunction;
use crate::signature::{CKSignature, Space};
use crate::verify::{run_suite, Report, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ckint", version, about = "Superintegrable systems on the nine Cayley-Klein planes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the nine spaces with their signature and default sign.
    Spaces {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Integrate a Hamiltonian flow and write the trajectory.
    Simulate(RunArgs),
    /// Run seeded verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Evaluate and integrate the base and fiber parts on a degenerate space.
    Split(RunArgs),
    /// Metric components and Gaussian curvature of the polar chart.
    Geometry(GeometryArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON file with any of the run fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa2: Option<i64>,
    #[arg(long)]
    pub coords: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<f64>,
    /// Beltrami positions `q1,q2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Beltrami momenta `p1,p2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub pr: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ptheta: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub integrator: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value = "sphere")]
    pub space: String,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa2: Option<i64>,
    /// Radii to tabulate; defaults to 0.1, 0.2, ..., 1.0.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Run settings as read from a config file. Every field is optional;
/// command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub space: Option<String>,
    pub kappa1: Option<i64>,
    pub kappa2: Option<i64>,
    pub coords: Option<String>,
    pub family: Option<String>,
    pub variant: Option<String>,
    pub z: Option<f64>,
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    pub beta0: Option<f64>,
    pub gamma: Option<f64>,
    pub k: Option<f64>,
    pub sign: Option<f64>,
    pub q: Option<[f64; 2]>,
    pub p: Option<[f64; 2]>,
    pub r: Option<f64>,
    pub theta: Option<f64>,
    pub pr: Option<f64>,
    pub ptheta: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub integrator: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn pair(v: Option<Vec<f64>>) -> Result<Option<[f64; 2]>> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[a, b]) => Ok(Some([a, b])),
        Some(other) => Err(Error::InvalidInput(format!("expected two comma-separated numbers, got {other:?}"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(self, flags: RunArgs) -> Result<Self> {
        Ok(RunConfig {
            space: flags.space.or(self.space),
            kappa1: flags.kappa1.or(self.kappa1),
            kappa2: flags.kappa2.or(self.kappa2),
            coords: flags.coords.or(self.coords),
            family: flags.family.or(self.family),
            variant: flags.variant.or(self.variant),
            z: flags.z.or(self.z),
            b1: flags.b1.or(self.b1),
            b2: flags.b2.or(self.b2),
            beta0: flags.beta0.or(self.beta0),
            gamma: flags.gamma.or(self.gamma),
            k: flags.k.or(self.k),
            sign: flags.sign.or(self.sign),
            q: pair(flags.q)?.or(self.q),
            p: pair(flags.p)?.or(self.p),
            r: flags.r.or(self.r),
            theta: flags.theta.or(self.theta),
            pr: flags.pr.or(self.pr),
            ptheta: flags.ptheta.or(self.ptheta),
            dt: flags.dt.or(self.dt),
            steps: flags.steps.or(self.steps),
            integrator: flags.integrator.or(self.integrator),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
        })
    }

    pub fn from_args(mut args: RunArgs) -> Result<Self> {
        let base = match args.config.take() {
            Some(path) => RunConfig::from_file(&path)?,
            None => RunConfig::default(),
        };
        base.overridden_by(args)
    }

    pub fn signature(&self) -> Result<CKSignature> {
        resolve_signature(self.space.as_deref(), self.kappa1, self.kappa2)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let sig = self.signature()?;
        let coords: Coords = self.coords.as_deref().unwrap_or("beltrami").parse()?;
        let family: Family = self.family.as_deref().unwrap_or("free").parse()?;
        let variant: Variant = self.variant.as_deref().unwrap_or("integrable").parse()?;
        let params = ModelParams {
            z: self.z.unwrap_or(0.0),
            b1: self.b1.unwrap_or(1.0),
            b2: self.b2.unwrap_or(1.0),
            beta0: self.beta0.unwrap_or(0.0),
            gamma: self.gamma.unwrap_or(0.0),
            k: self.k.unwrap_or(0.0),
            sign: self.sign.unwrap_or(sig.space().default_sign()),
        };
        let spec = HamiltonianSpec::new(family, variant, coords, params, sig)?;
        let state = match coords {
            Coords::Beltrami => {
                if self.r.or(self.theta).or(self.pr).or(self.ptheta).is_some() {
                    return Err(Error::InvalidInput("--r/--theta/--pr/--ptheta need --coords polar".into()));
                }
                let [q1, q2] = self.q.unwrap_or([1.0, 2.0]);
                let [p1, p2] = self.p.unwrap_or([0.0, 0.0]);
                [q1, q2, p1, p2]
            }
            Coords::Polar => {
                if self.q.or(self.p).is_some() {
                    return Err(Error::InvalidInput("--q/--p need --coords beltrami".into()));
                }
                [
                    self.r.unwrap_or(1.0),
                    self.theta.unwrap_or(0.5),
                    self.pr.unwrap_or(0.0),
                    self.ptheta.unwrap_or(0.5),
                ]
            }
        };
        let dt = self.dt.unwrap_or(1e-3);
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("--dt must be positive, got {dt}")));
        }
        let integrator = match &self.integrator {
            Some(s) => s.parse()?,
            None => Integrator::default(),
        };
        Ok(Resolved {
            spec,
            state,
            dt,
            steps: self.steps.unwrap_or(10_000),
            integrator,
            out: self.out.clone(),
            format: self.format.unwrap_or(Format::Csv),
        })
    }
}

/// A validated run.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub spec: HamiltonianSpec,
    pub state: [f64; 4],
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// `--space` alone, `--kappa1/--kappa2` alone, or both when they agree.
/// Defaults to the Euclidean plane.
pub fn resolve_signature(space: Option<&str>, kappa1: Option<i64>, kappa2: Option<i64>) -> Result<CKSignature> {
    let from_kappas = match (kappa1, kappa2) {
        (Some(a), Some(b)) => Some(CKSignature::new(a, b)?),
        (None, None) => None,
        _ => return Err(Error::InvalidInput("--kappa1 and --kappa2 go together".into())),
    };
    let from_space = space.map(|s| s.parse::<Space>().map(Space::signature)).transpose()?;
    match (from_space, from_kappas) {
        (Some(a), Some(b)) if a != b => Err(Error::InvalidInput(format!(
            "--space {} is {a}, which disagrees with --kappa1/--kappa2 {b}",
            a.space()
        ))),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Ok(Space::Euclidean.signature()),
    }
}

pub fn csv_header(coords: Coords) -> &'static str {
    match coords {
        Coords::Beltrami => "t,q1,q2,p1,p2,H,C",
        Coords::Polar => "t,r,theta,pr,ptheta,H,C",
    }
}

/// CSV with 17 significant digits per number.
pub fn trajectory_csv(tr: &Trajectory, coords: Coords) -> String {
    let mut s = String::with_capacity(tr.len() * 160);
    s.push_str(csv_header(coords));
    s.push('\n');
    for i in 0..tr.len() {
        let x = tr.states[i];
        let row = [tr.times[i], x[0], x[1], x[2], x[3], tr.energy[i], tr.casimir[i]];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicReport {
    pub residual: f64,
    /// Turning times of `q1²` and `q2²`; the identity needs them equal.
    pub turning_times: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub spec: HamiltonianSpec,
    pub space: Space,
    pub initial_state: [f64; 4],
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub samples: usize,
    pub hamiltonian: f64,
    pub casimir: f64,
    pub energy_drift: f64,
    pub casimir_drift: f64,
    pub event: Option<FlowEvent>,
    pub conic: Option<ConicReport>,
}

/// Conic identity of a flat free Beltrami run, when its closed forms exist.
fn conic_report(run: &Resolved, tr: &Trajectory) -> Option<ConicReport> {
    let spec = &run.spec;
    if spec.family != Family::Free || spec.coords != Coords::Beltrami || spec.sig.k1() != 0.0 {
        return None;
    }
    let s0 = BeltramiState::from_array(run.state);
    let a = closed_form(ClosedFormKind::FlatQ1, &spec.params, spec.sig, &s0).ok()?;
    let b = closed_form(ClosedFormKind::FlatQ2, &spec.params, spec.sig, &s0).ok()?;
    let c = ConicConstants::from_state(&s0, &spec.params, spec.sig).ok()?;
    Some(ConicReport {
        residual: conic_residual(tr, &c),
        turning_times: [a.t0 + 0.0, b.t0 + 0.0],
    })
}

fn summarize(run: &Resolved, tr: &Trajectory) -> SimulationSummary {
    SimulationSummary {
        spec: run.spec,
        space: run.spec.sig.space(),
        initial_state: run.state,
        dt: run.dt,
        steps: run.steps,
        integrator: run.integrator,
        samples: tr.len(),
        hamiltonian: tr.energy.first().copied().unwrap_or(f64::NAN),
        casimir: tr.casimir.first().copied().unwrap_or(f64::NAN),
        energy_drift: tr.energy_drift(),
        casimir_drift: tr.casimir_drift(),
        event: tr.event.clone(),
        conic: conic_report(run, tr),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `<out>.json` next to a CSV output file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn event_error(event: &Option<FlowEvent>) -> Option<Error> {
    match event {
        Some(FlowEvent::SingularityReached { time, reason }) => {
            Some(Error::Domain(format!("flow stopped at t = {time}: {reason}")))
        }
        Some(FlowEvent::NonFiniteState { time }) => Some(Error::Domain(format!("flow became non-finite at t = {time}"))),
        None => None,
    }
}

pub fn cmd_spaces(format: Format) -> String {
    let rows: Vec<_> = Space::ALL
        .iter()
        .map(|s| {
            let sig = s.signature();
            (s.name(), sig.kappa1(), sig.kappa2(), s.is_degenerate(), s.default_sign())
        })
        .collect();
    match format {
        Format::Json => to_json(
            &rows
                .iter()
                .map(|(name, k1, k2, deg, sign)| {
                    json!({"name": name, "kappa1": k1, "kappa2": k2, "degenerate": deg, "default_sign": sign})
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("name,kappa1,kappa2,degenerate,default_sign\n");
            for (name, k1, k2, deg, sign) in &rows {
                s.push_str(&format!("{name},{k1},{k2},{deg},{sign}\n"));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:<16}{:>7}{:>7}  {:<11}{:>5}\n", "space", "kappa1", "kappa2", "degenerate", "sign");
            for (name, k1, k2, deg, sign) in &rows {
                s.push_str(&format!("{name:<16}{k1:>7}{k2:>7}  {deg:<11}{sign:>5}\n"));
            }
            s
        }
    }
}

/// Runs the flow and writes CSV (plus a JSON sidecar when writing to a
/// file) or a single JSON document.
pub fn cmd_simulate(run: &Resolved) -> Result<SimulationSummary> {
    let tr = hamiltonian_flow(&run.spec, run.state, run.dt, run.steps, run.integrator)?;
    let summary = summarize(run, &tr);
    match run.format {
        Format::Json => {
            let doc = json!({
                "summary": &summary,
                "times": &tr.times,
                "states": &tr.states,
                "energy": &tr.energy,
                "casimir": &tr.casimir,
            });
            write_output(run.out.as_deref(), &to_json(&doc))?;
        }
        Format::Csv | Format::Text => {
            let csv = trajectory_csv(&tr, run.spec.coords);
            write_output(run.out.as_deref(), &csv)?;
            match &run.out {
                Some(path) => write_output(Some(&sidecar_path(path)), &to_json(&summary))?,
                None => eprint!("{}", to_json(&summary)),
            }
        }
    }
    Ok(summary)
}

pub fn cmd_verify(suite: Suite, samples: usize, seed: u64) -> Report {
    run_suite(suite, samples, seed)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitTrack {
    pub value: f64,
    pub drift: f64,
    pub event: Option<FlowEvent>,
    pub times: Vec<f64>,
    pub states: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub spec: HamiltonianSpec,
    pub space: Space,
    pub state: [f64; 4],
    pub fiber: SplitTrack,
    pub base: SplitTrack,
}

pub fn cmd_split(run: &Resolved) -> Result<SplitReport> {
    if !run.spec.sig.is_degenerate() {
        return Err(Error::InvalidInput(format!(
            "{} has kappa2 = {}; the base/fiber split needs a degenerate space, use `ckint simulate` for the full flow",
            run.spec.sig.space(),
            run.spec.sig.kappa2()
        )));
    }
    let split = split_base_fiber(&run.spec)?;
    let track = |value: f64, tr: Trajectory| SplitTrack {
        value,
        drift: tr.energy_drift(),
        event: tr.event,
        times: tr.times,
        states: tr.states,
    };
    let fiber = fiber_flow(&split, run.state, run.dt, run.steps, run.integrator)?;
    let base = base_flow(&split, run.state, run.dt, run.steps, run.integrator)?;
    Ok(SplitReport {
        spec: run.spec,
        space: run.spec.sig.space(),
        state: run.state,
        fiber: track(split.fiber().eval(&run.state)?, fiber),
        base: track(split.base().eval(&run.state)?, base),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryRow {
    pub r: f64,
    pub g_rr: Option<f64>,
    pub g_thth: Option<f64>,
    pub fiber_g_thth: Option<f64>,
    pub curvature: Option<f64>,
    pub note: Option<String>,
}

pub fn cmd_geometry(sig: CKSignature, radii: &[f64]) -> Vec<GeometryRow> {
    radii
        .iter()
        .map(|&r| {
            let metric = metric_at(r, sig);
            let curvature = gaussian_curvature(r, sig);
            let note = match (&metric, &curvature) {
                (Err(e), _) | (Ok(_), Err(e)) => Some(e.to_string()),
                _ => None,
            };
            let m = metric.ok();
            GeometryRow {
                r,
                g_rr: m.map(|m| m.g_rr),
                g_thth: m.map(|m| m.g_thth),
                fiber_g_thth: m.map(|m| m.fiber_g_thth),
                curvature: curvature.ok(),
                note,
            }
        })
        .collect()
}

fn geometry_csv(rows: &[GeometryRow]) -> String {
    let cell = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.16e}"));
    let mut s = String::from("r,g_rr,g_thth,fiber_g_thth,K\n");
    for row in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            cell(Some(row.r)),
            cell(row.g_rr),
            cell(row.g_thth),
            cell(row.fiber_g_thth),
            cell(row.curvature)
        ));
    }
    s
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Spaces { format } => {
            write_output(None, &cmd_spaces(format))?;
            Ok(EXIT_OK)
        }
        Command::Simulate(args) => {
            let run = RunConfig::from_args(args)?.resolve()?;
            let summary = cmd_simulate(&run)?;
            match event_error(&summary.event) {
                Some(e) => Err(e),
                None => Ok(EXIT_OK),
            }
        }
        Command::Verify(args) => {
            let suite: Suite = args.suite.parse()?;
            let report = cmd_verify(suite, args.samples, args.seed);
            write_output(args.out.as_deref(), &to_json(&report))?;
            for c in report.failures() {
                eprintln!("FAIL {} [{}]: {:e} > {:e}", c.name, c.space, c.max_residual, c.tolerance);
            }
            Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Split(args) => {
            let run = RunConfig::from_args(args)?.resolve()?;
            let report = cmd_split(&run)?;
            write_output(run.out.as_deref(), &to_json(&report))?;
            Ok(EXIT_OK)
        }
        Command::Geometry(args) => {
            let sig = resolve_signature(Some(&args.space), args.kappa1, args.kappa2)
                .or_else(|_| resolve_signature(None, args.kappa1, args.kappa2))?;
            let radii = if args.r.is_empty() {
                (1..=10).map(|i| 0.1 * f64::from(i)).collect()
            } else {
                args.r
            };
            let rows = cmd_geometry(sig, &radii);
            let text = match args.format {
                Format::Csv => geometry_csv(&rows),
                _ => to_json(&json!({"space": sig.space(), "rows": rows})),
            };
            write_output(args.out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses the process arguments, runs the command and maps the outcome
/// to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(f: impl FnOnce(&mut RunConfig)) -> RunConfig {
        let mut c = RunConfig::default();
        f(&mut c);
        c
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn signature_sources() {
        assert_eq!(resolve_signature(None, None, None).unwrap(), Space::Euclidean.signature());
        assert_eq!(resolve_signature(Some("galilei"), Some(0), Some(0)).unwrap(), Space::Galilei.signature());
        assert_eq!(resolve_signature(None, Some(1), Some(-1)).unwrap(), Space::AntiDeSitter.signature());
        assert!(resolve_signature(Some("sphere"), Some(0), Some(0)).is_err());
        assert!(resolve_signature(None, Some(1), None).is_err());
        assert!(resolve_signature(None, Some(2), Some(0)).is_err());
    }

    #[test]
    fn presets_carry_default_sign() {
        let run = cfg(|c| c.space = Some("minkowski".into())).resolve().unwrap();
        assert_eq!(run.spec.params.sign, -1.0);
        let run = cfg(|c| {
            c.space = Some("minkowski".into());
            c.sign = Some(1.0);
        })
        .resolve()
        .unwrap();
        assert_eq!(run.spec.params.sign, 1.0);
    }

    #[test]
    fn flags_override_file() {
        let file = cfg(|c| {
            c.space = Some("sphere".into());
            c.z = Some(0.3);
            c.q = Some([0.5, 0.7]);
        });
        let flags = RunArgs {
            z: Some(-0.2),
            ..RunArgs::default()
        };
        let merged = file.overridden_by(flags).unwrap();
        assert_eq!(merged.z, Some(-0.2));
        assert_eq!(merged.space.as_deref(), Some("sphere"));
        assert_eq!(merged.q, Some([0.5, 0.7]));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"zz": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"space": "galilei", "q": [1, 2], "format": "json"}"#).unwrap();
        assert_eq!(c.q, Some([1.0, 2.0]));
        assert_eq!(c.format, Some(Format::Json));
    }

    #[test]
    fn chart_specific_state_flags() {
        assert!(cfg(|c| c.r = Some(0.5)).resolve().is_err());
        assert!(cfg(|c| {
            c.coords = Some("polar".into());
            c.q = Some([1.0, 1.0]);
        })
        .resolve()
        .is_err());
    }

    #[test]
    fn csv_layout() {
        let run = cfg(|c| c.steps = Some(3)).resolve().unwrap();
        let tr = hamiltonian_flow(&run.spec, run.state, run.dt, run.steps, run.integrator).unwrap();
        let csv = trajectory_csv(&tr, Coords::Beltrami);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,q1,q2,p1,p2,H,C");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0"));
        assert_eq!(csv_header(Coords::Polar), "t,r,theta,pr,ptheta,H,C");
    }

    #[test]
    fn default_euclidean_run_satisfies_the_conic() {
        let run = cfg(|c| {
            c.steps = Some(2000);
            c.out = Some(PathBuf::from("/nonexistent/unused.csv"));
        })
        .resolve()
        .unwrap();
        let tr = hamiltonian_flow(&run.spec, run.state, run.dt, run.steps, run.integrator).unwrap();
        let conic = conic_report(&run, &tr).unwrap();
        assert!(conic.residual < 1e-6, "{}", conic.residual);
        assert_eq!(conic.turning_times, [0.0, 0.0]);
    }

    #[test]
    fn split_needs_degenerate_space() {
        let run = cfg(|c| c.space = Some("sphere".into())).resolve().unwrap();
        let err = cmd_split(&run).unwrap_err().to_string();
        assert!(err.contains("simulate"), "{err}");
    }

    #[test]
    fn split_values_for_galilei_sw() {
        let run = cfg(|c| {
            c.space = Some("galilei".into());
            c.coords = Some("polar".into());
            c.family = Some("sw".into());
            c.b2 = Some(1.0);
            c.beta0 = Some(1.0);
            c.r = Some(2.0);
            c.pr = Some(1.0);
            c.steps = Some(10);
        })
        .resolve()
        .unwrap();
        let rep = cmd_split(&run).unwrap();
        // ½(p_r² + 4b2/r²) + β0 r²
        assert!((rep.base.value - (0.5 * (1.0 + 1.0) + 4.0)).abs() < 1e-12);
        assert_eq!(rep.fiber.states.len(), 11);
    }

    #[test]
    fn spaces_listing() {
        let rows: serde_json::Value = serde_json::from_str(&cmd_spaces(Format::Json)).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 9);
        let galilei = rows.iter().find(|r| r["name"] == "galilei").unwrap();
        assert_eq!(galilei["kappa1"], 0);
        assert_eq!(galilei["kappa2"], 0);
        assert_eq!(galilei["degenerate"], true);
        let minkowski = rows.iter().find(|r| r["name"] == "minkowski").unwrap();
        assert_eq!(minkowski["default_sign"], -1.0);
        assert_eq!(cmd_spaces(Format::Text).lines().count(), 10);
    }

    #[test]
    fn geometry_rows_report_degenerate_curvature() {
        let rows = cmd_geometry(Space::Galilei.signature(), &[0.5]);
        assert_eq!(rows[0].g_rr, Some(1.0));
        assert!(rows[0].curvature.is_none());
        assert!(rows[0].note.as_deref().unwrap().contains("degenerate"));
        let rows = cmd_geometry(Space::Sphere.signature(), &[0.5]);
        let k = rows[0].curvature.unwrap();
        assert!((k + 0.5f64.sin().powi(2) / (2.0 * 0.5f64.cos())).abs() < 1e-4);
    }
}
