use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use kleinx_core::acceptance::{self, CriterionReport, Settings};
use kleinx_core::extremal;
use kleinx_core::geometry::{self, GeometryError, HarmonicityReport, ScalingReport};
use kleinx_core::odeint::{Tolerances, TrajectoryRecord};
use kleinx_core::sturm::{self, MultiplicityReport, Parity, SturmError};
use kleinx_core::sweep::{self, LowerEvidence, SweepConfig, SweepError, SweepGrid, SweepReport, UpperEvidence};
use kleinx_core::systems::{self, first_integrals, PhiState, ShootingParameter, SystemError, SystemForm};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::output::{self, csv_row, float};

fn settings(cfg: &RunConfig) -> Settings {
    Settings {
        tol: tolerances(cfg),
        event_tol: cfg.event_tol,
        y_max: cfg.y_max,
        workers: cfg.workers,
    }
}

fn tolerances(cfg: &RunConfig) -> Tolerances {
    Tolerances {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
    }
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    SweepConfig {
        tol: tolerances(cfg),
        event_tol: cfg.event_tol,
        y_max: cfg.y_max,
        workers: cfg.workers,
    }
}

fn system_error(e: SystemError) -> CliError {
    match e {
        SystemError::Domain(_) | SystemError::InvalidArgument(_) => CliError::Usage(e.to_string()),
        other => CliError::numerical(other),
    }
}

fn sweep_error(e: SweepError) -> CliError {
    match e {
        SweepError::Domain { .. } | SweepError::InvalidGrid(_) => CliError::Usage(e.to_string()),
        SweepError::System(s) => system_error(s),
        other => CliError::numerical(other),
    }
}

fn sturm_error(e: SturmError) -> CliError {
    match e {
        SturmError::InvalidMode(_) | SturmError::InvalidGrid(_) | SturmError::InvalidCount { .. } => {
            CliError::Usage(e.to_string())
        }
        other => CliError::numerical(other),
    }
}

fn geometry_error(e: GeometryError) -> CliError {
    match e {
        GeometryError::InvalidIndices { .. } | GeometryError::InvalidGrid(_) => CliError::Usage(e.to_string()),
        other => CliError::numerical(other),
    }
}

pub fn verify(cfg: &RunConfig, json: bool) -> Result<(), CliError> {
    let reports = acceptance::run_all_with(&settings(cfg));
    if json {
        let text = serde_json::to_string_pretty(&reports).map_err(CliError::numerical)?;
        println!("{text}");
    } else {
        for r in &reports {
            println!("{r}");
        }
        let passed = reports.iter().filter(|r| r.passed).count();
        println!("{passed}/{} criteria passed", reports.len());
    }
    match first_failure(&reports) {
        None => Ok(()),
        Some(msg) => Err(CliError::Numerical(msg)),
    }
}

fn first_failure(reports: &[CriterionReport]) -> Option<String> {
    let r = reports.iter().find(|r| !r.passed)?;
    let check = r.checks.iter().find(|c| !c.passed).map(|c| c.label.as_str()).unwrap_or("unknown");
    Some(format!("criterion {} ({}) failed first at: {check}", r.id, r.title))
}

pub fn specfun_selftest() -> Result<(), CliError> {
    let report = acceptance::run(12).expect("criterion 12 exists");
    println!("{report}");
    match first_failure(std::slice::from_ref(&report)) {
        None => Ok(()),
        Some(msg) => Err(CliError::Numerical(msg)),
    }
}

#[derive(Debug, Serialize)]
struct DriftSummary {
    /// `E₀, E₁, E₂` at `y = 0`.
    initial_integrals: [f64; 3],
    /// Largest deviation of any of `E₀, E₁, E₂, κ₀, κ₁, κ₂` from its initial value.
    max_integral_drift: f64,
    max_constraint_defect: f64,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    p: f64,
    system: SystemForm,
    y_end: f64,
    drift: DriftSummary,
    trajectory: TrajectoryRecord,
}

/// Recovers full states from a trajectory. `syst12` leaves the sign of `φ₀`
/// open; it is chosen by continuity.
fn full_states(form: SystemForm, p: ShootingParameter, ys: &[f64], xs: &[Vec<f64>]) -> Vec<PhiState> {
    match form {
        SystemForm::Full => ys.iter().zip(xs).map(|(y, x)| PhiState::from_full(*y, x)).collect(),
        SystemForm::Syst01 => ys.iter().zip(xs).map(|(y, x)| PhiState::from_syst01(*y, x)).collect(),
        SystemForm::Syst12 => {
            let mut prev = systems::initial_state(p);
            let mut out = Vec::with_capacity(ys.len());
            for (y, x) in ys.iter().zip(xs) {
                let (p1, p2, d1, d2) = (x[0], x[1], x[2], x[3]);
                let r = (1.0 - p1 * p1 - p2 * p2).max(0.0).sqrt();
                let predicted = prev.phi[0] + prev.dphi[0] * (y - prev.y);
                let p0 = if predicted >= 0.0 { r } else { -r };
                let d0 = if r > 0.0 {
                    -(p1 * d1 + p2 * d2) / p0
                } else {
                    prev.dphi[0]
                };
                let s = PhiState {
                    y: *y,
                    phi: [p0, p1, p2],
                    dphi: [d0, d1, d2],
                };
                out.push(s);
                prev = s;
            }
            out
        }
    }
}

pub fn solve(cfg: &RunConfig, p: f64, y_end: Option<f64>, form: SystemForm, out: Option<&PathBuf>) -> Result<(), CliError> {
    let sp = ShootingParameter::new(p).map_err(system_error)?;
    let y_end = y_end.unwrap_or(2.0 * extremal::period());
    if !(y_end > 0.0 && y_end.is_finite()) {
        return Err(CliError::Usage(format!("y_end must be positive, got {y_end}")));
    }
    let traj = systems::solve(sp, form, y_end, tolerances(cfg)).map_err(system_error)?;
    let states = full_states(form, sp, traj.ys(), traj.states());
    let init = first_integrals(&systems::initial_state(sp)).as_array();
    let mut drift: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for s in &states {
        let now = first_integrals(s).as_array();
        drift = init.iter().zip(&now).fold(drift, |m, (a, b)| m.max((a - b).abs()));
        defect = defect.max(s.constraint_defects().max_abs());
    }
    let report = SolveReport {
        p,
        system: form,
        y_end,
        drift: DriftSummary {
            initial_integrals: [init[0], init[1], init[2]],
            max_integral_drift: drift,
            max_constraint_defect: defect,
        },
        trajectory: traj.to_record(),
    };
    let path = output::target(out, &cfg.output_dir, "trajectory.json");
    output::write_json(&path, &report)?;
    println!("wrote {} ({} nodes)", path.display(), traj.ys().len());
    println!("E0 = {}, E1 = {}, E2 = {}", init[0], init[1], init[2]);
    println!("max first-integral drift = {drift:e}");
    println!("max constraint defect = {defect:e}");
    Ok(())
}

pub struct SweepArgs {
    pub steps: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut text = String::from("p,y_half,cot_alpha,E0,E1,E2,rotation_ok\n");
    for r in &report.records {
        let _ = writeln!(
            text,
            "{},{}",
            csv_row(&[r.p, r.y_half, r.cot_alpha, r.e0, r.e1, r.e2]),
            r.rotation_ok
        );
    }
    text
}

pub fn sweep(cfg: &RunConfig, args: SweepArgs) -> Result<(), CliError> {
    let default = SweepGrid::default();
    let grid = SweepGrid {
        p_min: args.p_min.unwrap_or(default.p_min),
        p_max: args.p_max.unwrap_or(default.p_max),
        steps: args.steps.unwrap_or(cfg.sweep_steps),
    };
    let mut report = sweep::run_sweep(grid, &sweep_config(cfg)).map_err(sweep_error)?;
    report.records.sort_by(|a, b| a.p.total_cmp(&b.p));
    let path = match cfg.format {
        OutputFormat::Csv => {
            let path = output::target(args.out.as_ref(), &cfg.output_dir, "sweep.csv");
            output::write_text(&path, &sweep_csv(&report))?;
            path
        }
        OutputFormat::Json => {
            let path = output::target(args.out.as_ref(), &cfg.output_dir, "sweep.json");
            output::write_json(&path, &report)?;
            path
        }
    };
    println!("wrote {} ({} points, numerical evidence)", path.display(), report.records.len());
    println!("sign changes of cot α: {}", report.sign_changes.len());
    if let Some(root) = report.refined_root {
        println!("refined zero of cot α: p = {}", float(root));
    }
    if report.failures > 0 {
        return Err(CliError::Numerical(format!("{} sweep points failed", report.failures)));
    }
    Ok(())
}

pub fn rule_out(cfg: &RunConfig, p: f64, out: Option<&PathBuf>) -> Result<(), CliError> {
    let ev: UpperEvidence = sweep::rule_out_upper(p, &sweep_config(cfg)).map_err(sweep_error)?;
    let path = output::target(out, &cfg.output_dir, "rule_out.json");
    output::write_json(&path, &ev)?;
    println!("wrote {}", path.display());
    if ev.supports_theorem() {
        println!("p = {p}: no admissible periodic solution (numerical evidence)");
        Ok(())
    } else {
        Err(CliError::Numerical(format!("p = {p}: evidence inconclusive")))
    }
}

pub fn interval_check(cfg: &RunConfig, p: f64, out: Option<&PathBuf>) -> Result<(), CliError> {
    let ev: LowerEvidence = sweep::interval_checks(p, &sweep_config(cfg)).map_err(sweep_error)?;
    let path = output::target(out, &cfg.output_dir, "interval_check.json");
    output::write_json(&path, &ev)?;
    println!("wrote {}", path.display());
    if ev.passed {
        println!("p = {p}: structure checks passed (numerical evidence)");
        Ok(())
    } else {
        Err(CliError::Numerical(format!("p = {p}: structure checks failed")))
    }
}

#[derive(Debug, Serialize)]
struct EigenRow {
    eigenvalue: f64,
    parity: Parity,
    zero_count: usize,
    admissible: bool,
    rayleigh_defect: f64,
    refinement_shift: f64,
}

#[derive(Debug, Serialize)]
struct ChannelTable {
    k: u32,
    eigenvalues: Vec<EigenRow>,
}

#[derive(Debug, Serialize)]
struct SturmReport {
    n: usize,
    channels: Vec<ChannelTable>,
    multiplicity: MultiplicityReport,
}

pub fn sturm(cfg: &RunConfig, k: Option<u32>, n: Option<usize>, count: usize, out: Option<&PathBuf>) -> Result<(), CliError> {
    let n = n.unwrap_or(cfg.sturm_n);
    if let Some(k) = k.filter(|k| *k > 2) {
        return Err(CliError::Usage(format!("channel k must be 0, 1 or 2, got {k}")));
    }
    let profile = extremal::metric_profile(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let spectra = (0..3)
        .map(|k| sturm::periodic_spectrum(k, &profile, n, count))
        .collect::<Result<Vec<_>, _>>()
        .map_err(sturm_error)?;
    let multiplicity = sturm::verify_multiplicity(&spectra);
    let channels = spectra
        .iter()
        .filter(|lines| k.is_none_or(|k| lines.first().is_some_and(|l| l.k_index == k)))
        .map(|lines| ChannelTable {
            k: lines[0].k_index,
            eigenvalues: lines
                .iter()
                .map(|l| EigenRow {
                    eigenvalue: l.eigenvalue,
                    parity: l.parity,
                    zero_count: l.zero_count,
                    admissible: sturm::is_admissible(l.k_index, l.parity),
                    rayleigh_defect: l.rayleigh_defect,
                    refinement_shift: l.refinement_shift,
                })
                .collect(),
        })
        .collect();
    let report = SturmReport {
        n,
        channels,
        multiplicity,
    };
    let path = output::target(out, &cfg.output_dir, "sturm.json");
    output::write_json(&path, &report)?;
    println!("wrote {}", path.display());
    println!(
        "multiplicity of λ = 1: {}; first positive eigenvalue: {}",
        report.multiplicity.multiplicity_at_one,
        if report.multiplicity.passed { "yes" } else { "no" }
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Csv,
    Obj,
}

pub fn parse_projection(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated indices, got `{s}`"));
    }
    let mut out = [0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        let i: usize = part.parse().map_err(|_| format!("bad coordinate index `{part}`"))?;
        if !(1..=5).contains(&i) {
            return Err(format!("coordinate index {i} outside 1..=5"));
        }
        *slot = i - 1;
    }
    Ok(out)
}

/// `nx × ny` samples over `x ∈ [0, π)`, `y ∈ [−a/2, a/2)`, row-major in `x`.
pub fn embedding_grid(nx: usize, ny: usize) -> Vec<extremal::EmbeddingPoint> {
    let a = extremal::period();
    let mut pts = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let x = PI * i as f64 / nx as f64;
        for j in 0..ny {
            let y = -0.5 * a + a * j as f64 / ny as f64;
            pts.push(extremal::embed(x, y));
        }
    }
    pts
}

pub fn embed(
    cfg: &RunConfig,
    nx: Option<usize>,
    ny: Option<usize>,
    format: MeshFormat,
    projection: [usize; 3],
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let nx = nx.unwrap_or(cfg.geometry_grid);
    let ny = ny.unwrap_or(cfg.geometry_grid);
    if nx < 2 || ny < 2 {
        return Err(CliError::Usage(format!("mesh needs at least 2×2 points, got {nx}×{ny}")));
    }
    let pts = embedding_grid(nx, ny);
    let worst = pts.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    let (path, text) = match format {
        MeshFormat::Csv => {
            let mut text = String::from("x,y,c1,c2,c3,c4,c5\n");
            for p in &pts {
                let c = p.coords;
                let _ = writeln!(text, "{}", csv_row(&[p.x, p.y, c[0], c[1], c[2], c[3], c[4]]));
            }
            (output::target(out, &cfg.output_dir, "embedding.csv"), text)
        }
        MeshFormat::Obj => {
            let verts: Vec<[f64; 3]> = pts.iter().map(|p| projection.map(|i| p.coords[i])).collect();
            (output::target(out, &cfg.output_dir, "embedding.obj"), output::obj_grid(&verts, nx, ny, false))
        }
    };
    output::write_text(&path, &text)?;
    println!("wrote {} ({} vertices)", path.display(), pts.len());
    println!("max | |Φ| − 1 | = {worst:e}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct IdentityReport {
    scaling: ScalingReport,
    /// Largest residual of the two ℘–cn identities over `z ∈ (−2, 2)`.
    max_identity_residual: f64,
    samples: usize,
    passed: bool,
}

pub enum GeometryTask {
    CheckIdentity,
    Lawson(u32, u32),
    Bipolar(u32, u32),
}

pub fn geometry(cfg: &RunConfig, task: GeometryTask, out: Option<&PathBuf>) -> Result<(), CliError> {
    let n = cfg.geometry_grid;
    match task {
        GeometryTask::CheckIdentity => {
            let scaling = geometry::verify_g0_scaling(n).map_err(geometry_error)?;
            let samples = 100;
            let mut worst: f64 = 0.0;
            for i in 0..samples {
                let z = -2.0 + 4.0 * (i as f64 + 0.5) / samples as f64;
                let (a, b) = geometry::wp_cn_identity(z).map_err(geometry_error)?;
                worst = worst.max(a).max(b);
            }
            let report = IdentityReport {
                passed: scaling.max_relative_error < 1e-8 && worst < 1e-9,
                scaling,
                max_identity_residual: worst,
                samples,
            };
            let path = output::target(out, &cfg.output_dir, "geometry_identity.json");
            output::write_json(&path, &report)?;
            println!("wrote {}", path.display());
            println!("pullback vs 2g₀ max relative error = {:e}", report.scaling.max_relative_error);
            println!("℘–cn identity residual = {worst:e}");
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Numerical("geometry identity check failed".into()))
            }
        }
        GeometryTask::Lawson(m, k) => {
            let mesh = geometry::lawson_mesh(m, k, n, n).map_err(geometry_error)?;
            let h: HarmonicityReport = geometry::lawson_harmonicity(m, k, n).map_err(geometry_error)?;
            let verts: Vec<[f64; 3]> = mesh.iter().map(|p| [p[0], p[1], p[2]]).collect();
            let path = output::target(out, &cfg.output_dir, &format!("lawson_{m}_{k}.obj"));
            output::write_text(&path, &output::obj_grid(&verts, n, n, true))?;
            println!("wrote {} ({} vertices)", path.display(), verts.len());
            println!("max |Δτ + 2τ| = {:e}, max orthogonality defect = {:e}", h.max_tension, h.max_orthogonality_defect);
            Ok(())
        }
        GeometryTask::Bipolar(m, k) => {
            let mut text = String::from("u,v,E_coef,G_coef\n");
            for i in 0..n {
                let u = 2.0 * PI * i as f64 / n as f64;
                for j in 0..n {
                    let v = 2.0 * PI * j as f64 / n as f64;
                    let c = geometry::bipolar_metric(m, k, u, v).map_err(geometry_error)?;
                    let _ = writeln!(text, "{}", csv_row(&[u, v, c.e_coef, c.g_coef]));
                }
            }
            let path = output::target(out, &cfg.output_dir, &format!("bipolar_{m}_{k}.csv"));
            output::write_text(&path, &text)?;
            println!("wrote {} ({} rows)", path.display(), n * n);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_parsing() {
        assert_eq!(parse_projection("1,2,4").unwrap(), [0, 1, 3]);
        assert_eq!(parse_projection(" 5, 3,1 ").unwrap(), [4, 2, 0]);
        assert!(parse_projection("1,2").is_err());
        assert!(parse_projection("0,1,2").is_err());
        assert!(parse_projection("1,2,6").is_err());
    }

    #[test]
    fn syst12_reconstruction_matches_full() {
        let sp = ShootingParameter::new(systems::EXTREMAL_P).unwrap();
        let tol = Tolerances::default();
        let full = systems::solve(sp, SystemForm::Full, 3.0, tol).unwrap();
        let part = systems::solve(sp, SystemForm::Syst12, 3.0, tol).unwrap();
        let states = full_states(SystemForm::Syst12, sp, part.ys(), part.states());
        for s in states {
            let want = full.eval(s.y).unwrap();
            assert!((s.phi[0] - want[0]).abs() < 1e-7, "y = {}", s.y);
        }
    }
}
