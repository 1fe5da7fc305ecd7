//! Half-period shooting, the intersection angle `α(p)`, the parameter sweep
//! and the interval checks for `0 < p < √3/2` and `√3/2 < p < 1`.
//!
//! All results here are numerical evidence, not proofs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odeint::{self, Direction, EventSpec, OdeError, Tolerances, Trajectory};
use crate::systems::{
    self, first_integrals, initial_state, integrals_from_parameter, to_spherical_a, PhiState, ShootingParameter,
    SystemError, SEPARATRIX_P,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("p = {p} outside the admissible range ({lo}, {hi})")]
    Domain { p: f64, lo: f64, hi: f64 },
    #[error("φ₁ has no positive zero before y = {y_max} for p = {p}")]
    NoCrossing { p: f64, y_max: f64 },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("could not build worker pool: {0}")]
    WorkerPool(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Shared integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub tol: Tolerances,
    /// Root-location tolerance for events.
    pub event_tol: f64,
    /// Cutoff for crossing searches.
    pub y_max: f64,
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            event_tol: odeint::DEFAULT_EVENT_TOL,
            y_max: 50.0,
            workers: 4,
        }
    }
}

fn rotation_parameter(p: f64) -> Result<ShootingParameter, SweepError> {
    if p > 0.0 && p < SEPARATRIX_P {
        Ok(ShootingParameter::new(p)?)
    } else {
        Err(SweepError::Domain {
            p,
            lo: 0.0,
            hi: SEPARATRIX_P,
        })
    }
}

/// First positive zero of `φ₁` and the state there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub p: f64,
    pub y_half: f64,
    pub state: PhiState,
}

impl Crossing {
    /// `φ₀'/φ₁'` at the crossing.
    pub fn cot_alpha(&self) -> f64 {
        self.state.dphi[0] / self.state.dphi[1]
    }
}

fn crossing_on_syst01(p: ShootingParameter, cfg: &SweepConfig) -> Result<(Crossing, Trajectory), SweepError> {
    let x0 = initial_state(p).to_syst01();
    let ev = EventSpec::new(|_: f64, x: &[f64]| x[1]).direction(Direction::Falling).tolerance(cfg.event_tol);
    let (traj, hit) = odeint::integrate_until(systems::syst01_field, 0.0, &x0, cfg.y_max, cfg.tol, &ev)?;
    let hit = hit.ok_or(SweepError::NoCrossing {
        p: p.value(),
        y_max: cfg.y_max,
    })?;
    let state = PhiState::from_syst01(hit.y, &hit.state);
    Ok((
        Crossing {
            p: p.value(),
            y_half: hit.y,
            state,
        },
        traj,
    ))
}

/// Integrates `syst01` from `initial_state(p)` to the first positive zero of `φ₁`.
pub fn half_period_crossing(p: f64, cfg: &SweepConfig) -> Result<Crossing, SweepError> {
    Ok(crossing_on_syst01(rotation_parameter(p)?, cfg)?.0)
}

/// The same crossing computed with the full six-dimensional system.
pub fn half_period_crossing_full(p: f64, cfg: &SweepConfig) -> Result<Crossing, SweepError> {
    let sp = rotation_parameter(p)?;
    let x0 = initial_state(sp).to_full();
    let ev = EventSpec::new(|_: f64, x: &[f64]| x[1]).direction(Direction::Falling).tolerance(cfg.event_tol);
    let (_, hit) = odeint::integrate_until(systems::full_field, 0.0, &x0, cfg.y_max, cfg.tol, &ev)?;
    let hit = hit.ok_or(SweepError::NoCrossing { p, y_max: cfg.y_max })?;
    Ok(Crossing {
        p,
        y_half: hit.y,
        state: PhiState::from_full(hit.y, &hit.state),
    })
}

/// The same crossing from the `θ`-parametrized system, integrated to `θ = π`.
pub fn half_period_crossing_theta(p: f64, cfg: &SweepConfig) -> Result<Crossing, SweepError> {
    let sp = rotation_parameter(p)?;
    let traj = systems::solve_sweep_param(sp, std::f64::consts::PI, cfg.tol)?;
    let end = traj.final_state();
    let state = systems::sweep_param_state(std::f64::consts::PI, end);
    Ok(Crossing {
        p,
        y_half: end[2],
        state,
    })
}

/// `cot α(p) = φ₀'(y(p)) / φ₁'(y(p))`.
pub fn cot_alpha(p: f64, cfg: &SweepConfig) -> Result<f64, SweepError> {
    Ok(half_period_crossing(p, cfg)?.cot_alpha())
}

/// One grid point of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p: f64,
    pub y_half: f64,
    pub cot_alpha: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    /// Largest deviation of the integrals at the crossing from their values
    /// as functions of `p`.
    pub integral_drift: f64,
    pub rotation_ok: bool,
    pub phi2_positive: bool,
    pub wronskian_nonzero: bool,
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(p: f64, err: SweepError) -> Self {
        Self {
            p,
            y_half: f64::NAN,
            cot_alpha: f64::NAN,
            e0: f64::NAN,
            e1: f64::NAN,
            e2: f64::NAN,
            integral_drift: f64::NAN,
            rotation_ok: false,
            phi2_positive: false,
            wronskian_nonzero: false,
            error: Some(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Thresholds below which `φ₂` or the Wronskian count as vanishing.
const VANISHING: f64 = 1e-8;

/// Evaluates one sweep point; failures are recorded, not raised.
pub fn sweep_point(p: f64, cfg: &SweepConfig) -> SweepRecord {
    match sweep_point_inner(p, cfg) {
        Ok(r) => r,
        Err(e) => SweepRecord::failed(p, e),
    }
}

fn sweep_point_inner(p: f64, cfg: &SweepConfig) -> Result<SweepRecord, SweepError> {
    let sp = rotation_parameter(p)?;
    let (crossing, traj) = crossing_on_syst01(sp, cfg)?;
    let fi = first_integrals(&crossing.state);
    let (e0, e1, e2) = integrals_from_parameter(p);
    let drift = (fi.e0 - e0).abs().max((fi.e1 - e1).abs()).max((fi.e2 - e2).abs());
    let mut min_r2 = f64::INFINITY;
    let mut max_w = f64::NEG_INFINITY;
    let mut min_abs_w = f64::INFINITY;
    for (y, x) in traj.ys().iter().zip(traj.states()) {
        if *y > crossing.y_half {
            break;
        }
        let w = x[1] * x[2] - x[0] * x[3];
        min_r2 = min_r2.min(1.0 - x[0] * x[0] - x[1] * x[1]);
        max_w = max_w.max(w);
        min_abs_w = min_abs_w.min(w.abs());
    }
    Ok(SweepRecord {
        p,
        y_half: crossing.y_half,
        cot_alpha: crossing.cot_alpha(),
        e0: fi.e0,
        e1: fi.e1,
        e2: fi.e2,
        integral_drift: drift,
        // θ' = −W/(φ₀² + φ₁²) in the (φ₀, φ₁)-plane
        rotation_ok: max_w < 0.0,
        phi2_positive: min_r2 > VANISHING,
        wronskian_nonzero: min_abs_w > VANISHING,
        error: None,
    })
}

/// Uniform grid `p_min, …, p_max` with `steps` points (both ends included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
}

impl Default for SweepGrid {
    /// `p = √3·j/2000` for `j = 1, …, 999`.
    fn default() -> Self {
        Self {
            p_min: 3f64.sqrt() / 2000.0,
            p_max: 3f64.sqrt() * 999.0 / 2000.0,
            steps: 999,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.p_min > 0.0 && self.p_min < self.p_max && self.p_max < SEPARATRIX_P) {
            return Err(SweepError::InvalidGrid(format!(
                "need 0 < p_min < p_max < √3/2, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if self.steps < 2 {
            return Err(SweepError::InvalidGrid(format!("need at least 2 points, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                // p_min·(n − i)/n + p_max·i/n keeps both ends exact
                (self.p_min * (n - i) as f64 + self.p_max * i as f64) / n as f64
            })
            .collect()
    }
}

/// Least-squares fit `y_half ≈ slope·|ln d| + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

fn log_fit(pairs: impl Iterator<Item = (f64, f64)>) -> Option<LogFit> {
    let pts: Vec<(f64, f64)> = pairs.filter(|(d, y)| *d > 0.0 && y.is_finite()).map(|(d, y)| (d.ln().abs(), y)).collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LogFit {
        slope,
        intercept: my - slope * mx,
        points: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    /// Indices `j` with `cot α` changing sign between records `j` and `j+1`.
    pub sign_changes: Vec<usize>,
    /// Bisection-refined zero of `cot α` inside the first bracket.
    pub refined_root: Option<f64>,
    /// Sign changes of the forward differences of `cot α`.
    pub monotonicity_violations: usize,
    pub failures: usize,
    /// Growth of `y_half` near `p = 0` (against `|ln p|`).
    pub fit_low: Option<LogFit>,
    /// Growth of `y_half` near `p = √3/2` (against `|ln(√3/2 − p)|`).
    pub fit_high: Option<LogFit>,
}

fn strict_sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign changes of a sequence, ignoring exact zeros.
pub fn sign_change_indices(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (i, &v) in values.iter().enumerate() {
        let s = strict_sign(v);
        if s == 0 || !v.is_finite() {
            continue;
        }
        if let Some((j, t)) = last {
            if t != s {
                out.push(j);
            }
        }
        last = Some((i, s));
    }
    out
}

/// Refines a sign change of `cot α` on `[a, b]` to `tol`.
pub fn refine_root(a: f64, b: f64, tol: f64, cfg: &SweepConfig) -> Result<f64, SweepError> {
    let fa = cot_alpha(a, cfg)?;
    let fb = cot_alpha(b, cfg)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(SweepError::InvalidGrid(format!("no sign change on [{a}, {b}]")));
    }
    let mut failure = None;
    let root = odeint::brent(
        |p| match cot_alpha(p, cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        fa,
        fb,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

const FIT_POINTS: usize = 25;

/// Evaluates `cot α` over the grid on `cfg.workers` threads. The records
/// come back in grid order whatever the worker count.
pub fn run_sweep(grid: SweepGrid, cfg: &SweepConfig) -> Result<SweepReport, SweepError> {
    grid.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| SweepError::WorkerPool(e.to_string()))?;
    let points = grid.points();
    let records: Vec<SweepRecord> = pool.install(|| points.par_iter().map(|&p| sweep_point(p, cfg)).collect());
    let ok: Vec<&SweepRecord> = records.iter().filter(|r| r.is_ok()).collect();
    let cots: Vec<f64> = ok.iter().map(|r| r.cot_alpha).collect();
    let sign_changes: Vec<usize> = sign_change_indices(&cots)
        .into_iter()
        .map(|j| records.iter().position(|r| r.p == ok[j].p).expect("record exists"))
        .collect();
    let diffs: Vec<f64> = cots.windows(2).map(|w| w[1] - w[0]).collect();
    let monotonicity_violations = sign_change_indices(&diffs).len();
    let refined_root = match sign_changes.first() {
        Some(&j) => {
            let next = records[j + 1..].iter().find(|r| r.is_ok()).expect("bracket end exists");
            Some(refine_root(records[j].p, next.p, 1e-13, cfg)?)
        }
        None => None,
    };
    let fit_low = log_fit(ok.iter().take(FIT_POINTS).map(|r| (r.p, r.y_half)));
    let fit_high = log_fit(ok.iter().rev().take(FIT_POINTS).map(|r| (SEPARATRIX_P - r.p, r.y_half)));
    Ok(SweepReport {
        failures: records.len() - ok.len(),
        records,
        sign_changes,
        refined_root,
        monotonicity_violations,
        fit_low,
        fit_high,
    })
}

/// A chart-A point with `θ' = 0` and the two factors that `E₁`, `E₂`
/// reduce to there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub y: f64,
    /// `sin²ψ − ψ'²`
    pub first: f64,
    /// `sin²ψ − ψ'²/4`
    pub second: f64,
    /// Whether the signs match `E₁ > 0` and `E₂ < 0`.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperEvidence {
    pub p: f64,
    pub e1: f64,
    pub e2: f64,
    pub e1_positive: bool,
    pub e2_negative: bool,
    /// First positive zero of `φ₂`, if any before `y_max`.
    pub phi2_zero: Option<f64>,
    pub stationary_points: Vec<StationaryPoint>,
    /// Set when `φ₂` never vanishes and the orbit closes up.
    pub falsified: bool,
}

impl UpperEvidence {
    pub fn supports_theorem(&self) -> bool {
        self.e1_positive && self.e2_negative && self.phi2_zero.is_some() && !self.falsified
    }
}

const CLOSING_TOL: f64 = 1e-6;

/// Evidence that no admissible periodic solution exists for `√3/2 < p < 1`.
pub fn rule_out_upper(p: f64, cfg: &SweepConfig) -> Result<UpperEvidence, SweepError> {
    if !(p > SEPARATRIX_P && p < 1.0) {
        return Err(SweepError::Domain {
            p,
            lo: SEPARATRIX_P,
            hi: 1.0,
        });
    }
    let sp = ShootingParameter::new(p)?;
    let (_, e1, e2) = integrals_from_parameter(p);
    let x0 = initial_state(sp).to_full();
    let ev = EventSpec::new(|_: f64, x: &[f64]| x[2]).tolerance(cfg.event_tol);
    let (traj, hit) = odeint::integrate_until(systems::full_field, 0.0, &x0, cfg.y_max, cfg.tol, &ev)?;
    let stationary = EventSpec::new(|_: f64, x: &[f64]| x[2] * x[4] - x[1] * x[5]).tolerance(cfg.event_tol);
    let mut points = Vec::new();
    for e in odeint::find_events(&traj, &stationary) {
        let Ok(chart) = to_spherical_a(&PhiState::from_full(e.y, &e.state)) else {
            continue;
        };
        let s2 = chart.psi.sin().powi(2);
        let first = s2 - chart.dpsi.powi(2);
        let second = s2 - chart.dpsi.powi(2) / 4.0;
        points.push(StationaryPoint {
            y: e.y,
            first,
            second,
            consistent: (first > 0.0) == (e1 > 0.0) && (second < 0.0) == (e2 < 0.0),
        });
    }
    let falsified = hit.is_none() && orbit_closes(&traj, &x0);
    Ok(UpperEvidence {
        p,
        e1,
        e2,
        e1_positive: e1 > 0.0,
        e2_negative: e2 < 0.0,
        phi2_zero: hit.map(|h| h.y),
        stationary_points: points,
        falsified,
    })
}

fn orbit_closes(traj: &Trajectory, x0: &[f64]) -> bool {
    let ev = EventSpec::new(|_: f64, x: &[f64]| x[1]).direction(Direction::Rising);
    odeint::find_events(traj, &ev).iter().any(|e| {
        e.y > 1e-3
            && e.state
                .iter()
                .zip(x0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                < CLOSING_TOL
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerEvidence {
    pub p: f64,
    pub y_half: f64,
    /// Checks cover `[0, window_end]` with `window_end = 2·y_half`.
    pub window_end: f64,
    pub min_abs_phi2: f64,
    pub max_abs_phi2: f64,
    /// `min |φ₁φ₀' − φ₀φ₁'|`
    pub min_abs_wronskian: f64,
    /// `θ'` of the `(φ₀, φ₁)`-plane angle never changes sign.
    pub rotation_monotone: bool,
    pub passed: bool,
}

const WINDOW_SAMPLES: usize = 4000;

/// Structure checks for `0 < p < √3/2` over two half periods.
pub fn interval_checks(p: f64, cfg: &SweepConfig) -> Result<LowerEvidence, SweepError> {
    let crossing = half_period_crossing(p, cfg)?;
    let sp = ShootingParameter::new(p)?;
    let end = 2.0 * crossing.y_half;
    let traj = odeint::integrate(systems::full_field, 0.0, &initial_state(sp).to_full(), end, cfg.tol)?;
    let mut min_phi2 = f64::INFINITY;
    let mut max_phi2: f64 = 0.0;
    let mut min_w = f64::INFINITY;
    let mut w_pos = false;
    let mut w_neg = false;
    let mut x = vec![0.0; 6];
    let mut visit = |x: &[f64]| {
        let w = x[1] * x[3] - x[0] * x[4];
        min_phi2 = min_phi2.min(x[2].abs());
        max_phi2 = max_phi2.max(x[2].abs());
        min_w = min_w.min(w.abs());
        w_pos |= w > 0.0;
        w_neg |= w < 0.0;
    };
    for i in 0..=WINDOW_SAMPLES {
        traj.eval_into(end * i as f64 / WINDOW_SAMPLES as f64, &mut x);
        visit(&x);
    }
    for s in traj.states() {
        visit(s);
    }
    let rotation_monotone = !(w_pos && w_neg);
    Ok(LowerEvidence {
        p,
        y_half: crossing.y_half,
        window_end: end,
        min_abs_phi2: min_phi2,
        max_abs_phi2: max_phi2,
        min_abs_wronskian: min_w,
        rotation_monotone,
        passed: min_phi2 > VANISHING && min_w > VANISHING && max_phi2 < 1.0 && rotation_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::EXTREMAL_P;

    const K_HALF: f64 = 1.685_750_354_812_596;

    fn cfg() -> SweepConfig {
        SweepConfig::default()
    }

    #[test]
    fn extremal_crossing() {
        let c = half_period_crossing(EXTREMAL_P, &cfg()).unwrap();
        assert!((c.y_half - K_HALF).abs() < 1e-9);
        assert!(c.state.phi[1].abs() < 1e-10);
        assert!(c.state.phi[0] < 0.0);
        assert!(c.cot_alpha().abs() < 1e-8);
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(half_period_crossing(0.9, &cfg()), Err(SweepError::Domain { .. })));
        assert!(matches!(interval_checks(0.85 + 0.02, &cfg()), Err(SweepError::Domain { .. })));
        assert!(matches!(rule_out_upper(0.5, &cfg()), Err(SweepError::Domain { .. })));
    }

    #[test]
    fn bracketing_signs() {
        let lo = cot_alpha(0.3, &cfg()).unwrap();
        let hi = cot_alpha(0.8, &cfg()).unwrap();
        assert!(lo > 0.0 && hi < 0.0, "{lo} {hi}");
    }

    #[test]
    fn forms_agree() {
        for p in [0.05, 0.3, 0.55, EXTREMAL_P, 0.7, 0.85] {
            let a = half_period_crossing(p, &cfg()).unwrap();
            let b = half_period_crossing_full(p, &cfg()).unwrap();
            let c = half_period_crossing_theta(p, &cfg()).unwrap();
            assert!((a.cot_alpha() - b.cot_alpha()).abs() < 1e-7, "p={p}");
            assert!((a.cot_alpha() - c.cot_alpha()).abs() < 1e-7, "p={p}");
            assert!((a.y_half - c.y_half).abs() < 1e-8, "p={p}");
        }
    }

    #[test]
    fn time_reversal_from_crossing() {
        let c = half_period_crossing_full(0.4, &cfg()).unwrap();
        let mut x = c.state.to_full();
        for v in &mut x[3..] {
            *v = -*v;
        }
        let back = odeint::integrate(systems::full_field, 0.0, &x, c.y_half, cfg().tol).unwrap();
        let s0 = initial_state(ShootingParameter::new(0.4).unwrap()).to_full();
        let end = back.final_state();
        for i in 0..3 {
            assert!((end[i] - s0[i]).abs() < 1e-9);
            assert!((end[i + 3] + s0[i + 3]).abs() < 1e-9);
        }
    }

    #[test]
    fn record_integrals_match_closed_forms() {
        for p in [0.1, 0.45, 0.8] {
            let r = sweep_point(p, &cfg());
            assert!(r.is_ok());
            assert!(r.integral_drift < 1e-10, "p={p}: {}", r.integral_drift);
            assert!(r.rotation_ok && r.phi2_positive && r.wronskian_nonzero);
            assert!(r.y_half > 0.0);
        }
        assert!(!sweep_point(0.9, &cfg()).is_ok());
    }

    #[test]
    fn small_sweep_and_refinement() {
        let grid = SweepGrid {
            p_min: 0.1,
            p_max: 0.8,
            steps: 10,
        };
        let r = run_sweep(grid, &cfg()).unwrap();
        assert_eq!(r.records.len(), 10);
        assert_eq!(r.sign_changes.len(), 1);
        assert_eq!(r.monotonicity_violations, 0);
        assert!((r.refined_root.unwrap() - EXTREMAL_P).abs() < 1e-6);
        let one = run_sweep(grid, &SweepConfig { workers: 1, ..cfg() }).unwrap();
        assert_eq!(one, r);
    }

    #[test]
    fn grid_validation_and_points() {
        assert!(SweepGrid {
            p_min: 0.5,
            p_max: 0.4,
            steps: 3
        }
        .validate()
        .is_err());
        let g = SweepGrid::default();
        let pts = g.points();
        assert_eq!(pts.len(), 999);
        for (j, p) in pts.iter().enumerate() {
            assert!((p - 3f64.sqrt() * (j + 1) as f64 / 2000.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sign_change_helper() {
        assert_eq!(sign_change_indices(&[1.0, 0.5, -0.1, -2.0]), vec![1]);
        assert_eq!(sign_change_indices(&[1.0, 0.0, -1.0]), vec![0]);
        assert!(sign_change_indices(&[3.0, 2.0]).is_empty());
    }

    #[test]
    fn upper_interval() {
        let e = rule_out_upper(0.9, &cfg()).unwrap();
        assert!((e.e1 - 0.2592).abs() < 1e-12);
        assert!((e.e2 + 0.0648).abs() < 1e-12);
        for p in [0.95, 0.99] {
            let e = rule_out_upper(p, &cfg()).unwrap();
            assert!(e.supports_theorem(), "{e:?}");
            assert!(e.stationary_points.iter().all(|s| s.consistent));
        }
    }

    #[test]
    fn lower_interval() {
        let e = interval_checks(EXTREMAL_P, &cfg()).unwrap();
        assert!((e.min_abs_phi2 - EXTREMAL_P).abs() < 1e-9);
        assert!(e.passed);
        assert!(interval_checks(0.2, &cfg()).unwrap().passed);
    }
}
