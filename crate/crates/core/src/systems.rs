//! Right-hand sides, initial data, first integrals and coordinate charts for
//! the eigenfunction profiles `φ₀, φ₁, φ₂` of an `S¹`-invariant metric
//! `λf(y)(dx² + dy²)` on the Klein bottle.
//!
//! The profiles satisfy `φ_k'' = (k² − λf) φ_k` together with
//! `Σ φ_k² = 1` and `Σ (φ_k')² = φ₁² + 4φ₂² = λf/2`. Eliminating `λf`
//! gives an autonomous nonlinear system; the shooting parameter
//! `p = φ₂(0)` fixes all initial data.
//!
//! State layouts used with [`crate::odeint`]:
//!
//! | system   | layout                                  |
//! |----------|-----------------------------------------|
//! | full     | `[φ₀, φ₁, φ₂, φ₀', φ₁', φ₂']`           |
//! | `syst12` | `[φ₁, φ₂, φ₁', φ₂']`                    |
//! | `syst01` | `[φ₀, φ₁, φ₀', φ₁']`                    |

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odeint::{self, EventSpec, OdeError, Tolerances, Trajectory};

/// `√3/2`: the separatrix value of the shooting parameter (`E₁ = 0`).
pub const SEPARATRIX_P: f64 = 0.866_025_403_784_438_6;

/// `√(3/8)`: the shooting parameter of the extremal solution.
pub const EXTREMAL_P: f64 = 0.612_372_435_695_794_5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("shooting parameter {0} outside (0, 1)")]
    Domain(f64),
    #[error("spherical chart is singular at this state (φ₁ = φ₂ = 0 or φ₀² + φ₁² = 0)")]
    CoordinateSingularity,
    #[error("angular velocity vanished near θ = {theta}: the orbit does not rotate")]
    RotationFailure { theta: f64 },
    #[error("component {component} and its derivative both vanish at y = {y}")]
    DegenerateZero { component: usize, y: f64 },
    #[error("trajectory does not cover the requested window [{start}, {end}]")]
    WindowNotCovered { start: f64, end: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Shooting parameter `p = φ₂(0) ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ShootingParameter(f64);

impl ShootingParameter {
    pub fn new(p: f64) -> Result<Self, SystemError> {
        if p > 0.0 && p < 1.0 {
            Ok(Self(p))
        } else {
            Err(SystemError::Domain(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Cauchy datum of the full system at ordinate `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiState {
    pub y: f64,
    pub phi: [f64; 3],
    pub dphi: [f64; 3],
}

/// Residuals of the three constraints defining the admissible manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintDefects {
    /// `Σφ² − 1`
    pub norm: f64,
    /// `Σφφ'`
    pub tangency: f64,
    /// `Σ(φ')² − (φ₁² + 4φ₂²)`
    pub energy: f64,
}

impl ConstraintDefects {
    pub fn max_abs(&self) -> f64 {
        self.norm.abs().max(self.tangency.abs()).max(self.energy.abs())
    }
}

impl PhiState {
    pub fn from_full(y: f64, x: &[f64]) -> Self {
        Self {
            y,
            phi: [x[0], x[1], x[2]],
            dphi: [x[3], x[4], x[5]],
        }
    }

    pub fn to_full(&self) -> [f64; 6] {
        let [a, b, c] = self.phi;
        let [da, db, dc] = self.dphi;
        [a, b, c, da, db, dc]
    }

    /// Rebuilds the state from a `syst01` vector on the `φ₂ > 0` branch.
    pub fn from_syst01(y: f64, x: &[f64]) -> Self {
        let (p0, p1, d0, d1) = (x[0], x[1], x[2], x[3]);
        let p2 = (1.0 - p0 * p0 - p1 * p1).max(0.0).sqrt();
        let d2 = if p2 > 0.0 { -(p0 * d0 + p1 * d1) / p2 } else { 0.0 };
        Self {
            y,
            phi: [p0, p1, p2],
            dphi: [d0, d1, d2],
        }
    }

    pub fn to_syst01(&self) -> [f64; 4] {
        [self.phi[0], self.phi[1], self.dphi[0], self.dphi[1]]
    }

    pub fn to_syst12(&self) -> [f64; 4] {
        [self.phi[1], self.phi[2], self.dphi[1], self.dphi[2]]
    }

    /// Conformal factor `λf = 2(φ₁² + 4φ₂²)`.
    pub fn metric_value(&self) -> f64 {
        2.0 * (self.phi[1].powi(2) + 4.0 * self.phi[2].powi(2))
    }

    pub fn constraint_defects(&self) -> ConstraintDefects {
        let [a, b, c] = self.phi;
        let [da, db, dc] = self.dphi;
        ConstraintDefects {
            norm: a * a + b * b + c * c - 1.0,
            tangency: a * da + b * db + c * dc,
            energy: da * da + db * db + dc * dc - (b * b + 4.0 * c * c),
        }
    }

    /// Projects `position` onto the unit sphere and `velocity` onto its
    /// tangent plane, then rescales the velocity so that
    /// `Σ(φ')² = φ₁² + 4φ₂²`.
    pub fn on_manifold(y: f64, position: [f64; 3], velocity: [f64; 3]) -> Result<Self, SystemError> {
        let norm = position.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SystemError::InvalidArgument("zero position".into()));
        }
        let phi = position.map(|v| v / norm);
        let radial: f64 = phi.iter().zip(&velocity).map(|(a, b)| a * b).sum();
        let tangent = [
            velocity[0] - radial * phi[0],
            velocity[1] - radial * phi[1],
            velocity[2] - radial * phi[2],
        ];
        let speed = tangent.iter().map(|v| v * v).sum::<f64>().sqrt();
        let target = (phi[1] * phi[1] + 4.0 * phi[2] * phi[2]).sqrt();
        if speed == 0.0 {
            return Err(SystemError::InvalidArgument("velocity has no tangential part".into()));
        }
        let dphi = tangent.map(|v| v * target / speed);
        Ok(Self { y, phi, dphi })
    }
}

/// Initial data at `y = 0`: `φ = (√(1−p²), 0, p)`, `φ' = (0, 2p, 0)`.
pub fn initial_state(p: ShootingParameter) -> PhiState {
    let p = p.value();
    PhiState {
        y: 0.0,
        phi: [((1.0 - p) * (1.0 + p)).sqrt(), 0.0, p],
        dphi: [0.0, 2.0 * p, 0.0],
    }
}

/// Linear Fourier-mode equations `φ_k'' = (k² − λf) φ_k` for a supplied
/// conformal factor.
pub fn rhs_linear(x: &[f64], metric_value: f64) -> [f64; 6] {
    [
        x[3],
        x[4],
        x[5],
        -metric_value * x[0],
        (1.0 - metric_value) * x[1],
        (4.0 - metric_value) * x[2],
    ]
}

/// Full system with `λf = 2(φ₁² + 4φ₂²)` substituted.
pub fn rhs_full(x: &[f64]) -> [f64; 6] {
    let lf = 2.0 * (x[1] * x[1] + 4.0 * x[2] * x[2]);
    rhs_linear(x, lf)
}

/// `φ₁'' = (1 − 2φ₁² − 8φ₂²)φ₁`, `φ₂'' = (4 − 2φ₁² − 8φ₂²)φ₂`.
pub fn rhs_syst12(x: &[f64]) -> [f64; 4] {
    let (p1, p2) = (x[0], x[1]);
    let s = 2.0 * p1 * p1 + 8.0 * p2 * p2;
    [x[2], x[3], (1.0 - s) * p1, (4.0 - s) * p2]
}

/// `φ₀'' = (8φ₀² + 6φ₁² − 8)φ₀`, `φ₁'' = (8φ₀² + 6φ₁² − 7)φ₁`.
pub fn rhs_syst01(x: &[f64]) -> [f64; 4] {
    let (p0, p1) = (x[0], x[1]);
    let s = 8.0 * p0 * p0 + 6.0 * p1 * p1;
    [x[2], x[3], (s - 8.0) * p0, (s - 7.0) * p1]
}

pub fn full_field(_: f64, x: &[f64], dx: &mut [f64]) {
    dx.copy_from_slice(&rhs_full(x));
}

pub fn syst12_field(_: f64, x: &[f64], dx: &mut [f64]) {
    dx.copy_from_slice(&rhs_syst12(x));
}

pub fn syst01_field(_: f64, x: &[f64], dx: &mut [f64]) {
    dx.copy_from_slice(&rhs_syst01(x));
}

/// Which reduced form of the equations to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemForm {
    Full,
    Syst12,
    Syst01,
}

impl SystemForm {
    pub fn dim(self) -> usize {
        match self {
            SystemForm::Full => 6,
            SystemForm::Syst12 | SystemForm::Syst01 => 4,
        }
    }

    pub fn initial_vector(self, p: ShootingParameter) -> Vec<f64> {
        let s = initial_state(p);
        match self {
            SystemForm::Full => s.to_full().to_vec(),
            SystemForm::Syst12 => s.to_syst12().to_vec(),
            SystemForm::Syst01 => s.to_syst01().to_vec(),
        }
    }

    pub fn field(self) -> fn(f64, &[f64], &mut [f64]) {
        match self {
            SystemForm::Full => full_field,
            SystemForm::Syst12 => syst12_field,
            SystemForm::Syst01 => syst01_field,
        }
    }
}

/// Integrates the chosen form from `initial_state(p)` over `[0, y_end]`.
pub fn solve(p: ShootingParameter, form: SystemForm, y_end: f64, tol: Tolerances) -> Result<Trajectory, SystemError> {
    let x0 = form.initial_vector(p);
    odeint::checked_dimension(form.dim(), &x0)?;
    Ok(odeint::integrate(form.field(), 0.0, &x0, y_end, tol)?)
}

/// The six first integrals evaluated at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegrals {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl FirstIntegrals {
    /// Defects of the identities
    /// `E₀+E₁+E₂ = 1`, `E₀ + 3E₁/4 = 1`, `E₂ = −E₁/4`,
    /// `κ₂ − 3κ₀ − 4κ₁ = 12`, `κ₀ + κ₁ = 1`, `κ₀ + κ₂ = 16`, `E₁ = κ₀/3`.
    pub fn relation_defects(&self) -> [f64; 7] {
        [
            self.e0 + self.e1 + self.e2 - 1.0,
            self.e0 + 0.75 * self.e1 - 1.0,
            self.e2 + 0.25 * self.e1,
            self.kappa2 - 3.0 * self.kappa0 - 4.0 * self.kappa1 - 12.0,
            self.kappa0 + self.kappa1 - 1.0,
            self.kappa0 + self.kappa2 - 16.0,
            self.e1 - self.kappa0 / 3.0,
        ]
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.e0, self.e1, self.e2, self.kappa0, self.kappa1, self.kappa2]
    }
}

pub fn kappa0(p1: f64, p2: f64, d1: f64, d2: f64) -> f64 {
    let q = p1 * p1 + 4.0 * p2 * p2;
    d1 * d1 + 4.0 * d2 * d2 + q * q - p1 * p1 - 16.0 * p2 * p2
}

pub fn kappa1(p0: f64, p2: f64, d0: f64, d2: f64) -> f64 {
    let q = p0 * p0 - 3.0 * p2 * p2;
    d0 * d0 - 3.0 * d2 * d2 + 2.0 * p0 * p0 + 6.0 * p2 * p2 - q * q
}

pub fn kappa2(p0: f64, p1: f64, d0: f64, d1: f64) -> f64 {
    let q = 4.0 * p0 * p0 + 3.0 * p1 * p1;
    4.0 * d0 * d0 + 3.0 * d1 * d1 + 32.0 * p0 * p0 + 21.0 * p1 * p1 - q * q
}

/// Evaluates the `E` and `κ` integrals exactly as written.
pub fn first_integrals(state: &PhiState) -> FirstIntegrals {
    let [p0, p1, p2] = state.phi;
    let [d0, d1, d2] = state.dphi;
    let w01 = p0 * d1 - p1 * d0;
    let w02 = p0 * d2 - p2 * d0;
    let w12 = p1 * d2 - p2 * d1;
    FirstIntegrals {
        e0: p0 * p0 + w01 * w01 + w02 * w02 / 4.0,
        e1: p1 * p1 + w12 * w12 / 3.0 - w01 * w01,
        e2: p2 * p2 - w02 * w02 / 4.0 - w12 * w12 / 3.0,
        kappa0: kappa0(p1, p2, d1, d2),
        kappa1: kappa1(p0, p2, d0, d2),
        kappa2: kappa2(p0, p1, d0, d1),
    }
}

/// `(E₀, E₁, E₂)` as functions of the shooting parameter.
pub fn integrals_from_parameter(p: f64) -> (f64, f64, f64) {
    let s = p * p * (4.0 * p * p - 3.0);
    (1.0 - s, 4.0 / 3.0 * s, -s / 3.0)
}

/// Chart A: `φ₀ = cos ψ`, `φ₁ = sin ψ sin θ`, `φ₂ = sin ψ cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalA {
    pub psi: f64,
    pub theta: f64,
    pub dpsi: f64,
    pub dtheta: f64,
}

pub fn to_spherical_a(state: &PhiState) -> Result<SphericalA, SystemError> {
    let [p0, p1, p2] = state.phi;
    let [d0, d1, d2] = state.dphi;
    let r2 = p1 * p1 + p2 * p2;
    if r2 <= f64::MIN_POSITIVE {
        return Err(SystemError::CoordinateSingularity);
    }
    let r = r2.sqrt();
    // ψ ∈ (0, π) with sin ψ = r
    let psi = r.atan2(p0);
    let theta = p1.atan2(p2);
    let dpsi = -d0 / r;
    let dtheta = (p2 * d1 - p1 * d2) / r2;
    Ok(SphericalA {
        psi,
        theta,
        dpsi,
        dtheta,
    })
}

impl SphericalA {
    pub fn to_state(&self, y: f64) -> PhiState {
        let (sp, cp) = self.psi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        PhiState {
            y,
            phi: [cp, sp * st, sp * ct],
            dphi: [
                -sp * self.dpsi,
                cp * self.dpsi * st + sp * ct * self.dtheta,
                cp * self.dpsi * ct - sp * st * self.dtheta,
            ],
        }
    }

    /// `E₁` rewritten in the chart.
    pub fn e1(&self) -> f64 {
        let (sp, _) = self.psi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let s2p = (2.0 * self.psi).sin();
        let s2t = (2.0 * self.theta).sin();
        let (dp, dt) = (self.dpsi, self.dtheta);
        st * st * (sp * sp - dp * dp) - dp * dt * s2p * s2t / 2.0 + dt * dt * sp.powi(4) / 3.0
            - (dt * ct * s2p / 2.0).powi(2)
    }

    /// `E₂` rewritten in the chart.
    pub fn e2(&self) -> f64 {
        let (sp, _) = self.psi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let s2p = (2.0 * self.psi).sin();
        let s2t = (2.0 * self.theta).sin();
        let (dp, dt) = (self.dpsi, self.dtheta);
        ct * ct * (sp * sp - dp * dp / 4.0) + dp * dt * s2p * s2t / 8.0 - dt * dt * sp.powi(4) / 3.0
            - (dt * st * s2p / 4.0).powi(2)
    }

    /// `(E₁, E₂)` with `θ' = 0` imposed.
    pub fn stationary_integrals(&self) -> (f64, f64) {
        let sp2 = self.psi.sin().powi(2);
        let (st, ct) = self.theta.sin_cos();
        (
            st * st * (sp2 - self.dpsi * self.dpsi),
            ct * ct * (sp2 - self.dpsi * self.dpsi / 4.0),
        )
    }
}

/// Chart B: `φ₂ = cos ψ`, `φ₁ = sin ψ sin θ`, `φ₀ = sin ψ cos θ`; `θ` is the
/// polar angle in the `(φ₀, φ₁)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalB {
    pub psi: f64,
    pub theta: f64,
    pub dpsi: f64,
    pub dtheta: f64,
}

pub fn to_spherical_b(state: &PhiState) -> Result<SphericalB, SystemError> {
    let [p0, p1, p2] = state.phi;
    let [d0, d1, d2] = state.dphi;
    let r2 = p0 * p0 + p1 * p1;
    if r2 <= f64::MIN_POSITIVE {
        return Err(SystemError::CoordinateSingularity);
    }
    let r = r2.sqrt();
    Ok(SphericalB {
        psi: r.atan2(p2),
        theta: p1.atan2(p0),
        dpsi: -d2 / r,
        dtheta: (p0 * d1 - p1 * d0) / r2,
    })
}

impl SphericalB {
    pub fn to_state(&self, y: f64) -> PhiState {
        let (sp, cp) = self.psi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        PhiState {
            y,
            phi: [sp * ct, sp * st, cp],
            dphi: [
                cp * ct * self.dpsi - sp * st * self.dtheta,
                cp * st * self.dpsi + sp * ct * self.dtheta,
                -sp * self.dpsi,
            ],
        }
    }
}

/// `φ₁² + 4φ₂²` in chart B.
fn chart_b_potential(psi: f64, theta: f64) -> f64 {
    let (sp, cp) = psi.sin_cos();
    let st = theta.sin();
    sp * sp * st * st + 4.0 * cp * cp
}

/// `θ' = dθ/dy` recovered from `Σ(φ')² = φ₁² + 4φ₂²` on the rotating branch.
pub fn chart_b_angular_velocity(psi: f64, theta: f64, dpsi_dtheta: f64) -> f64 {
    let sp = psi.sin();
    (chart_b_potential(psi, theta) / (dpsi_dtheta * dpsi_dtheta + sp * sp)).sqrt()
}

/// The system with `θ` (chart B) as independent variable.
///
/// Returns `(dψ/dθ, d²ψ/dθ², dy/dθ)`. In `y` the chart equations are
/// `ψ'' = ½ sin 2ψ (θ'² + sin²θ − 4)` and
/// `θ'' = ½ sin 2θ − 2 cot ψ ψ' θ'`; dividing through by `θ'` gives the
/// returned field.
pub fn rhs_sweep_param(psi: f64, theta: f64, dpsi_dtheta: f64) -> Result<[f64; 3], SystemError> {
    let sp = psi.sin();
    if sp.abs() <= f64::MIN_POSITIVE {
        return Err(SystemError::CoordinateSingularity);
    }
    let w2 = chart_b_potential(psi, theta) / (dpsi_dtheta * dpsi_dtheta + sp * sp);
    if !(w2 > 1e-24) || !w2.is_finite() {
        return Err(SystemError::RotationFailure { theta });
    }
    let w = w2.sqrt();
    let s2p = (2.0 * psi).sin();
    let s2t = (2.0 * theta).sin();
    let cot = psi.cos() / sp;
    let psi_yy = 0.5 * s2p * (w2 + theta.sin().powi(2) - 4.0);
    let theta_yy = 0.5 * s2t - 2.0 * cot * dpsi_dtheta * w2;
    let dd = (psi_yy - dpsi_dtheta * theta_yy) / w2;
    Ok([dpsi_dtheta, dd, 1.0 / w])
}

/// Integrates the `θ`-parametrized system for `θ ∈ [0, theta_end]`; the state
/// is `[ψ, dψ/dθ, y]`.
pub fn solve_sweep_param(p: ShootingParameter, theta_end: f64, tol: Tolerances) -> Result<Trajectory, SystemError> {
    let chart = to_spherical_b(&initial_state(p))?;
    let x0 = [chart.psi, chart.dpsi / chart.dtheta, 0.0];
    let failure: Cell<Option<SystemError>> = Cell::new(None);
    let field = |theta: f64, x: &[f64], dx: &mut [f64]| match rhs_sweep_param(x[0], theta, x[1]) {
        Ok(d) => dx.copy_from_slice(&d),
        Err(e) => {
            failure.set(Some(e));
            dx.fill(f64::NAN);
        }
    };
    match odeint::integrate(field, 0.0, &x0, theta_end, tol) {
        Ok(t) => Ok(t),
        Err(e) => Err(failure.take().unwrap_or(SystemError::Ode(e))),
    }
}

/// Converts a `[ψ, dψ/dθ, y]` node of [`solve_sweep_param`] back to a state.
pub fn sweep_param_state(theta: f64, x: &[f64]) -> PhiState {
    let w = chart_b_angular_velocity(x[0], theta, x[1]);
    SphericalB {
        psi: x[0],
        theta,
        dpsi: x[1] * w,
        dtheta: w,
    }
    .to_state(x[2])
}

const ZERO_CANDIDATE: f64 = 1e-9;
const DEGENERATE_ZERO: f64 = 1e-10;

/// Zeros of `φ_component` on `[start, end)` along a full-system trajectory.
///
/// A zero at `start` is counted once; roots within `1e-7·(end − start)` of
/// either window edge are treated as that boundary zero.
pub fn count_zeros(traj: &Trajectory, component: usize, start: f64, end: f64) -> Result<usize, SystemError> {
    if traj.dim() != 6 {
        return Err(SystemError::InvalidArgument(format!(
            "zero counting needs a full-system trajectory, got dimension {}",
            traj.dim()
        )));
    }
    if component > 2 {
        return Err(SystemError::InvalidArgument(format!("component {component} not in 0..=2")));
    }
    if !(end > start) || traj.y_start() > start || traj.y_end() < end {
        return Err(SystemError::WindowNotCovered { start, end });
    }
    let edge = 1e-7 * (end - start);
    let at_start = traj.eval(start).expect("window checked");
    let mut count = 0;
    if at_start[component].abs() < ZERO_CANDIDATE {
        if at_start[component + 3].abs() < DEGENERATE_ZERO {
            return Err(SystemError::DegenerateZero { component, y: start });
        }
        count += 1;
    }
    let ev = EventSpec::new(move |_: f64, x: &[f64]| x[component]);
    for event in odeint::find_events(traj, &ev) {
        if event.y <= start + edge || event.y >= end - edge {
            continue;
        }
        if event.state[component].abs() < DEGENERATE_ZERO && event.state[component + 3].abs() < DEGENERATE_ZERO {
            return Err(SystemError::DegenerateZero { component, y: event.y });
        }
        count += 1;
    }
    Ok(count)
}

/// Closed-form orbit at `p = √3/2` with `θ(y) = π − 4 arccot(eʸ)`.
pub fn separatrix_solution(y: f64) -> (f64, f64) {
    let theta = separatrix_angle(y);
    ((3.0 * theta.cos() - 1.0) / 4.0, 3f64.sqrt() * theta.sin() / 2.0)
}

fn separatrix_angle(y: f64) -> f64 {
    // arccot(eʸ) = atan(e^{−y}) for the principal branch
    PI - 4.0 * (-y).exp().atan()
}

/// Value, first and second derivative of `(φ₀, φ₁)` on the separatrix.
pub fn separatrix_jet(y: f64) -> [[f64; 2]; 3] {
    let theta = separatrix_angle(y);
    let (st, ct) = theta.sin_cos();
    let dt = 2.0 / y.cosh();
    let ddt = -2.0 * y.tanh() / y.cosh();
    let h = 3f64.sqrt() / 2.0;
    [
        [(3.0 * ct - 1.0) / 4.0, h * st],
        [-0.75 * st * dt, h * ct * dt],
        [-0.75 * (st * ddt + ct * dt * dt), h * (ct * ddt - st * dt * dt)],
    ]
}
