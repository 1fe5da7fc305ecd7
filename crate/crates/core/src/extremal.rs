//! The closed-form extremal solution at `p = √(3/8)`.
//!
//! With `φ₀ = √(5/8) cos θ` and `φ₁ = sin θ / √2` the system collapses to the
//! pendulum `θ'' = ½ sin 2θ`, `θ'² = 3 + sin²θ`, and
//! `λf(y) = 5 − (16/5) φ₀²(y)`. Throughout this module `λ = 1`, so the
//! conformal factor `λf` is the normalized metric itself.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{self, QuadError};
use crate::specfun::{self, SpecFunError, WeierstrassInvariants, WeierstrassP};
use crate::systems::PhiState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremalError {
    #[error("metric grid needs an even size of at least 16, got {0}")]
    InvalidGrid(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}

/// `√(5/8)`
pub const PHI0_AMPLITUDE: f64 = 0.790_569_415_042_094_8;
/// `√(3/8)`
pub const PHI2_MIN: f64 = 0.612_372_435_695_794_5;

/// Invariants of the three ℘-functions appearing in the eigenfunctions.
pub const WP_PHI0: WeierstrassInvariants = WeierstrassInvariants {
    g2: 73.0 / 12.0,
    g3: -595.0 / 216.0,
};
pub const WP_PHI1: WeierstrassInvariants = WeierstrassInvariants {
    g2: -8.0 / 3.0,
    g3: 28.0 / 27.0,
};
pub const WP_PHI2: WeierstrassInvariants = WeierstrassInvariants {
    g2: 193.0 / 12.0,
    g3: 2681.0 / 216.0,
};

/// `K(1/2)`
pub fn quarter_constant() -> f64 {
    specfun::complete_k(0.5).expect("0.5 is a valid modulus")
}

/// Period `a = 2K(1/2)` of the metric profile.
pub fn period() -> f64 {
    2.0 * quarter_constant()
}

fn theta_speed(theta: f64) -> f64 {
    (3.0 + theta.sin().powi(2)).sqrt()
}

/// `y(θ) = ∫₀^θ dθ / √(3 + sin²θ)`, extended quasi-periodically.
pub fn y_of_theta(theta: f64) -> f64 {
    let turns = (theta / TAU).floor();
    let rest = theta - turns * TAU;
    let q = quad::integrate(|t| 1.0 / theta_speed(t), 0.0, rest, 1e-13, 1e-13)
        .expect("smooth positive integrand");
    turns * period() + q.value
}

const TABLE_SIZE: usize = 256;

struct ThetaTable {
    // y at θ = 2πk/TABLE_SIZE for k = 0..=TABLE_SIZE
    y: Vec<f64>,
}

fn theta_table() -> &'static ThetaTable {
    static TABLE: OnceLock<ThetaTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = TAU / TABLE_SIZE as f64;
        let mut y = Vec::with_capacity(TABLE_SIZE + 1);
        let mut acc = 0.0;
        y.push(0.0);
        for k in 0..TABLE_SIZE {
            let (panel, _) = quad::gk15(&|t: f64| 1.0 / theta_speed(t), k as f64 * h, (k + 1) as f64 * h);
            acc += panel;
            y.push(acc);
        }
        ThetaTable { y }
    })
}

/// `y(θ)` on `[0, 2π]` from the cached table plus one Kronrod panel.
fn y_in_period(theta: f64) -> f64 {
    let table = theta_table();
    let h = TAU / TABLE_SIZE as f64;
    let k = ((theta / h).floor() as usize).min(TABLE_SIZE - 1);
    let t0 = k as f64 * h;
    let (panel, _) = quad::gk15(&|t: f64| 1.0 / theta_speed(t), t0, theta);
    table.y[k] + panel
}

/// Inverse of [`y_of_theta`] by bracketed Newton iteration.
pub fn theta_of_y(y: f64) -> f64 {
    let table = theta_table();
    let a = table.y[TABLE_SIZE];
    let turns = (y / a).floor();
    let s = y - turns * a;
    let k = table.y.partition_point(|&v| v <= s).clamp(1, TABLE_SIZE) - 1;
    let h = TAU / TABLE_SIZE as f64;
    let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
    let mut theta = lo + (s - table.y[k]) * theta_speed(lo);
    for _ in 0..50 {
        if !(theta > lo && theta < hi) {
            theta = 0.5 * (lo + hi);
        }
        let r = y_in_period(theta) - s;
        if r > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        let step = r * theta_speed(theta);
        theta -= step;
        if step.abs() < 1e-15 * (1.0 + theta.abs()) || hi - lo < 1e-15 {
            break;
        }
    }
    turns * TAU + theta
}

/// Values and `y`-derivatives up to second order of `(φ₀, φ₁, φ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiJet {
    pub y: f64,
    pub theta: f64,
    pub phi: [f64; 3],
    pub dphi: [f64; 3],
    pub ddphi: [f64; 3],
}

impl PhiJet {
    pub fn state(&self) -> PhiState {
        PhiState {
            y: self.y,
            phi: self.phi,
            dphi: self.dphi,
        }
    }

    pub fn metric_value(&self) -> f64 {
        metric_from_phi0(self.phi[0])
    }
}

/// `λf = 5 − (16/5) φ₀²`
pub fn metric_from_phi0(phi0: f64) -> f64 {
    5.0 - 3.2 * phi0 * phi0
}

/// Jet of the eigenfunctions at `θ`, using `θ' = √(3 + sin²θ)` and
/// `θ'' = ½ sin 2θ`.
pub fn jet_at_theta(y: f64, theta: f64) -> PhiJet {
    let (st, ct) = theta.sin_cos();
    let dt = theta_speed(theta);
    let ddt = st * ct;
    let dt2 = 3.0 + st * st;
    let p0 = PHI0_AMPLITUDE * ct;
    let d0 = -PHI0_AMPLITUDE * st * dt;
    let dd0 = -PHI0_AMPLITUDE * (ct * dt2 + st * ddt);
    let p1 = FRAC_1_SQRT_2 * st;
    let d1 = FRAC_1_SQRT_2 * ct * dt;
    let dd1 = FRAC_1_SQRT_2 * (ct * ddt - st * dt2);
    let p2 = ((1.5 + p1 * p1) / 4.0).sqrt();
    let d2 = p1 * d1 / (4.0 * p2);
    let dd2 = (d1 * d1 + p1 * dd1 - 4.0 * d2 * d2) / (4.0 * p2);
    PhiJet {
        y,
        theta,
        phi: [p0, p1, p2],
        dphi: [d0, d1, d2],
        ddphi: [dd0, dd1, dd2],
    }
}

pub fn phi_jet(y: f64) -> PhiJet {
    jet_at_theta(y, theta_of_y(y))
}

/// `(φ₀, φ₁, φ₂)(y)` through the pendulum substitution.
pub fn phi_closed_form(y: f64) -> [f64; 3] {
    phi_jet(y).phi
}

fn wp_or_pole(wp: &WeierstrassP, y: f64) -> Result<Option<f64>, SpecFunError> {
    match wp.value(y) {
        Ok(v) => Ok(Some(v)),
        Err(SpecFunError::Pole(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `(φ₀, φ₁, φ₂)(y)` from the Weierstrass ℘ expressions. At a lattice pole
/// the limit value is returned.
pub fn phi_weierstrass(y: f64) -> Result<[f64; 3], ExtremalError> {
    static WPS: OnceLock<[WeierstrassP; 3]> = OnceLock::new();
    let [w0, w1, w2] = WPS.get_or_init(|| {
        [
            WeierstrassP::new(WP_PHI0),
            WeierstrassP::new(WP_PHI1),
            WeierstrassP::new(WP_PHI2),
        ]
    });
    let phi0 = match wp_or_pole(w0, y)? {
        Some(p) => PHI0_AMPLITUDE * (1.0 - 3.0 / (2.0 * p - 1.0 / 6.0)),
        None => PHI0_AMPLITUDE,
    };
    let phi1 = match wp_or_pole(w1, y + 0.5 * quarter_constant())? {
        Some(p) => FRAC_1_SQRT_2 * (-1.0 + 2.0 / (p + 2.0 / 3.0)),
        None => -FRAC_1_SQRT_2,
    };
    let phi2 = match wp_or_pole(w2, y)? {
        Some(p) => PHI2_MIN + 0.25 * 1.5f64.sqrt() / (p + 11.0 / 12.0),
        None => PHI2_MIN,
    };
    Ok([phi0, phi1, phi2])
}

/// `(φ₀, φ₁, φ₂)(y)` from Jacobi functions of modulus `1/2`.
pub fn phi_jacobi(y: f64) -> Result<[f64; 3], ExtremalError> {
    let (cn, sn, _) = specfun::jacobi_cn_sn_dn(2.0 * y - quarter_constant(), 0.5)?;
    let phi1 = FRAC_1_SQRT_2 * cn;
    Ok([-PHI0_AMPLITUDE * sn, phi1, ((1.5 + phi1 * phi1) / 4.0).sqrt()])
}

/// Sampled conformal factor `λf` over one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricProfile {
    period: f64,
    ys: Vec<f64>,
    values: Vec<f64>,
}

impl MetricProfile {
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Closed-form `λf(y)` at an arbitrary ordinate.
    pub fn lambda_f(&self, y: f64) -> f64 {
        metric_from_phi0(phi_closed_form(y)[0])
    }

    /// `λf = 2(φ₁² + 4φ₂²)` evaluated from the other two profiles.
    pub fn lambda_f_from_phi12(&self, y: f64) -> f64 {
        let [_, p1, p2] = phi_closed_form(y);
        2.0 * (p1 * p1 + 4.0 * p2 * p2)
    }

    /// Largest grid discrepancy between the two closed forms of `λf`.
    pub fn max_form_discrepancy(&self) -> f64 {
        self.ys
            .iter()
            .zip(&self.values)
            .map(|(&y, &v)| (v - self.lambda_f_from_phi12(y)).abs())
            .fold(0.0, f64::max)
    }

    /// Trapezoidal mean over the period (spectrally accurate for periodic data).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.period / self.len() as f64
    }
}

pub fn metric_profile(n: usize) -> Result<MetricProfile, ExtremalError> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(ExtremalError::InvalidGrid(n));
    }
    let a = period();
    let ys: Vec<f64> = (0..n).map(|i| a * i as f64 / n as f64).collect();
    let values = ys.iter().map(|&y| metric_from_phi0(phi_closed_form(y)[0])).collect();
    Ok(MetricProfile { period: a, ys, values })
}

/// `λ·Area` by three routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaArea {
    /// `2π ∫₀^{2π} (5/2 − cos²θ)/√(4 − cos²θ) dθ`
    pub quadrature: f64,
    /// `2π (8E(1/2) − 3K(1/2))`
    pub legendre_form: f64,
    /// `12π E(2√2/3)`
    pub transformed_form: f64,
}

impl LambdaArea {
    pub fn max_pairwise_gap(&self) -> f64 {
        let v = [self.quadrature, self.legendre_form, self.transformed_form];
        let mut gap: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                gap = gap.max((v[i] - v[j]).abs());
            }
        }
        gap
    }
}

pub fn lambda_area_routes() -> Result<LambdaArea, ExtremalError> {
    let q = quad::integrate(
        |t: f64| {
            let c2 = t.cos().powi(2);
            (2.5 - c2) / (4.0 - c2).sqrt()
        },
        0.0,
        TAU,
        1e-14,
        1e-15,
    )?;
    let e_half = specfun::complete_e(0.5)?;
    let k_half = specfun::complete_k(0.5)?;
    let e_big = specfun::complete_e(2.0 * 2f64.sqrt() / 3.0)?;
    Ok(LambdaArea {
        quadrature: TAU * q.value,
        legendre_form: TAU * (8.0 * e_half - 3.0 * k_half),
        transformed_form: 12.0 * PI * e_big,
    })
}

/// `λ₁·Area` of the extremal metric (quadrature route).
pub fn lambda_area() -> Result<f64, ExtremalError> {
    Ok(lambda_area_routes()?.quadrature)
}

/// Image of `(x, y)` under the immersion into the unit sphere of `R⁵`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingPoint {
    pub x: f64,
    pub y: f64,
    pub coords: [f64; 5],
}

impl EmbeddingPoint {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn basis(x: f64, phi: [f64; 3]) -> [f64; 5] {
    let (s1, c1) = x.sin_cos();
    let (s2, c2) = (2.0 * x).sin_cos();
    [phi[0], phi[1] * c1, phi[1] * s1, phi[2] * c2, phi[2] * s2]
}

pub fn embed(x: f64, y: f64) -> EmbeddingPoint {
    EmbeddingPoint {
        x,
        y,
        coords: basis(x, phi_closed_form(y)),
    }
}

/// `(∂ₓΦ, ∂_yΦ)` of the immersion, analytically.
pub fn embed_tangents(x: f64, y: f64) -> ([f64; 5], [f64; 5]) {
    let jet = phi_jet(y);
    let (s1, c1) = x.sin_cos();
    let (s2, c2) = (2.0 * x).sin_cos();
    let [_, p1, p2] = jet.phi;
    let dx = [0.0, -p1 * s1, p1 * c1, -2.0 * p2 * s2, 2.0 * p2 * c2];
    (dx, basis(x, jet.dphi))
}

/// Largest `|Δ Φᵢ − Φᵢ|` over the five coordinate functions for the metric
/// `λf (dx² + dy²)`, with `Δ = −(∂ₓ² + ∂_y²)/λf`.
pub fn eigen_residual(x: f64, y: f64) -> f64 {
    let jet = phi_jet(y);
    let lf = jet.metric_value();
    let (s1, c1) = x.sin_cos();
    let (s2, c2) = (2.0 * x).sin_cos();
    let value = basis(x, jet.phi);
    let yy = basis(x, jet.ddphi);
    let [p0, p1, p2] = jet.phi;
    let xx = [0.0 * p0, -p1 * c1, -p1 * s1, -4.0 * p2 * c2, -4.0 * p2 * s2];
    (0..5)
        .map(|i| (-(xx[i] + yy[i]) / lf - value[i]).abs())
        .fold(0.0, f64::max)
}
