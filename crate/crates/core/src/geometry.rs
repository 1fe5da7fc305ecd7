//! Lawson tori, bipolar metrics, the metric `g₀` in `(u, v)` coordinates and
//! its comparison with the normalized profile metric `λf(y)(dx² + dy²)`.
//!
//! The change of variables used throughout is
//! `x = 2u`, `y = 2z(v) + K(1/2)/2` with `z(v) = ∫₀^v dv/√(1 + 8cos²v)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extremal::{self, WP_PHI0};
use crate::quad::{self, QuadError};
use crate::specfun::{self, SpecFunError, WeierstrassP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("need m ≥ k ≥ 1, got m = {m}, k = {k}")]
    InvalidIndices { m: u32, k: u32 },
    #[error("grid size {0} is below the minimum of 32")]
    InvalidGrid(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}

/// Diagonal metric `E du² + G dv²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalData {
    pub e_coef: f64,
    pub g_coef: f64,
}

fn check_indices(m: u32, k: u32) -> Result<(), GeometryError> {
    if k >= 1 && m >= k {
        Ok(())
    } else {
        Err(GeometryError::InvalidIndices { m, k })
    }
}

/// `s(v) = 1 + 8cos²v`
fn stretch(v: f64) -> f64 {
    1.0 + 8.0 * v.cos().powi(2)
}

/// `g₀ = [(9 + s²)/s] (du² + dv²/s)` with `s = 1 + 8cos²v`.
pub fn metric_g0(_u: f64, v: f64) -> ConformalData {
    let s = stretch(v);
    let factor = (9.0 + s * s) / s;
    ConformalData {
        e_coef: factor,
        g_coef: factor / s,
    }
}

/// Metric of the bipolar surface of the Lawson torus `τ_{m,k}`.
pub fn bipolar_metric(m: u32, k: u32, _u: f64, v: f64) -> Result<ConformalData, GeometryError> {
    check_indices(m, k)?;
    let (m2, k2) = ((m * m) as f64, (k * k) as f64);
    let s = k2 + (m2 - k2) * v.cos().powi(2);
    let factor = (s * s + m2 * k2) / s;
    Ok(ConformalData {
        e_coef: factor,
        g_coef: factor / s,
    })
}

/// `(cos mu cos v, sin mu cos v, cos ku sin v, sin ku sin v)`
pub fn lawson_immersion(m: u32, k: u32, u: f64, v: f64) -> Result<[f64; 4], GeometryError> {
    check_indices(m, k)?;
    let (sv, cv) = v.sin_cos();
    let (smu, cmu) = (m as f64 * u).sin_cos();
    let (sku, cku) = (k as f64 * u).sin_cos();
    Ok([cmu * cv, smu * cv, cku * sv, sku * sv])
}

/// Samples of `τ_{m,k}` on an `nu × nv` grid over `[0, 2π)²`, row-major in `u`.
pub fn lawson_mesh(m: u32, k: u32, nu: usize, nv: usize) -> Result<Vec<[f64; 4]>, GeometryError> {
    check_indices(m, k)?;
    let mut out = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            out.push(lawson_immersion(m, k, u, v)?);
        }
    }
    Ok(out)
}

/// Finite-difference check that `τ_{m,k}` is minimal in `S³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    pub m: u32,
    pub k: u32,
    /// `max |Δ_g τ + 2τ|` for the induced metric `g`
    pub max_tension: f64,
    /// `max |⟨τ_u, τ_v⟩| / √(EG)`
    pub max_orthogonality_defect: f64,
}

fn lawson_partials(m: u32, k: u32, u: f64, v: f64, h: f64) -> Result<([f64; 4], [f64; 4]), GeometryError> {
    let (up, um) = (lawson_immersion(m, k, u + h, v)?, lawson_immersion(m, k, u - h, v)?);
    let (vp, vm) = (lawson_immersion(m, k, u, v + h)?, lawson_immersion(m, k, u, v - h)?);
    Ok((
        std::array::from_fn(|d| (up[d] - um[d]) / (2.0 * h)),
        std::array::from_fn(|d| (vp[d] - vm[d]) / (2.0 * h)),
    ))
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Laplace–Beltrami of `τ` in divergence form, valid while `⟨τ_u, τ_v⟩ = 0`.
pub fn lawson_harmonicity(m: u32, k: u32, n: usize) -> Result<HarmonicityReport, GeometryError> {
    check_indices(m, k)?;
    let h = 1e-3;
    // (√(G/E) τ_u, √(E/G) τ_v) and √(EG)
    let fluxes = |u: f64, v: f64| -> Result<([f64; 4], [f64; 4], f64), GeometryError> {
        let (xu, xv) = lawson_partials(m, k, u, v, h)?;
        let (e, g) = (dot4(&xu, &xu), dot4(&xv, &xv));
        let (ru, rv) = ((g / e).sqrt(), (e / g).sqrt());
        Ok((xu.map(|c| ru * c), xv.map(|c| rv * c), (e * g).sqrt()))
    };
    let mut tension: f64 = 0.0;
    let mut orth: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
            let c = lawson_immersion(m, k, u, v)?;
            let (xu, xv) = lawson_partials(m, k, u, v, h)?;
            let (e, g) = (dot4(&xu, &xu), dot4(&xv, &xv));
            orth = orth.max(dot4(&xu, &xv).abs() / (e * g).sqrt());
            let (fu_p, _, _) = fluxes(u + h, v)?;
            let (fu_m, _, _) = fluxes(u - h, v)?;
            let (_, fv_p, _) = fluxes(u, v + h)?;
            let (_, fv_m, _) = fluxes(u, v - h)?;
            let area = (e * g).sqrt();
            for d in 0..4 {
                let div = (fu_p[d] - fu_m[d] + fv_p[d] - fv_m[d]) / (2.0 * h);
                tension = tension.max((div / area + 2.0 * c[d]).abs());
            }
        }
    }
    Ok(HarmonicityReport {
        m,
        k,
        max_tension: tension,
        max_orthogonality_defect: orth,
    })
}

/// `z(v) = ∫₀^v dv/√(1 + 8cos²v)`
pub fn z_of_v(v: f64) -> f64 {
    quad::integrate(|t| 1.0 / stretch(t).sqrt(), 0.0, v, 1e-13, 1e-13)
        .expect("smooth positive integrand")
        .value
}

/// Inverse of [`z_of_v`].
pub fn v_of_z(z: f64) -> f64 {
    // z(v) − v/3 is bounded, so v = 3z is a good start
    let mut v = 3.0 * z;
    for _ in 0..60 {
        let step = (z_of_v(v) - z) * stretch(v).sqrt();
        v -= step;
        if step.abs() < 1e-14 * (1.0 + v.abs()) {
            break;
        }
    }
    v
}

/// Parametrization of one of the two metrics on the Klein bottle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceChart {
    /// `g₀` on `u ∈ [0, π/2)`, `v ∈ [0, π)`.
    G0,
    /// `λf(y)(dx² + dy²)` on `x ∈ [0, π)`, `y ∈ [−a/2, a/2)`.
    Normalized,
}

impl SurfaceChart {
    pub fn ranges(self) -> [(f64, f64); 2] {
        match self {
            SurfaceChart::G0 => [(0.0, FRAC_PI_2), (0.0, PI)],
            SurfaceChart::Normalized => {
                let a = extremal::period();
                [(0.0, PI), (-a / 2.0, a / 2.0)]
            }
        }
    }

    pub fn coefficients(self, s: f64, t: f64) -> ConformalData {
        match self {
            SurfaceChart::G0 => metric_g0(s, t),
            SurfaceChart::Normalized => {
                let lf = extremal::metric_from_phi0(extremal::phi_closed_form(t)[0]);
                ConformalData { e_coef: lf, g_coef: lf }
            }
        }
    }

    /// Image of a point under the orientation-reversing deck transformation.
    pub fn identify(self, s: f64, t: f64) -> (f64, f64) {
        match self {
            SurfaceChart::Normalized => (s + PI, -t),
            SurfaceChart::G0 => {
                let (_, y) = to_normalized(s, t);
                let k = extremal::quarter_constant();
                (s + FRAC_PI_2, v_of_z((-y - k / 2.0) / 2.0))
            }
        }
    }
}

/// `(u, v) ↦ (x, y)` with `y` reduced to `[0, a)`.
pub fn to_normalized(u: f64, v: f64) -> (f64, f64) {
    let a = extremal::period();
    let y = 2.0 * z_of_v(v) + 0.5 * extremal::quarter_constant();
    (2.0 * u, y.rem_euclid(a))
}

/// Result of comparing the pulled-back normalized metric with `2g₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub grid: usize,
    pub max_relative_error: f64,
    pub worst_u: f64,
    pub worst_v: f64,
}

/// Pulls `λf(y)(dx² + dy²)` back to `(u, v)` (with `dy/dv = 2/√s`) and
/// compares it with `2g₀` on an `n × n` grid.
pub fn verify_g0_scaling(n: usize) -> Result<ScalingReport, GeometryError> {
    if n < 32 {
        return Err(GeometryError::InvalidGrid(n));
    }
    let mut worst = (0.0, 0.0, 0.0);
    for j in 0..n {
        let v = PI * j as f64 / n as f64;
        let s = stretch(v);
        let dy_dv = 2.0 / s.sqrt();
        let (_, y) = to_normalized(0.0, v);
        let lf = extremal::metric_from_phi0(extremal::phi_closed_form(y)[0]);
        for i in 0..n {
            let u = FRAC_PI_2 * i as f64 / n as f64;
            let g = metric_g0(u, v);
            let e = lf * 4.0;
            let gg = lf * dy_dv * dy_dv;
            let err = ((e - 2.0 * g.e_coef) / (2.0 * g.e_coef))
                .abs()
                .max(((gg - 2.0 * g.g_coef) / (2.0 * g.g_coef)).abs());
            if err > worst.0 {
                worst = (err, u, v);
            }
        }
    }
    Ok(ScalingReport {
        grid: n,
        max_relative_error: worst.0,
        worst_u: worst.1,
        worst_v: worst.2,
    })
}

/// Residuals of the two ℘–cn identities at `z`:
/// `cn²(3z) = (12℘(2z) − 10)/(12℘(2z) + 17)` and
/// `((1 + 8cn²)² + 9)/(1 + 8cn²) = 10 − ((24℘(y) − 38)/(12℘(y) − 1))²`
/// with `y = 2z + K(1/2)/2`, modulus `2√2/3` and invariants `(73/12, −595/216)`.
pub fn wp_cn_identity(z: f64) -> Result<(f64, f64), GeometryError> {
    let wp = WeierstrassP::new(WP_PHI0);
    let modulus = 2.0 * 2f64.sqrt() / 3.0;
    let (cn, _, _) = specfun::jacobi_cn_sn_dn(3.0 * z, modulus)?;
    let c2 = cn * cn;
    // ℘ → ∞ at lattice points; both ratios then tend to their leading terms
    let ratio = |p: Result<f64, SpecFunError>, num: (f64, f64), den: (f64, f64)| match p {
        Ok(p) => Ok((num.0 * p + num.1) / (den.0 * p + den.1)),
        Err(SpecFunError::Pole(_)) => Ok(num.0 / den.0),
        Err(e) => Err(e),
    };
    let first = ratio(wp.value(2.0 * z), (12.0, -10.0), (12.0, 17.0))?;
    let y = 2.0 * z + 0.5 * extremal::quarter_constant();
    let r = ratio(wp.value(y), (24.0, -38.0), (12.0, -1.0))?;
    let s = 1.0 + 8.0 * c2;
    Ok(((c2 - first).abs(), ((s * s + 9.0) / s - (10.0 - r * r)).abs()))
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `Area(g₀) = ∫∫ √(EG) du dv` over `[0, π/2) × [0, π)` by composite
/// tensor Gauss–Legendre rules.
pub fn area_g0(panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let composite = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        let w = (hi - lo) / panels as f64;
        (0..panels)
            .flat_map(|p| {
                let c = lo + (p as f64 + 0.5) * w;
                rule.iter().map(move |&(x, wt)| (c + 0.5 * w * x, 0.5 * w * wt))
            })
            .collect()
    };
    let us = composite(0.0, FRAC_PI_2);
    let vs = composite(0.0, PI);
    let mut total = 0.0;
    for &(u, wu) in &us {
        for &(v, wv) in &vs {
            let g = metric_g0(u, v);
            total += wu * wv * (g.e_coef * g.g_coef).sqrt();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const K_BIG: f64 = 2.528_625_532_218_894;

    #[test]
    fn g0_examples() {
        let g = metric_g0(0.3, FRAC_PI_2);
        assert!((g.e_coef - 10.0).abs() < 1e-14 && (g.g_coef - 10.0).abs() < 1e-14);
        let g = metric_g0(0.0, 0.0);
        assert!((g.e_coef - 10.0).abs() < 1e-14 && (g.g_coef - 10.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn bipolar_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (u, v) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            assert_eq!(bipolar_metric(3, 1, u, v).unwrap(), metric_g0(u, v));
            let flat = bipolar_metric(1, 1, u, v).unwrap();
            assert_eq!((flat.e_coef, flat.g_coef), (2.0, 2.0));
        }
        for i in 0..50 {
            let g = bipolar_metric(5, 2, 0.0, 0.13 * i as f64).unwrap();
            assert!(g.e_coef > 0.0 && g.g_coef > 0.0);
        }
        assert!(bipolar_metric(1, 2, 0.0, 0.0).is_err());
        assert!(bipolar_metric(1, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn g0_symmetries() {
        for i in 0..50 {
            let v = 0.11 * i as f64;
            assert!((metric_g0(0.0, v).e_coef - metric_g0(0.0, v + PI).e_coef).abs() < 1e-12);
            assert!((metric_g0(0.0, v).e_coef - metric_g0(0.0, -v).e_coef).abs() < 1e-12);
        }
    }

    #[test]
    fn lawson_examples() {
        assert_eq!(lawson_immersion(3, 1, 0.0, 0.0).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = lawson_immersion(3, 1, rng.gen_range(0.0..7.0), rng.gen_range(0.0..7.0)).unwrap();
            assert!((p.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-15);
        }
        for (m, k) in [(1, 1), (3, 1), (5, 2)] {
            let r = lawson_harmonicity(m, k, 16).unwrap();
            assert!(r.max_tension < 1e-4, "{r:?}");
            assert!(r.max_orthogonality_defect < 1e-9, "{r:?}");
        }
        assert_eq!(lawson_mesh(3, 1, 4, 5).unwrap().len(), 20);
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_of_v(0.0), 0.0);
        assert!((3.0 * z_of_v(FRAC_PI_2) - K_BIG).abs() < 1e-12);
        assert!((z_of_v(PI) - 2.0 * K_BIG / 3.0).abs() < 1e-12);
        let k = 2.0 * 2f64.sqrt() / 3.0;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let v = rng.gen_range(-4.0..4.0);
            let (cn, _, _) = specfun::jacobi_cn_sn_dn(3.0 * z_of_v(v), k).unwrap();
            assert!((cn - v.cos()).abs() < 1e-10);
            assert!((v_of_z(z_of_v(v)) - v).abs() < 1e-11);
        }
    }

    #[test]
    fn period_bridge() {
        assert!((extremal::period() - 4.0 / 3.0 * K_BIG).abs() < 1e-12);
    }

    #[test]
    fn scaling_identity() {
        assert!(verify_g0_scaling(16).is_err());
        let r = verify_g0_scaling(64).unwrap();
        assert!(r.max_relative_error < 1e-8, "{r:?}");
    }

    #[test]
    fn wp_cn_identities() {
        for i in 0..100 {
            let z = -2.0 + 0.0417 * i as f64;
            let (a, b) = wp_cn_identity(z).unwrap();
            assert!(a < 1e-9 && b < 1e-9, "z={z}: {a} {b}");
        }
    }

    #[test]
    fn area_matches_lambda_area() {
        let area = area_g0(8, 16);
        let la = extremal::lambda_area().unwrap();
        assert!((2.0 * area - la).abs() < 1e-8, "{}", 2.0 * area);
    }

    #[test]
    fn gauss_rule_is_exact() {
        let r = gauss_legendre(8);
        let s: f64 = r.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn deck_transformations() {
        for i in 0..20 {
            let (s, t) = (0.07 * i as f64, 0.13 * i as f64 + 0.01);
            let (s2, t2) = SurfaceChart::G0.identify(s, t);
            assert!((s2 - s - FRAC_PI_2).abs() < 1e-15);
            let a = SurfaceChart::G0.coefficients(s, t);
            let b = SurfaceChart::G0.coefficients(s2, t2);
            assert!((a.e_coef - b.e_coef).abs() < 1e-9);
            let y = -1.0 + 0.1 * i as f64;
            let (x2, y2) = SurfaceChart::Normalized.identify(0.2, y);
            assert_eq!(x2, 0.2 + PI);
            let c = SurfaceChart::Normalized.coefficients(0.2, y);
            let d = SurfaceChart::Normalized.coefficients(x2, y2);
            assert!((c.e_coef - d.e_coef).abs() < 1e-10);
        }
        assert!(SurfaceChart::Normalized.ranges()[1].1 > 1.68);
    }
}
