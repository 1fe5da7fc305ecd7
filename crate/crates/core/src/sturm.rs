//! Periodic Sturm–Liouville spectra of `−φ'' + k²φ = λ F φ` by Fourier
//! collocation, with parity and zero-count classification.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extremal::MetricProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SturmError {
    #[error("Fourier mode {0} not in 0..=2")]
    InvalidMode(u32),
    #[error("grid size {0} must be even and at least 64")]
    InvalidGrid(usize),
    #[error("requested {count} eigenvalues from a grid of {n}")]
    InvalidCount { count: usize, n: usize },
    #[error("weight is not positive at grid point {index} (value {value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("eigenvalue {index} moved by {shift:e} between n = {n} and n = {n2}", n2 = 2 * n)]
    NotConverged { index: usize, n: usize, shift: f64 },
    #[error("zero of eigenfunction near grid point {index} cannot be resolved")]
    UnresolvedZero { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// One eigenpair of a Fourier channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub k_index: u32,
    pub eigenvalue: f64,
    /// Samples on the uniform grid `y_j = j·a/n`, scaled to unit max-norm.
    pub eigenfunction: Vec<f64>,
    pub parity: Parity,
    pub zero_count: usize,
    /// `|⟨φ, (−D² + k²)φ⟩ / ⟨φ, Fφ⟩ − λ|`
    pub rayleigh_defect: f64,
    /// Change of the eigenvalue when the grid is doubled.
    pub refinement_shift: f64,
}

/// Second-derivative Fourier collocation matrix on `n` points of `[0, a)`.
pub fn second_derivative_matrix(n: usize, a: f64) -> DMatrix<f64> {
    let h = std::f64::consts::TAU / n as f64;
    let scale = (std::f64::consts::TAU / a).powi(2);
    DMatrix::from_fn(n, n, |j, l| {
        let v = if j == l {
            -std::f64::consts::PI.powi(2) / (3.0 * h * h) - 1.0 / 6.0
        } else {
            let d = j as i64 - l as i64;
            let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            -sign / (2.0 * (d as f64 * h / 2.0).sin().powi(2))
        };
        v * scale
    })
}

struct GridSolution {
    values: Vec<f64>,
    // eigenvectors of the symmetrized problem, columns in ascending order
    vectors: Vec<DVector<f64>>,
    operator: DMatrix<f64>,
}

fn solve_grid(k: u32, weight: &[f64], a: f64) -> GridSolution {
    let n = weight.len();
    let mut operator = -second_derivative_matrix(n, a);
    for i in 0..n {
        operator[(i, i)] += (k * k) as f64;
    }
    let inv_sqrt: Vec<f64> = weight.iter().map(|w| 1.0 / w.sqrt()).collect();
    let m = DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * operator[(i, j)] * inv_sqrt[j]);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    GridSolution {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect(),
        operator,
    }
}

fn reflect(v: &DVector<f64>) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(n, |j, _| v[(n - j) % n])
}

/// Rotates each cluster of (numerically) equal eigenvalues so its vectors
/// are eigenvectors of the reflection `y ↦ −y`.
fn split_by_parity(values: &[f64], vectors: &mut [DVector<f64>]) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[start]).abs() < 1e-8 * values[start].abs().max(1.0) {
            end += 1;
        }
        if end - start > 1 {
            let m = end - start;
            let r = DMatrix::from_fn(m, m, |i, j| vectors[start + i].dot(&reflect(&vectors[start + j])));
            let sym = 0.5 * (&r + r.transpose());
            let eig = SymmetricEigen::new(sym);
            let old: Vec<DVector<f64>> = vectors[start..end].to_vec();
            for c in 0..m {
                let mut v = DVector::zeros(old[0].len());
                for (i, o) in old.iter().enumerate() {
                    v += o * eig.eigenvectors[(i, c)];
                }
                vectors[start + c] = v.normalize();
            }
        }
        start = end;
    }
}

const ZERO_CANDIDATE: f64 = 1e-9;

/// Sign changes of a periodic sample vector after max-norm scaling; samples
/// below `1e-9` are candidates resolved from their neighbours.
pub fn count_sign_changes(samples: &[f64]) -> Result<usize, SturmError> {
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(SturmError::UnresolvedZero { index: 0 });
    }
    let n = samples.len();
    let signed: Vec<Option<bool>> = samples
        .iter()
        .map(|v| {
            let v = v / scale;
            if v.abs() < ZERO_CANDIDATE {
                None
            } else {
                Some(v > 0.0)
            }
        })
        .collect();
    let Some(first) = signed.iter().position(Option::is_some) else {
        return Err(SturmError::UnresolvedZero { index: 0 });
    };
    let mut count = 0;
    let mut prev = signed[first].expect("found above");
    let mut gap_start: Option<usize> = None;
    for step in 1..=n {
        let idx = (first + step) % n;
        match signed[idx] {
            None => {
                gap_start.get_or_insert(idx);
            }
            Some(s) => {
                if s != prev {
                    count += 1;
                } else if let Some(g) = gap_start {
                    // a candidate flanked by equal signs is a touching zero
                    return Err(SturmError::UnresolvedZero { index: g });
                }
                gap_start = None;
                prev = s;
            }
        }
    }
    Ok(count)
}

pub fn count_eigenfunction_zeros(line: &SpectralLine) -> Result<usize, SturmError> {
    if line.eigenfunction.len() < 64 {
        return Err(SturmError::InvalidGrid(line.eigenfunction.len()));
    }
    count_sign_changes(&line.eigenfunction)
}

fn sample_weight(weight: &MetricProfile, n: usize) -> Result<Vec<f64>, SturmError> {
    let a = weight.period();
    let values: Vec<f64> = if weight.len() == n {
        weight.values().to_vec()
    } else {
        (0..n).map(|i| weight.lambda_f(a * i as f64 / n as f64)).collect()
    };
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(SturmError::NonPositiveWeight { index, value });
    }
    Ok(values)
}

/// Convergence threshold between the `n` and `2n` solves.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// The lowest `count` eigenpairs of channel `k` on an `n`-point grid; the
/// solve is repeated on `2n` points to confirm convergence.
pub fn periodic_spectrum(k: u32, weight: &MetricProfile, n: usize, count: usize) -> Result<Vec<SpectralLine>, SturmError> {
    if k > 2 {
        return Err(SturmError::InvalidMode(k));
    }
    if n < 64 || !n.is_multiple_of(2) {
        return Err(SturmError::InvalidGrid(n));
    }
    if count == 0 || count > n / 2 {
        return Err(SturmError::InvalidCount { count, n });
    }
    let a = weight.period();
    let w = sample_weight(weight, n)?;
    let fine = solve_grid(k, &sample_weight(weight, 2 * n)?, a);
    let mut sol = solve_grid(k, &w, a);
    split_by_parity(&sol.values, &mut sol.vectors);
    let mut lines = Vec::with_capacity(count);
    for idx in 0..count {
        let lambda = sol.values[idx];
        let shift = (fine.values[idx] - lambda).abs();
        if shift > CONVERGENCE_TOL {
            return Err(SturmError::NotConverged { index: idx, n, shift });
        }
        let v = &sol.vectors[idx];
        let parity_measure = v.dot(&reflect(v));
        let mut phi = DVector::from_fn(n, |i, _| v[i] / w[i].sqrt());
        let amax = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // fix the overall sign so the largest sample is positive
        let pivot = phi.iter().copied().max_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap_or(1.0);
        phi *= pivot.signum() / amax;
        let num = phi.dot(&(&sol.operator * &phi));
        let den: f64 = phi.iter().zip(&w).map(|(p, f)| p * p * f).sum();
        let mut line = SpectralLine {
            k_index: k,
            eigenvalue: lambda,
            eigenfunction: phi.iter().copied().collect(),
            parity: if parity_measure >= 0.0 { Parity::Even } else { Parity::Odd },
            zero_count: 0,
            rayleigh_defect: (num / den - lambda).abs(),
            refinement_shift: shift,
        };
        line.zero_count = count_eigenfunction_zeros(&line)?;
        lines.push(line);
    }
    Ok(lines)
}

/// Whether zero counts follow the ladder `0, 2, 2, 4, 4, …`.
pub fn follows_haupt_ordering(lines: &[SpectralLine]) -> bool {
    lines
        .iter()
        .enumerate()
        .all(|(i, l)| l.zero_count == 2 * i.div_ceil(2))
}

/// An eigenvalue of a Fourier channel together with its Klein-bottle status.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEigenvalue {
    pub k_index: u32,
    pub eigenvalue: f64,
    pub parity: Parity,
    pub zero_count: usize,
    /// Position in the ascending channel spectrum (0-based).
    pub position: usize,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    /// Total multiplicity of the eigenvalue `1` on the Klein bottle.
    pub multiplicity_at_one: usize,
    /// Smallest admissible eigenvalue above `1e-6`.
    pub smallest_positive: Option<f64>,
    /// Admissible eigenvalues in `(0, 1 − 1e-6)`; empty when `1 = λ₁`.
    pub admissible_below_one: Vec<ChannelEigenvalue>,
    /// Channel eigenvalues removed by the parity rule.
    pub excluded: Vec<ChannelEigenvalue>,
    /// Position of `λ = 1` in each channel's ascending spectrum.
    pub position_of_one: Vec<Option<usize>>,
    pub passed: bool,
}

const ONE_TOL: f64 = 1e-6;

/// Klein-bottle admissibility: even modes need even profiles, odd modes odd.
pub fn is_admissible(k: u32, parity: Parity) -> bool {
    k.is_multiple_of(2) == (parity == Parity::Even)
}

/// Assembles the Klein-bottle spectrum from channel spectra (`spectra[k]`
/// for `k = 0, 1, 2`) and checks that `1` is the first positive eigenvalue
/// with multiplicity five.
pub fn verify_multiplicity(spectra: &[Vec<SpectralLine>]) -> MultiplicityReport {
    let mut multiplicity = 0;
    let mut smallest: Option<f64> = None;
    let mut below = Vec::new();
    let mut excluded = Vec::new();
    let mut position_of_one = Vec::new();
    for lines in spectra {
        let mut pos = None;
        for (position, l) in lines.iter().enumerate() {
            let entry = ChannelEigenvalue {
                k_index: l.k_index,
                eigenvalue: l.eigenvalue,
                parity: l.parity,
                zero_count: l.zero_count,
                position,
                admissible: is_admissible(l.k_index, l.parity),
            };
            if (l.eigenvalue - 1.0).abs() < ONE_TOL {
                pos = Some(position);
            }
            if !entry.admissible {
                excluded.push(entry);
                continue;
            }
            if l.eigenvalue > ONE_TOL {
                smallest = Some(smallest.map_or(l.eigenvalue, |s| s.min(l.eigenvalue)));
            }
            if (l.eigenvalue - 1.0).abs() < ONE_TOL {
                multiplicity += if l.k_index == 0 { 1 } else { 2 };
            } else if l.eigenvalue > ONE_TOL && l.eigenvalue < 1.0 - ONE_TOL {
                below.push(entry);
            }
        }
        position_of_one.push(pos);
    }
    let passed = multiplicity == 5 && below.is_empty() && smallest.is_some_and(|s| (s - 1.0).abs() < ONE_TOL);
    MultiplicityReport {
        multiplicity_at_one: multiplicity,
        smallest_positive: smallest,
        admissible_below_one: below,
        excluded,
        position_of_one,
        passed,
    }
}
