//! Dormand–Prince 5(4) integration with PI step control, a fourth-order
//! continuous extension, and event location on the dense output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size {h:e} underflowed at y = {y}")]
    StepUnderflow { y: f64, h: f64 },
    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid integration setup: {0}")]
    InvalidSetup(String),
    #[error("non-finite state at y = {0}")]
    NonFinite(f64),
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

/// Integrator tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-11,
            abs: 1e-13,
        }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Result<Self, OdeError> {
        if !(rel > 0.0 && abs > 0.0) {
            return Err(OdeError::InvalidSetup(format!(
                "tolerances must be positive (rel={rel}, abs={abs})"
            )));
        }
        Ok(Self { rel, abs })
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 2_000_000;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone)]
struct DenseSegment {
    y0: f64,
    h: f64,
    // five coefficient vectors, packed [r1 | r2 | r3 | r4 | r5]
    coeffs: Vec<f64>,
}

impl DenseSegment {
    fn eval_into(&self, y: f64, out: &mut [f64]) {
        let dim = out.len();
        let s = (y - self.y0) / self.h;
        let s1 = 1.0 - s;
        let r = |j: usize, i: usize| self.coeffs[j * dim + i];
        for (i, o) in out.iter_mut().enumerate() {
            *o = r(0, i) + s * (r(1, i) + s1 * (r(2, i) + s * (r(3, i) + s1 * r(4, i))));
        }
    }
}

/// Accepted steps of an integration together with their interpolants.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    ys: Vec<f64>,
    states: Vec<Vec<f64>>,
    segments: Vec<DenseSegment>,
    tolerances: Tolerances,
    rejected: usize,
    rhs_evals: usize,
}

/// JSON view of a trajectory: nodes only, no interpolant coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub y: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }
    pub fn y_start(&self) -> f64 {
        self.ys[0]
    }
    pub fn y_end(&self) -> f64 {
        *self.ys.last().expect("trajectory has at least one node")
    }
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one node")
    }
    pub fn steps(&self) -> usize {
        self.segments.len()
    }
    pub fn rhs_evaluations(&self) -> usize {
        self.rhs_evals
    }
    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    /// Dense-output state at `y`; `None` outside the covered range.
    /// Node ordinates return the stored state unchanged.
    pub fn eval(&self, y: f64) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(y, &mut out).then_some(out)
    }

    pub fn eval_into(&self, y: f64, out: &mut [f64]) -> bool {
        if !(y >= self.y_start() && y <= self.y_end()) || out.len() != self.dim {
            return false;
        }
        // index of the first node strictly greater than y
        let idx = self.ys.partition_point(|&t| t <= y);
        if self.ys[idx - 1] == y {
            out.copy_from_slice(&self.states[idx - 1]);
            return true;
        }
        self.segments[idx - 1].eval_into(y, out);
        true
    }

    /// Component `i` of the interpolated state.
    pub fn eval_component(&self, y: f64, i: usize) -> Option<f64> {
        self.eval(y).map(|s| s[i])
    }

    pub fn to_record(&self) -> TrajectoryRecord {
        TrajectoryRecord {
            rel_tol: self.tolerances.rel,
            abs_tol: self.tolerances.abs,
            steps: self.steps(),
            rejected_steps: self.rejected,
            rhs_evaluations: self.rhs_evals,
            y: self.ys.clone(),
            states: self.states.clone(),
        }
    }
}

impl Serialize for Trajectory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(serializer)
    }
}

/// Which sign changes of the event function count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Direction {
    #[default]
    Any,
    Rising,
    Falling,
}

/// Scalar event `g(y, state) = 0`.
pub struct EventSpec<G> {
    pub func: G,
    pub direction: Direction,
    pub tol: f64,
}

/// Default bracketing tolerance on the event ordinate.
const EVENT_SUBSAMPLES: usize = 4;

pub const DEFAULT_EVENT_TOL: f64 = 1e-12;

impl<G: Fn(f64, &[f64]) -> f64> EventSpec<G> {
    pub fn new(func: G) -> Self {
        Self {
            func,
            direction: Direction::Any,
            tol: DEFAULT_EVENT_TOL,
        }
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn crosses(&self, g0: f64, g1: f64) -> bool {
        if g0 == 0.0 {
            return false;
        }
        match self.direction {
            Direction::Any => g1 == 0.0 || (g0 < 0.0) != (g1 < 0.0),
            Direction::Rising => g0 < 0.0 && g1 >= 0.0,
            Direction::Falling => g0 > 0.0 && g1 <= 0.0,
        }
    }
}

/// A located event.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub y: f64,
    pub state: Vec<f64>,
}

/// All events along `traj`, in increasing `y`.
pub fn find_events<G: Fn(f64, &[f64]) -> f64>(traj: &Trajectory, ev: &EventSpec<G>) -> Vec<Event> {
    let mut found = Vec::new();
    let mut g_prev = (ev.func)(traj.ys[0], &traj.states[0]);
    for (i, seg) in traj.segments.iter().enumerate() {
        g_prev = scan_segment(seg, traj.ys[i], traj.ys[i + 1], &traj.states[i + 1], g_prev, ev, &mut found);
    }
    found
}

// Sub-sampling catches pairs of roots inside one long step.
fn scan_segment<G: Fn(f64, &[f64]) -> f64>(
    seg: &DenseSegment,
    ya: f64,
    yb: f64,
    sb: &[f64],
    mut g_prev: f64,
    ev: &EventSpec<G>,
    found: &mut Vec<Event>,
) -> f64 {
    let mut buf = vec![0.0; sb.len()];
    let mut y_prev = ya;
    for j in 1..=EVENT_SUBSAMPLES {
        let (y1, g_next) = if j == EVENT_SUBSAMPLES {
            (yb, (ev.func)(yb, sb))
        } else {
            let y1 = ya + (yb - ya) * j as f64 / EVENT_SUBSAMPLES as f64;
            seg.eval_into(y1, &mut buf);
            (y1, (ev.func)(y1, &buf))
        };
        if ev.crosses(g_prev, g_next) {
            found.push(locate(seg, sb.len(), y_prev, y1, g_prev, g_next, ev));
        }
        g_prev = g_next;
        y_prev = y1;
    }
    g_prev
}

#[allow(clippy::too_many_arguments)]
fn locate<G: Fn(f64, &[f64]) -> f64>(
    seg: &DenseSegment,
    dim: usize,
    y0: f64,
    y1: f64,
    g0: f64,
    g1: f64,
    ev: &EventSpec<G>,
) -> Event {
    let mut buf = vec![0.0; dim];
    if g1 == 0.0 {
        seg.eval_into(y1, &mut buf);
        return Event { y: y1, state: buf };
    }
    let g = |y: f64, buf: &mut [f64]| {
        seg.eval_into(y, buf);
        (ev.func)(y, buf)
    };
    let y = brent(|y| g(y, &mut buf), y0, y1, g0, g1, ev.tol);
    seg.eval_into(y, &mut buf);
    Event { y, state: buf }
}

/// Brent's bracketing root finder on `[a, b]` with `f(a)·f(b) < 0`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> f64 {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb == 0.0 {
            return b;
        }
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 {
            return b;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    b
}

/// Stepper state shared by [`integrate`] and [`integrate_until`].
struct Stepper<F> {
    rhs: F,
    dim: usize,
    tol: Tolerances,
    y: f64,
    x: Vec<f64>,
    k: [Vec<f64>; 7],
    h: f64,
    fac_old: f64,
    rhs_evals: usize,
    rejected: usize,
    tmp: Vec<f64>,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Stepper<F> {
    fn new(mut rhs: F, y0: f64, x0: &[f64], span: f64, tol: Tolerances) -> Result<Self, OdeError> {
        let dim = x0.len();
        if dim == 0 {
            return Err(OdeError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite(y0));
        }
        let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; dim]);
        rhs(y0, x0, &mut k[0]);
        let mut st = Self {
            rhs,
            dim,
            tol,
            y: y0,
            x: x0.to_vec(),
            k,
            h: 0.0,
            fac_old: 1e-4,
            rhs_evals: 1,
            rejected: 0,
            tmp: vec![0.0; dim],
        };
        st.h = st.initial_step(span);
        Ok(st)
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.tol.abs + self.tol.rel * a.abs().max(b.abs())
    }

    fn initial_step(&mut self, span: f64) -> f64 {
        let n = self.dim as f64;
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..self.dim {
            let sk = self.scale(self.x[i], self.x[i]);
            d0 += (self.x[i] / sk).powi(2);
            d1 += (self.k[0][i] / sk).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let mut h0 = if d0 < 1e-10 || d1 < 1e-10 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span);
        for i in 0..self.dim {
            self.tmp[i] = self.x[i] + h0 * self.k[0][i];
        }
        let mut f1 = vec![0.0; self.dim];
        (self.rhs)(self.y + h0, &self.tmp, &mut f1);
        self.rhs_evals += 1;
        let mut d2 = 0.0;
        for i in 0..self.dim {
            let sk = self.scale(self.x[i], self.x[i]);
            d2 += ((f1[i] - self.k[0][i]) / sk).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Attempts steps until one is accepted; returns the new node and its
    /// dense segment.
    fn step(&mut self, y_end: f64) -> Result<(f64, Vec<f64>, DenseSegment), OdeError> {
        let dim = self.dim;
        let expo = 0.2 - BETA * 0.75;
        loop {
            let mut h = self.h;
            let last = self.y + h >= y_end || (y_end - (self.y + h)) < 1e-12 * h;
            if last {
                h = y_end - self.y;
            }
            if h.abs() < 1e-14 * self.y.abs().max(1.0) {
                return Err(OdeError::StepUnderflow { y: self.y, h });
            }
            let y = self.y;
            let x = &self.x;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let tmp = &mut self.tmp;
            for i in 0..dim {
                tmp[i] = x[i] + h * A21 * k1[i];
            }
            (self.rhs)(y + C2 * h, tmp, k2);
            for i in 0..dim {
                tmp[i] = x[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            (self.rhs)(y + C3 * h, tmp, k3);
            for i in 0..dim {
                tmp[i] = x[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            (self.rhs)(y + C4 * h, tmp, k4);
            for i in 0..dim {
                tmp[i] = x[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            (self.rhs)(y + C5 * h, tmp, k5);
            for i in 0..dim {
                tmp[i] = x[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let y_new = if last { y_end } else { y + h };
            (self.rhs)(y + h, tmp, k6);
            let mut x_new = vec![0.0; dim];
            for i in 0..dim {
                x_new[i] = x[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            (self.rhs)(y_new, &x_new, k7);
            self.rhs_evals += 6;

            let mut err = 0.0;
            for i in 0..dim {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = self.tol.abs + self.tol.rel * x[i].abs().max(x_new[i].abs());
                err += (e / sk).powi(2);
            }
            let err = (err / dim as f64).sqrt();
            if !err.is_finite() || x_new.iter().any(|v| !v.is_finite()) {
                self.h *= FAC_MIN;
                self.rejected += 1;
                if self.h.abs() < 1e-14 * y.abs().max(1.0) {
                    return Err(OdeError::NonFinite(y));
                }
                continue;
            }
            let fac11 = err.powf(expo);
            if err <= 1.0 {
                let fac = (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.fac_old = err.max(1e-4);
                let mut coeffs = vec![0.0; 5 * dim];
                for i in 0..dim {
                    let diff = x_new[i] - x[i];
                    let bspl = h * k1[i] - diff;
                    coeffs[i] = x[i];
                    coeffs[dim + i] = diff;
                    coeffs[2 * dim + i] = bspl;
                    coeffs[3 * dim + i] = diff - h * k7[i] - bspl;
                    coeffs[4 * dim + i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let seg = DenseSegment { y0: y, h, coeffs };
                // FSAL
                let k7c = k7.clone();
                k1.copy_from_slice(&k7c);
                self.y = y_new;
                self.x.copy_from_slice(&x_new);
                self.h = h / fac;
                return Ok((y_new, x_new, seg));
            }
            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
            self.rejected += 1;
        }
    }
}

fn check_setup(y0: f64, y_end: f64, tol: Tolerances) -> Result<(), OdeError> {
    if !(tol.rel > 0.0 && tol.abs > 0.0) {
        return Err(OdeError::InvalidSetup("tolerances must be positive".into()));
    }
    if !(y_end > y0) || !y_end.is_finite() || !y0.is_finite() {
        return Err(OdeError::InvalidSetup(format!(
            "require finite y_end > y0 (got {y0} .. {y_end})"
        )));
    }
    Ok(())
}

/// Integrates `x' = rhs(y, x)` from `y0` to `y_end`.
pub fn integrate<F>(rhs: F, y0: f64, x0: &[f64], y_end: f64, tol: Tolerances) -> Result<Trajectory, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_impl(rhs, y0, x0, y_end, tol, |_, _, _| false)
}

/// Integrates until the first event of `ev` (or `y_end`), returning the
/// trajectory truncated at the step containing the event and the event.
pub fn integrate_until<F, G>(
    rhs: F,
    y0: f64,
    x0: &[f64],
    y_end: f64,
    tol: Tolerances,
    ev: &EventSpec<G>,
) -> Result<(Trajectory, Option<Event>), OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> f64,
{
    let mut g_prev = (ev.func)(y0, x0);
    let mut hit = None;
    let traj = integrate_impl(rhs, y0, x0, y_end, tol, |seg, y1, s1| {
        let mut found = Vec::new();
        g_prev = scan_segment(seg, seg.y0, y1, s1, g_prev, ev, &mut found);
        hit = found.into_iter().next();
        hit.is_some()
    })?;
    Ok((traj, hit))
}

fn integrate_impl<F, S>(rhs: F, y0: f64, x0: &[f64], y_end: f64, tol: Tolerances, mut stop: S) -> Result<Trajectory, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    S: FnMut(&DenseSegment, f64, &[f64]) -> bool,
{
    check_setup(y0, y_end, tol)?;
    let mut st = Stepper::new(rhs, y0, x0, y_end - y0, tol)?;
    let mut traj = Trajectory {
        dim: x0.len(),
        ys: vec![y0],
        states: vec![x0.to_vec()],
        segments: Vec::new(),
        tolerances: tol,
        rejected: 0,
        rhs_evals: 0,
    };
    while st.y < y_end {
        if traj.segments.len() >= MAX_STEPS {
            return Err(OdeError::TooManySteps(MAX_STEPS));
        }
        let (y, x, seg) = st.step(y_end)?;
        let done = stop(&seg, y, &x);
        traj.ys.push(y);
        traj.states.push(x);
        traj.segments.push(seg);
        if done {
            break;
        }
    }
    traj.rejected = st.rejected;
    traj.rhs_evals = st.rhs_evals;
    Ok(traj)
}

/// Dimension guard for callers that build fixed-size right-hand sides.
pub fn checked_dimension(expected: usize, x0: &[f64]) -> Result<(), OdeError> {
    if x0.len() != expected {
        return Err(OdeError::DimensionMismatch {
            expected,
            got: x0.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator(_: f64, x: &[f64], dx: &mut [f64]) {
        dx[0] = x[1];
        dx[1] = -x[0];
    }

    #[test]
    fn harmonic_oscillator_full_turn() {
        let traj = integrate(oscillator, 0.0, &[1.0, 0.0], 2.0 * PI, Tolerances::default()).unwrap();
        let end = traj.final_state();
        assert!((end[0] - 1.0).abs() < 1e-9);
        assert!(end[1].abs() < 1e-9);
        assert_eq!(traj.y_end(), 2.0 * PI);
    }

    #[test]
    fn observed_order_at_least_four() {
        // Endpoint error versus tolerance: error ∝ tol^{p/(p+1)} for a
        // method of local order p+1; with p ≥ 4 the exponent is ≥ 0.8.
        let err = |tol: f64| {
            let t = integrate(oscillator, 0.0, &[1.0, 0.0], 10.0, Tolerances::new(tol, tol).unwrap()).unwrap();
            ((t.final_state()[0] - 10f64.cos()).powi(2) + (t.final_state()[1] + 10f64.sin()).powi(2)).sqrt()
        };
        // Fixed-step reference: count steps, check step ratio per tolerance ratio.
        let steps = |tol: f64| {
            integrate(oscillator, 0.0, &[1.0, 0.0], 10.0, Tolerances::new(tol, tol).unwrap())
                .unwrap()
                .steps() as f64
        };
        let (e1, e2) = (err(1e-7), err(1e-10));
        assert!(e2 < e1);
        // steps ∝ tol^{-1/5}: ratio over three decades ≈ 10^{0.6} ≈ 4
        let ratio = steps(1e-10) / steps(1e-7);
        assert!(ratio > 2.5 && ratio < 6.5, "step ratio {ratio}");
        // error vs steps gives observed order log(e1/e2)/log(n2/n1)
        let order = (e1 / e2).ln() / ratio.ln();
        assert!(order >= 4.0, "observed order {order}");
    }

    #[test]
    fn nodes_reproduced_exactly() {
        let traj = integrate(oscillator, 0.0, &[1.0, 0.0], 5.0, Tolerances::default()).unwrap();
        for (y, s) in traj.ys().iter().zip(traj.states()) {
            assert_eq!(&traj.eval(*y).unwrap(), s);
        }
        assert!(traj.eval(-0.1).is_none());
        assert!(traj.eval(5.1).is_none());
    }

    #[test]
    fn dense_output_accuracy() {
        let traj = integrate(oscillator, 0.0, &[1.0, 0.0], 6.0, Tolerances::default()).unwrap();
        for i in 0..600 {
            let y = i as f64 * 0.01;
            let s = traj.eval(y).unwrap();
            assert!((s[0] - y.cos()).abs() < 1e-9, "y={y}");
        }
    }

    #[test]
    fn events_on_trivial_field() {
        let traj = integrate(|_, _, dx: &mut [f64]| dx[0] = 0.0, 0.1, &[0.0], 7.0, Tolerances::default()).unwrap();
        let ev = EventSpec::new(|y: f64, _: &[f64]| y.sin());
        let roots: Vec<f64> = find_events(&traj, &ev).iter().map(|e| e.y).collect();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - PI).abs() < 1e-10);
        assert!((roots[1] - 2.0 * PI).abs() < 1e-10);
        let rising = EventSpec::new(|y: f64, _: &[f64]| y.sin()).direction(Direction::Rising);
        let r: Vec<f64> = find_events(&traj, &rising).iter().map(|e| e.y).collect();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0 * PI).abs() < 1e-10);
        let falling = EventSpec::new(|y: f64, _: &[f64]| y.sin()).direction(Direction::Falling);
        assert_eq!(find_events(&traj, &falling).len(), 1);
    }

    #[test]
    fn no_events_gives_empty_list() {
        let traj = integrate(oscillator, 0.0, &[1.0, 0.0], 1.0, Tolerances::default()).unwrap();
        let ev = EventSpec::new(|_: f64, x: &[f64]| x[0] + 2.0);
        assert!(find_events(&traj, &ev).is_empty());
    }

    #[test]
    fn integrate_until_stops_at_first_root() {
        let ev = EventSpec::new(|_: f64, x: &[f64]| x[0]);
        let (traj, hit) = integrate_until(oscillator, 0.0, &[1.0, 0.0], 50.0, Tolerances::default(), &ev).unwrap();
        let hit = hit.unwrap();
        assert!((hit.y - PI / 2.0).abs() < 1e-10);
        assert!(traj.y_end() < 3.0);
    }

    #[test]
    fn invalid_setups() {
        assert!(integrate(oscillator, 1.0, &[1.0, 0.0], 0.5, Tolerances::default()).is_err());
        assert!(Tolerances::new(0.0, 1e-10).is_err());
        assert!(integrate(oscillator, 0.0, &[], 1.0, Tolerances::default()).is_err());
        assert!(checked_dimension(4, &[0.0; 3]).is_err());
    }

    #[test]
    fn blowup_reports_error() {
        // x' = x², x(0)=1 blows up at y=1
        let r = integrate(|_, x: &[f64], dx: &mut [f64]| dx[0] = x[0] * x[0], 0.0, &[1.0], 2.0, Tolerances::default());
        assert!(r.is_err());
    }

    #[test]
    fn json_record_has_nodes_only() {
        let traj = integrate(oscillator, 0.0, &[1.0, 0.0], 1.0, Tolerances::default()).unwrap();
        let v = serde_json::to_value(&traj).unwrap();
        assert_eq!(v["y"].as_array().unwrap().len(), traj.ys().len());
        assert_eq!(v["rel_tol"], 1e-11);
        assert!(v.get("coeffs").is_none());
    }
}
