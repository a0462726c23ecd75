//! Method-of-steps integration of the charge equation
//!
//! `ζ̇_j(t) = Σ_{i≠j} θ(t − d_ij) ζ_i(t − d_ij)/d_ij + 4π φ_f(t, y_j) − 4π V_j(ζ(t))`
//!
//! with classical RK4, breakpoint landing and cubic Hermite dense output.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ChargeTrajectory, InitialData, Scenario, Segment, Side, Status};
use crate::quadrature::SphereQuadrature;

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub t_max: f64,
    pub escape_threshold: f64,
    pub breakpoint_depth: usize,
    pub quad_order: usize,
    /// Relative tolerance of the step-doubling check.
    pub local_tol: f64,
    pub max_halvings: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            t_max: 1.0,
            escape_threshold: 1e8,
            breakpoint_depth: 2,
            quad_order: 16,
            local_tol: 1e-9,
            max_halvings: 8,
        }
    }
}

impl IntegratorConfig {
    pub fn new(step: f64, t_max: f64) -> Self {
        Self { step, t_max, ..Self::default() }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidInput(format!("step must be positive, got {}", self.step)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidInput(format!("t_max must be positive, got {}", self.t_max)));
        }
        if let Some(d) = scenario.set.d_min() {
            if self.step > d {
                return Err(Error::InvalidInput(format!("step {} exceeds the smallest delay {d}", self.step)));
            }
        }
        let z0 = scenario.data.zeta0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(self.escape_threshold > z0) {
            return Err(Error::InvalidInput(format!(
                "escape threshold {} does not exceed the initial charge {z0}",
                self.escape_threshold
            )));
        }
        if self.quad_order == 0 {
            return Err(Error::InvalidInput("quadrature order must be positive".into()));
        }
        Ok(())
    }
}

/// Right-hand side with a small memo of trace values.
struct Rhs<'a> {
    scenario: &'a Scenario,
    quad: SphereQuadrature,
    /// Times where the forcing may jump; elsewhere the side is irrelevant.
    jumps: Vec<f64>,
    cache: RefCell<HashMap<(u64, bool), Vec<Complex64>>>,
}

impl<'a> Rhs<'a> {
    fn new(scenario: &'a Scenario, quad_order: usize) -> Result<Self> {
        let mut jumps = scenario.trace_breakpoints();
        jumps.push(0.0);
        Ok(Self { scenario, quad: SphereQuadrature::new(quad_order)?, jumps, cache: RefCell::new(HashMap::new()) })
    }

    fn trace(&self, t: f64, side: Side) -> Result<Vec<Complex64>> {
        let side = if self.jumps.iter().any(|&b| b == t) { side } else { Side::Right };
        let key = (t.to_bits(), side == Side::Right);
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.scenario.trace(t, side, &self.quad)?;
        let mut cache = self.cache.borrow_mut();
        if cache.len() > 64 {
            cache.retain(|k, _| f64::from_bits(k.0) >= t - 1e-9);
        }
        cache.insert(key, v.clone());
        Ok(v)
    }

    fn eval(&self, t: f64, y: &[Complex64], hist: &ChargeTrajectory, side: Side) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let trace = self.trace(t, side)?;
        let out = rhs_with_trace(t, y, hist, self.scenario, &trace, side)?;
        Ok((out, trace))
    }
}

fn rhs_with_trace(
    t: f64,
    y: &[Complex64],
    hist: &ChargeTrajectory,
    scenario: &Scenario,
    trace: &[Complex64],
    side: Side,
) -> Result<Vec<Complex64>> {
    let set = &scenario.set;
    let n = set.len();
    let v = scenario.field.eval(y)?;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = (trace[j] - v[j]) * FOUR_PI;
        for i in 0..n {
            if i == j {
                continue;
            }
            let d = set.dist(i, j);
            let lag = t - d;
            let open = lag > 0.0 || (lag == 0.0 && side == Side::Right);
            if open {
                acc += hist.value(i, lag)? / d;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// The derivative vector of the charge equation at `t > 0` given the
/// history; `side` selects one-sided limits at `t = 0`, at delay gates and
/// at jumps of the forcing.
pub fn rhs_forward(
    t: f64,
    zeta_now: &[Complex64],
    history: &ChargeTrajectory,
    scenario: &Scenario,
    quad: &SphereQuadrature,
    side: Side,
) -> Result<Vec<Complex64>> {
    let trace = scenario.trace(t, side, quad)?;
    rhs_with_trace(t, zeta_now, history, scenario, &trace, side)
}

/// Sums of up to `depth` delays on top of `0` and the forcing breakpoints,
/// restricted to `(0, t_max]`.
pub fn breakpoints(scenario: &Scenario, t_max: f64, depth: usize) -> Vec<f64> {
    let delays = scenario.set.delays();
    let mut level: Vec<f64> = vec![0.0];
    level.extend(scenario.trace_breakpoints().into_iter().filter(|&b| b <= t_max));
    let mut all = level.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for &s in &level {
            for &d in &delays {
                let v = s + d;
                if v <= t_max {
                    next.push(v);
                }
            }
        }
        all.extend(next.iter().copied());
        level = next;
    }
    all.retain(|&b| b > 0.0 && b <= t_max);
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));
    all
}

fn axpy(y: &[Complex64], h: f64, k: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

fn rk4(rhs: &Rhs, t: f64, y: &[Complex64], k1: &[Complex64], h: f64, hist: &ChargeTrajectory) -> Result<Vec<Complex64>> {
    let (k2, _) = rhs.eval(t + 0.5 * h, &axpy(y, 0.5 * h, k1), hist, Side::Right)?;
    let (k3, _) = rhs.eval(t + 0.5 * h, &axpy(y, 0.5 * h, &k2), hist, Side::Right)?;
    let (k4, _) = rhs.eval(t + h, &axpy(y, h, &k3), hist, Side::Left)?;
    Ok((0..y.len()).map(|j| y[j] + (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0)).collect())
}

fn max_norm(y: &[Complex64]) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrate forward from `t = 0`. Failures after the start are recorded in
/// the status together with the history computed so far.
pub fn integrate_partial(scenario: &Scenario, config: &IntegratorConfig) -> Result<ChargeTrajectory> {
    config.validate(scenario)?;
    let rhs = Rhs::new(scenario, config.quad_order)?;
    let bps = breakpoints(scenario, config.t_max, config.breakpoint_depth);
    let y0 = scenario.data.zeta0.clone();
    let empty = ChargeTrajectory::start(y0.clone(), vec![Complex64::new(0.0, 0.0); y0.len()], vec![Complex64::new(0.0, 0.0); y0.len()]);
    let (k0, f0) = rhs.eval(0.0, &y0, &empty, Side::Right)?;
    let mut traj = ChargeTrajectory::start(y0, k0, f0);
    let mut h_cur = config.step;
    let mut bp_idx = 0;
    loop {
        let t = traj.t_end();
        if t >= config.t_max {
            traj.status = Status::Completed(t);
            return Ok(traj);
        }
        while bp_idx < bps.len() && bps[bp_idx] <= t {
            bp_idx += 1;
        }
        let target = if bp_idx < bps.len() { bps[bp_idx].min(config.t_max) } else { config.t_max };
        let y = traj.zeta.last().unwrap().clone();
        let k1 = traj.zetadot.last().unwrap().clone();
        let mut halvings = 0;
        let (t_new, y_new) = loop {
            let (h, t_new) = if t + h_cur >= target - 1e-12 * target.max(1.0) { (target - t, target) } else { (h_cur, t + h_cur) };
            let step = (|| -> Result<(Vec<Complex64>, f64)> {
                let full = rk4(&rhs, t, &y, &k1, h, &traj)?;
                let half1 = rk4(&rhs, t, &y, &k1, 0.5 * h, &traj)?;
                let (km, _) = rhs.eval(t + 0.5 * h, &half1, &traj, Side::Right)?;
                let half2 = rk4(&rhs, t + 0.5 * h, &half1, &km, 0.5 * h, &traj)?;
                let est = full
                    .iter()
                    .zip(&half2)
                    .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
                    .fold(0.0, f64::max);
                Ok((full, est))
            })();
            match step {
                Ok((full, est)) if est.is_finite() && est <= config.local_tol => {
                    if est < config.local_tol / 64.0 && h_cur < config.step && h == h_cur {
                        h_cur = (2.0 * h_cur).min(config.step);
                    }
                    break (t_new, full);
                }
                Ok(_) | Err(Error::NonFinite(_)) | Err(Error::Domain(_)) if halvings < config.max_halvings => {
                    halvings += 1;
                    h_cur = 0.5 * h.min(h_cur);
                }
                Ok(_) => {
                    traj.status = Status::Failed(Error::StiffnessFailure { t });
                    return Ok(traj);
                }
                Err(e) => {
                    traj.status = Status::Failed(e);
                    return Ok(traj);
                }
            }
        };
        let left = rhs.eval(t_new, &y_new, &traj, Side::Left);
        let d1 = match left {
            Ok((d, _)) => d,
            Err(e) => {
                traj.status = Status::Failed(e);
                return Ok(traj);
            }
        };
        let seg = Segment { t0: t, t1: t_new, y0: y.clone(), y1: y_new.clone(), d0: k1.clone(), d1 };
        if max_norm(&y_new) >= config.escape_threshold {
            let t_esc = bisect_escape(&seg, config.escape_threshold);
            let (kr, fr) = rhs.eval(t_new, &y_new, &traj, Side::Right).unwrap_or_else(|_| (seg.d1.clone(), vec![Complex64::new(f64::NAN, 0.0); y.len()]));
            traj.push(seg, kr, fr);
            traj.status = Status::Escaped(t_esc);
            return Ok(traj);
        }
        match rhs.eval(t_new, &y_new, &traj, Side::Right) {
            Ok((kr, fr)) => traj.push(seg, kr, fr),
            Err(e) => {
                let d1 = seg.d1.clone();
                traj.push(seg, d1, vec![Complex64::new(f64::NAN, 0.0); y.len()]);
                traj.status = Status::Failed(e);
                return Ok(traj);
            }
        }
    }
}

fn bisect_escape(seg: &Segment, threshold: f64) -> f64 {
    let size = |t: f64| (0..seg.y0.len()).map(|j| seg.value(t, j).norm()).fold(0.0, f64::max);
    let (mut a, mut b) = (seg.t0, seg.t1);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if size(m) >= threshold {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Integrate forward; a failed run is reported as an error.
pub fn integrate(scenario: &Scenario, config: &IntegratorConfig) -> Result<ChargeTrajectory> {
    let traj = integrate_partial(scenario, config)?;
    if let Status::Failed(e) = &traj.status {
        return Err(e.clone());
    }
    Ok(traj)
}

/// `max_j |ζ̇_j(0⁺) − ζ̇⁰_j|`.
pub fn jump_consistency(trajectory: &ChargeTrajectory, data: &InitialData) -> f64 {
    trajectory.zetadot[0]
        .iter()
        .zip(&data.zetadot0)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// The forward problem whose solution, read at `−t`, is the backward
/// solution of `scenario`.
pub fn reflect_backward(scenario: &Scenario) -> Scenario {
    let mut s = scenario.clone();
    s.reversed = !s.reversed;
    s
}
