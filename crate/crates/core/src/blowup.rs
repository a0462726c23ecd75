//! Single-point analysis with real data: normalization `τ = 4πt`, the sup of
//! the forcing, phase lines of the bounding flows `z' = ±K − V(z)`, lifespan
//! integrals, the Riccati reduction and asymptote fits near blow-up.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChargeTrajectory, RegularPart, Scenario, Side, Status, VectorField};
use crate::quadrature::{integrate_real, SphereQuadrature, Tolerance};

/// `τ = TIME_SCALE · t`.
pub const TIME_SCALE: f64 = 4.0 * PI;
/// Inflation of the sampled `K` where an over-bound is needed.
pub const K_SAFETY: f64 = 1.05;

/// Real scalar `V` of a one-point field.
pub fn scalar_v(field: &VectorField) -> Result<impl Fn(f64) -> Result<f64> + '_> {
    if field.dim() != 1 {
        return Err(Error::NotScalar);
    }
    Ok(move |s: f64| {
        let v = field.eval(&[Complex64::new(s, 0.0)])?[0];
        if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
            return Err(Error::NotReal);
        }
        Ok(v.re)
    })
}

/// `ζ'(τ) + V(ζ) = g(τ)` with `g(τ) = φ_f(τ/4π, y)`.
#[derive(Debug, Clone)]
pub struct NormalizedProblem {
    pub scenario: Scenario,
    pub zeta0: f64,
    /// `|ζ̇⁰|/4π`, the plateau of the singular part of the trace at `τ = 0⁺`.
    pub plateau: f64,
    pub time_scale: f64,
    pub quad_order: usize,
}

impl NormalizedProblem {
    /// Forcing in normalized time (right limits).
    pub fn g(&self, tau: f64, quad: &SphereQuadrature) -> Result<f64> {
        let v = self.scenario.trace(tau / self.time_scale, Side::Right, quad)?[0];
        if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
            return Err(Error::NotReal);
        }
        Ok(v.re)
    }

    pub fn physical_time(&self, tau: f64) -> f64 {
        tau / self.time_scale
    }
}

fn real_part(r: &RegularPart) -> bool {
    match r.mixture() {
        Some(m) => m.terms().iter().all(|g| g.amplitude.im == 0.0),
        None => true,
    }
}

pub fn normalize(scenario: &Scenario, quad_order: usize) -> Result<NormalizedProblem> {
    if scenario.dim() != 1 {
        return Err(Error::NotScalar);
    }
    let d = &scenario.data;
    if d.zeta0[0].im != 0.0 || d.zetadot0[0].im != 0.0 || !real_part(&d.regular_value) || !real_part(&d.regular_velocity) {
        return Err(Error::NotReal);
    }
    let v = scalar_v(&scenario.field)?;
    for s in [-1.5, -0.3, 0.7, 2.0] {
        v(s)?;
    }
    Ok(NormalizedProblem {
        scenario: scenario.clone(),
        zeta0: d.zeta0[0].re,
        plateau: d.zetadot0[0].norm() / (4.0 * PI),
        time_scale: TIME_SCALE,
        quad_order,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KEstimate {
    pub value: f64,
    /// `|K_L − K_{L−1}|` between the last two refinement levels.
    pub change: f64,
    pub levels: usize,
    /// Sampled maxima are lower bounds of the true sup.
    pub lower_bound: bool,
}

/// `max |g|` on nested uniform grids of `[0, horizon]` (level `l` has
/// `64·2^l` cells), together with `plateau`.
pub fn estimate_k<F>(mut g: F, horizon: f64, levels: usize, plateau: f64) -> Result<KEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(horizon > 0.0) || levels == 0 {
        return Err(Error::InvalidInput("estimate_k needs a positive horizon and one level".into()));
    }
    let mut best = plateau.abs();
    let mut prev = best;
    let mut change = 0.0;
    for l in 0..levels {
        let cells = 64usize << l;
        let step = if l == 0 { 1 } else { 2 };
        // Finer levels only add the odd nodes.
        let mut i = if l == 0 { 0 } else { 1 };
        while i <= cells {
            best = best.max(g(horizon * i as f64 / cells as f64)?.abs());
            i += step;
        }
        change = (best - prev).abs();
        prev = best;
    }
    Ok(KEstimate { value: best, change, levels, lower_bound: true })
}

/// Physical horizon after which the forcing of a one-point Gaussian
/// scenario is negligible: data support plus ten widths.
pub fn trace_horizon(scenario: &Scenario) -> f64 {
    let y = scenario.set.point(0);
    let mut h: f64 = 1.0;
    for r in [&scenario.data.regular_value, &scenario.data.regular_velocity] {
        if let Some(m) = r.mixture() {
            for g in m.terms() {
                h = h.max(g.center.distance(y) + 10.0 * g.width);
            }
        }
    }
    h.max(scenario.trace_breakpoints().into_iter().fold(0.0, f64::max) + 1.0)
}

/// Roots of `V(s) = value` on `[−bound, bound]`: sign changes on a uniform
/// scan refined by bisection, plus tangential roots found as near-zero local
/// minima of `|V − value|`.
pub fn roots<F>(v: &F, value: f64, bound: f64, scan: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let n = (scan.max(2) + 1) & !1;
    let xs: Vec<f64> = (0..=n).map(|i| -bound + 2.0 * bound * i as f64 / n as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| v(x).map(|y| y - value)).collect::<Result<_>>()?;
    let mut out: Vec<f64> = Vec::new();
    for i in 0..xs.len() {
        if fs[i] == 0.0 {
            out.push(xs[i]);
            continue;
        }
        if i + 1 < xs.len() && fs[i] * fs[i + 1] < 0.0 {
            let (mut a, mut b, fa) = (xs[i], xs[i + 1], fs[i]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if b - a <= 1e-12 {
                    break;
                }
                let fm = v(m)? - value;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        // Touching without crossing.
        if i > 0 && i + 1 < xs.len() && fs[i - 1] * fs[i + 1] > 0.0 && fs[i].abs() < fs[i - 1].abs() && fs[i].abs() < fs[i + 1].abs() && fs[i - 1] * fs[i] > 0.0 {
            let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
            for _ in 0..200 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if (v(m1)? - value).abs() < (v(m2)? - value).abs() {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let s = 0.5 * (a + b);
            if (v(s)? - value).abs() <= 1e-10 {
                out.push(s);
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(out)
}

/// `S₊ = {V = K}` and `S₋ = {V = −K}` on `[−bound, bound]`.
pub fn equilibria(field: &VectorField, k: f64, bound: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let v = scalar_v(field)?;
    Ok((roots(&v, k, bound, 4001)?, roots(&v, -k, bound, 4001)?))
}

/// Which bounding flow: `z' = K − V` (upper) or `z' = −K − V` (lower).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flow {
    Super,
    Sub,
}

impl Flow {
    fn sign(self) -> f64 {
        match self {
            Flow::Super => 1.0,
            Flow::Sub => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum IntegralOutcome {
    Converges(f64),
    Diverges,
}

/// Time for the flow `z' = ±K − V(z)` to run from `ζ₀` to `±∞`:
/// `∫ ds / (±K − V(s))` along `s = ζ₀ ± x`, `x ∈ [0, ∞)`, in doubling pieces.
pub fn comparison_integral(field: &VectorField, k: f64, zeta0: f64, flow: Flow, direction: Direction) -> Result<IntegralOutcome> {
    let v = scalar_v(field)?;
    let dir = match direction {
        Direction::Up => 1.0,
        Direction::Down => -1.0,
    };
    let rate = |s: f64| -> Result<f64> { Ok(flow.sign() * k - v(s)?) };
    // The flow must move monotonically in `direction` along the whole path.
    for i in 0..=2100 {
        let x = if i == 0 { 0.0 } else { 10f64.powf(-6.0 + (i - 1) as f64 / 100.0) };
        let s = zeta0 + dir * x;
        let r = rate(s)?;
        if !(r * dir > 0.0) && r.is_finite() {
            return Err(Error::SignChange(s));
        }
    }
    if let VectorField::PowerLaw { sigma, .. } = field {
        if sigma[0] + 1.0 <= 1.0 && k >= 0.0 {
            return Ok(IntegralOutcome::Diverges);
        }
    }
    // After the first unit the path is followed in w = ln|s − ζ₀|, which
    // keeps the partial pieces well conditioned far out.
    let tol = Tolerance::new(1e-15, 1e-12);
    let mut total = integrate_real(|x| Ok(1.0 / (rate(zeta0 + dir * x)? * dir)), 0.0, 1.0, &[], tol)?;
    let mut growth = Vec::new();
    let step = 2.0 * std::f64::consts::LN_2;
    for m in 0..26 {
        let (lo, hi) = (m as f64 * step, (m + 1) as f64 * step);
        let piece = integrate_real(
            |w| {
                let x = w.exp();
                let val = x / (rate(zeta0 + dir * x)? * dir);
                Ok(if val.is_finite() { val } else { 0.0 })
            },
            lo,
            hi,
            &[],
            tol,
        )?;
        total += piece;
        growth.push(piece.abs() / total.abs().max(1e-300));
    }
    let g = &growth[growth.len() - 2..];
    if g.iter().all(|&x| x > 0.01) {
        return Ok(IntegralOutcome::Diverges);
    }
    Ok(IntegralOutcome::Converges(total))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    GlobalEvidence,
    BlowupUp(f64),
    BlowupDown(f64),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralDiagnostic {
    pub flow: Flow,
    pub direction: Direction,
    /// `None` when the integral diverges; `Err` text if inapplicable.
    pub value: std::result::Result<Option<f64>, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoteFit {
    pub t_star: f64,
    pub c: f64,
    pub residual: f64,
    /// Slope of `log|ζ|` against `log|T_* − t|`.
    pub exponent: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    pub k_est: f64,
    pub k_used: f64,
    pub verdict: Verdict,
    /// Physical counterpart of a blow-up bound.
    pub t_upper_physical: Option<f64>,
    pub s_plus: Vec<f64>,
    pub s_minus: Vec<f64>,
    pub trapping: Option<(f64, f64)>,
    pub integrals: Vec<IntegralDiagnostic>,
    pub fitted: Option<AsymptoteFit>,
    pub time_scale: f64,
}

/// Where the flow `z' = ±K − V` started at `ζ₀` goes: `Ok(Some(s))` if it
/// stops at the equilibrium `s`, `Ok(None)` if it runs off to infinity in the
/// returned direction.
fn destination(rate0: f64, zeta0: f64, eq: &[f64]) -> (Direction, Option<f64>) {
    if rate0 > 0.0 {
        (Direction::Up, eq.iter().copied().find(|&s| s >= zeta0))
    } else if rate0 < 0.0 {
        (Direction::Down, eq.iter().rev().copied().find(|&s| s <= zeta0))
    } else {
        (Direction::Up, Some(zeta0))
    }
}

/// Phase-line verdict from the bounding flows `z_± ' = ±K − V(z)` with
/// `K = K_SAFETY · k_est`. Equilibria are searched on `[−bound, bound]`.
pub fn classify(field: &VectorField, k_est: f64, zeta0: f64, bound: f64) -> Result<BlowupReport> {
    let v = scalar_v(field)?;
    let k = K_SAFETY * k_est.abs();
    let (s_plus, s_minus) = equilibria(field, k, bound)?;
    let (up_dir, up_stop) = destination(k - v(zeta0)?, zeta0, &s_plus);
    let (lo_dir, lo_stop) = destination(-k - v(zeta0)?, zeta0, &s_minus);
    let mut integrals = Vec::new();
    let mut run = |flow: Flow, direction: Direction| -> Option<f64> {
        let value = match comparison_integral(field, k, zeta0, flow, direction) {
            Ok(IntegralOutcome::Converges(t)) => Ok(Some(t)),
            Ok(IntegralOutcome::Diverges) => Ok(None),
            Err(e) => Err(e.to_string()),
        };
        let t = value.clone().ok().flatten();
        integrals.push(IntegralDiagnostic { flow, direction, value });
        t
    };
    let mut verdict = Verdict::Inconclusive;
    // The lower flow escaping upwards drags ζ with it.
    if lo_dir == Direction::Up && lo_stop.is_none() {
        if let Some(t) = run(Flow::Sub, Direction::Up) {
            verdict = Verdict::BlowupUp(t);
        }
    }
    if up_dir == Direction::Down && up_stop.is_none() {
        if let Some(t) = run(Flow::Super, Direction::Down) {
            verdict = Verdict::BlowupDown(t);
        }
    }
    let mut trapping = None;
    if verdict == Verdict::Inconclusive {
        let upper = if up_dir == Direction::Up { up_stop } else { Some(zeta0) };
        let lower = if lo_dir == Direction::Down { lo_stop } else { Some(zeta0) };
        if let (Some(a), Some(b)) = (lower, upper) {
            verdict = Verdict::GlobalEvidence;
            trapping = Some((a, b));
        } else {
            if upper.is_none() {
                run(Flow::Super, Direction::Up);
            }
            if lower.is_none() {
                run(Flow::Sub, Direction::Down);
            }
        }
    }
    let t_upper_physical = match verdict {
        Verdict::BlowupUp(t) | Verdict::BlowupDown(t) => Some(t / TIME_SCALE),
        _ => None,
    };
    Ok(BlowupReport {
        k_est,
        k_used: k,
        verdict,
        t_upper_physical,
        s_plus,
        s_minus,
        trapping,
        integrals,
        fitted: None,
        time_scale: TIME_SCALE,
    })
}

/// Normalize, estimate `K` over the trace horizon and classify.
pub fn analyze(scenario: &Scenario, quad_order: usize, levels: usize, bound: f64) -> Result<(BlowupReport, KEstimate)> {
    let p = normalize(scenario, quad_order)?;
    let quad = SphereQuadrature::new(quad_order)?;
    let horizon = TIME_SCALE * trace_horizon(scenario);
    let k = estimate_k(|tau| p.g(tau, &quad), horizon, levels, p.plateau)?;
    Ok((classify(&scenario.field, k.value, p.zeta0, bound)?, k))
}

/// `P(τ, z) = z'(τ) + V(z(τ)) − g(τ)` at the given times; `z` returns value
/// and derivative.
pub fn defect_eval<Z, G>(z: Z, field: &VectorField, g: G, times: &[f64]) -> Result<Vec<f64>>
where
    Z: Fn(f64) -> Result<(f64, f64)>,
    G: Fn(f64) -> Result<f64>,
{
    let v = scalar_v(field)?;
    times
        .iter()
        .map(|&t| {
            let (val, der) = z(t)?;
            Ok(der + v(val)? - g(t)?)
        })
        .collect()
}

fn rk4_step<F>(f: &F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let add = |a: &[f64], b: &[f64], s: f64| a.iter().zip(b).map(|(x, y)| x + s * y).collect::<Vec<_>>();
    let k1 = f(t, y)?;
    let k2 = f(t + h / 2.0, &add(y, &k1, h / 2.0))?;
    let k3 = f(t + h / 2.0, &add(y, &k2, h / 2.0))?;
    let k4 = f(t + h, &add(y, &k3, h))?;
    Ok((0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Fixed-step RK4 for a first-order system; stops early if a component
/// exceeds `limit` in magnitude. Returns times and states.
pub fn rk4<F>(f: F, y0: &[f64], t_max: f64, h: f64, limit: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidInput("rk4 needs h > 0 and t_max ≥ 0".into()));
    }
    let steps = (t_max / h).ceil() as usize;
    let mut ts = vec![0.0];
    let mut ys = vec![y0.to_vec()];
    for i in 0..steps {
        let t = ts[i];
        let hh = (t_max - t).min(h);
        let y = rk4_step(&f, t, &ys[i], hh)?;
        let stop = y.iter().any(|v| !v.is_finite() || v.abs() > limit);
        ts.push(t + hh);
        ys.push(y);
        if stop {
            break;
        }
    }
    Ok((ts, ys))
}

/// Bounding flow `z' = ±K − V(z) + extra`, integrated by RK4.
pub fn bounding_flow(field: &VectorField, k: f64, flow: Flow, zeta0: f64, tau_max: f64, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let v = scalar_v(field)?;
    let (t, y) = rk4(|_, z| Ok(vec![flow.sign() * k - v(z[0])?]), &[zeta0], tau_max, h, 1e12)?;
    Ok((t, y.into_iter().map(|s| s[0]).collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiResult {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub udot: Vec<f64>,
    /// `ζ = u'/(αu)`; infinite where `u = 0`.
    pub zeta: Vec<f64>,
    /// First zero of `u`, the blow-up time of `ζ`.
    pub t_star: Option<f64>,
}

/// `ζ' + αζ² = g` through `ζ = u'/(αu)`, `u'' = α g u`.
pub fn riccati_reduce<G>(alpha: f64, g: G, u0: f64, udot0: f64, tau_max: f64, h: f64) -> Result<RiccatiResult>
where
    G: Fn(f64) -> Result<f64>,
{
    if alpha == 0.0 {
        return Err(Error::InvalidInput("alpha must be non-zero".into()));
    }
    let f = |t: f64, y: &[f64]| -> Result<Vec<f64>> { Ok(vec![y[1], alpha * g(t)? * y[0]]) };
    let mut times = vec![0.0];
    let mut states = vec![vec![u0, udot0]];
    let mut t_star = None;
    let steps = (tau_max / h).ceil() as usize;
    for i in 0..steps {
        let t = times[i];
        let hh = (tau_max - t).min(h);
        let y = rk4_step(&f, t, &states[i], hh)?;
        if t_star.is_none() && states[i][0] != 0.0 && y[0] * states[i][0] <= 0.0 {
            // Bisect on the sub-step length from the last state.
            let (mut a, mut b) = (0.0, hh);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                let ym = rk4_step(&f, t, &states[i], m)?;
                if ym[0] * states[i][0] > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            t_star = Some(t + 0.5 * (a + b));
        }
        times.push(t + hh);
        states.push(y);
    }
    let u: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let udot: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let zeta = u.iter().zip(&udot).map(|(a, b)| b / (alpha * a)).collect();
    Ok(RiccatiResult { times, u, udot, zeta, t_star })
}

/// Least-squares fit of `ζ ≈ C/(t − T_*)` through `1/ζ` on the samples in
/// the last decade of `|ζ|` before escape.
pub fn fit_samples(times: &[f64], values: &[f64]) -> Result<AsymptoteFit> {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].abs() >= peak / 10.0 && values[i] != 0.0).collect();
    if idx.len() < 20 {
        return Err(Error::InsufficientSamples { got: idx.len(), needed: 20 });
    }
    let n = idx.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let t0 = times[idx[0]];
    for &i in &idx {
        let x = times[i] - t0;
        let y = 1.0 / values[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let icept = (sy - slope * sx) / n;
    let c = 1.0 / slope;
    let t_star = t0 - icept / slope;
    let mut residual: f64 = 0.0;
    let (mut lx, mut ly, mut lxx, mut lxy) = (0.0, 0.0, 0.0, 0.0);
    let mut used = 0.0;
    for &i in &idx {
        let fit = c / (times[i] - t_star);
        residual = residual.max(((fit - values[i]) / values[i]).abs());
        let gap = (t_star - times[i]).abs();
        if gap > 0.0 {
            let (x, y) = (gap.ln(), values[i].abs().ln());
            lx += x;
            ly += y;
            lxx += x * x;
            lxy += x * y;
            used += 1.0;
        }
    }
    let exponent = (used * lxy - lx * ly) / (used * lxx - lx * lx);
    Ok(AsymptoteFit { t_star, c, residual, exponent, samples: idx.len() })
}

/// [`fit_samples`] on component `j` of an escaped trajectory (physical time).
pub fn fit_blowup_asymptote(traj: &ChargeTrajectory, j: usize) -> Result<AsymptoteFit> {
    if !matches!(traj.status, Status::Escaped(_)) {
        return Err(Error::InsufficientSamples { got: 0, needed: 20 });
    }
    let vals: Vec<f64> = traj.zeta.iter().map(|z| z[j].re).collect();
    fit_samples(&traj.times, &vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CustomTrace, FreeWave, InitialData, InteractionSet, Point3};

    fn quadratic() -> VectorField {
        // V(s) = −s².
        VectorField::polynomial(vec![vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]]).unwrap()
    }

    fn linear_v() -> VectorField {
        VectorField::diagonal(&[1.0])
    }

    #[test]
    fn normalization_examples() {
        let set = InteractionSet::single(Point3::ORIGIN);
        let mut data = InitialData::zero(1);
        data.zeta0[0] = Complex64::new(2.0, 0.0);
        let sc = Scenario::new(set.clone(), VectorField::zero(1), data.clone())
            .unwrap()
            .with_free(FreeWave::Custom(CustomTrace::constant(vec![Complex64::new(0.25, 0.0)])));
        let p = normalize(&sc, 4).unwrap();
        let q = SphereQuadrature::new(4).unwrap();
        assert_eq!(p.g(3.0, &q).unwrap(), 0.25);
        assert!((p.physical_time(4.0 * PI) - 1.0).abs() < 1e-15);
        let two = Scenario::new(
            InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)]).unwrap(),
            VectorField::zero(2),
            InitialData::zero(2),
        )
        .unwrap();
        assert!(matches!(normalize(&two, 4), Err(Error::NotScalar)));
        let mut cdata = data;
        cdata.zeta0[0] = Complex64::new(1.0, 1.0);
        let complex = Scenario::new(set, VectorField::zero(1), cdata).unwrap();
        assert!(matches!(normalize(&complex, 4), Err(Error::NotReal)));
    }

    #[test]
    fn k_estimate_examples() {
        let k = estimate_k(|_| Ok(0.0), 10.0, 3, 0.0).unwrap();
        assert_eq!(k.value, 0.0);
        // Pure singular Coulomb datum: trace ≡ 1 for τ > 0.
        let set = InteractionSet::single(Point3::ORIGIN);
        let mut data = InitialData::zero(1);
        data.zetadot0[0] = Complex64::new(4.0 * PI, 0.0);
        data.profile = crate::model::SingularProfile::Coulomb;
        let sc = Scenario::new(set, VectorField::diagonal(&[1.0]), data).unwrap();
        let (rep, k) = analyze(&sc, 8, 3, 10.0).unwrap();
        assert_eq!(k.value, 1.0);
        assert!((rep.k_used - 1.05).abs() < 1e-15);
    }

    #[test]
    fn equilibria_examples() {
        let (p, m) = equilibria(&linear_v(), 1.0, 10.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && (m[0] + 1.0).abs() < 1e-12 && p.len() == 1 && m.len() == 1);
        let pl = VectorField::power_law(vec![1.0], vec![1.0]).unwrap();
        let (p, m) = equilibria(&pl, 1.0, 10.0).unwrap();
        assert_eq!((p.len(), m.len()), (1, 1));
        assert!((p[0] - 1.0).abs() < 1e-12 && (m[0] + 1.0).abs() < 1e-12);
        let sq = VectorField::polynomial(vec![vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]]).unwrap();
        let (p, m) = equilibria(&sq, 1.0, 10.0).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p[0] + 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12 && m.is_empty());
        let (p, _) = equilibria(&quadratic(), 0.0, 10.0).unwrap();
        assert_eq!(p, vec![0.0]);
    }

    #[test]
    fn comparison_integral_examples() {
        match comparison_integral(&quadratic(), 0.0, 1.0, Flow::Super, Direction::Up).unwrap() {
            IntegralOutcome::Converges(t) => assert!((t - 1.0).abs() < 1e-6, "{t}"),
            o => panic!("{o:?}"),
        }
        assert!(matches!(comparison_integral(&linear_v(), 1.0, 0.0, Flow::Super, Direction::Up), Err(Error::SignChange(_))));
        let attractive = VectorField::power_law(vec![-1.0], vec![1.0]).unwrap();
        match comparison_integral(&attractive, 1.0, 2.0, Flow::Sub, Direction::Up).unwrap() {
            IntegralOutcome::Converges(t) => assert!((t - 0.5 * 3f64.ln()).abs() < 1e-6, "{t}"),
            o => panic!("{o:?}"),
        }
        // z' = 1 + 0·z never blows up: ∫ ds diverges.
        assert_eq!(
            comparison_integral(&VectorField::zero(1), 1.0, 0.0, Flow::Super, Direction::Up).unwrap(),
            IntegralOutcome::Diverges
        );
        // Logarithmic divergence of ∫ ds/s.
        let lin = VectorField::diagonal(&[-1.0]);
        assert_eq!(comparison_integral(&lin, 0.0, 1.0, Flow::Super, Direction::Up).unwrap(), IntegralOutcome::Diverges);
    }

    #[test]
    fn classify_examples() {
        let pl = VectorField::power_law(vec![1.0], vec![1.0]).unwrap();
        let r = classify(&pl, 1.0, 0.5, 10.0).unwrap();
        assert_eq!(r.verdict, Verdict::GlobalEvidence);
        let (a, b) = r.trapping.unwrap();
        assert!(a >= -1.05f64.sqrt() - 1e-9 && b <= 1.05f64.sqrt() + 1e-9);
        let r = classify(&quadratic(), 0.0, 1.0, 10.0).unwrap();
        match r.verdict {
            Verdict::BlowupUp(t) => assert!((t - 1.0).abs() < 1e-6),
            v => panic!("{v:?}"),
        }
        assert!((r.t_upper_physical.unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-6);
        let r = classify(&quadratic(), 0.0, -1.0, 10.0).unwrap();
        assert_eq!(r.verdict, Verdict::GlobalEvidence);
        assert_eq!(r.trapping, Some((-1.0, 0.0)));
    }

    #[test]
    fn defect_examples() {
        // ζ = 1/(1−τ) solves ζ' − ζ² = 0.
        let d = defect_eval(|t| Ok((1.0 / (1.0 - t), 1.0 / ((1.0 - t) * (1.0 - t)))), &quadratic(), |_| Ok(0.0), &[0.0, 0.3, 0.9]).unwrap();
        assert!(d.iter().all(|x| x.abs() < 1e-12));
        // A supersolution with K = 1 and g = cos: P = K − g ≥ 0.
        let (ts, zs) = bounding_flow(&linear_v(), 1.0, Flow::Super, 0.2, 2.0, 1e-3).unwrap();
        let i = 700;
        let rate = 1.0 - zs[i];
        let d = defect_eval(|_| Ok((zs[i], rate)), &linear_v(), |t: f64| Ok(t.cos()), &[ts[i]]).unwrap();
        assert!((d[0] - (1.0 - ts[i].cos())).abs() < 1e-12 && d[0] >= 0.0);
    }

    #[test]
    fn riccati_examples() {
        let r = riccati_reduce(1.0, |_| Ok(0.0), 1.0, -1.0, 1.5, 1e-3).unwrap();
        assert!((r.t_star.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.zeta[500] + 1.0 / (1.0 - r.times[500])).abs() < 1e-9);
        let r = riccati_reduce(1.0, |_| Ok(0.0), 1.0, 0.0, 1.0, 1e-3).unwrap();
        assert!(r.zeta.iter().all(|&z| z == 0.0) && r.t_star.is_none());
        // g ≡ 1: ζ' = 1 − ζ² from ζ(0) = −2 (u0 = 1, u'0 = −2).
        let r = riccati_reduce(1.0, |_| Ok(1.0), 1.0, -2.0, 0.5, 1e-3).unwrap();
        let (_, direct) = rk4(|_, z| Ok(vec![1.0 - z[0] * z[0]]), &[-2.0], 0.5, 1e-4, 1e12).unwrap();
        for i in (0..=500).step_by(50) {
            assert!((r.zeta[i] - direct[10 * i][0]).abs() < 1e-6);
        }
    }

    #[test]
    fn asymptote_fit_examples() {
        let mut ts: Vec<f64> = (0..400).map(|i| 0.99 * (1.0 - (-(i as f64) / 40.0).exp())).collect();
        ts.dedup();
        let vals: Vec<f64> = ts.iter().map(|&x| 1.0 / (1.0 - x)).collect();
        let f = fit_samples(&ts, &vals).unwrap();
        assert!((f.t_star - 1.0).abs() < 1e-8 && (f.c + 1.0).abs() < 1e-8 && f.residual <= 1e-8, "{f:?}");
        assert!((f.exponent + 1.0).abs() < 0.01);
        assert!(matches!(fit_samples(&ts[..10], &[1.0; 10]), Err(Error::InsufficientSamples { .. })));
    }
}
