//! Reconstruction of `φ(t, x)` from the charges and the free evolution,
//! boundary-condition checks and the restart used for the group property.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::delayode;
use crate::error::{Error, Result};
use crate::freewave;
use crate::model::{
    ChargeTrajectory, CustomTrace, FreeWave, InitialData, InteractionSet, Point3, Scenario, Side, Status, VectorField,
};
use crate::quadrature::SphereQuadrature;

const FOUR_PI: f64 = 4.0 * PI;

/// `|t| < T + min_j |x − y_j|`: the point lies in the region determined by
/// a charge history of lifespan `T`.
pub fn domain_e_contains(set: &InteractionSet, lifespan: f64, t: f64, x: Point3) -> bool {
    let (_, r) = set.nearest(x);
    t.abs() < lifespan + r
}

fn check_domain(traj: &ChargeTrajectory, set: &InteractionSet, t: f64, x: Point3) -> Result<()> {
    if let Status::Escaped(lifespan) = traj.status {
        if !domain_e_contains(set, lifespan, t, x) {
            return Err(Error::OutsideDomain { t, lifespan });
        }
    }
    Ok(())
}

/// Charge at the retarded time `t − sgn(t) r`; only `t ≥ 0` histories are stored.
fn retarded(traj: &ChargeTrajectory, j: usize, t: f64, r: f64) -> Result<Complex64> {
    let tr = if t >= 0.0 { t - r } else { t + r };
    traj.value(j, tr)
}

/// `φ(t, x) = φ_f(t, x) + Σ_j θ(|t| − r_j) ζ_j(t − sgn(t) r_j) / (4π r_j)`.
/// On a light cone the interior limit is returned.
pub fn reconstruct(
    traj: &ChargeTrajectory,
    data: &InitialData,
    set: &InteractionSet,
    t: f64,
    x: Point3,
    quad: &SphereQuadrature,
) -> Result<Complex64> {
    let (k, rmin) = set.nearest(x);
    if rmin == 0.0 {
        return Err(Error::SingularPoint(k));
    }
    check_domain(traj, set, t, x)?;
    let mut v = freewave::free_field(data, set, t, x, quad)?;
    for (j, &y) in set.points().iter().enumerate() {
        let r = x.distance(y);
        if t.abs() >= r {
            v += retarded(traj, j, t, r)? / (FOUR_PI * r);
        }
    }
    Ok(v)
}

fn centered_dt<F>(mut f: F, t: f64, h: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let d = |f: &mut F, h: f64| -> Result<Complex64> { Ok((f(t + h)? - f(t - h)?) / (2.0 * h)) };
    let coarse = d(&mut f, h)?;
    let fine = d(&mut f, 0.5 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// `∂_t φ(t, x)` by a Richardson-extrapolated centred difference.
pub fn reconstruct_dt(
    traj: &ChargeTrajectory,
    data: &InitialData,
    set: &InteractionSet,
    t: f64,
    x: Point3,
    h_t: f64,
    quad: &SphereQuadrature,
) -> Result<Complex64> {
    let required = 2.0 * h_t;
    for &y in set.points() {
        let margin = (t.abs() - x.distance(y)).abs();
        if margin <= required {
            return Err(Error::LightConeProximity { margin, required });
        }
    }
    reconstruct_dt_unchecked(traj, data, set, t, x, h_t, quad)
}

pub(crate) fn reconstruct_dt_unchecked(
    traj: &ChargeTrajectory,
    data: &InitialData,
    set: &InteractionSet,
    t: f64,
    x: Point3,
    h_t: f64,
    quad: &SphereQuadrature,
) -> Result<Complex64> {
    centered_dt(|s| reconstruct(traj, data, set, s, x, quad), t, h_t)
}

/// `ζ_j(t)` and the limit of `[θ(t − r) ζ_j(t − r) − ζ_j(t)] / (4π r)`.
fn own_term(traj: &ChargeTrajectory, j: usize, t: f64, r: f64) -> Result<Complex64> {
    if r < 1e-6 {
        // [ζ(t − r) − ζ(t)]/r = −ζ̇(t − r/2) + O(r²)
        let s = (t - 0.5 * r).max(traj.t_start());
        return Ok(-traj.derivative(j, s)? / FOUR_PI);
    }
    let gated = if t >= r { retarded(traj, j, t, r)? } else { Complex64::new(0.0, 0.0) };
    Ok((gated - traj.value(j, t)?) / (FOUR_PI * r))
}

/// `φ_reg(t, x) = φ(t, x) − Σ_j ζ_j(t) G_j(x)` for `t ≥ 0`, finite at every
/// `y_j`. At `y_j` it equals `V_j(ζ) − (M_Y(0) ζ)_j`.
pub fn regular_part(
    traj: &ChargeTrajectory,
    data: &InitialData,
    set: &InteractionSet,
    t: f64,
    x: Point3,
    quad: &SphereQuadrature,
) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::HistoryRange { t, start: traj.t_start(), end: traj.t_end() });
    }
    check_domain(traj, set, t, x)?;
    let (k, rmin) = set.nearest(x);
    let mut v = if rmin == 0.0 {
        freewave::free_trace_onesided(data, set, t, k, Side::Right, quad)?
    } else if rmin < 1e-6 && t > 0.0 {
        // The free Coulomb part is smooth inside the cone; evaluate at the centre.
        freewave::free_trace_onesided(data, set, t, k, Side::Right, quad)?
    } else {
        freewave::free_field(data, set, t, x, quad)?
    };
    for (j, &y) in set.points().iter().enumerate() {
        v += own_term(traj, j, t, x.distance(y))?;
    }
    Ok(v)
}

/// `|lim_{r→0} ⟨φ − ζ_j(t) G_j⟩_{S(y_j, r)} − V_j(ζ(t))|` for every `j`,
/// with the limit taken by a least-squares line through the sphere averages.
pub fn bc_residual(
    traj: &ChargeTrajectory,
    data: &InitialData,
    set: &InteractionSet,
    field: &VectorField,
    t: f64,
    radii: &[f64],
    quad: &SphereQuadrature,
) -> Result<Vec<f64>> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("bc_residual needs at least two radii".into()));
    }
    let zeta = traj.values(t)?;
    let v = field.eval(&zeta)?;
    let mut out = Vec::with_capacity(set.len());
    for j in 0..set.len() {
        let yj = set.point(j);
        let mut samples = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut err = None;
            let avg = quad.mean(yj, r, |x| {
                let mut val = match reconstruct(traj, data, set, t, x, quad) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        return Complex64::new(0.0, 0.0);
                    }
                };
                val -= zeta[j] / (FOUR_PI * x.distance(yj));
                val
            });
            if let Some(e) = err {
                return Err(e);
            }
            samples.push((r, avg));
        }
        let m = samples.len() as f64;
        let rbar = samples.iter().map(|s| s.0).sum::<f64>() / m;
        let abar = samples.iter().map(|s| s.1).sum::<Complex64>() / m;
        let sxx: f64 = samples.iter().map(|s| (s.0 - rbar).powi(2)).sum();
        let sxy: Complex64 = samples.iter().map(|s| (s.1 - abar) * (s.0 - rbar)).sum();
        let slope = sxy / sxx;
        let limit = abar - slope * rbar;
        out.push((limit - v[j]).norm());
    }
    Ok(out)
}

/// The scenario restarted at `t1` from the reconstructed state of `traj`:
/// charges `ζ(t1)` and forcing
/// `φ_f(t1 + s, y_j) + Σ_{i≠j}` (free evolution of the time-`t1` snapshot of
/// the wave emitted from `y_i`).
pub fn restart_scenario(scenario: &Scenario, traj: &ChargeTrajectory, t1: f64, quad_order: usize) -> Result<Scenario> {
    if !(t1 > 0.0 && t1 <= traj.t_end()) {
        return Err(Error::HistoryRange { t: t1, start: traj.t_start(), end: traj.t_end() });
    }
    let quad = SphereQuadrature::new(quad_order)?;
    let base = Arc::new(scenario.clone());
    let hist = Arc::new(traj.clone());
    let mut breaks: Vec<f64> = Vec::new();
    let delays = scenario.set.delays();
    let mut kinks = delayode::breakpoints(scenario, t1, 2);
    kinks.push(0.0);
    for &b in kinks.iter().chain(scenario.trace_breakpoints().iter()) {
        breaks.push(b - t1);
        for &d in &delays {
            breaks.push(b + d - t1);
        }
    }
    breaks.retain(|&b| b > 0.0);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let f = {
        let base = Arc::clone(&base);
        move |s: f64, side: Side| -> Result<Vec<Complex64>> {
            let mut out = base.trace(t1 + s, side, &quad)?;
            let set = &base.set;
            for (j, o) in out.iter_mut().enumerate() {
                for i in 0..set.len() {
                    if i != j {
                        let d = set.dist(i, j);
                        // Window s < d ≤ t1 + s, closed on the side `side` points to.
                        let lag = s - d;
                        let inside = if lag == 0.0 { side == Side::Left } else { lag < 0.0 } && d <= t1 + s;
                        if inside {
                            *o += hist.value(i, t1 + s - d)? / (FOUR_PI * d);
                        }
                    }
                }
            }
            Ok(out)
        }
    };
    let mut data = scenario.data.clone();
    data.zeta0 = traj.values(t1)?;
    data.zetadot0 = (0..traj.dim()).map(|j| traj.derivative(j, t1)).collect::<Result<_>>()?;
    Ok(Scenario {
        set: scenario.set.clone(),
        field: scenario.field.clone(),
        data,
        free: FreeWave::Custom(CustomTrace { f: Arc::new(f), breakpoints: breaks }),
        reversed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delayode::{integrate, IntegratorConfig};
    use crate::model::SingularProfile;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn two_point() -> (Scenario, ChargeTrajectory) {
        let set = InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)]).unwrap();
        let mut data = InitialData::zero(2);
        data.profile = SingularProfile::Coulomb;
        data.zeta0 = vec![c(1.0), c(0.0)];
        let s = Scenario::new(set, VectorField::zero(2), data).unwrap();
        let tr = integrate(&s, &IntegratorConfig::new(0.01, 2.5)).unwrap();
        (s, tr)
    }

    #[test]
    fn two_point_field_value() {
        let (s, tr) = two_point();
        let q = SphereQuadrature::new(4).unwrap();
        // A point at distance 0.5 from y_2 and 1.5 from y_1.
        let x = Point3::new(1.5, 0.0, 0.0);
        let v = reconstruct(&tr, &s.data, &s.set, 2.0, x, &q).unwrap();
        let y2_term = 1.5 / (2.0 * PI);
        let y1_term = tr.value(0, 0.5).unwrap().re / (FOUR_PI * 1.5);
        // φ_f of (G_1, 0) at distance 1.5, t = 2 is inside the cone: 0.
        assert!((v.re - y2_term - y1_term).abs() < 1e-12);
        assert!((y2_term - 0.238_732_414_637_843).abs() < 1e-12);
    }

    #[test]
    fn dt_of_retarded_term() {
        let (s, tr) = two_point();
        let q = SphereQuadrature::new(4).unwrap();
        let x = Point3::new(1.0, 0.0, 0.5);
        // d/dt of ζ_2(t − r)/(4πr) = 1/(4πr); the y_1 term is inside the cone and
        // the y_1 free part vanishes there.
        let r1 = x.distance(Point3::ORIGIN);
        let t = 1.9;
        let d = reconstruct_dt(&tr, &s.data, &s.set, t, x, 1e-3, &q).unwrap();
        let expect = 1.0 / (FOUR_PI * 0.5) + tr.derivative(0, t - r1).unwrap().re / (FOUR_PI * r1);
        assert!((d.re - expect).abs() < 1e-8, "{d} vs {expect}");
        assert!(matches!(
            reconstruct_dt(&tr, &s.data, &s.set, 0.5, x, 1e-3, &q),
            Err(Error::LightConeProximity { .. })
        ));
    }

    #[test]
    fn domain_e_examples() {
        let set = InteractionSet::single(Point3::ORIGIN);
        assert!(domain_e_contains(&set, 1.0, 0.5, Point3::new(0.1, 0.0, 0.0)));
        assert!(!domain_e_contains(&set, 1.0, 3.0, Point3::new(2.0, 0.0, 0.0)));
        assert!(domain_e_contains(&set, 1.0, 2.5, Point3::new(2.0, 0.0, 0.0)));
    }

    #[test]
    fn regular_part_finite_near_points() {
        let (s, tr) = two_point();
        let q = SphereQuadrature::new(4).unwrap();
        for r in [1e-7, 1e-6, 1e-4] {
            let v = regular_part(&tr, &s.data, &s.set, 1.5, Point3::new(1.0 + r, 0.0, 0.0), &q).unwrap();
            assert!(v.re.is_finite());
            // lim = V_2 − (M_Y(0)ζ)_2 = −ζ_1(1.5)/(4π)
            let expect = -tr.value(0, 1.5).unwrap().re / FOUR_PI;
            assert!((v.re - expect).abs() < 1e-3, "r={r}: {v} vs {expect}");
        }
    }
}
