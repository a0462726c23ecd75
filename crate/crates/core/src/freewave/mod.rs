//! Free wave evolution of admissible data and its trace at the interaction
//! points.

mod radial;

use std::f64::consts::PI;

pub use radial::radial_free_field;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    yukawa_correction, ChargeTrajectory, InitialData, InteractionSet, Point3, RegularPart, Side, SingularProfile,
};
use crate::quadrature::SphereQuadrature;

const FOUR_PI: f64 = 4.0 * PI;

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Average of `f` over the sphere `S(center, radius)`.
pub fn spherical_mean<F>(f: F, center: Point3, radius: f64, quad: &SphereQuadrature) -> Result<Complex64>
where
    F: FnMut(Point3) -> Complex64,
{
    let v = quad.mean(center, radius, f);
    if !finite(v) {
        return Err(Error::NonFinite("spherical mean".into()));
    }
    Ok(v)
}

/// Kirchhoff's formula in value form for data given by `value_grad`
/// (value and gradient of `φ₀`) and `velocity` (`φ̇₀`).
pub fn kirchhoff<F, G>(mut value_grad: F, mut velocity: G, t: f64, x: Point3, quad: &SphereQuadrature) -> Result<Complex64>
where
    F: FnMut(Point3) -> (Complex64, [Complex64; 3]),
    G: FnMut(Point3) -> Complex64,
{
    if t == 0.0 {
        return Ok(value_grad(x).0);
    }
    spherical_mean(
        |xi| {
            let (v, g) = value_grad(xi);
            let d = xi - x;
            v + g[0] * d.0[0] + g[1] * d.0[1] + g[2] * d.0[2] + velocity(xi) * t
        },
        x,
        t.abs(),
        quad,
    )
}

/// Free evolution of the regular parts of `data`.
pub fn kirchhoff_regular(data: &InitialData, t: f64, x: Point3, quad: &SphereQuadrature) -> Result<Complex64> {
    kirchhoff(|p| data.regular_value.value_grad(p), |p| data.regular_velocity.value(p), t, x, quad)
}

/// Value and gradient of `W(|x − y|)·c` where `W = G^{z₀} − G`.
fn w_value_grad(a: f64, y: Point3, c: Complex64, x: Point3) -> (Complex64, [Complex64; 3]) {
    let d = x - y;
    let r = d.norm();
    let (w, dw) = yukawa_correction(a, r);
    if r == 0.0 {
        return (c * w, [Complex64::new(0.0, 0.0); 3]);
    }
    let s = dw / r;
    (c * w, [c * (s * d.0[0]), c * (s * d.0[1]), c * (s * d.0[2])])
}

/// Smooth part of the data handed to the Kirchhoff quadrature: the regular
/// parts plus, for Yukawa profiles, the corrections `ζ W_i`.
fn smooth_kirchhoff(data: &InitialData, set: &InteractionSet, t: f64, x: Point3, quad: &SphereQuadrature) -> Result<Complex64> {
    let SingularProfile::Yukawa { mass } = data.profile else {
        return kirchhoff_regular(data, t, x, quad);
    };
    let a = mass.sqrt();
    let pts = set.points();
    let value_grad = |p: Point3| {
        let (mut v, mut g) = data.regular_value.value_grad(p);
        for (i, &y) in pts.iter().enumerate() {
            if data.zeta0[i] != Complex64::new(0.0, 0.0) {
                let (wv, wg) = w_value_grad(a, y, data.zeta0[i], p);
                v += wv;
                for k in 0..3 {
                    g[k] += wg[k];
                }
            }
        }
        (v, g)
    };
    let velocity = |p: Point3| {
        let mut v = data.regular_velocity.value(p);
        for (i, &y) in pts.iter().enumerate() {
            if data.zetadot0[i] != Complex64::new(0.0, 0.0) {
                v += data.zetadot0[i] * yukawa_correction(a, p.distance(y)).0;
            }
        }
        v
    };
    kirchhoff(value_grad, velocity, t, x, quad)
}

/// Free evolution of the Coulomb datum `(ζ G_y, ζ̇ G_y)` at `x ≠ y`.
/// On the light cone `|t| = r` the value inside the cone is returned.
pub fn singular_free_field(zeta: Complex64, zetadot: Complex64, y: Point3, t: f64, x: Point3) -> Result<Complex64> {
    let r = x.distance(y);
    if r == 0.0 {
        return Err(Error::SingularPoint(0));
    }
    let gate = if t.abs() >= r { 1.0 } else { 0.0 };
    let sg = if t >= 0.0 { 1.0 } else { -1.0 };
    Ok((zeta + zetadot * t - (zeta + zetadot * (t - sg * r)) * gate) / (FOUR_PI * r))
}

/// Trace of the Coulomb datum at its own centre: `sgn(t) ζ̇ / 4π`.
pub fn singular_free_trace(zetadot: Complex64, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    Ok(zetadot * (t.signum() / FOUR_PI))
}

/// Side that points into the cone `|t| > r` at a crossing.
fn inner_side(t: f64) -> Side {
    if t >= 0.0 {
        Side::Right
    } else {
        Side::Left
    }
}

/// Singular contribution of charge `i` at distance `r` (possibly 0).
fn singular_term(data: &InitialData, i: usize, t: f64, r: f64, side: Side) -> Result<Complex64> {
    let (z, zd) = (data.zeta0[i], data.zetadot0[i]);
    match data.profile {
        SingularProfile::Compact { .. } => radial_free_field(&data.profile, z, zd, t, r, side),
        // The Yukawa correction is handled by the quadrature; here only G.
        SingularProfile::Coulomb | SingularProfile::Yukawa { .. } => {
            radial_free_field(&SingularProfile::Coulomb, z, zd, t, r, side)
        }
    }
}

/// `φ_f(t, y_j)`; `t = 0` is refused (see [`free_trace_onesided`]).
pub fn free_trace(data: &InitialData, set: &InteractionSet, t: f64, j: usize, quad: &SphereQuadrature) -> Result<Complex64> {
    if t == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    free_trace_onesided(data, set, t, j, inner_side(t), quad)
}

/// `φ_f(t, y_j)` with the one-sided limit `side` at `t = 0` and on light
/// cones `t = ±d_ij`.
pub fn free_trace_onesided(
    data: &InitialData,
    set: &InteractionSet,
    t: f64,
    j: usize,
    side: Side,
    quad: &SphereQuadrature,
) -> Result<Complex64> {
    let yj = set.point(j);
    let mut v = smooth_kirchhoff(data, set, t, yj, quad)?;
    for i in 0..set.len() {
        v += singular_term(data, i, t, set.dist(i, j), side)?;
    }
    if !finite(v) {
        return Err(Error::NonFinite(format!("free trace at point {j}")));
    }
    Ok(v)
}

/// Trace at every interaction point.
pub fn free_trace_all(data: &InitialData, set: &InteractionSet, t: f64, side: Side, quad: &SphereQuadrature) -> Result<Vec<Complex64>> {
    (0..set.len()).map(|j| free_trace_onesided(data, set, t, j, side, quad)).collect()
}

/// `φ_f(t, x)` for `x ∉ Y`.
pub fn free_field(data: &InitialData, set: &InteractionSet, t: f64, x: Point3, quad: &SphereQuadrature) -> Result<Complex64> {
    let (k, r) = set.nearest(x);
    if r == 0.0 {
        return Err(Error::SingularPoint(k));
    }
    let mut v = smooth_kirchhoff(data, set, t, x, quad)?;
    for i in 0..set.len() {
        v += singular_term(data, i, t, x.distance(set.point(i)), inner_side(t))?;
    }
    Ok(v)
}

/// Times `t > 0` where the trace may jump or kink.
pub fn trace_breakpoints(data: &InitialData, set: &InteractionSet) -> Vec<f64> {
    let mut out = Vec::new();
    for d in set.delays() {
        out.push(d);
        if let SingularProfile::Compact { radius } = data.profile {
            out.push(d + radius);
            if d > radius {
                out.push(d - radius);
            }
        }
    }
    if let SingularProfile::Compact { radius } = data.profile {
        out.push(radius);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

/// Free evolution from time `t1` of the snapshot of the retarded wave
/// `θ(t − r) ζ_j(t − r) / (4π r)` emitted from `y`.
pub fn snapshot_evolution(history: &ChargeTrajectory, j: usize, t1: f64, y: Point3, t: f64, x: Point3) -> Result<Complex64> {
    if t < t1 {
        return Err(Error::InvalidInput(format!("snapshot evolution needs t ≥ t1 (t = {t}, t1 = {t1})")));
    }
    let r = x.distance(y);
    if r == 0.0 || !(t - t1 < r && r <= t) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(history.value(j, t - r)? / (FOUR_PI * r))
}

/// `φ_f(t, ·)` from a regular part alone, used by oracles and examples.
pub fn regular_free_field(value: &RegularPart, velocity: &RegularPart, t: f64, x: Point3, quad: &SphereQuadrature) -> Result<Complex64> {
    kirchhoff(|p| value.value_grad(p), |p| velocity.value(p), t, x, quad)
}
