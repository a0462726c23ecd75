//! Closed-form free evolution of radial data `ζ·P(|x − y|)`, `ζ̇·P(|x − y|)`
//! for the built-in singular profiles, via the odd extension `F(s) = s·P(|s|)`
//! (d'Alembert in the variable `r·u`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Side, SingularProfile};

const FOUR_PI: f64 = 4.0 * PI;

/// `F(s) = s·P(|s|)`; at `s = 0` the sign of the jump is taken from `zero_sign`.
fn odd_ext(p: &SingularProfile, s: f64, zero_sign: f64) -> f64 {
    let sg = if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        zero_sign
    };
    let a = s.abs();
    sg * match *p {
        SingularProfile::Coulomb => 1.0 / FOUR_PI,
        SingularProfile::Yukawa { mass } => (-mass.sqrt() * a).exp() / FOUR_PI,
        SingularProfile::Compact { radius } => (1.0 - a / radius).max(0.0) / FOUR_PI,
    }
}

/// `F'(s)` for `s ≠ 0` (an even function).
fn odd_ext_deriv(p: &SingularProfile, s: f64) -> f64 {
    let a = s.abs();
    match *p {
        SingularProfile::Coulomb => 0.0,
        SingularProfile::Yukawa { mass } => {
            let k = mass.sqrt();
            -k * (-k * a).exp() / FOUR_PI
        }
        SingularProfile::Compact { radius } => {
            if a < radius {
                -1.0 / (FOUR_PI * radius)
            } else {
                0.0
            }
        }
    }
}

/// `Q(ρ) = ∫₀^ρ σ P(σ) dσ`.
fn primitive(p: &SingularProfile, rho: f64) -> f64 {
    match *p {
        SingularProfile::Coulomb => rho / FOUR_PI,
        SingularProfile::Yukawa { mass } => {
            let k = mass.sqrt();
            -(-k * rho).exp_m1() / (FOUR_PI * k)
        }
        SingularProfile::Compact { radius } => {
            if rho < radius {
                (rho - rho * rho / (2.0 * radius)) / FOUR_PI
            } else {
                radius / (8.0 * PI)
            }
        }
    }
}

/// Free evolution at time `t` and distance `d` from the centre of the data
/// `(ζ P, ζ̇ P)`. `side` resolves the jump on the light cone `|t| = d` and,
/// for `d = 0`, the sign of `t = 0`.
pub fn radial_free_field(p: &SingularProfile, zeta: Complex64, zetadot: Complex64, t: f64, d: f64, side: Side) -> Result<Complex64> {
    if d == 0.0 {
        let sg = if t > 0.0 {
            1.0
        } else if t < 0.0 {
            -1.0
        } else {
            match side {
                Side::Right => 1.0,
                Side::Left => -1.0,
            }
        };
        let a = t.abs();
        // F'(t)·ζ + S(t)·ζ̇ with S(t) = sgn(t)·F(|t|).
        let fd = if a == 0.0 { odd_ext_deriv(p, f64::MIN_POSITIVE) } else { odd_ext_deriv(p, a) };
        return Ok(zeta * fd + zetadot * (sg * odd_ext(p, a, 1.0)));
    }
    if d < 0.0 || !d.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput(format!("bad radial arguments t = {t}, d = {d}")));
    }
    // d − t → 0⁺ from the left in time, d + t → 0⁻.
    let left = matches!(side, Side::Left);
    let f_plus = odd_ext(p, d + t, if left { -1.0 } else { 1.0 });
    let f_minus = odd_ext(p, d - t, if left { 1.0 } else { -1.0 });
    let value = (f_plus + f_minus) / (2.0 * d);
    let vel = (primitive(p, (d + t).abs()) - primitive(p, (d - t).abs())) / (2.0 * d);
    Ok(zeta * value + zetadot * vel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn initial_values_reproduced() {
        for p in [SingularProfile::Coulomb, SingularProfile::Yukawa { mass: 2.0 }, SingularProfile::Compact { radius: 0.7 }] {
            for &d in &[0.1, 0.5, 1.3] {
                let u = radial_free_field(&p, c(1.0), c(0.0), 0.0, d, Side::Right).unwrap();
                assert!((u.re - p.value(d)).abs() < 1e-14, "{p:?} d={d}");
            }
        }
    }

    #[test]
    fn yukawa_velocity_trace() {
        // t · mean of e^{-r}/r over the sphere of radius t about the centre.
        let p = SingularProfile::Yukawa { mass: 1.0 };
        for &t in &[0.1, 0.5, 2.0] {
            let u = radial_free_field(&p, c(0.0), c(FOUR_PI), t, 0.0, Side::Right).unwrap();
            assert!((u.re - (-t).exp()).abs() < 1e-14);
            let v = radial_free_field(&p, c(0.0), c(FOUR_PI), -t, 0.0, Side::Right).unwrap();
            assert!((v.re + (-t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn coulomb_matches_explicit_formula() {
        let p = SingularProfile::Coulomb;
        let (z, zd) = (Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.4));
        for &(t, r) in &[(0.3f64, 1.0f64), (2.0, 1.0), (-0.4, 0.7), (-2.5, 0.7)] {
            let sg: f64 = if t > 0.0 { 1.0 } else { -1.0 };
            let gate = if t.abs() > r { 1.0 } else { 0.0 };
            let expect = (z + zd * t - (z + zd * (t - sg * r)) * gate) / (FOUR_PI * r);
            let u = radial_free_field(&p, z, zd, t, r, Side::Right).unwrap();
            assert!((u - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn compact_support_respected() {
        let p = SingularProfile::Compact { radius: 0.1 };
        let u = radial_free_field(&p, c(1.0), c(1.0), 0.8, 1.0, Side::Right).unwrap();
        assert_eq!(u, c(0.0));
        let v = radial_free_field(&p, c(1.0), c(1.0), 0.95, 1.0, Side::Right).unwrap();
        assert!(v.norm() > 0.0);
    }
}
