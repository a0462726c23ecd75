//! The matrix `M_Y(z)`, the linear-case quadratic form, the conserved
//! energy for gradient-type nonlinearities and a coercivity check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{reconstruct_dt_unchecked, regular_part};
use crate::model::{ChargeTrajectory, InitialData, InteractionSet, Point3, VectorField};
use crate::quadrature::SphereQuadrature;

const FOUR_PI: f64 = 4.0 * PI;

/// Principal `√z` with `Re √z > 0`; `z = 0` is allowed and maps to 0.
pub fn sqrt_off_cut(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok(z.sqrt())
}

/// `(M_Y(z))_ij = (1 − δ_ij) e^{−√z d_ij} / (4π d_ij)`.
pub fn my_matrix(set: &InteractionSet, z: Complex64) -> Result<Vec<Vec<Complex64>>> {
    let k = sqrt_off_cut(z)?;
    let n = set.len();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let d = set.dist(i, j);
                        (-k * d).exp() / (FOUR_PI * d)
                    }
                })
                .collect()
        })
        .collect())
}

/// `(Aζ, ζ) = Σ_ij conj(ζ_i) A_ij ζ_j`.
pub fn pairing(a: &[Vec<Complex64>], zeta: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            acc += zeta[i].conj() * v * zeta[j];
        }
    }
    acc
}

/// `‖∇φ_reg‖² − (M_Y ζ, ζ) + (Θζ, ζ)` for hermitian `Θ`.
pub fn quadratic_form(set: &InteractionSet, theta: &[Vec<Complex64>], grad_norm_sq: f64, zeta: &[Complex64]) -> Result<f64> {
    let m = my_matrix(set, Complex64::new(0.0, 0.0))?;
    Ok(grad_norm_sq - pairing(&m, zeta).re + pairing(theta, zeta).re)
}

/// Spatial resolution of the energy audit.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrid {
    pub shells: usize,
    pub angular_order: usize,
    /// Sphere order of the Kirchhoff quadrature inside every field evaluation.
    pub kirchhoff_order: usize,
    /// Time step of the `∂_t φ` difference.
    pub h_t: f64,
    /// Spatial step of the `∇φ_reg` difference relative to `R`.
    pub grad_step_rel: f64,
    /// Fraction of outer shells used for the tail fit.
    pub tail_fraction: f64,
}

impl Default for EnergyGrid {
    fn default() -> Self {
        Self { shells: 200, angular_order: 6, kirchhoff_order: 12, h_t: 1e-3, grad_step_rel: 1e-4, tail_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub elastic: f64,
    pub matrix_term: f64,
    pub potential: f64,
    pub total: f64,
    pub radius: f64,
    pub truncation: f64,
}

/// `E = ½(‖φ̇‖² + ‖∇φ_reg‖² − (M_Y ζ, ζ)) + Re h(ζ)` at time `t`, with the
/// norms integrated over `B(centroid, R)` by a midpoint rule in shells and the
/// `∇φ_reg` tail beyond `R` extrapolated from a `C/r²` fit of the outer shells.
pub fn energy(
    traj: &ChargeTrajectory,
    data: &InitialData,
    set: &InteractionSet,
    field: &VectorField,
    t: f64,
    radius: f64,
    grid: &EnergyGrid,
) -> Result<EnergyBreakdown> {
    if !field.is_gradient() {
        return Err(Error::Variant { expected: "Gradient" });
    }
    if !(radius > 0.0) || grid.shells < 10 {
        return Err(Error::InvalidInput("energy needs R > 0 and at least 10 shells".into()));
    }
    if t != 0.0 && t < 2.0 * grid.h_t {
        return Err(Error::InvalidInput(format!("energy at t = {t} needs t = 0 or t ≥ 2 h_t")));
    }
    let zeta = traj.values(t)?;
    let potential = field.potential(&zeta).ok_or(Error::Variant { expected: "Gradient" })?;
    let ang = SphereQuadrature::new(grid.angular_order)?;
    let kq = SphereQuadrature::new(grid.kirchhoff_order)?;
    let center = set.centroid();
    let dr = radius / grid.shells as f64;
    let hx = grid.grad_step_rel * radius;

    let point_terms = |x: Point3| -> Result<(f64, f64)> {
        let phidot = if t == 0.0 { data.velocity(set, x) } else { reconstruct_dt_unchecked(traj, data, set, t, x, grid.h_t, &kq)? };
        let mut g2 = 0.0;
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = hx;
            let e = Point3(e);
            let up = regular_part(traj, data, set, t, x + e, &kq)?;
            let dn = regular_part(traj, data, set, t, x - e, &kq)?;
            g2 += ((up - dn) / (2.0 * hx)).norm_sqr();
        }
        Ok((phidot.norm_sqr(), g2))
    };

    let shells: Vec<Result<(f64, f64)>> = (0..grid.shells)
        .into_par_iter()
        .map(|k| {
            let r = (k as f64 + 0.5) * dr;
            let (mut kin, mut ela) = (0.0, 0.0);
            for (node, w) in ang.nodes().iter().zip(ang.weights()) {
                let x = center + Point3(*node) * r;
                let (a, b) = point_terms(x)?;
                kin += w * a;
                ela += w * b;
            }
            let shell = FOUR_PI * r * r * dr;
            Ok((kin * shell, ela * shell))
        })
        .collect();
    let shells: Vec<(f64, f64)> = shells.into_iter().collect::<Result<_>>()?;
    let kinetic_sum: f64 = shells.iter().map(|s| s.0).sum();
    let elastic_sum: f64 = shells.iter().map(|s| s.1).sum();

    // C/r² fit of the shell densities of ‖∇φ_reg‖² over the outer shells.
    let m = ((grid.shells as f64 * grid.tail_fraction).ceil() as usize).max(3);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, s) in shells.iter().enumerate().skip(grid.shells - m) {
        let r = (k as f64 + 0.5) * dr;
        let density = s.1 / dr;
        num += density / (r * r);
        den += 1.0 / (r * r * r * r);
    }
    let c = num / den;
    let tail = c / radius;

    let kinetic = 0.5 * kinetic_sum;
    let elastic = 0.5 * (elastic_sum + tail);
    let m0 = my_matrix(set, Complex64::new(0.0, 0.0))?;
    let matrix_term = -0.5 * pairing(&m0, &zeta).re;
    let total = kinetic + elastic + matrix_term + potential;
    let truncation = 0.5 * tail.abs();
    if truncation > 0.1 * total.abs() {
        return Err(Error::TruncationTooLarge { estimate: truncation, total });
    }
    Ok(EnergyBreakdown { kinetic, elastic, matrix_term, potential, total, radius, truncation })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub pass: bool,
    /// `min (Re h(ζ) − c₁|ζ|² + c₂)` over the samples, or the exact minimum
    /// on the symbolic path (`-inf` if unbounded below).
    pub worst_margin: f64,
    /// The power-law path was used; the margin is then exact.
    pub symbolic: bool,
    /// For power-law `h` with all `γ_j > 0` the hypothesis holds with
    /// `c₁ = c₂ = 0` whatever the requested constants.
    pub satisfiable: bool,
}

/// Check `Re h(ζ) ≥ c₁|ζ|² − c₂` on `[−bound, bound]^{2n}` (grid of
/// `per_axis` points per real coordinate).
pub fn coercivity_check(field: &VectorField, c1: f64, c2: f64, bound: f64, per_axis: usize) -> Result<CoercivityReport> {
    if c1 < 0.0 || c2 < 0.0 {
        return Err(Error::InvalidInput("c1 and c2 must be non-negative".into()));
    }
    if let VectorField::PowerLaw { gamma, sigma } = field {
        let mut margin = c2;
        for (&g, &s) in gamma.iter().zip(sigma) {
            let p = s + 2.0;
            let m = if g > 0.0 && p > 2.0 {
                let q = (2.0 * c1 / g).powf(1.0 / (p - 2.0));
                g * q.powf(p) / p - c1 * q * q
            } else if p == 2.0 && g / 2.0 >= c1 {
                0.0
            } else if c1 == 0.0 && g >= 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
            margin += m;
        }
        let satisfiable = gamma.iter().all(|&g| g > 0.0);
        return Ok(CoercivityReport { pass: margin >= -1e-12, worst_margin: margin, symbolic: true, satisfiable });
    }
    if !field.is_gradient() {
        return Err(Error::Variant { expected: "Gradient" });
    }
    let n = field.dim();
    let axes = 2 * n;
    let mut m = per_axis.max(2);
    while (m as f64).powi(axes as i32) > 2e6 && m > 2 {
        m -= 1;
    }
    let total = m.pow(axes as u32);
    let coord = |k: usize| -bound + 2.0 * bound * k as f64 / (m - 1) as f64;
    let mut worst = f64::INFINITY;
    let mut zeta = vec![Complex64::new(0.0, 0.0); n];
    for idx in 0..total {
        let mut rem = idx;
        for a in 0..axes {
            let v = coord(rem % m);
            rem /= m;
            if a < n {
                zeta[a].re = v;
            } else {
                zeta[a - n].im = v;
            }
        }
        let h = field.potential(&zeta).ok_or(Error::Variant { expected: "Gradient" })?;
        let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
        worst = worst.min(h - c1 * norm2 + c2);
    }
    Ok(CoercivityReport { pass: worst >= -1e-12, worst_margin: worst, symbolic: false, satisfiable: worst >= -1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn my_matrix_examples() {
        let one = InteractionSet::single(Point3::ORIGIN);
        assert_eq!(my_matrix(&one, c(1.0)).unwrap(), vec![vec![c(0.0)]]);
        let two = InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)]).unwrap();
        let m0 = my_matrix(&two, c(0.0)).unwrap();
        assert!((m0[0][1].re - 0.079_577_471_545_947_67).abs() < 1e-15);
        let m1 = my_matrix(&two, c(1.0)).unwrap();
        assert!((m1[1][0].re - (-1.0f64).exp() / FOUR_PI).abs() < 1e-16);
        assert!((m1[1][0].re - 0.029_274_9).abs() < 1e-7);
        assert!(matches!(my_matrix(&two, c(-1.0)), Err(Error::BranchCut(_))));
    }

    #[test]
    fn quadratic_form_examples() {
        let two = InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)]).unwrap();
        let zero = vec![vec![c(0.0); 2]; 2];
        assert_eq!(quadratic_form(&two, &zero, 3.0, &[c(0.0), c(0.0)]).unwrap(), 3.0);
        let f = quadratic_form(&two, &zero, 3.0, &[c(1.0), c(1.0)]).unwrap();
        assert!((f - (3.0 - 2.0 / FOUR_PI)).abs() < 1e-15);
        let one = InteractionSet::single(Point3::ORIGIN);
        let f = quadratic_form(&one, &[vec![c(0.5)]], 1.0, &[Complex64::new(1.0, 1.0)]).unwrap();
        assert!((f - 2.0).abs() < 1e-15);
    }

    #[test]
    fn coercivity_examples() {
        let half = VectorField::gradient(1, |z| 0.5 * z[0].norm_sqr(), |z| z.to_vec());
        let r = coercivity_check(&half, 0.5, 0.0, 5.0, 41).unwrap();
        assert!(r.pass && r.worst_margin.abs() < 1e-12);
        let quartic = VectorField::power_law(vec![1.0], vec![2.0]).unwrap();
        let r = coercivity_check(&quartic, 1.0, 1.0, 5.0, 41).unwrap();
        assert!(r.pass && r.symbolic && r.worst_margin.abs() < 1e-12);
        let wrong = VectorField::gradient(1, |z| -0.5 * z[0].norm_sqr(), |z| z.iter().map(|v| -v).collect());
        assert!(!coercivity_check(&wrong, 0.0, 1.0, 5.0, 11).unwrap().pass);
    }

    #[test]
    fn zero_scenario_energy() {
        let set = InteractionSet::single(Point3::ORIGIN);
        let tr = ChargeTrajectory::from_samples(
            vec![0.0, 1.0],
            vec![vec![c(0.0)]; 2],
            vec![vec![c(0.0)]; 2],
            crate::model::Status::Completed(1.0),
        )
        .unwrap();
        let grid = EnergyGrid { shells: 20, angular_order: 2, kirchhoff_order: 2, ..EnergyGrid::default() };
        let e = energy(&tr, &InitialData::zero(1), &set, &VectorField::diagonal(&[1.0]), 0.5, 3.0, &grid).unwrap();
        assert_eq!((e.kinetic, e.elastic, e.matrix_term, e.potential, e.total), (0.0, 0.0, 0.0, 0.0, 0.0));
    }
}
