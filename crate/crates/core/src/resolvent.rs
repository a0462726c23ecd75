//! Stationary side: `Γ(z) = V + √z/4π − M_Y(z)`, charge solves, the
//! resolvent applied to Gaussian probes and the resolvent identity check.
//!
//! All free-resolvent work reduces to radial functions: a Gaussian term is
//! radial about its centre, `(−Δ+z)⁻¹` of it is again radial about that
//! centre, and so is `G^z` about each `y_i`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::energy::{my_matrix, sqrt_off_cut};
use crate::error::{Error, Result};
use crate::model::{Gaussian, GaussianMixture, InteractionSet, Point3, VectorField};
use crate::newton;
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

const FOUR_PI: f64 = 4.0 * PI;
const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 50;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `Γ(z)ζ = V(ζ) + (√z/4π)ζ − M_Y(z)ζ`.
pub fn gamma_apply(field: &VectorField, set: &InteractionSet, z: Complex64, zeta: &[Complex64]) -> Result<Vec<Complex64>> {
    if zeta.len() != set.len() || field.dim() != set.len() {
        return Err(Error::Dimension { expected: set.len(), got: zeta.len() });
    }
    let k = sqrt_off_cut(z)?;
    let m = my_matrix(set, z)?;
    let mut out = field.eval(zeta)?;
    for (j, o) in out.iter_mut().enumerate() {
        *o += k / FOUR_PI * zeta[j];
        for (i, zi) in zeta.iter().enumerate() {
            *o -= m[j][i] * zi;
        }
    }
    Ok(out)
}

/// Solve `Γ(z)ζ = q` by damped Newton from `guess` (zero if `None`).
/// Returns `ζ` and the iteration count.
pub fn gamma_solve(
    field: &VectorField,
    set: &InteractionSet,
    z: Complex64,
    q: &[Complex64],
    guess: Option<&[Complex64]>,
) -> Result<(Vec<Complex64>, usize)> {
    if q.len() != set.len() {
        return Err(Error::Dimension { expected: set.len(), got: q.len() });
    }
    sqrt_off_cut(z)?;
    let start = guess.map(|g| g.to_vec()).unwrap_or_else(|| vec![zero(); q.len()]);
    newton::solve(
        |zeta| {
            let mut g = gamma_apply(field, set, z, zeta)?;
            for (gi, qi) in g.iter_mut().zip(q) {
                *gi -= qi;
            }
            Ok(g)
        },
        &start,
        NEWTON_TOL,
        NEWTON_MAX_ITER,
    )
}

fn tol() -> Tolerance {
    Tolerance::new(1e-14, 1e-10)
}

/// `((−Δ + k²)⁻¹ g)(x) = ∫₀^∞ r e^{−kr} M_g(x, r) dr` for one Gaussian term.
fn free_gaussian(g: &Gaussian, k: Complex64, x: Point3) -> Result<Complex64> {
    let d = (x - g.center).norm();
    let breaks = [d - 3.0 * g.width, d, d + 3.0 * g.width, d + 8.0 * g.width];
    let est = integrate_to_infinity(|r| Ok(r * (-k * r).exp() * g.spherical_mean(x, r)), 0.0, &breaks, tol())?;
    Ok(est.value)
}

/// `(−Δ + k²)⁻¹ f` at distance `rho` from the centre of a radial `f`,
/// through the one-dimensional Green's function of `−∂² + k²` acting on
/// `s f(s)`; `sf` must return `s f(s)`.
fn free_radial<F>(k: Complex64, rho: f64, mut sf: F, breaks: &[f64]) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if rho == 0.0 {
        return Ok(integrate_to_infinity(|s| Ok((-k * s).exp() * sf(s)?), 0.0, breaks, tol())?.value);
    }
    let inner = integrate(|s| Ok((k * s).sinh() * sf(s)?), 0.0, rho, breaks, tol())?.value;
    let outer = integrate_to_infinity(|s| Ok((-k * s).exp() * sf(s)?), rho, breaks, tol())?.value;
    Ok(((-k * rho).exp() * inner + (k * rho).sinh() * outer) / (k * rho))
}

/// Terms a resolvent argument may be built from.
#[derive(Debug, Clone, Copy)]
enum Radial {
    Gauss(Gaussian),
    /// `(−Δ + k²)⁻¹` of a Gaussian term.
    FreeGauss(Gaussian, Complex64),
    /// `e^{−k|x−c|}/(4π|x−c|)`.
    Yukawa(Point3, Complex64),
}

impl Radial {
    fn value(&self, x: Point3) -> Result<Complex64> {
        match *self {
            Radial::Gauss(g) => Ok(g.value(x)),
            Radial::FreeGauss(g, k) => free_gaussian(&g, k, x),
            Radial::Yukawa(c, k) => {
                let r = (x - c).norm();
                if r == 0.0 {
                    return Err(Error::SingularPoint(0));
                }
                Ok((-k * r).exp() / (FOUR_PI * r))
            }
        }
    }

    /// `(−Δ + k²)⁻¹` of the term at `x`.
    fn free_resolvent(&self, k: Complex64, x: Point3) -> Result<Complex64> {
        match *self {
            Radial::Gauss(g) => free_gaussian(&g, k, x),
            Radial::FreeGauss(g, kz) => {
                let rho = (x - g.center).norm();
                let dir = Point3::new(1.0, 0.0, 0.0);
                let breaks = [rho, 3.0 * g.width, 8.0 * g.width];
                free_radial(k, rho, |s| Ok(s * free_gaussian(&g, kz, g.center + dir * s)?), &breaks)
            }
            Radial::Yukawa(c, kz) => {
                let rho = (x - c).norm();
                free_radial(k, rho, |s| Ok((-kz * s).exp() / FOUR_PI), &[rho])
            }
        }
    }
}

/// A finite linear combination of [`Radial`] terms.
#[derive(Debug, Clone, Default)]
struct Combo(Vec<(Complex64, Radial)>);

impl Combo {
    fn from_mixture(m: &GaussianMixture) -> Self {
        Combo(m.terms().iter().map(|g| (Complex64::new(1.0, 0.0), Radial::Gauss(*g))).collect())
    }

    fn value(&self, x: Point3) -> Result<Complex64> {
        self.0.iter().try_fold(zero(), |acc, (c, t)| Ok(acc + c * t.value(x)?))
    }

    fn free_resolvent(&self, k: Complex64, x: Point3) -> Result<Complex64> {
        self.0.iter().try_fold(zero(), |acc, (c, t)| Ok(acc + c * t.free_resolvent(k, x)?))
    }
}

/// `R(z)φ` in closed structural form: the free part plus charges on `G^z_i`.
#[derive(Debug, Clone)]
struct Applied {
    k: Complex64,
    source: Combo,
    charges: Vec<Complex64>,
    iterations: usize,
}

impl Applied {
    fn new(field: &VectorField, set: &InteractionSet, z: Complex64, source: Combo) -> Result<Self> {
        let k = sqrt_off_cut(z)?;
        let q = set.points().iter().map(|&y| source.free_resolvent(k, y)).collect::<Result<Vec<_>>>()?;
        let (charges, iterations) = gamma_solve(field, set, z, &q, None)?;
        Ok(Self { k, source, charges, iterations })
    }

    fn value(&self, set: &InteractionSet, x: Point3) -> Result<Complex64> {
        let mut v = self.source.free_resolvent(self.k, x)?;
        for (c, &y) in self.charges.iter().zip(set.points()) {
            v += c * Radial::Yukawa(y, self.k).value(x)?;
        }
        Ok(v)
    }

    /// `φ − s·R(z)φ` as a new combination; needs a pure-Gaussian source.
    fn subtract_from(&self, set: &InteractionSet, phi: &Combo, s: Complex64) -> Result<Combo> {
        let mut out = phi.clone();
        for (c, t) in &self.source.0 {
            match t {
                Radial::Gauss(g) => out.0.push((-s * c, Radial::FreeGauss(*g, self.k))),
                _ => return Err(Error::InvalidInput("nested resolvent argument".into())),
            }
        }
        for (c, &y) in self.charges.iter().zip(set.points()) {
            out.0.push((-s * c, Radial::Yukawa(y, self.k)));
        }
        Ok(out)
    }
}

/// `⟨G_i^z, φ⟩ = ∫ G^z(x − y_i) φ(x) dx` for a Gaussian-mixture probe.
pub fn gz_inner(probe: &GaussianMixture, set: &InteractionSet, z: Complex64, i: usize) -> Result<Complex64> {
    let k = sqrt_off_cut(z)?;
    if i >= set.len() {
        return Err(Error::Dimension { expected: set.len(), got: i });
    }
    Combo::from_mixture(probe).free_resolvent(k, set.point(i))
}

/// Values of `R(z)φ = (−Δ+z)⁻¹φ + Σ_i (Γ(z)⁻¹⟨G^{z̄}, φ⟩)_i G_i^z` at `points`,
/// together with the Newton iteration count of the charge solve.
pub fn resolvent_apply(
    field: &VectorField,
    set: &InteractionSet,
    z: Complex64,
    probe: &GaussianMixture,
    points: &[Point3],
) -> Result<(Vec<Complex64>, usize)> {
    let ap = Applied::new(field, set, z, Combo::from_mixture(probe))?;
    let vals = points.par_iter().map(|&x| ap.value(set, x)).collect::<Result<Vec<_>>>()?;
    Ok((vals, ap.iterations))
}

/// Charges `Γ(z)⁻¹⟨G^{z̄}, φ⟩` carried by `R(z)φ`.
pub fn resolvent_charges(field: &VectorField, set: &InteractionSet, z: Complex64, probe: &GaussianMixture) -> Result<Vec<Complex64>> {
    Ok(Applied::new(field, set, z, Combo::from_mixture(probe))?.charges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResiduals {
    /// `max |R(z)φ − R(w)(φ − (z−w)R(w)φ)|`.
    pub printed: f64,
    /// `max |R(z)φ − R(w)(φ − (z−w)R(z)φ)|`.
    pub standard: f64,
    /// Newton iterations of the four charge solves.
    pub newton_iterations: Vec<usize>,
}

/// Both forms of the resolvent identity, measured at `points`.
pub fn resolvent_identity_residual(
    field: &VectorField,
    set: &InteractionSet,
    z: Complex64,
    w: Complex64,
    probe: &GaussianMixture,
    points: &[Point3],
) -> Result<IdentityResiduals> {
    let phi = Combo::from_mixture(probe);
    let rz = Applied::new(field, set, z, phi.clone())?;
    let rw = Applied::new(field, set, w, phi.clone())?;
    let s = z - w;
    let printed_arg = Applied::new(field, set, w, rw.subtract_from(set, &phi, s)?)?;
    let standard_arg = Applied::new(field, set, w, rz.subtract_from(set, &phi, s)?)?;
    let rows = points
        .par_iter()
        .map(|&x| {
            let lhs = rz.value(set, x)?;
            Ok(((lhs - printed_arg.value(set, x)?).norm(), (lhs - standard_arg.value(set, x)?).norm()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let printed = rows.iter().fold(0.0f64, |m, r| m.max(r.0));
    let standard = rows.iter().fold(0.0f64, |m, r| m.max(r.1));
    Ok(IdentityResiduals {
        printed,
        standard,
        newton_iterations: vec![rz.iterations, rw.iterations, printed_arg.iterations, standard_arg.iterations],
    })
}

/// `φ(x)` for a probe; convenience for residual checks.
pub fn probe_value(probe: &GaussianMixture, x: Point3) -> Result<Complex64> {
    Combo::from_mixture(probe).value(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pair() -> InteractionSet {
        InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)]).unwrap()
    }

    #[test]
    fn gamma_apply_examples() {
        let one = InteractionSet::single(Point3::ORIGIN);
        let v = gamma_apply(&VectorField::zero(1), &one, c(1.0), &[c(FOUR_PI)]).unwrap();
        assert!((v[0] - c(1.0)).norm() < 1e-15);
        let v = gamma_apply(&VectorField::diagonal(&[2.0]), &one, c(1.0), &[c(0.0)]).unwrap();
        assert_eq!(v[0], c(0.0));
        let v = gamma_apply(&VectorField::zero(2), &pair(), c(1.0), &[c(1.0), c(0.0)]).unwrap();
        assert!((v[0] - c(1.0 / FOUR_PI)).norm() < 1e-16);
        assert!((v[1] - c(-(-1.0f64).exp() / FOUR_PI)).norm() < 1e-16);
        assert!(matches!(gamma_apply(&VectorField::zero(1), &one, c(-2.0), &[c(1.0)]), Err(Error::BranchCut(_))));
    }

    #[test]
    fn gamma_solve_examples() {
        let one = InteractionSet::single(Point3::ORIGIN);
        let (z, _) = gamma_solve(&VectorField::zero(1), &one, c(1.0), &[c(1.0)], None).unwrap();
        assert!((z[0] - c(FOUR_PI)).norm() < 1e-8);
        let (z, it) = gamma_solve(&VectorField::diagonal(&[1.0]), &one, c(1.0), &[c(0.0)], None).unwrap();
        assert_eq!((z[0], it), (c(0.0), 0));
        let cubic = VectorField::polynomial(vec![vec![c(0.0), c(0.0), c(0.0), c(1.0)]]).unwrap();
        let (z, _) = gamma_solve(&cubic, &one, c(1.0), &[c(2.0)], None).unwrap();
        // Bisection oracle for s³ + s/4π = 2.
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.powi(3) + mid / FOUR_PI < 2.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((z[0] - c(lo)).norm() < 1e-10);
    }

    #[test]
    fn gamma_round_trip() {
        let f = VectorField::power_law(vec![1.0, 0.5], vec![2.0, 1.0]).unwrap();
        let zeta = [Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.1)];
        let z = Complex64::new(1.5, 0.7);
        let q = gamma_apply(&f, &pair(), z, &zeta).unwrap();
        let (back, _) = gamma_solve(&f, &pair(), z, &q, None).unwrap();
        for (a, b) in back.iter().zip(&zeta) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn fast_newton_for_large_real_z() {
        let theta = vec![vec![c(1.0), c(0.2)], vec![c(0.2), c(1.0)]];
        let f = VectorField::linear(theta, true).unwrap();
        let (_, it) = gamma_solve(&f, &pair(), c(400.0), &[c(1.0), c(-2.0)], None).unwrap();
        assert!(it <= 3, "{it}");
    }

    #[test]
    fn gz_inner_monte_carlo() {
        let one = InteractionSet::single(Point3::ORIGIN);
        let g = GaussianMixture::single(Gaussian::new(1.0, Point3::ORIGIN, 1.0));
        let exact = gz_inner(&g, &one, c(1.0), 0).unwrap();
        // ξ ~ N(0, ½ I) has density e^{−|ξ|²}/π^{3/2}.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000_000usize;
        let (mut s, mut s2) = (0.0, 0.0);
        let sd = 0.5f64.sqrt();
        for _ in 0..n {
            let mut r2 = 0.0;
            for _ in 0..3 {
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen();
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos() * sd;
                r2 += z * z;
            }
            let r = r2.sqrt();
            let v = PI.powf(1.5) * (-r).exp() / (FOUR_PI * r);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let sigma = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((exact.re - mean).abs() < 3.0 * sigma, "{} vs {mean} ± {sigma}", exact.re);
        assert!(exact.im.abs() < 1e-14);
        let scaled = gz_inner(&g.scaled(Complex64::new(2.0, -1.0)), &one, c(1.0), 0).unwrap();
        assert!((scaled - exact * Complex64::new(2.0, -1.0)).norm() < 1e-12);
        assert_eq!(gz_inner(&GaussianMixture::empty(), &one, c(1.0), 0).unwrap(), c(0.0));
    }

    #[test]
    fn radial_green_matches_angular_reduction() {
        let g = Gaussian::new(1.3, Point3::new(0.2, -0.1, 0.4), 0.8);
        let k = Complex64::new(1.2, 0.3);
        for rho in [0.0, 0.35, 1.7] {
            let x = g.center + Point3::new(0.0, 1.0, 0.0) * rho;
            let a = free_gaussian(&g, k, x).unwrap();
            let b = free_radial(k, rho, |s| Ok(s * g.value(g.center + Point3::new(1.0, 0.0, 0.0) * s)), &[rho, 2.4]).unwrap();
            assert!((a - b).norm() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn zero_probe_gives_zero() {
        let (v, _) = resolvent_apply(&VectorField::diagonal(&[1.0]), &InteractionSet::single(Point3::ORIGIN), c(1.0), &GaussianMixture::empty(), &[Point3::new(0.5, 0.0, 0.0)]).unwrap();
        assert_eq!(v[0], c(0.0));
    }

    #[test]
    fn resolvent_solves_the_equation() {
        let set = InteractionSet::single(Point3::ORIGIN);
        let field = VectorField::diagonal(&[0.7]);
        let probe = GaussianMixture::single(Gaussian::new(1.0, Point3::new(0.3, 0.0, 0.0), 0.6));
        let z = c(1.0);
        let charge = resolvent_charges(&field, &set, z, &probe).unwrap()[0];
        // Boundary condition: lim (ψ − ζ/(4πr)) = V(ζ), by linear extrapolation in r.
        let e = Point3::new(0.0, 0.6, 0.8);
        let radii = [2e-3, 4e-3];
        let pts: Vec<Point3> = radii.iter().map(|&r| e * r).collect();
        let (vals, _) = resolvent_apply(&field, &set, z, &probe, &pts).unwrap();
        let reg: Vec<Complex64> = vals.iter().zip(radii).map(|(v, r)| v - charge / (FOUR_PI * r)).collect();
        let limit = reg[0] * 2.0 - reg[1];
        assert!((limit - charge * 0.7).norm() < 1e-3, "{limit} vs {}", charge * 0.7);
        // (−Δ + z)ψ = φ away from the point.
        let x = Point3::new(0.4, 0.5, -0.3);
        let h = 1e-2;
        let mut pts = vec![x];
        for k in 0..3 {
            let mut d = [0.0; 3];
            d[k] = h;
            pts.push(x + Point3(d));
            pts.push(x - Point3(d));
        }
        let (v, _) = resolvent_apply(&field, &set, z, &probe, &pts).unwrap();
        let lap = (v[1..].iter().sum::<Complex64>() - v[0] * 6.0) / (h * h);
        let lhs = -lap + z * v[0];
        assert!((lhs - probe_value(&probe, x).unwrap()).norm() < 1e-3);
    }

    #[test]
    fn identity_equal_arguments() {
        let set = InteractionSet::single(Point3::ORIGIN);
        let probe = GaussianMixture::single(Gaussian::new(1.0, Point3::new(0.3, 0.0, 0.0), 0.6));
        let r = resolvent_identity_residual(&VectorField::diagonal(&[0.5]), &set, c(1.0), c(1.0), &probe, &[Point3::new(0.5, 0.2, 0.0)]).unwrap();
        assert_eq!((r.printed, r.standard), (0.0, 0.0));
    }

    #[test]
    fn output_decays_far_away() {
        let set = InteractionSet::single(Point3::ORIGIN);
        let probe = GaussianMixture::single(Gaussian::new(1.0, Point3::ORIGIN, 0.5));
        let pts = [Point3::new(4.0, 0.0, 0.0), Point3::new(12.0, 0.0, 0.0)];
        let (v, _) = resolvent_apply(&VectorField::diagonal(&[0.1]), &set, c(1.0), &probe, &pts).unwrap();
        // Both terms decay like e^{−r}/r for z = 1.
        assert!(v[1].norm() < v[0].norm() * (-7.0f64).exp());
    }

    #[test]
    fn standard_identity_holds() {
        let set = InteractionSet::single(Point3::ORIGIN);
        let probe = GaussianMixture::single(Gaussian::new(1.0, Point3::new(0.3, 0.1, 0.0), 0.7));
        let pts = [Point3::new(0.5, 0.0, 0.0), Point3::new(-0.2, 0.9, 0.4), Point3::new(1.5, -1.0, 0.3)];
        let free = resolvent_identity_residual(&VectorField::zero(1), &set, c(1.0), c(2.0), &probe, &pts).unwrap();
        assert!(free.standard <= 1e-6, "{free:?}");
        let lin = resolvent_identity_residual(&VectorField::diagonal(&[0.4]), &set, c(1.0), c(2.0), &probe, &pts).unwrap();
        assert!(lin.standard <= 1e-5, "{lin:?}");
    }
}
