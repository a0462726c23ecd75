//! Quadrature rules shared by the free-wave, resolvent, energy and blow-up code:
//! Gauss–Legendre nodes, adaptive Gauss–Kronrod on finite and half-infinite
//! intervals, and a product rule on the unit sphere.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Point3;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` times a uniform
/// azimuthal grid of `2·order` points. Integrates spherical harmonics of degree
/// `≤ 2·order − 1` exactly. Weights are normalised to sum to one, so the rule
/// computes spherical *means*.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    order: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("sphere quadrature order must be positive".into()));
        }
        let (mu, wmu) = gauss_legendre(order);
        let n_phi = 2 * order;
        let mut nodes = Vec::with_capacity(order * n_phi);
        let mut weights = Vec::with_capacity(order * n_phi);
        for (&c, &w) in mu.iter().zip(&wmu) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
                nodes.push([s * phi.cos(), s * phi.sin(), c]);
                weights.push(0.5 * w / n_phi as f64);
            }
        }
        Ok(Self { order, nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Highest spherical-harmonic degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.order - 1
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weighted sum of `f(ω)` over the unit directions.
    pub fn average<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut([f64; 3]) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(*n) * w;
        }
        acc
    }

    /// Mean of `f` over the sphere of the given centre and radius.
    pub fn mean<F>(&self, center: Point3, radius: f64, mut f: F) -> Complex64
    where
        F: FnMut(Point3) -> Complex64,
    {
        if radius == 0.0 {
            return f(center);
        }
        self.average(|w| f(center + Point3::from(w) * radius))
    }
}

// 7-point Gauss / 15-point Kronrod pair (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kron * h;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
    }
    let err = ((kron - gauss) * h).norm();
    Ok((value, err))
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10, max_intervals: 2000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, ..Self::default() }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod integration of a complex-valued integrand
/// over `[a, b]`, bisecting the interval with the largest error estimate.
/// `breaks` are interior points where the integrand is known to be rough.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0, intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut pieces: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1])?;
        pieces.push((w[0], w[1], v, e));
    }
    loop {
        let total: Complex64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= tol.abs.max(tol.rel * total.norm()) {
            return Ok(Estimate { value: total * sign, error: err, intervals: pieces.len() });
        }
        if pieces.len() >= tol.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{a}, {b}] after {} intervals (error {err:e})",
                pieces.len()
            )));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (l, r, _, _) = pieces.swap_remove(idx);
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            return Err(Error::QuadratureFailure(format!("interval [{l}, {r}] cannot be split")));
        }
        let (v1, e1) = gk15(&mut f, l, m)?;
        let (v2, e2) = gk15(&mut f, m, r)?;
        pieces.push((l, m, v1, e1));
        pieces.push((m, r, v2, e2));
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(|x| f(x).map(|v| Complex64::new(v, 0.0)), a, b, breaks, tol).map(|e| e.value.re)
}

/// Integral over `[a, ∞)` via `r = a + u/(1-u)`, `u ∈ [0, 1)`.
/// `breaks` are given in the original variable.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, breaks: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let ubreaks: Vec<f64> = breaks
        .iter()
        .filter(|&&r| r > a)
        .map(|&r| (r - a) / (1.0 + r - a))
        .collect();
    integrate(
        |u| {
            if u >= 1.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let one_minus = 1.0 - u;
            let r = a + u / one_minus;
            let v = f(r)?;
            Ok(v / (one_minus * one_minus))
        },
        0.0,
        1.0,
        &ubreaks,
        tol,
    )
}
