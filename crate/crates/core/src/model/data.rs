use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::{InteractionSet, Point3};
use super::vector_field::VectorField;
use crate::error::{Error, Result};
use crate::newton;

const FOUR_PI: f64 = 4.0 * PI;

/// One term `a · exp(−|x − c|² / w²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub amplitude: Complex64,
    pub center: Point3,
    pub width: f64,
}

impl Gaussian {
    pub fn new(amplitude: f64, center: Point3, width: f64) -> Self {
        Self { amplitude: Complex64::new(amplitude, 0.0), center, width }
    }

    pub fn value(&self, x: Point3) -> Complex64 {
        self.amplitude * (-(x - self.center).norm_sq() / (self.width * self.width)).exp()
    }

    pub fn value_grad(&self, x: Point3) -> (Complex64, [Complex64; 3]) {
        let d = x - self.center;
        let v = self.value(x);
        let k = -2.0 / (self.width * self.width);
        (v, [v * (k * d.0[0]), v * (k * d.0[1]), v * (k * d.0[2])])
    }

    /// Exact mean over the sphere `S(x, radius)`.
    pub fn spherical_mean(&self, x: Point3, radius: f64) -> Complex64 {
        let d = (x - self.center).norm();
        let r = radius.abs();
        let w2 = self.width * self.width;
        let arg = 4.0 * d * r / w2;
        // e^{-(d²+r²)/w²} sinh(2dr/w²)/(2dr/w²), written without overflow.
        let shape = if arg < 1e-8 {
            (-(d * d + r * r) / w2).exp() * (1.0 + arg * arg / 24.0)
        } else {
            (-(d - r) * (d - r) / w2).exp() * (-(-arg).exp_m1()) / arg
        };
        self.amplitude * shape
    }
}

/// A finite Gaussian mixture; the default family for regular data and probes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaussianMixture(pub Vec<Gaussian>);

impl GaussianMixture {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(g: Gaussian) -> Self {
        Self(vec![g])
    }

    pub fn terms(&self) -> &[Gaussian] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, x: Point3) -> Complex64 {
        self.0.iter().map(|g| g.value(x)).sum()
    }

    pub fn value_grad(&self, x: Point3) -> (Complex64, [Complex64; 3]) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut gr = [Complex64::new(0.0, 0.0); 3];
        for g in &self.0 {
            let (gv, gg) = g.value_grad(x);
            v += gv;
            for k in 0..3 {
                gr[k] += gg[k];
            }
        }
        (v, gr)
    }

    pub fn spherical_mean(&self, x: Point3, radius: f64) -> Complex64 {
        self.0.iter().map(|g| g.spherical_mean(x, radius)).sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|g| Gaussian { amplitude: g.amplitude * s, ..*g }).collect())
    }

    /// Radius about `origin` beyond which every term is below `e^{-k²}` of its peak.
    pub fn extent(&self, origin: Point3, k: f64) -> f64 {
        self.0
            .iter()
            .map(|g| (g.center - origin).norm() + k * g.width)
            .fold(0.0, f64::max)
    }

    pub fn max_width(&self) -> f64 {
        self.0.iter().map(|g| g.width).fold(0.0, f64::max)
    }
}

pub type ValueGradFn = Arc<dyn Fn(Point3) -> (Complex64, [Complex64; 3]) + Send + Sync>;

/// The smooth part of an initial datum: value with analytic gradient.
#[derive(Clone)]
pub enum RegularPart {
    Mixture(GaussianMixture),
    /// Arbitrary smooth callable returning value and gradient. Not used by
    /// any of the closed-form oracles.
    Custom(ValueGradFn),
}

impl fmt::Debug for RegularPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularPart::Mixture(m) => f.debug_tuple("Mixture").field(m).finish(),
            RegularPart::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Default for RegularPart {
    fn default() -> Self {
        RegularPart::Mixture(GaussianMixture::empty())
    }
}

impl RegularPart {
    pub fn value(&self, x: Point3) -> Complex64 {
        match self {
            RegularPart::Mixture(m) => m.value(x),
            RegularPart::Custom(f) => f(x).0,
        }
    }

    pub fn value_grad(&self, x: Point3) -> (Complex64, [Complex64; 3]) {
        match self {
            RegularPart::Mixture(m) => m.value_grad(x),
            RegularPart::Custom(f) => f(x),
        }
    }

    pub fn mixture(&self) -> Option<&GaussianMixture> {
        match self {
            RegularPart::Mixture(m) => Some(m),
            RegularPart::Custom(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RegularPart::Mixture(m) if m.is_empty())
    }
}

impl From<GaussianMixture> for RegularPart {
    fn from(m: GaussianMixture) -> Self {
        RegularPart::Mixture(m)
    }
}

/// Carrier of the singular part of the data: the charge `ζ_j` multiplies a
/// profile with the Coulomb singularity `1/(4π|x − y_j|)` at `y_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularProfile {
    /// `e^{−√z₀ r}/(4πr)`, square-integrable. The default.
    Yukawa { mass: f64 },
    /// Bare `1/(4πr)`. Closed-form test mode only.
    Coulomb,
    /// `(1/(4πr) − 1/(4πρ))₊`, supported in the ball of radius ρ.
    /// Test mode for finite-propagation experiments.
    Compact { radius: f64 },
}

impl Default for SingularProfile {
    fn default() -> Self {
        SingularProfile::Yukawa { mass: 1.0 }
    }
}

impl SingularProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SingularProfile::Yukawa { mass } if !(mass > 0.0 && mass.is_finite()) => {
                Err(Error::InvalidInput(format!("profile mass must be positive, got {mass}")))
            }
            SingularProfile::Compact { radius } if !(radius > 0.0 && radius.is_finite()) => {
                Err(Error::InvalidInput(format!("compact profile radius must be positive, got {radius}")))
            }
            _ => Ok(()),
        }
    }

    /// Profile value at distance `r > 0` from its centre.
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            SingularProfile::Yukawa { mass } => (-mass.sqrt() * r).exp() / (FOUR_PI * r),
            SingularProfile::Coulomb => 1.0 / (FOUR_PI * r),
            SingularProfile::Compact { radius } => {
                if r < radius {
                    (1.0 / r - 1.0 / radius) / FOUR_PI
                } else {
                    0.0
                }
            }
        }
    }

    /// `lim_{r→0} (profile(r) − 1/(4πr))`.
    pub fn offset(&self) -> f64 {
        match *self {
            SingularProfile::Yukawa { mass } => -mass.sqrt() / FOUR_PI,
            SingularProfile::Coulomb => 0.0,
            SingularProfile::Compact { radius } => -1.0 / (FOUR_PI * radius),
        }
    }
}

/// `W(r) = (e^{−a r} − 1)/(4π r)` and `W'(r)`, stable near `r = 0`.
pub(crate) fn yukawa_correction(a: f64, r: f64) -> (f64, f64) {
    let x = a * r;
    if x < 1e-4 {
        // Series in x: W = (−a + a x/2 − a x²/6 + a x³/24)/(4π)
        let w = a * (-1.0 + x / 2.0 - x * x / 6.0 + x * x * x / 24.0) / FOUR_PI;
        let dw = a * a * (0.5 - x / 3.0 + x * x / 8.0) / FOUR_PI;
        (w, dw)
    } else {
        let e = (-x).exp();
        let em1 = (-x).exp_m1();
        let w = em1 / (FOUR_PI * r);
        let dw = (-x * e - em1) / (FOUR_PI * r * r);
        (w, dw)
    }
}

/// Admissible initial data: regular parts plus charges on singular profiles,
/// `φ₀ = reg + Σ ζ⁰_j P_j`, `φ̇₀ = reg_v + Σ ζ̇⁰_j P_j`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub regular_value: RegularPart,
    pub regular_velocity: RegularPart,
    pub zeta0: Vec<Complex64>,
    pub zetadot0: Vec<Complex64>,
    pub profile: SingularProfile,
}

impl InitialData {
    pub fn new(
        regular_value: RegularPart,
        regular_velocity: RegularPart,
        zeta0: Vec<Complex64>,
        zetadot0: Vec<Complex64>,
        profile: SingularProfile,
    ) -> Result<Self> {
        if zeta0.len() != zetadot0.len() {
            return Err(Error::Dimension { expected: zeta0.len(), got: zetadot0.len() });
        }
        profile.validate()?;
        Ok(Self { regular_value, regular_velocity, zeta0, zetadot0, profile })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            regular_value: RegularPart::default(),
            regular_velocity: RegularPart::default(),
            zeta0: vec![Complex64::new(0.0, 0.0); n],
            zetadot0: vec![Complex64::new(0.0, 0.0); n],
            profile: SingularProfile::default(),
        }
    }

    /// Data whose charges `ζ⁰` are solved from the boundary conditions at
    /// `t = 0` given the regular parts and `ζ̇⁰`. For the Yukawa profile this
    /// is `Γ_{V,Y}(z₀) ζ⁰ = reg(Y)`.
    pub fn admissible(
        set: &InteractionSet,
        field: &VectorField,
        regular_value: RegularPart,
        regular_velocity: RegularPart,
        zetadot0: Vec<Complex64>,
        profile: SingularProfile,
    ) -> Result<Self> {
        profile.validate()?;
        let n = set.len();
        if zetadot0.len() != n {
            return Err(Error::Dimension { expected: n, got: zetadot0.len() });
        }
        let target: Vec<Complex64> = set.points().iter().map(|&y| regular_value.value(y)).collect();
        let guess = vec![Complex64::new(0.0, 0.0); n];
        let (zeta0, _) = newton::solve(
            |z| {
                let mut res = boundary_map(set, field, &profile, z)?;
                for (r, t) in res.iter_mut().zip(&target) {
                    *r -= t;
                }
                Ok(res)
            },
            &guess,
            1e-12,
            50,
        )?;
        Self::new(regular_value, regular_velocity, zeta0, zetadot0, profile)
    }

    pub fn len(&self) -> usize {
        self.zeta0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta0.is_empty()
    }

    /// Total datum `φ₀(x)` for `x` off the interaction points.
    pub fn value(&self, set: &InteractionSet, x: Point3) -> Complex64 {
        let mut v = self.regular_value.value(x);
        for (j, &y) in set.points().iter().enumerate() {
            v += self.zeta0[j] * self.profile.value(x.distance(y));
        }
        v
    }

    /// Total velocity `φ̇₀(x)` for `x` off the interaction points.
    pub fn velocity(&self, set: &InteractionSet, x: Point3) -> Complex64 {
        let mut v = self.regular_velocity.value(x);
        for (j, &y) in set.points().iter().enumerate() {
            v += self.zetadot0[j] * self.profile.value(x.distance(y));
        }
        v
    }
}

/// `V(ζ) − offset·ζ − Σ_{i≠j} P_i(y_j) ζ_i`; the boundary condition at `t = 0`
/// reads `boundary_map(ζ⁰) = reg(Y)`.
pub(crate) fn boundary_map(
    set: &InteractionSet,
    field: &VectorField,
    profile: &SingularProfile,
    zeta: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mut out = field.eval(zeta)?;
    let n = set.len();
    for j in 0..n {
        out[j] -= zeta[j] * profile.offset();
        for i in 0..n {
            if i != j {
                out[j] -= zeta[i] * profile.value(set.dist(i, j));
            }
        }
    }
    Ok(out)
}

/// Residual of the boundary conditions at `t = 0`:
/// `|reg(y_j) + ζ⁰_j·offset + Σ_{i≠j} ζ⁰_i P_i(y_j) − V_j(ζ⁰)|`.
pub fn validate_initial(data: &InitialData, set: &InteractionSet, field: &VectorField) -> Result<Vec<f64>> {
    let n = set.len();
    if data.len() != n {
        return Err(Error::Dimension { expected: n, got: data.len() });
    }
    let bm = boundary_map(set, field, &data.profile, &data.zeta0)?;
    Ok(set
        .points()
        .iter()
        .zip(bm)
        .map(|(&y, b)| (data.regular_value.value(y) - b).norm())
        .collect())
}

/// Default admissibility tolerance (absolute).
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

pub fn is_admissible(data: &InitialData, set: &InteractionSet, field: &VectorField, tol: f64) -> Result<bool> {
    Ok(validate_initial(data, set, field)?.iter().all(|&r| r <= tol))
}
