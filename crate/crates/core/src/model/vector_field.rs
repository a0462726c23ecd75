use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync>;

/// Admissible domain of a custom vector field.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    All,
    /// Per-component bounds on real and imaginary parts.
    Box { re: Vec<(f64, f64)>, im: Vec<(f64, f64)> },
}

impl Domain {
    fn contains(&self, zeta: &[Complex64]) -> bool {
        match self {
            Domain::All => true,
            Domain::Box { re, im } => zeta.iter().enumerate().all(|(j, z)| {
                let (a, b) = re[j];
                let (c, d) = im[j];
                z.re >= a && z.re <= b && z.im >= c && z.im <= d
            }),
        }
    }
}

/// The nonlinearity `V: ℂⁿ → ℂⁿ` that enters through the boundary
/// conditions at the interaction points.
///
/// Gradient-type fields use the realified convention: for `h` real-valued on
/// `ℂⁿ ≅ ℝ²ⁿ`, `V_j = ∂h/∂(Re ζ_j) + i ∂h/∂(Im ζ_j)`. This is the convention
/// under which `Re h(ζ)` is the potential of the conserved energy.
#[derive(Clone)]
pub enum VectorField {
    Linear { theta: Vec<Vec<Complex64>>, hermitian: bool },
    /// `V_j(ζ) = γ_j |ζ_j|^{σ_j} ζ_j`.
    PowerLaw { gamma: Vec<f64>, sigma: Vec<f64> },
    /// `V_j(ζ) = Σ_k c_{jk} ζ_j^k`.
    Polynomial { coefficients: Vec<Vec<Complex64>> },
    Gradient { dim: usize, h: ScalarFn, grad: VectorFn },
    Custom { dim: usize, f: VectorFn, lipschitz_hint: f64, domain: Domain },
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Linear { theta, hermitian } => f
                .debug_struct("Linear")
                .field("theta", theta)
                .field("hermitian", hermitian)
                .finish(),
            VectorField::PowerLaw { gamma, sigma } => {
                f.debug_struct("PowerLaw").field("gamma", gamma).field("sigma", sigma).finish()
            }
            VectorField::Polynomial { coefficients } => {
                f.debug_struct("Polynomial").field("coefficients", coefficients).finish()
            }
            VectorField::Gradient { dim, .. } => f.debug_struct("Gradient").field("dim", dim).finish_non_exhaustive(),
            VectorField::Custom { dim, lipschitz_hint, domain, .. } => f
                .debug_struct("Custom")
                .field("dim", dim)
                .field("lipschitz_hint", lipschitz_hint)
                .field("domain", domain)
                .finish_non_exhaustive(),
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl VectorField {
    pub fn linear(theta: Vec<Vec<Complex64>>, hermitian: bool) -> Result<Self> {
        let n = theta.len();
        if n == 0 || theta.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("Θ must be a non-empty square matrix".into()));
        }
        if hermitian {
            for i in 0..n {
                for j in 0..n {
                    if (theta[i][j] - theta[j][i].conj()).norm() > 1e-12 * (1.0 + theta[i][j].norm()) {
                        return Err(Error::InvalidInput(format!("Θ is not hermitian at ({i}, {j})")));
                    }
                }
            }
        }
        Ok(VectorField::Linear { theta, hermitian })
    }

    /// `Θ = diag(α)` with real entries, hermitian.
    pub fn diagonal(alpha: &[f64]) -> Self {
        let n = alpha.len();
        let theta = (0..n)
            .map(|i| (0..n).map(|j| if i == j { c(alpha[i]) } else { c(0.0) }).collect())
            .collect();
        VectorField::Linear { theta, hermitian: true }
    }

    pub fn zero(n: usize) -> Self {
        Self::diagonal(&vec![0.0; n])
    }

    pub fn power_law(gamma: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() || gamma.len() != sigma.len() {
            return Err(Error::InvalidInput("γ and σ must have the same non-zero length".into()));
        }
        Ok(VectorField::PowerLaw { gamma, sigma })
    }

    pub fn polynomial(coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("polynomial field needs at least one component".into()));
        }
        Ok(VectorField::Polynomial { coefficients })
    }

    pub fn gradient<H, G>(dim: usize, h: H, grad: G) -> Self
    where
        H: Fn(&[Complex64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        VectorField::Gradient { dim, h: Arc::new(h), grad: Arc::new(grad) }
    }

    pub fn custom<F>(dim: usize, f: F, lipschitz_hint: f64, domain: Domain) -> Self
    where
        F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        VectorField::Custom { dim, f: Arc::new(f), lipschitz_hint, domain }
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorField::Linear { theta, .. } => theta.len(),
            VectorField::PowerLaw { gamma, .. } => gamma.len(),
            VectorField::Polynomial { coefficients } => coefficients.len(),
            VectorField::Gradient { dim, .. } | VectorField::Custom { dim, .. } => *dim,
        }
    }

    /// Evaluate `V(ζ)`.
    pub fn eval(&self, zeta: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if zeta.len() != n {
            return Err(Error::Dimension { expected: n, got: zeta.len() });
        }
        if zeta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite charge".into()));
        }
        let out = match self {
            VectorField::Linear { theta, .. } => theta
                .iter()
                .map(|row| row.iter().zip(zeta).map(|(a, z)| a * z).sum())
                .collect(),
            VectorField::PowerLaw { gamma, sigma } => {
                let mut out = Vec::with_capacity(n);
                for j in 0..n {
                    let r = zeta[j].norm();
                    if r == 0.0 {
                        if sigma[j] <= -1.0 {
                            return Err(Error::Domain(format!("|ζ|^σ ζ undefined at 0 for σ = {}", sigma[j])));
                        }
                        out.push(c(0.0));
                    } else {
                        out.push(zeta[j] * (gamma[j] * r.powf(sigma[j])));
                    }
                }
                out
            }
            VectorField::Polynomial { coefficients } => coefficients
                .iter()
                .zip(zeta)
                .map(|(cs, z)| cs.iter().rev().fold(c(0.0), |acc, a| acc * z + a))
                .collect(),
            VectorField::Gradient { grad, .. } => grad(zeta),
            VectorField::Custom { f, domain, .. } => {
                if !domain.contains(zeta) {
                    return Err(Error::Domain("ζ outside the declared box".into()));
                }
                f(zeta)
            }
        };
        if out.len() != n {
            return Err(Error::Dimension { expected: n, got: out.len() });
        }
        if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("V(ζ) overflowed".into()));
        }
        Ok(out)
    }

    /// `V_j` depends on `ζ_j` only (the finite-propagation-speed condition).
    /// Gradient and custom fields are reported as coupled since this cannot
    /// be decided from a callable.
    pub fn is_diagonal(&self) -> bool {
        match self {
            VectorField::Linear { theta, .. } => {
                theta.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, a)| i == j || *a == c(0.0)))
            }
            VectorField::PowerLaw { .. } | VectorField::Polynomial { .. } => true,
            VectorField::Gradient { .. } | VectorField::Custom { .. } => false,
        }
    }

    /// Real potential `Re h(ζ)` when the field is of gradient type.
    pub fn potential(&self, zeta: &[Complex64]) -> Option<f64> {
        match self {
            VectorField::Gradient { h, .. } => Some(h(zeta)),
            VectorField::Linear { theta, hermitian: true } => {
                let mut acc = c(0.0);
                for (i, row) in theta.iter().enumerate() {
                    for (j, a) in row.iter().enumerate() {
                        acc += zeta[i].conj() * a * zeta[j];
                    }
                }
                Some(0.5 * acc.re)
            }
            VectorField::PowerLaw { gamma, sigma } => Some(
                zeta.iter()
                    .zip(gamma.iter().zip(sigma))
                    .map(|(z, (g, s))| g * z.norm().powf(s + 2.0) / (s + 2.0))
                    .sum(),
            ),
            _ => None,
        }
    }

    pub fn is_gradient(&self) -> bool {
        match self {
            VectorField::Gradient { .. } | VectorField::Linear { hermitian: true, .. } => true,
            VectorField::PowerLaw { sigma, .. } => sigma.iter().all(|&s| s != -2.0),
            _ => false,
        }
    }
}

/// Free-function form of [`VectorField::eval`].
pub fn vf_eval(field: &VectorField, zeta: &[Complex64]) -> Result<Vec<Complex64>> {
    field.eval(zeta)
}

/// Maximum over `probes` of `|V(ζ) − ∇h(ζ)|` with `∇h` taken by central
/// differences of step `step` in every real and imaginary direction.
pub fn vf_gradient_consistency(field: &VectorField, probes: &[Vec<Complex64>], step: f64) -> Result<f64> {
    let VectorField::Gradient { h, grad, dim } = field else {
        return Err(Error::Variant { expected: "Gradient" });
    };
    let mut worst: f64 = 0.0;
    for zeta in probes {
        if zeta.len() != *dim {
            return Err(Error::Dimension { expected: *dim, got: zeta.len() });
        }
        let v = grad(zeta);
        let mut z = zeta.clone();
        for j in 0..*dim {
            let mut fd = [0.0; 2];
            for (k, dir) in [c(1.0), Complex64::new(0.0, 1.0)].into_iter().enumerate() {
                z[j] = zeta[j] + dir * step;
                let up = h(&z);
                z[j] = zeta[j] - dir * step;
                let down = h(&z);
                z[j] = zeta[j];
                fd[k] = (up - down) / (2.0 * step);
            }
            worst = worst.max((v[j] - Complex64::new(fd[0], fd[1])).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_linear_field() {
        let v = VectorField::diagonal(&[1.0]);
        assert_eq!(v.eval(&[cz(2.0, 1.0)]).unwrap(), vec![cz(2.0, 1.0)]);
    }

    #[test]
    fn power_law_example() {
        let v = VectorField::power_law(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(v.eval(&[cz(-2.0, 0.0)]).unwrap(), vec![cz(-4.0, 0.0)]);
        assert_eq!(v.eval(&[cz(0.0, 0.0)]).unwrap(), vec![cz(0.0, 0.0)]);
        let singular = VectorField::power_law(vec![1.0], vec![-1.5]).unwrap();
        assert!(matches!(singular.eval(&[cz(0.0, 0.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn gradient_quadratic_example() {
        let alpha = 3.0;
        let v = VectorField::gradient(
            1,
            move |z| 0.5 * alpha * (z[0].re * z[0].re - z[0].im * z[0].im),
            move |z| vec![alpha * z[0].conj()],
        );
        assert_eq!(v.eval(&[cz(2.0, 0.0)]).unwrap(), vec![cz(6.0, 0.0)]);
    }

    #[test]
    fn polynomial_horner() {
        // 1 + 2ζ + 3ζ²
        let v = VectorField::polynomial(vec![vec![cz(1.0, 0.0), cz(2.0, 0.0), cz(3.0, 0.0)]]).unwrap();
        assert_eq!(v.eval(&[cz(2.0, 0.0)]).unwrap(), vec![cz(17.0, 0.0)]);
    }

    #[test]
    fn hermitian_flag_checked() {
        let bad = vec![vec![cz(1.0, 0.0), cz(0.0, 1.0)], vec![cz(0.0, 1.0), cz(1.0, 0.0)]];
        assert!(VectorField::linear(bad.clone(), true).is_err());
        assert!(VectorField::linear(bad, false).is_ok());
    }

    #[test]
    fn custom_domain_enforced() {
        let v = VectorField::custom(
            1,
            |z| vec![z[0] * 2.0],
            2.0,
            Domain::Box { re: vec![(-1.0, 1.0)], im: vec![(-1.0, 1.0)] },
        );
        assert!(v.eval(&[cz(0.5, 0.0)]).is_ok());
        assert!(matches!(v.eval(&[cz(1.5, 0.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn overflow_reported() {
        let v = VectorField::power_law(vec![1.0], vec![400.0]).unwrap();
        assert!(matches!(v.eval(&[cz(10.0, 0.0)]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn gradient_consistency_cases() {
        let half_norm = VectorField::gradient(2, |z| 0.5 * (z[0].norm_sqr() + z[1].norm_sqr()), |z| z.to_vec());
        let probes = vec![vec![cz(0.3, -1.2), cz(2.0, 0.5)], vec![cz(-4.0, 0.0), cz(0.0, 7.0)]];
        assert!(vf_gradient_consistency(&half_norm, &probes, 1e-5).unwrap() <= 1e-6);

        // ¼ Re ζ⁴ at ζ = 1 has realified gradient 1.
        let quartic = VectorField::gradient(1, |z| 0.25 * z[0].powi(4).re, |z| vec![z[0].powi(3).conj()]);
        assert_eq!(quartic.eval(&[cz(1.0, 0.0)]).unwrap(), vec![cz(1.0, 0.0)]);
        assert!(vf_gradient_consistency(&quartic, &[vec![cz(1.0, 0.0)]], 1e-5).unwrap() <= 1e-6);

        let constant = VectorField::gradient(1, |_| 3.0, |_| vec![cz(0.25, 0.0)]);
        assert_eq!(vf_gradient_consistency(&constant, &[vec![cz(1.0, 1.0)]], 1e-5).unwrap(), 0.25);

        let not_grad = VectorField::diagonal(&[1.0]);
        assert_eq!(
            vf_gradient_consistency(&not_grad, &[vec![cz(1.0, 0.0)]], 1e-5).unwrap_err(),
            Error::Variant { expected: "Gradient" }
        );
    }

    #[test]
    fn potentials() {
        let lin = VectorField::diagonal(&[2.0]);
        assert_eq!(lin.potential(&[cz(1.0, 1.0)]), Some(2.0));
        let pl = VectorField::power_law(vec![1.0], vec![2.0]).unwrap();
        assert_eq!(pl.potential(&[cz(2.0, 0.0)]), Some(4.0));
        assert!(VectorField::polynomial(vec![vec![cz(0.0, 0.0)]]).unwrap().potential(&[cz(1.0, 0.0)]).is_none());
    }
}
