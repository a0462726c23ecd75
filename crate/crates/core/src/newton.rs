//! Damped Newton iteration on ℂⁿ with a realified finite-difference Jacobian.
//!
//! The maps we solve (`V(ζ) + …`) need not be holomorphic, so the Jacobian is
//! taken in the `2n` real coordinates `(Re ζ, Im ζ)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 30;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solve `f(ζ) = 0` from `guess`. Returns the root and the iteration count.
pub(crate) fn solve<F>(mut f: F, guess: &[Complex64], tol: f64, max_iter: usize) -> Result<(Vec<Complex64>, usize)>
where
    F: FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = guess.len();
    let mut x = guess.to_vec();
    let mut fx = f(&x)?;
    let mut res = norm(&fx);
    for iter in 0..=max_iter {
        if res <= tol {
            return Ok((x, iter));
        }
        if iter == max_iter {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for k in 0..2 * n {
            let j = k % n;
            let scale = 1e-7 * x[j].norm().max(1.0);
            let dir = if k < n { Complex64::new(scale, 0.0) } else { Complex64::new(0.0, scale) };
            let mut xp = x.clone();
            xp[j] += dir;
            let mut xm = x.clone();
            xm[j] -= dir;
            let fp = f(&xp)?;
            let fm = f(&xm)?;
            for i in 0..n {
                let d = (fp[i] - fm[i]) / (2.0 * scale);
                jac[(i, k)] = d.re;
                jac[(i + n, k)] = d.im;
            }
        }
        let rhs = DVector::from_iterator(2 * n, fx.iter().map(|z| -z.re).chain(fx.iter().map(|z| -z.im)));
        let lu = jac.lu();
        let step = lu.solve(&rhs).ok_or(Error::SingularJacobian)?;
        if step.iter().any(|s| !s.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<Complex64> =
                (0..n).map(|i| x[i] + Complex64::new(step[i], step[i + n]) * lambda).collect();
            if let Ok(ft) = f(&trial) {
                let rt = norm(&ft);
                if rt.is_finite() && (rt < res || rt <= tol) {
                    x = trial;
                    fx = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations: iter + 1, residual: res });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let (x, _) = solve(|z| Ok(vec![z[0] * z[0] * z[0] - 8.0]), &[Complex64::new(1.0, 0.0)], 1e-12, 50).unwrap();
        assert!((x[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn non_holomorphic_map() {
        // ζ + |ζ|²ζ = q
        let q = Complex64::new(3.0, -1.0);
        let (x, _) = solve(|z| Ok(vec![z[0] + z[0] * z[0].norm_sqr() - q]), &[Complex64::new(0.0, 0.0)], 1e-12, 50)
            .unwrap();
        assert!((x[0] + x[0] * x[0].norm_sqr() - q).norm() < 1e-12);
    }

    #[test]
    fn singular_jacobian_reported() {
        let err = solve(|_| Ok(vec![Complex64::new(1.0, 0.0)]), &[Complex64::new(0.0, 0.0)], 1e-12, 5).unwrap_err();
        assert_eq!(err, Error::SingularJacobian);
    }
}
