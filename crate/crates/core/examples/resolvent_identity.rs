// Resolvent of a single point interaction applied to a Gaussian, and the
// two forms of the resolvent identity.

use pointwave::model::{Gaussian, GaussianMixture, InteractionSet, Point3, VectorField};
use pointwave::resolvent::{resolvent_identity_residual, IdentityResiduals};
use pointwave::{Complex64, Result};

pub fn run_example() -> Result<IdentityResiduals> {
    let set = InteractionSet::single(Point3::ORIGIN);
    let field = VectorField::diagonal(&[0.4]);
    let probe = GaussianMixture::single(Gaussian::new(1.0, Point3::new(0.3, 0.1, 0.0), 0.7));
    let points = [Point3::new(0.5, 0.2, 0.1), Point3::new(-0.4, 0.3, 0.6), Point3::new(1.2, -0.5, 0.3)];
    resolvent_identity_residual(&field, &set, Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), &probe, &points)
}

fn main() -> Result<()> {
    let r = run_example()?;
    println!("R(z) - R(w) = (w - z) R(w) R(z): residual {:.2e}", r.standard);
    println!("with R(w) in place of R(z) on the right: residual {:.2e}", r.printed);
    println!("newton iterations per solve: {:?}", r.newton_iterations);
    Ok(())
}
