// Charges for a linear point interaction, then the field along a ray and
// the boundary-condition residual at the point.

use pointwave::delayode::{integrate, IntegratorConfig};
use pointwave::field::{bc_residual, reconstruct};
use pointwave::model::{Gaussian, GaussianMixture, InitialData, InteractionSet, Point3, RegularPart, Scenario, SingularProfile, VectorField};
use pointwave::quadrature::SphereQuadrature;
use pointwave::{Complex64, Result};

pub struct Slice {
    pub samples: Vec<(f64, f64)>,
    pub bc_residual: f64,
}

pub fn run_example() -> Result<Slice> {
    let set = InteractionSet::single(Point3::ORIGIN);
    let field = VectorField::diagonal(&[0.5]);
    let bump: RegularPart = GaussianMixture::single(Gaussian::new(1.0, Point3::ORIGIN, 0.5)).into();
    let data = InitialData::admissible(&set, &field, bump, RegularPart::default(), vec![Complex64::new(0.0, 0.0)], SingularProfile::default())?;
    let scenario = Scenario::new(set.clone(), field.clone(), data.clone())?;
    let traj = integrate(&scenario, &IntegratorConfig::new(1e-2, 1.0))?;
    let quad = SphereQuadrature::new(16)?;
    let t = 0.7;
    let samples = (1..=20)
        .map(|i| {
            let r = 0.1 * i as f64;
            Ok((r, reconstruct(&traj, &data, &set, t, Point3::new(r, 0.0, 0.0), &quad)?.re))
        })
        .collect::<Result<Vec<_>>>()?;
    let res = bc_residual(&traj, &data, &set, &field, t, &[0.02, 0.01, 0.005], &quad)?;
    Ok(Slice { samples, bc_residual: res[0] })
}

fn main() -> Result<()> {
    let s = run_example()?;
    for (r, v) in &s.samples {
        println!("r = {r:.1}  phi = {v:+.6}");
    }
    println!("boundary condition residual: {:.2e}", s.bc_residual);
    Ok(())
}
