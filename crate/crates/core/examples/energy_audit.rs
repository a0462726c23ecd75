// Energy of a gradient-type point interaction at two times, on a coarse grid.

use pointwave::delayode::{integrate, IntegratorConfig};
use pointwave::energy::{energy, EnergyBreakdown, EnergyGrid};
use pointwave::model::{Gaussian, GaussianMixture, InitialData, InteractionSet, Point3, RegularPart, Scenario, SingularProfile, VectorField};
use pointwave::{Complex64, Result};

pub fn run_example() -> Result<(EnergyBreakdown, EnergyBreakdown)> {
    let alpha = 0.5;
    let set = InteractionSet::single(Point3::ORIGIN);
    let field = VectorField::gradient(1, move |z| 0.5 * alpha * z[0].norm_sqr(), move |z| vec![z[0] * alpha]);
    let bump: RegularPart = GaussianMixture::single(Gaussian::new(1.0, Point3::ORIGIN, 0.5)).into();
    let data = InitialData::admissible(&set, &field, bump, RegularPart::default(), vec![Complex64::new(0.0, 0.0)], SingularProfile::default())?;
    let scenario = Scenario::new(set.clone(), field.clone(), data.clone())?;
    let mut cfg = IntegratorConfig::new(1e-2, 1.2);
    cfg.quad_order = 12;
    let traj = integrate(&scenario, &cfg)?;
    let grid = EnergyGrid { shells: 100, angular_order: 4, kirchhoff_order: 8, ..EnergyGrid::default() };
    let e0 = energy(&traj, &data, &set, &field, 0.0, 6.0, &grid)?;
    let e1 = energy(&traj, &data, &set, &field, 1.0, 6.0, &grid)?;
    Ok((e0, e1))
}

fn main() -> Result<()> {
    let (e0, e1) = run_example()?;
    println!("E(0) = {:.6}  {e0:?}", e0.total);
    println!("E(1) = {:.6}  {e1:?}", e1.total);
    println!("relative drift {:.2e}", (e1.total - e0.total).abs() / e0.total.abs());
    Ok(())
}
