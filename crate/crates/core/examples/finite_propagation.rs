// Perturb the first charge and watch the second: with a diagonal
// nonlinearity nothing arrives before the delay, with a coupled one the
// response is immediate.

use pointwave::delayode::{integrate, IntegratorConfig};
use pointwave::model::{ChargeTrajectory, InitialData, InteractionSet, Point3, Scenario, SingularProfile, VectorField};
use pointwave::{Complex64, Result};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn run(set: &InteractionSet, field: &VectorField, z1: f64) -> Result<ChargeTrajectory> {
    let mut data = InitialData::zero(2);
    data.profile = SingularProfile::Compact { radius: 5e-4 };
    data.zeta0 = vec![c(z1), c(1.0)];
    integrate(&Scenario::new(set.clone(), field.clone(), data)?, &IntegratorConfig::new(1e-3, 1.5))
}

/// Returns `(t, diagonal response, coupled response)` of `ζ_2`.
pub fn run_example() -> Result<Vec<(f64, f64, f64)>> {
    let set = InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)])?;
    let diagonal = VectorField::diagonal(&[0.5, 0.5]);
    let coupled = VectorField::linear(vec![vec![c(0.5), c(0.3)], vec![c(0.3), c(0.5)]], true)?;
    let (d0, d1) = (run(&set, &diagonal, 1.0)?, run(&set, &diagonal, 1.5)?);
    let (c0, c1) = (run(&set, &coupled, 1.0)?, run(&set, &coupled, 1.5)?);
    (0..=15)
        .map(|i| {
            let t = 0.1 * i as f64;
            Ok((t, (d1.value(1, t)? - d0.value(1, t)?).norm(), (c1.value(1, t)? - c0.value(1, t)?).norm()))
        })
        .collect()
}

fn main() -> Result<()> {
    println!("{:>5} {:>12} {:>12}", "t", "diagonal", "coupled");
    for (t, a, b) in run_example()? {
        println!("{t:5.1} {a:12.3e} {b:12.3e}");
    }
    Ok(())
}
