// Two charges one unit apart: the second one only learns about the first
// after the delay `d = 1`.

use pointwave::delayode::{integrate, IntegratorConfig};
use pointwave::model::{InitialData, InteractionSet, Point3, Scenario, SingularProfile, VectorField};
use pointwave::{Complex64, Result};

/// Returns `(t, ζ_1(t), ζ_2(t))` on `[0, 3]`.
pub fn run_example() -> Result<Vec<(f64, f64, f64)>> {
    let set = InteractionSet::new(vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)])?;
    let mut data = InitialData::zero(2);
    data.profile = SingularProfile::Coulomb;
    data.zeta0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let scenario = Scenario::new(set, VectorField::zero(2), data)?;
    let traj = integrate(&scenario, &IntegratorConfig::new(1e-2, 3.0))?;
    (0..=30)
        .map(|i| {
            let t = 0.1 * i as f64;
            Ok((t, traj.value(0, t)?.re, traj.value(1, t)?.re))
        })
        .collect()
}

fn main() -> Result<()> {
    println!("{:>5} {:>12} {:>12}", "t", "zeta_1", "zeta_2");
    for (t, a, b) in run_example()? {
        println!("{t:5.1} {a:12.6} {b:12.6}");
    }
    Ok(())
}
