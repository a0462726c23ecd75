// Scalar blow-up analysis: a trapped power law and an escaping quadratic.

use pointwave::blowup::{analyze, BlowupReport};
use pointwave::model::{FreeWave, InitialData, InteractionSet, Point3, Scenario, SingularProfile, VectorField};
use pointwave::{Complex64, Result};

pub fn run_example() -> Result<(BlowupReport, BlowupReport)> {
    let set = InteractionSet::single(Point3::ORIGIN);

    // Constant unit forcing from a Coulomb velocity datum, V(ζ) = ζ.
    let mut data = InitialData::zero(1);
    data.zeta0 = vec![Complex64::new(0.5, 0.0)];
    data.zetadot0 = vec![Complex64::new(4.0 * std::f64::consts::PI, 0.0)];
    data.profile = SingularProfile::Coulomb;
    let trapped = Scenario::new(set.clone(), VectorField::power_law(vec![1.0], vec![1.0])?, data)?;
    let (a, _) = analyze(&trapped, 8, 4, 100.0)?;

    // V(ζ) = −ζ², no forcing.
    let mut data = InitialData::zero(1);
    data.zeta0 = vec![Complex64::new(1.0, 0.0)];
    let field = VectorField::polynomial(vec![vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]])?;
    let escaping = Scenario::new(set, field, data)?.with_free(FreeWave::Zero);
    let (b, _) = analyze(&escaping, 8, 4, 100.0)?;
    Ok((a, b))
}

fn main() -> Result<()> {
    let (a, b) = run_example()?;
    println!("power law: {:?}, trapping interval {:?}", a.verdict, a.trapping);
    println!("quadratic: {:?}, physical upper bound {:?}", b.verdict, b.t_upper_physical);
    Ok(())
}
