// Free trace at an interaction point for a Gaussian bump plus a charge on
// the Yukawa carrier.

use pointwave::freewave::free_trace;
use pointwave::model::{Gaussian, GaussianMixture, InitialData, InteractionSet, Point3, RegularPart, SingularProfile};
use pointwave::quadrature::SphereQuadrature;
use pointwave::{Complex64, Result};

/// Returns `(t, φ_f(t, y))` samples.
pub fn run_example() -> Result<Vec<(f64, Complex64)>> {
    let set = InteractionSet::single(Point3::ORIGIN);
    let bump: RegularPart = GaussianMixture::single(Gaussian::new(1.0, Point3::new(1.0, 0.0, 0.0), 0.4)).into();
    let data = InitialData::new(
        bump,
        RegularPart::default(),
        vec![Complex64::new(0.2, 0.0)],
        vec![Complex64::new(0.0, 0.0)],
        SingularProfile::Yukawa { mass: 1.0 },
    )?;
    let quad = SphereQuadrature::new(16)?;
    (1..=20)
        .map(|i| {
            let t = 0.1 * i as f64;
            Ok((t, free_trace(&data, &set, t, 0, &quad)?))
        })
        .collect()
}

fn main() -> Result<()> {
    for (t, v) in run_example()? {
        println!("t = {t:.1}  trace = {:+.6}", v.re);
    }
    Ok(())
}
