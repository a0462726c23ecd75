//! JSON scenario configuration. Unknown keys are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::delayode::IntegratorConfig;
use crate::error::{Error, Result};
use crate::model::{
    validate_initial, FreeWave, Gaussian, GaussianMixture, InitialData, InteractionSet, Point3, RegularPart, Scenario,
    SingularProfile, VectorField, ADMISSIBILITY_TOL,
};

/// A real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl Num {
    pub fn value(self) -> Complex64 {
        match self {
            Num::Real(x) => Complex64::new(x, 0.0),
            Num::Complex([a, b]) => Complex64::new(a, b),
        }
    }
}

fn nums(v: &[Num]) -> Vec<Complex64> {
    v.iter().map(|x| x.value()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub amplitude: Num,
    pub center: [f64; 3],
    pub width: f64,
}

fn mixture(specs: &[GaussianSpec]) -> Result<GaussianMixture> {
    specs
        .iter()
        .map(|g| {
            if !(g.width > 0.0 && g.width.is_finite()) {
                return Err(Error::InvalidInput(format!("gaussian width must be positive, got {}", g.width)));
            }
            Ok(Gaussian { amplitude: g.amplitude.value(), center: Point3(g.center), width: g.width })
        })
        .collect::<Result<Vec<_>>>()
        .map(GaussianMixture)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    /// `V_j = α_j ζ_j`.
    Diagonal { alpha: Vec<f64> },
    Linear { theta: Vec<Vec<Num>>, #[serde(default)] hermitian: bool },
    PowerLaw { gamma: Vec<f64>, sigma: Vec<f64> },
    /// Per component, ascending powers.
    Polynomial { coefficients: Vec<Vec<Num>> },
}

impl FieldSpec {
    pub fn build(&self, n: usize) -> Result<VectorField> {
        let f = match self {
            FieldSpec::Zero => VectorField::zero(n),
            FieldSpec::Diagonal { alpha } => VectorField::diagonal(alpha),
            FieldSpec::Linear { theta, hermitian } => {
                VectorField::linear(theta.iter().map(|r| nums(r)).collect(), *hermitian)?
            }
            FieldSpec::PowerLaw { gamma, sigma } => VectorField::power_law(gamma.clone(), sigma.clone())?,
            FieldSpec::Polynomial { coefficients } => VectorField::polynomial(coefficients.iter().map(|r| nums(r)).collect())?,
        };
        if f.dim() != n {
            return Err(Error::Dimension { expected: n, got: f.dim() });
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeWaveSpec {
    #[default]
    Kirchhoff,
    /// Zero forcing; the charges are then not checked against the data.
    Zero,
    /// Kirchhoff forcing without the boundary-condition check (test mode,
    /// e.g. bare Coulomb data).
    KirchhoffUnchecked,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub gaussians_value: Vec<GaussianSpec>,
    #[serde(default)]
    pub gaussians_velocity: Vec<GaussianSpec>,
    /// Solved from the boundary conditions when absent.
    #[serde(default)]
    pub zeta0: Option<Vec<Num>>,
    #[serde(default)]
    pub zetadot0: Option<Vec<Num>>,
    /// Yukawa mass; ignored when `profile` is given.
    #[serde(default)]
    pub profile_mass: Option<f64>,
    #[serde(default)]
    pub profile: Option<SingularProfile>,
    #[serde(default)]
    pub free_wave: FreeWaveSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateSpec {
    pub step: f64,
    pub t_max: f64,
    #[serde(default)]
    pub escape_threshold: Option<f64>,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default)]
    pub local_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySpec {
    pub radius: f64,
    #[serde(default)]
    pub shells: Option<usize>,
    #[serde(default)]
    pub angular_order: Option<usize>,
    #[serde(default)]
    pub kirchhoff_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventSpec {
    /// Defaults to `initial.gaussians_value`.
    #[serde(default)]
    pub probe: Option<Vec<GaussianSpec>>,
    #[serde(default)]
    pub points: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default)]
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default)]
    pub energy: Option<EnergySpec>,
    #[serde(default)]
    pub resolvent: Option<ResolventSpec>,
    #[serde(default)]
    pub blowup: Option<BlowupSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub points: Vec<[f64; 3]>,
    pub field: FieldSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    pub integrate: IntegrateSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

/// A parsed configuration together with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Config,
    pub raw: serde_json::Value,
    pub sha256: String,
}

pub fn parse(bytes: &[u8]) -> Result<Loaded> {
    let config: Config = serde_json::from_slice(bytes).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
    let raw: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
    Ok(Loaded { config, raw, sha256: hex::encode(Sha256::digest(bytes)) })
}

impl Config {
    pub fn set(&self) -> Result<InteractionSet> {
        InteractionSet::new(self.points.iter().map(|p| Point3(*p)).collect())
    }

    pub fn profile(&self) -> SingularProfile {
        match (&self.initial.profile, self.initial.profile_mass) {
            (Some(p), _) => p.clone(),
            (None, Some(mass)) => SingularProfile::Yukawa { mass },
            (None, None) => SingularProfile::default(),
        }
    }

    /// Scenario with validated (or solved) initial charges.
    pub fn scenario(&self) -> Result<Scenario> {
        let set = self.set()?;
        let n = set.len();
        let field = self.field.build(n)?;
        let value: RegularPart = mixture(&self.initial.gaussians_value)?.into();
        let velocity: RegularPart = mixture(&self.initial.gaussians_velocity)?.into();
        let zetadot0 = self.initial.zetadot0.as_deref().map(nums).unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); n]);
        if zetadot0.len() != n {
            return Err(Error::Dimension { expected: n, got: zetadot0.len() });
        }
        let profile = self.profile();
        let data = match &self.initial.zeta0 {
            Some(z) => InitialData::new(value, velocity, nums(z), zetadot0, profile)?,
            None => InitialData::admissible(&set, &field, value, velocity, zetadot0, profile)?,
        };
        let mut scenario = Scenario::new(set, field, data)?;
        match self.initial.free_wave {
            FreeWaveSpec::Kirchhoff => {
                let res = validate_initial(&scenario.data, &scenario.set, &scenario.field)?;
                if let Some((j, r)) = res.iter().enumerate().find(|(_, r)| **r > ADMISSIBILITY_TOL) {
                    return Err(Error::InvalidInput(format!(
                        "initial data violate the boundary condition at point {j} (residual {r:e})"
                    )));
                }
            }
            FreeWaveSpec::Zero => scenario = scenario.with_free(FreeWave::Zero),
            FreeWaveSpec::KirchhoffUnchecked => {}
        }
        Ok(scenario)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        let i = &self.integrate;
        IntegratorConfig {
            step: i.step,
            t_max: i.t_max,
            escape_threshold: i.escape_threshold.unwrap_or(d.escape_threshold),
            quad_order: i.quad_order.unwrap_or(d.quad_order),
            local_tol: i.local_tol.unwrap_or(d.local_tol),
            ..d
        }
    }

    pub fn resolvent_probe(&self) -> Result<GaussianMixture> {
        let specs = self
            .analysis
            .resolvent
            .as_ref()
            .and_then(|r| r.probe.as_ref())
            .unwrap_or(&self.initial.gaussians_value);
        if specs.is_empty() {
            return Err(Error::InvalidInput("resolvent check needs a Gaussian probe".into()));
        }
        mixture(specs)
    }
}
