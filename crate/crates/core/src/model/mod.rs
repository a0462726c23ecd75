//! Shared domain types: geometry, nonlinearity, initial data, solved
//! trajectories and scenarios.

mod data;
mod geometry;
mod scenario;
mod trajectory;
mod vector_field;

pub use data::{
    is_admissible, validate_initial, Gaussian, GaussianMixture, InitialData, RegularPart, SingularProfile,
    ValueGradFn, ADMISSIBILITY_TOL,
};
pub(crate) use data::yukawa_correction;
pub use geometry::{InteractionSet, Point3};
pub use scenario::{CustomTrace, FreeWave, Scenario, Side, TraceFn};
pub use trajectory::{ChargeTrajectory, Segment, Status};
pub use vector_field::{vf_eval, vf_gradient_consistency, Domain, ScalarFn, VectorField, VectorFn};
