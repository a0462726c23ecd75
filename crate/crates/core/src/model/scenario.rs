use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::data::{validate_initial, InitialData};
use super::geometry::InteractionSet;
use super::vector_field::VectorField;
use crate::error::{Error, Result};
use crate::freewave;
use crate::quadrature::SphereQuadrature;

/// Which one-sided limit to take at a jump in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

pub type TraceFn = Arc<dyn Fn(f64, Side) -> Result<Vec<Complex64>> + Send + Sync>;

/// A user-supplied forcing `t ↦ (φ_f(t, y_j))_j` together with the times at
/// which it may jump or kink.
#[derive(Clone)]
pub struct CustomTrace {
    pub f: TraceFn,
    pub breakpoints: Vec<f64>,
}

impl CustomTrace {
    pub fn new<F>(f: F, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64, Side) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), breakpoints }
    }

    /// Forcing that is constant in time.
    pub fn constant(values: Vec<Complex64>) -> Self {
        Self::new(move |_, _| Ok(values.clone()), Vec::new())
    }
}

/// Source of the free trace driving the charge equation.
#[derive(Clone, Default)]
pub enum FreeWave {
    /// Evolve the initial data (Kirchhoff quadrature plus closed forms).
    #[default]
    Kirchhoff,
    /// `φ_f ≡ 0`. Test mode; the data then only supply `ζ⁰`.
    Zero,
    Custom(CustomTrace),
}

impl fmt::Debug for FreeWave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeWave::Kirchhoff => f.write_str("Kirchhoff"),
            FreeWave::Zero => f.write_str("Zero"),
            FreeWave::Custom(c) => f.debug_struct("Custom").field("breakpoints", &c.breakpoints).finish_non_exhaustive(),
        }
    }
}

/// Everything the integrator needs: geometry, nonlinearity, data and the
/// free trace. `reversed` runs the problem whose forcing is `φ_f(−t, ·)`,
/// which yields the backward solution after reflecting time.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub set: InteractionSet,
    pub field: VectorField,
    pub data: InitialData,
    pub free: FreeWave,
    pub reversed: bool,
}

impl Scenario {
    pub fn new(set: InteractionSet, field: VectorField, data: InitialData) -> Result<Self> {
        let n = set.len();
        if field.dim() != n {
            return Err(Error::Dimension { expected: n, got: field.dim() });
        }
        if data.len() != n {
            return Err(Error::Dimension { expected: n, got: data.len() });
        }
        Ok(Self { set, field, data, free: FreeWave::Kirchhoff, reversed: false })
    }

    pub fn with_free(mut self, free: FreeWave) -> Self {
        self.free = free;
        self
    }

    pub fn dim(&self) -> usize {
        self.set.len()
    }

    /// Boundary-condition residuals at `t = 0`.
    pub fn residuals(&self) -> Result<Vec<f64>> {
        validate_initial(&self.data, &self.set, &self.field)
    }

    /// Free trace at every interaction point, one-sided at `t = 0` and at
    /// light-cone crossings.
    pub fn trace(&self, t: f64, side: Side, quad: &SphereQuadrature) -> Result<Vec<Complex64>> {
        let (t, side) = if self.reversed { (-t, side.flip()) } else { (t, side) };
        match &self.free {
            FreeWave::Kirchhoff => freewave::free_trace_all(&self.data, &self.set, t, side, quad),
            FreeWave::Zero => Ok(vec![Complex64::new(0.0, 0.0); self.dim()]),
            FreeWave::Custom(c) => (c.f)(t, side),
        }
    }

    /// Times `t > 0` at which the forcing may be non-smooth.
    pub fn trace_breakpoints(&self) -> Vec<f64> {
        let raw = match &self.free {
            FreeWave::Kirchhoff => freewave::trace_breakpoints(&self.data, &self.set),
            FreeWave::Zero => Vec::new(),
            FreeWave::Custom(c) => c.breakpoints.clone(),
        };
        let mut out: Vec<f64> = raw
            .into_iter()
            .map(|b| if self.reversed { -b } else { b })
            .filter(|&b| b > 0.0)
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }
}
