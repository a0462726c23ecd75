use num_complex::Complex64;

use crate::error::{Error, Result};

/// How an integration run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Completed(f64),
    /// `|ζ|` crossed the escape threshold; the value is the bisection estimate
    /// of the crossing time.
    Escaped(f64),
    Failed(Error),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Completed(_) => "completed",
            Status::Escaped(_) => "escaped",
            Status::Failed(_) => "failed",
        }
    }
}

/// One cubic Hermite piece of the dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub y0: Vec<Complex64>,
    pub y1: Vec<Complex64>,
    /// Right-limit derivative at `t0`.
    pub d0: Vec<Complex64>,
    /// Left-limit derivative at `t1`.
    pub d1: Vec<Complex64>,
}

impl Segment {
    fn basis(&self, t: f64) -> (f64, f64, f64, f64, f64) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (h, 2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2)
    }

    pub fn value(&self, t: f64, j: usize) -> Complex64 {
        let (h, h00, h10, h01, h11) = self.basis(t);
        self.y0[j] * h00 + self.d0[j] * (h * h10) + self.y1[j] * h01 + self.d1[j] * (h * h11)
    }

    pub fn derivative(&self, t: f64, j: usize) -> Complex64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        self.y0[j] * dh00 + self.d0[j] * dh10 + self.y1[j] * dh01 + self.d1[j] * dh11
    }
}

/// Solved charge history `ζ(t)` on `[0, T]` with cubic Hermite dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeTrajectory {
    pub times: Vec<f64>,
    pub zeta: Vec<Vec<Complex64>>,
    /// Right-limit `ζ̇` at each node (the right-hand side evaluated there).
    pub zetadot: Vec<Vec<Complex64>>,
    /// Free trace `φ_f(t, y_j)` used as forcing at each node (right limit).
    pub forcing: Vec<Vec<Complex64>>,
    pub segments: Vec<Segment>,
    pub status: Status,
}

impl ChargeTrajectory {
    pub(crate) fn start(zeta0: Vec<Complex64>, zetadot0: Vec<Complex64>, forcing0: Vec<Complex64>) -> Self {
        Self {
            times: vec![0.0],
            zeta: vec![zeta0],
            zetadot: vec![zetadot0],
            forcing: vec![forcing0],
            segments: Vec::new(),
            status: Status::Completed(0.0),
        }
    }

    /// Build a trajectory from node samples and node derivatives; each
    /// derivative is used for both one-sided limits.
    pub fn from_samples(times: Vec<f64>, zeta: Vec<Vec<Complex64>>, zetadot: Vec<Vec<Complex64>>, status: Status) -> Result<Self> {
        if times.is_empty() || times.len() != zeta.len() || times.len() != zetadot.len() {
            return Err(Error::InvalidInput("times, zeta and zetadot must be non-empty and of equal length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("times must be strictly increasing".into()));
        }
        let n = zeta[0].len();
        let segments = (1..times.len())
            .map(|k| Segment {
                t0: times[k - 1],
                t1: times[k],
                y0: zeta[k - 1].clone(),
                y1: zeta[k].clone(),
                d0: zetadot[k - 1].clone(),
                d1: zetadot[k].clone(),
            })
            .collect();
        let forcing = vec![vec![Complex64::new(0.0, 0.0); n]; times.len()];
        Ok(Self { times, zeta, zetadot, forcing, segments, status })
    }

    pub(crate) fn push(&mut self, seg: Segment, zetadot_right: Vec<Complex64>, forcing: Vec<Complex64>) {
        self.times.push(seg.t1);
        self.zeta.push(seg.y1.clone());
        self.zetadot.push(zetadot_right);
        self.forcing.push(forcing);
        self.segments.push(seg);
    }

    pub fn dim(&self) -> usize {
        self.zeta[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Lifespan if the run escaped, otherwise the end of the stored range.
    pub fn lifespan(&self) -> f64 {
        match self.status {
            Status::Escaped(t) => t,
            _ => self.t_end(),
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        let (a, b) = (self.t_start(), self.t_end());
        if !(t >= a && t <= b) {
            return Err(Error::HistoryRange { t, start: a, end: b });
        }
        Ok(())
    }

    fn segment(&self, t: f64) -> Option<&Segment> {
        if self.segments.is_empty() {
            return None;
        }
        let k = self.segments.partition_point(|s| s.t1 < t);
        Some(&self.segments[k.min(self.segments.len() - 1)])
    }

    /// `ζ_j(t)` from the dense output.
    pub fn value(&self, j: usize, t: f64) -> Result<Complex64> {
        self.check(t)?;
        Ok(match self.segment(t) {
            Some(s) => s.value(t, j),
            None => self.zeta[0][j],
        })
    }

    pub fn values(&self, t: f64) -> Result<Vec<Complex64>> {
        (0..self.dim()).map(|j| self.value(j, t)).collect()
    }

    /// `ζ̇_j(t)` from the dense output; at nodes this is the left limit
    /// except at the first node.
    pub fn derivative(&self, j: usize, t: f64) -> Result<Complex64> {
        self.check(t)?;
        Ok(match self.segment(t) {
            Some(s) => s.derivative(t, j),
            None => self.zetadot[0][j],
        })
    }

    /// Largest `|ζ_j|` over the nodes.
    pub fn max_abs(&self) -> f64 {
        self.zeta.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Copy with every charge multiplied by `s` (used as a negative control).
    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &Vec<Vec<Complex64>>| v.iter().map(|r| r.iter().map(|z| z * s).collect()).collect();
        let segments = self
            .segments
            .iter()
            .map(|g| Segment {
                t0: g.t0,
                t1: g.t1,
                y0: g.y0.iter().map(|z| z * s).collect(),
                y1: g.y1.iter().map(|z| z * s).collect(),
                d0: g.d0.iter().map(|z| z * s).collect(),
                d1: g.d1.iter().map(|z| z * s).collect(),
            })
            .collect();
        Self {
            times: self.times.clone(),
            zeta: sc(&self.zeta),
            zetadot: sc(&self.zetadot),
            forcing: self.forcing.clone(),
            segments,
            status: self.status.clone(),
        }
    }
}
