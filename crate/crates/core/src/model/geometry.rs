use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or displacement) in ℝ³, natural units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3(pub [f64; 3]);

impl Point3 {
    pub const ORIGIN: Point3 = Point3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Self(a)
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        p.0
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// The interaction points `y_1 … y_n` together with their pairwise distances,
/// which are the delays of the charge equation.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSet {
    points: Vec<Point3>,
    dist: Vec<Vec<f64>>,
    d_min: Option<f64>,
}

impl InteractionSet {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("interaction set must contain at least one point".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("coordinates of point {i}")));
        }
        let n = points.len();
        let mut dist = vec![vec![0.0; n]; n];
        let mut d_min: Option<f64> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points[i].distance(points[j]);
                if d == 0.0 {
                    return Err(Error::CoincidentPoints(i, j));
                }
                dist[i][j] = d;
                dist[j][i] = d;
                d_min = Some(d_min.map_or(d, |m: f64| m.min(d)));
            }
        }
        Ok(Self { points, dist, d_min })
    }

    pub fn single(point: Point3) -> Self {
        Self::new(vec![point]).expect("a single finite point is always valid")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn point(&self, j: usize) -> Point3 {
        self.points[j]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn distances(&self) -> &[Vec<f64>] {
        &self.dist
    }

    /// Smallest off-diagonal distance; `None` for a single point.
    pub fn d_min(&self) -> Option<f64> {
        self.d_min
    }

    pub fn centroid(&self) -> Point3 {
        let s = self.points.iter().fold(Point3::ORIGIN, |acc, &p| acc + p);
        s * (1.0 / self.points.len() as f64)
    }

    /// Distinct delays `d_ij`, `i < j`, sorted ascending.
    pub fn delays(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                out.push(self.dist[i][j]);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Index of the interaction point closest to `x` and its distance.
    pub fn nearest(&self, x: Point3) -> (usize, f64) {
        self.points
            .iter()
            .enumerate()
            .map(|(j, p)| (j, p.distance(x)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
    }

    /// The same geometry with points relabelled by `perm` (new index `k` holds old point `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(perm.iter().map(|&k| self.points[k]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances_symmetric_with_zero_diagonal() {
        let set = InteractionSet::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 2.0, 0.0),
        ])
        .unwrap();
        for i in 0..3 {
            assert_eq!(set.dist(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(set.dist(i, j), set.dist(j, i));
            }
        }
        assert_eq!(set.d_min(), Some(1.0));
        assert!((set.dist(1, 2) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_rejected() {
        let err = InteractionSet::new(vec![Point3::new(1.0, 1.0, 1.0), Point3::new(1.0, 1.0, 1.0)]).unwrap_err();
        assert_eq!(err, Error::CoincidentPoints(0, 1));
    }

    #[test]
    fn non_finite_and_empty_rejected() {
        assert!(InteractionSet::new(vec![]).is_err());
        assert!(matches!(
            InteractionSet::new(vec![Point3::new(f64::NAN, 0.0, 0.0)]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn single_point_has_no_d_min() {
        let set = InteractionSet::single(Point3::ORIGIN);
        assert_eq!(set.d_min(), None);
        assert!(set.delays().is_empty());
    }
}
