//! Bounded convex open domains of diameter at most one, and deterministic
//! point / point-pair samples over them.
//!
//! Only Euclidean balls and axis-aligned boxes are supported. Every sample
//! is strictly interior.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DIAMETER_SLACK: f64 = 1e-12;

/// Shape descriptor accepted by [`Domain::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    shape: Shape,
    dim: usize,
    diameter: f64,
}

impl Domain {
    pub fn new(shape: Shape) -> Result<Self> {
        let (dim, diameter) = match &shape {
            Shape::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::EmptyDomain("zero-dimensional ball".into()));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::EmptyDomain(format!("radius {radius} is not positive")));
                }
                (center.len(), 2.0 * radius)
            }
            Shape::Box { lower, upper } => {
                if lower.is_empty() {
                    return Err(Error::EmptyDomain("zero-dimensional box".into()));
                }
                if lower.len() != upper.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "box lower has {} coordinates, upper has {}",
                        lower.len(),
                        upper.len()
                    )));
                }
                if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
                    return Err(Error::EmptyDomain(format!("axis {i} has lower >= upper")));
                }
                let d2: f64 = lower.iter().zip(upper).map(|(l, u)| (u - l) * (u - l)).sum();
                (lower.len(), d2.sqrt())
            }
        };
        if diameter > 1.0 + DIAMETER_SLACK {
            return Err(Error::DiameterExceeded(diameter));
        }
        Ok(Self { shape, dim, diameter })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(Shape::Ball { center, radius })
    }

    pub fn cube(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(Shape::Box { lower, upper })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Euclidean distance from `x` to the complement of the domain; non-positive
    /// when `x` is not interior.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => radius - dist(x, center),
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (l, u))| (xi - l).min(u - xi))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && self.boundary_distance(x) > 0.0
    }

    /// The deepest interior point (center of the ball or of the box).
    pub fn incenter(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { center, .. } => center.clone(),
            Shape::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
        }
    }

    pub fn inradius(&self) -> f64 {
        self.boundary_distance(&self.incenter())
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Box { lower, upper } => (lower.clone(), upper.clone()),
        }
    }

    pub fn sample_points(&self, plan: &SamplePlan) -> Vec<Vec<f64>> {
        let (lo, hi) = self.bounding_box();
        match plan.kind {
            PlanKind::Grid { points_per_axis } => {
                let n = points_per_axis.max(1);
                let axes: Vec<Vec<f64>> = (0..self.dim)
                    .map(|a| {
                        let h = (hi[a] - lo[a]) / (n as f64 + 1.0);
                        (1..=n).map(|i| lo[a] + i as f64 * h).collect()
                    })
                    .collect();
                let mut out = Vec::new();
                let mut idx = vec![0usize; self.dim];
                loop {
                    let p: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
                    if self.contains(&p) {
                        out.push(p);
                    }
                    // odometer, last axis fastest
                    let mut a = self.dim;
                    loop {
                        if a == 0 {
                            return out;
                        }
                        a -= 1;
                        idx[a] += 1;
                        if idx[a] < n {
                            break;
                        }
                        idx[a] = 0;
                    }
                }
            }
            PlanKind::Quasirandom { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let shift: Vec<f64> = (0..self.dim).map(|_| rng.gen::<f64>()).collect();
                let mut out = Vec::with_capacity(count);
                let mut i: u64 = 1;
                while out.len() < count {
                    let p: Vec<f64> = (0..self.dim)
                        .map(|a| {
                            let u = (radical_inverse(i, PRIMES[a % PRIMES.len()]) + shift[a]).fract();
                            lo[a] + u * (hi[a] - lo[a])
                        })
                        .collect();
                    i += 1;
                    if self.contains(&p) {
                        out.push(p);
                    }
                }
                out
            }
        }
    }

    /// Points plus the unordered index pairs `(i, j)`, `i < j`, whose distance is
    /// at least the plan's separation.
    pub fn sample_set(&self, plan: &SamplePlan) -> Result<SampleSet> {
        let points = self.sample_points(plan);
        let sep = plan.separation(self.diameter)?;
        let mut pairs = Vec::new();
        let mut dists = Vec::new();
        for i in 0..points.len() {
            let upper = match plan.pairs {
                PairStrategy::All => points.len(),
                PairStrategy::Banded { width } => (i + 1 + width).min(points.len()),
            };
            for j in i + 1..upper {
                let r = dist(&points[i], &points[j]);
                if r >= sep && r > 0.0 {
                    pairs.push((i, j));
                    dists.push(r);
                }
            }
        }
        if pairs.is_empty() {
            return Err(Error::DegeneratePlan);
        }
        Ok(SampleSet { points, pairs, dists, plan: plan.clone() })
    }

    /// Ordered pairs `(x, y)` with `x != y`, both orientations included.
    pub fn sample_pairs(&self, plan: &SamplePlan) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let set = self.sample_set(plan)?;
        let mut out = Vec::with_capacity(2 * set.pairs.len());
        for &(i, j) in &set.pairs {
            out.push((set.points[i].clone(), set.points[j].clone()));
            out.push((set.points[j].clone(), set.points[i].clone()));
        }
        Ok(out)
    }
}

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    Grid { points_per_axis: usize },
    Quasirandom { count: usize, seed: u64 },
}

/// Which index pairs of the point list enter supremum estimates over `x != y`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStrategy {
    #[default]
    All,
    /// Pairs `(i, j)` with `0 < j - i <= width` in sample order. On dense 1-D
    /// grids this keeps the close pairs that realize Lipschitz quotients.
    Banded { width: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub kind: PlanKind,
    /// Defaults to `1e-6 * diameter` when absent.
    #[serde(default)]
    pub min_pair_separation: Option<f64>,
    #[serde(default)]
    pub pairs: PairStrategy,
}

impl SamplePlan {
    pub fn grid(points_per_axis: usize) -> Self {
        Self {
            kind: PlanKind::Grid { points_per_axis },
            min_pair_separation: None,
            pairs: PairStrategy::All,
        }
    }

    pub fn quasirandom(count: usize, seed: u64) -> Self {
        Self {
            kind: PlanKind::Quasirandom { count, seed },
            min_pair_separation: None,
            pairs: PairStrategy::All,
        }
    }

    pub fn with_separation(mut self, sep: f64) -> Self {
        self.min_pair_separation = Some(sep);
        self
    }

    pub fn banded(mut self, width: usize) -> Self {
        self.pairs = PairStrategy::Banded { width };
        self
    }

    fn separation(&self, diameter: f64) -> Result<f64> {
        match self.min_pair_separation {
            None => Ok(1e-6 * diameter),
            Some(s) if s > 0.0 && s.is_finite() => Ok(s),
            Some(s) => Err(Error::ConfigInvalid(format!(
                "min_pair_separation must be positive, got {s}"
            ))),
        }
    }
}

/// A frozen sample: points and the admissible unordered pairs between them.
/// All estimators evaluated on one `SampleSet` see identical pairs, which makes
/// per-pair algebraic identities carry over to the sampled suprema.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub points: Vec<Vec<f64>>,
    pub pairs: Vec<(usize, usize)>,
    pub dists: Vec<f64>,
    pub plan: SamplePlan,
}

impl SampleSet {
    pub fn max_pair_distance(&self) -> f64 {
        self.dists.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameters() {
        assert_eq!(Domain::ball(vec![0.0], 0.5).unwrap().diameter(), 1.0);
        let b = Domain::cube(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert!((b.diameter() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            Domain::ball(vec![0.0], 0.6),
            Err(Error::DiameterExceeded(_))
        ));
    }

    #[test]
    fn empty_domains_rejected() {
        assert!(matches!(Domain::ball(vec![0.0], 0.0), Err(Error::EmptyDomain(_))));
        assert!(matches!(Domain::ball(vec![0.0], -1.0), Err(Error::EmptyDomain(_))));
        assert!(matches!(
            Domain::cube(vec![0.0, 0.2], vec![0.5, 0.2]),
            Err(Error::EmptyDomain(_))
        ));
    }

    #[test]
    fn grid_in_interval() {
        let d = Domain::ball(vec![0.0], 0.5).unwrap();
        let pts = d.sample_points(&SamplePlan::grid(3));
        let flat: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        assert_eq!(flat.len(), 3);
        for (a, b) in flat.iter().zip([-0.25, 0.0, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(pts, d.sample_points(&SamplePlan::grid(3)));
    }

    #[test]
    fn quasirandom_is_reproducible_and_interior() {
        let d = Domain::ball(vec![0.1, -0.1], 0.4).unwrap();
        let plan = SamplePlan::quasirandom(100, 7);
        let a = d.sample_points(&plan);
        assert_eq!(a.len(), 100);
        assert!(a.iter().all(|p| d.contains(p)));
        assert_eq!(a, d.sample_points(&plan));
        assert_ne!(a, d.sample_points(&SamplePlan::quasirandom(100, 8)));
    }

    #[test]
    fn pairs_and_separation() {
        let d = Domain::ball(vec![0.0], 0.5).unwrap();
        assert_eq!(d.sample_pairs(&SamplePlan::grid(3)).unwrap().len(), 6);
        let plan = SamplePlan::grid(20).with_separation(0.1);
        for (x, y) in d.sample_pairs(&plan).unwrap() {
            assert!(dist(&x, &y) >= 0.1);
        }
        assert_eq!(d.sample_set(&SamplePlan::grid(1)).unwrap_err(), Error::DegeneratePlan);
        assert!(d.sample_set(&SamplePlan::grid(3).with_separation(0.0)).is_err());
    }

    #[test]
    fn banded_pairs() {
        let d = Domain::cube(vec![0.0], vec![1.0]).unwrap();
        let set = d.sample_set(&SamplePlan::grid(10).banded(2)).unwrap();
        assert_eq!(set.pairs.len(), 9 + 8);
    }

    #[test]
    fn pair_distances_bounded_by_diameter() {
        for d in [
            Domain::ball(vec![0.0, 0.0, 0.0], 0.5).unwrap(),
            Domain::cube(vec![0.0, 0.0], vec![0.6, 0.8]).unwrap(),
        ] {
            let set = d.sample_set(&SamplePlan::grid(6)).unwrap();
            assert!(set.max_pair_distance() <= d.diameter());
            assert!(set.points.iter().all(|p| d.contains(p)));
        }
    }
}
