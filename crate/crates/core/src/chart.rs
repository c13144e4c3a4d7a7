//! Charts, charted manifolds and deterministic interior sampling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::jet::{Jet2, MAX_DIM};
use crate::linalg;

type MetricFn = dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync;
type ConstraintFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A single coordinate chart: an axis-aligned parameter box, a metric
/// evaluator producing the components `g_ij` as jets, and an optional
/// admissibility constraint carving out the valid part of the box.
#[derive(Clone)]
pub struct Chart {
    dim: usize,
    domain: Vec<(f64, f64)>,
    metric: Arc<MetricFn>,
    constraint: Option<Arc<ConstraintFn>>,
    label: String,
    /// Position within the owning manifold; fields dispatch on it.
    index: usize,
}

impl Chart {
    pub fn new<F>(label: impl Into<String>, domain: Vec<(f64, f64)>, metric: F) -> Self
    where
        F: Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
    {
        let dim = domain.len();
        assert!((1..=MAX_DIM).contains(&dim), "chart dimension {dim} unsupported");
        assert!(domain.iter().all(|&(lo, hi)| hi > lo), "empty domain axis");
        Chart {
            dim,
            domain,
            metric: Arc::new(metric),
            constraint: None,
            label: label.into(),
            index: 0,
        }
    }

    /// Chart with the identity metric.
    pub fn euclidean(label: impl Into<String>, domain: Vec<(f64, f64)>) -> Self {
        let dim = domain.len();
        Chart::constant_metric(label, domain, linalg::identity(dim))
    }

    /// Chart with a constant metric matrix (row-major, must be symmetric).
    pub fn constant_metric(
        label: impl Into<String>,
        domain: Vec<(f64, f64)>,
        g: Vec<f64>,
    ) -> Self {
        let dim = domain.len();
        assert_eq!(g.len(), dim * dim);
        Chart::new(label, domain, move |xs: &[Jet2]| {
            let n = xs[0].dim();
            g.iter().map(|&v| Jet2::constant(v, n)).collect()
        })
    }

    pub fn with_constraint<F>(mut self, constraint: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.constraint = Some(Arc::new(constraint));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Index of this chart within its manifold (0 for standalone charts).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Evaluate the metric components at jet-valued coordinates.
    pub fn metric(&self, xs: &[Jet2]) -> Vec<Jet2> {
        debug_assert_eq!(xs.len(), self.dim);
        (self.metric)(xs)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim
            && p.iter()
                .zip(&self.domain)
                .all(|(&x, &(lo, hi))| (lo..=hi).contains(&x))
            && self.constraint.as_ref().is_none_or(|c| c(p))
    }

    /// Coordinate jets seeded at `p`.
    pub fn coordinate_jets(&self, p: &[f64]) -> Vec<Jet2> {
        p.iter()
            .enumerate()
            .map(|(i, &v)| Jet2::coordinate(v, i, self.dim))
            .collect()
    }

    /// Deterministic interior samples: a seeded Halton sequence rescaled
    /// into the box shrunk by the boundary margin, rejecting points the
    /// constraint refuses.
    pub fn sample(&self, plan: &SamplingPlan) -> Result<Vec<Vec<f64>>> {
        let mut rot = Vec::with_capacity(self.dim);
        let mut state = plan.seed ^ 0x9E37_79B9_7F4A_7C15;
        for _ in 0..self.dim {
            rot.push(splitmix64(&mut state) as f64 / 2f64.powi(64));
        }
        let margins: Vec<f64> = self
            .domain
            .iter()
            .map(|&(lo, hi)| plan.boundary_margin * (hi - lo))
            .collect();
        let mut out = Vec::with_capacity(plan.count);
        let budget = plan.count.saturating_mul(1000).max(10_000);
        for idx in 1..=budget {
            let mut p = Vec::with_capacity(self.dim);
            for axis in 0..self.dim {
                let u = (radical_inverse(PRIMES[axis], idx as u64) + rot[axis]).fract();
                let (lo, hi) = self.domain[axis];
                p.push(lo + margins[axis] + u * (hi - lo - 2.0 * margins[axis]));
            }
            if self.constraint.as_ref().is_none_or(|c| c(&p)) {
                out.push(p);
                if out.len() == plan.count {
                    return Ok(out);
                }
            }
        }
        Err(GeometryError::SamplerExhausted {
            requested: plan.count,
            found: out.len(),
        })
    }
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

/// A manifold presented as a list of charts.
#[derive(Clone, Debug)]
pub struct ChartedManifold {
    pub name: String,
    pub charts: Vec<Chart>,
}

impl ChartedManifold {
    pub fn new(name: impl Into<String>, mut charts: Vec<Chart>) -> Self {
        assert!(!charts.is_empty());
        for (i, chart) in charts.iter_mut().enumerate() {
            chart.index = i;
        }
        ChartedManifold {
            name: name.into(),
            charts,
        }
    }

    pub fn single(name: impl Into<String>, chart: Chart) -> Self {
        ChartedManifold::new(name, vec![chart])
    }
}

/// How to sweep sample points: per-chart count, seed and the fraction of
/// each axis kept away from the boundary.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct SamplingPlan {
    pub count: usize,
    pub seed: u64,
    pub boundary_margin: f64,
}

impl SamplingPlan {
    pub fn new(count: usize, seed: u64) -> Self {
        SamplingPlan {
            count,
            seed,
            boundary_margin: 0.05,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.boundary_margin = margin;
        self
    }
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan::new(200, 0)
    }
}

const PRIMES: [u64; MAX_DIM] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let mut f = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    r
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
