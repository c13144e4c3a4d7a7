//! Mapping tori with torus fibers: `M_0 x [0, 2 pi]` glued by an integer
//! unimodular monodromy, carrying the block metric `G(t) + dt^2 / |lambda|`
//! and the projection `[x, t] -> e^{i t}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{Chart, ChartedManifold};
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::jet::{CJet2, Jet2, MAX_DIM};
use crate::linalg;

type FiberMetricFn = dyn Fn(&Jet2) -> Vec<Jet2> + Send + Sync;

/// A trigonometric polynomial `c0 + sum_n (a_n cos nt + b_n sin nt)`;
/// 2 pi-periodic by construction. `cos[i]` and `sin[i]` hold the
/// coefficients for frequency `i + 1`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub c0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(c0: f64) -> Self {
        TrigPoly {
            c0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn eval(&self, t: &Jet2) -> Jet2 {
        let mut acc = Jet2::constant(self.c0, t.dim());
        for (i, &a) in self.cos.iter().enumerate() {
            if a != 0.0 {
                acc = acc + t.scale((i + 1) as f64).cos().scale(a);
            }
        }
        for (i, &b) in self.sin.iter().enumerate() {
            if b != 0.0 {
                acc = acc + t.scale((i + 1) as f64).sin().scale(b);
            }
        }
        acc
    }
}

/// Spec of a mapping torus: fiber dimension, smooth 2 pi-periodic fiber
/// metric `t -> G(t)`, the negative base scaling `lambda` (the base circle
/// carries `dt^2 / |lambda|`) and an integer unimodular monodromy matrix.
#[derive(Clone)]
pub struct MappingTorusSpec {
    fiber_dim: usize,
    metric: Arc<FiberMetricFn>,
    lambda: f64,
    monodromy: Vec<i64>,
}

impl MappingTorusSpec {
    /// Validates: `lambda < 0`, monodromy unimodular, `G(t)` symmetric
    /// positive definite on a sample grid, and the gluing condition
    /// `G(2 pi) = P^T G(0) P` to 1e-10.
    pub fn new<F>(fiber_dim: usize, metric: F, lambda: f64, monodromy: Option<Vec<i64>>) -> Result<Self>
    where
        F: Fn(&Jet2) -> Vec<Jet2> + Send + Sync + 'static,
    {
        if fiber_dim == 0 || fiber_dim + 1 > MAX_DIM {
            return Err(GeometryError::InvalidArgument(format!(
                "fiber dimension {fiber_dim} unsupported"
            )));
        }
        if lambda >= 0.0 || lambda.is_nan() {
            return Err(GeometryError::InvalidArgument(format!(
                "lambda must be negative, got {lambda}"
            )));
        }
        let m = fiber_dim;
        let monodromy = monodromy.unwrap_or_else(|| {
            let mut p = vec![0i64; m * m];
            for i in 0..m {
                p[i * m + i] = 1;
            }
            p
        });
        if monodromy.len() != m * m {
            return Err(GeometryError::InvalidArgument(
                "monodromy must be a square matrix over the fiber".into(),
            ));
        }
        if int_det(m, &monodromy).abs() != 1 {
            return Err(GeometryError::InvalidArgument(
                "monodromy must be unimodular (determinant +-1)".into(),
            ));
        }
        let spec = MappingTorusSpec {
            fiber_dim,
            metric: Arc::new(metric),
            lambda,
            monodromy,
        };
        spec.validate_fiber_metric()?;
        Ok(spec)
    }

    /// Build the fiber metric from a symmetric matrix of trigonometric
    /// polynomials.
    pub fn from_trig_polys(
        entries: Vec<Vec<TrigPoly>>,
        lambda: f64,
        monodromy: Option<Vec<i64>>,
    ) -> Result<Self> {
        let m = entries.len();
        if entries.iter().any(|row| row.len() != m) {
            return Err(GeometryError::InvalidArgument(
                "fiber metric matrix must be square".into(),
            ));
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..m {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(GeometryError::InvalidArgument(format!(
                        "fiber metric entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        MappingTorusSpec::new(
            m,
            move |t: &Jet2| {
                entries
                    .iter()
                    .flat_map(|row| row.iter().map(|p| p.eval(t)))
                    .collect()
            },
            lambda,
            monodromy,
        )
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn monodromy(&self) -> &[i64] {
        &self.monodromy
    }

    /// Fiber metric values at jet time `t`.
    pub fn fiber_metric(&self, t: &Jet2) -> Vec<Jet2> {
        (self.metric)(t)
    }

    fn validate_fiber_metric(&self) -> Result<()> {
        let m = self.fiber_dim;
        let grid = 64;
        for step in 0..=grid {
            let tv = 2.0 * std::f64::consts::PI * step as f64 / grid as f64;
            let t = Jet2::constant(tv, 1);
            let gm = self.fiber_metric(&t);
            if gm.len() != m * m {
                return Err(GeometryError::InvalidArgument(format!(
                    "fiber metric returned {} entries, expected {}",
                    gm.len(),
                    m * m
                )));
            }
            let vals: Vec<f64> = gm.iter().map(|j| j.value()).collect();
            for i in 0..m {
                for j in 0..i {
                    if (vals[i * m + j] - vals[j * m + i]).abs() > 1e-10 {
                        return Err(GeometryError::InvalidArgument(format!(
                            "fiber metric not symmetric at t = {tv}"
                        )));
                    }
                }
            }
            let min_eig = linalg::min_eigenvalue(m, &vals);
            if min_eig <= 0.0 {
                return Err(GeometryError::MetricNotSpd {
                    point: vec![tv],
                    eigenvalue: min_eig,
                });
            }
        }
        // gluing: G(2 pi) = P^T G(0) P
        let g0: Vec<f64> = self
            .fiber_metric(&Jet2::constant(0.0, 1))
            .iter()
            .map(|j| j.value())
            .collect();
        let g1: Vec<f64> = self
            .fiber_metric(&Jet2::constant(2.0 * std::f64::consts::PI, 1))
            .iter()
            .map(|j| j.value())
            .collect();
        let p = &self.monodromy;
        for i in 0..m {
            for j in 0..m {
                let mut glued = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        glued += p[a * m + i] as f64 * g0[a * m + b] * p[b * m + j] as f64;
                    }
                }
                if (g1[i * m + j] - glued).abs() > 1e-10 {
                    return Err(GeometryError::InvalidArgument(format!(
                        "gluing violated: G(2pi)[{i}][{j}] = {} but (P^T G(0) P)[{i}][{j}] = {glued}",
                        g1[i * m + j]
                    )));
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for MappingTorusSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MappingTorusSpec")
            .field("fiber_dim", &self.fiber_dim)
            .field("lambda", &self.lambda)
            .field("monodromy", &self.monodromy)
            .finish()
    }
}

/// The charted mapping torus with coordinates `(x_1, ..., x_m, t)`, block
/// metric `G(t) + dt^2 / |lambda|`, plus the projection field `e^{i t}`.
pub fn mapping_torus(spec: &MappingTorusSpec) -> Result<(ChartedManifold, ComplexField)> {
    let m = spec.fiber_dim;
    let base_entry = 1.0 / spec.lambda.abs();
    let spec_for_metric = spec.clone();
    let mut domain = vec![(0.0, 1.0); m];
    domain.push((0.0, 2.0 * std::f64::consts::PI));
    let chart = Chart::new("fiber_x_circle", domain, move |xs: &[Jet2]| {
        let dim = xs[0].dim();
        let t = xs[m];
        let fiber = spec_for_metric.fiber_metric(&t);
        let n = m + 1;
        let mut g = vec![Jet2::constant(0.0, dim); n * n];
        for i in 0..m {
            for j in 0..m {
                g[i * n + j] = fiber[i * m + j];
            }
        }
        g[m * n + m] = Jet2::constant(base_entry, dim);
        g
    });
    let projection = ComplexField::global("exp(i*t)", move |xs| CJet2::cis(&xs[m]));
    Ok((
        ChartedManifold::single(format!("mapping_torus_m{m}"), chart),
        projection,
    ))
}

fn int_det(n: usize, a: &[i64]) -> i64 {
    match n {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            let mut acc = 0i64;
            let mut sign = 1i64;
            for col in 0..n {
                let minor: Vec<i64> = (1..n)
                    .flat_map(|r| {
                        (0..n)
                            .filter(move |&c| c != col)
                            .map(move |c| a[r * n + c])
                    })
                    .collect();
                acc += sign * a[col] * int_det(n - 1, &minor);
                sign = -sign;
            }
            acc
        }
    }
}
