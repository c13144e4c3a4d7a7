//! Weighted Sasakian spheres.
//!
//! For a positive weight vector `w = (w_1, ..., w_n)` the unit sphere
//! `S^{2n-1}` in `C^n` carries the deformed metric
//!
//! ```text
//! g_w(v,v) = (1/eta(xi_w)) (|v|^2 - 2 <xi_w, v> eta_w(xi_w) eta_w(v))
//!            + (1 + |xi_w|^2 / eta(xi_w)) eta_w(v)^2
//! ```
//!
//! with `xi_w = sum w_i (x_i d/dy_i - y_i d/dx_i)`,
//! `eta = sum (x_i dy_i - y_i dx_i)` and `eta_w = eta / eta(xi_w)`. The
//! restricted coordinate family `phi_i = x_i + i y_i` then satisfies
//! `tau(phi_i) = (-w_i^2 - w_i (2n-2)) phi_i` and
//! `kappa(phi_i, phi_j) = -w_i w_j phi_i phi_j`.
//!
//! The sphere is covered by `4n` graph charts (choice of dropped ambient
//! coordinate and sign); chart basis vectors are pushed to ambient tangent
//! vectors analytically and the quadratic form above is polarized into the
//! metric components. The term `eta_w(xi_w)` equals 1 identically but is
//! evaluated literally, so a transcription slip in the formula would
//! surface in the round-metric reduction test for `w = (1,...,1)`.

use num_complex::Complex64;

use crate::chart::{Chart, ChartedManifold};
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::jet::{CJet2, Jet2, MAX_DIM};
use crate::verify::EigenFamilySpec;

/// Sampled points keep the solved graph coordinate at least this large in
/// magnitude, bounding chart distortion.
pub const MIN_SOLVED_COORDINATE: f64 = 0.1;

/// The sphere `S^{2n-1}` with weights `w`, presented in `4n` graph charts.
#[derive(Clone, Debug)]
pub struct WeightedSasakianSphere {
    n: usize,
    w: Vec<f64>,
}

impl WeightedSasakianSphere {
    pub fn new(n: usize, w: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(GeometryError::InvalidArgument(
                "ambient complex dimension must be at least 1".into(),
            ));
        }
        if 2 * n - 1 > MAX_DIM {
            return Err(GeometryError::InvalidArgument(format!(
                "sphere dimension {} exceeds the supported maximum {}",
                2 * n - 1,
                MAX_DIM
            )));
        }
        if w.len() != n {
            return Err(GeometryError::InvalidArgument(format!(
                "expected {n} weights, got {}",
                w.len()
            )));
        }
        if w.iter().any(|&x| x <= 0.0) {
            return Err(GeometryError::InvalidArgument(
                "weights must be positive".into(),
            ));
        }
        Ok(WeightedSasakianSphere { n, w })
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Ambient real dimension `2n`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.n
    }

    /// Number of graph charts.
    pub fn chart_count(&self) -> usize {
        4 * self.n
    }

    /// Dropped ambient coordinate and sign of chart `idx`.
    pub fn chart_kind(idx: usize) -> (usize, f64) {
        (idx / 2, if idx.is_multiple_of(2) { 1.0 } else { -1.0 })
    }

    /// Embed chart coordinates into ambient jets: the dropped coordinate is
    /// solved as `sign * sqrt(1 - sum q^2)`.
    pub fn embed(&self, chart_idx: usize, q: &[Jet2]) -> Vec<Jet2> {
        let (dropped, sign) = Self::chart_kind(chart_idx);
        let nn = self.ambient_dim();
        let dim = q[0].dim();
        let mut sum = Jet2::constant(0.0, dim);
        for &qj in q {
            sum = sum + qj * qj;
        }
        let solved = (Jet2::constant(1.0, dim) - sum).sqrt().scale(sign);
        let mut u = Vec::with_capacity(nn);
        for amb in 0..nn {
            if amb == dropped {
                u.push(solved);
            } else {
                let pos = if amb < dropped { amb } else { amb - 1 };
                u.push(q[pos]);
            }
        }
        u
    }

    /// Chart basis vectors pushed to ambient tangent vectors. `E_j` is the
    /// image of `d/dq_j`: a unit in the ambient slot of `q_j` plus the
    /// analytic derivative `-q_j / solved` in the dropped slot.
    fn tangent_basis(&self, chart_idx: usize, q: &[Jet2], u: &[Jet2]) -> Vec<Vec<Jet2>> {
        let (dropped, _) = Self::chart_kind(chart_idx);
        let nn = self.ambient_dim();
        let dim = q[0].dim();
        let solved = u[dropped];
        (0..nn - 1)
            .map(|j| {
                let amb_j = if j < dropped { j } else { j + 1 };
                let mut e = vec![Jet2::constant(0.0, dim); nn];
                e[amb_j] = Jet2::constant(1.0, dim);
                e[dropped] = -(q[j] / solved);
                e
            })
            .collect()
    }

    /// The quadratic form `g_w(v, v)` at ambient point `u`.
    fn quadratic_form(&self, u: &[Jet2], v: &[Jet2]) -> Jet2 {
        let dim = u[0].dim();
        let mut e = Jet2::constant(0.0, dim); // eta(xi_w)
        let mut s = Jet2::constant(0.0, dim); // |xi_w|^2
        let mut nv = Jet2::constant(0.0, dim); // |v|^2
        let mut eta_v = Jet2::constant(0.0, dim);
        let mut xi_v = Jet2::constant(0.0, dim); // <xi_w, v>
        for i in 0..self.n {
            let (x, y) = (u[2 * i], u[2 * i + 1]);
            let r2 = x * x + y * y;
            e = e + r2.scale(self.w[i]);
            s = s + r2.scale(self.w[i] * self.w[i]);
            let swirl = x * v[2 * i + 1] - y * v[2 * i];
            eta_v = eta_v + swirl;
            xi_v = xi_v + swirl.scale(self.w[i]);
        }
        for &vb in v {
            nv = nv + vb * vb;
        }
        // identically 1; evaluated literally so a transcription slip in
        // the formula would surface in the round-metric reduction test
        #[allow(clippy::eq_op)]
        let eta_w_xi = e / e;
        let eta_w_v = eta_v / e;
        (nv - (xi_v * eta_w_xi * eta_w_v).scale(2.0)) / e
            + (Jet2::constant(1.0, dim) + s / e) * eta_w_v * eta_w_v
    }

    /// Metric components on chart `chart_idx` by polarizing the quadratic
    /// form over the pushed basis vectors.
    pub fn metric_components(&self, chart_idx: usize, q: &[Jet2]) -> Vec<Jet2> {
        let m = self.ambient_dim() - 1;
        let u = self.embed(chart_idx, q);
        let basis = self.tangent_basis(chart_idx, q, &u);
        let q_single: Vec<Jet2> = basis.iter().map(|e| self.quadratic_form(&u, e)).collect();
        let mut g = vec![Jet2::constant(0.0, q[0].dim()); m * m];
        for i in 0..m {
            g[i * m + i] = q_single[i];
            for j in i + 1..m {
                let sum: Vec<Jet2> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(&a, &b)| a + b)
                    .collect();
                let gij = (self.quadratic_form(&u, &sum) - q_single[i] - q_single[j]).scale(0.5);
                g[i * m + j] = gij;
                g[j * m + i] = gij;
            }
        }
        g
    }

    /// The coordinate field `phi_i = x_i + i y_i` restricted to the sphere.
    pub fn coordinate_field(&self, i: usize) -> ComplexField {
        let sphere = self.clone();
        ComplexField::per_chart(format!("phi_{}", i + 1), move |chart_idx, q| {
            let u = sphere.embed(chart_idx, q);
            Some(CJet2 {
                re: u[2 * i],
                im: u[2 * i + 1],
            })
        })
    }

    /// All graph charts.
    pub fn charts(&self) -> Vec<Chart> {
        let m = self.ambient_dim() - 1;
        let limit = 1.0 - MIN_SOLVED_COORDINATE * MIN_SOLVED_COORDINATE;
        (0..self.chart_count())
            .map(|idx| {
                let sphere = self.clone();
                let (dropped, sign) = Self::chart_kind(idx);
                let label = format!(
                    "graph_drop{}_{}",
                    dropped,
                    if sign > 0.0 { "pos" } else { "neg" }
                );
                Chart::new(label, vec![(-1.0, 1.0); m], move |q: &[Jet2]| {
                    sphere.metric_components(idx, q)
                })
                .with_constraint(move |p: &[f64]| {
                    p.iter().map(|x| x * x).sum::<f64>() <= limit
                })
            })
            .collect()
    }

    pub fn manifold(&self) -> ChartedManifold {
        ChartedManifold::new(
            format!(
                "sasakian_sphere_n{}_w({})",
                self.n,
                self.w
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            self.charts(),
        )
    }

    /// The claimed eigendata of the coordinate family.
    pub fn eigendata(&self) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let n = self.n as f64;
        let lambda = self
            .w
            .iter()
            .map(|&wi| Complex64::new(-wi * wi - wi * (2.0 * n - 2.0), 0.0))
            .collect();
        let a = self
            .w
            .iter()
            .map(|&wi| {
                self.w
                    .iter()
                    .map(|&wj| Complex64::new(-wi * wj, 0.0))
                    .collect()
            })
            .collect();
        (lambda, a)
    }
}

/// Build the weighted Sasakian sphere together with its coordinate
/// eigenfamily `{phi_1, ..., phi_n}` and claimed eigendata.
pub fn weighted_sasakian(n: usize, w: &[f64]) -> Result<(ChartedManifold, EigenFamilySpec)> {
    let sphere = WeightedSasakianSphere::new(n, w.to_vec())?;
    let fields = (0..n).map(|i| sphere.coordinate_field(i)).collect();
    let (lambda, a) = sphere.eigendata();
    let family = EigenFamilySpec::new(fields, lambda, a)?;
    Ok((sphere.manifold(), family))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(WeightedSasakianSphere::new(2, vec![0.0, 1.0]).is_err());
        assert!(WeightedSasakianSphere::new(2, vec![1.0]).is_err());
        assert!(WeightedSasakianSphere::new(0, vec![]).is_err());
        assert!(WeightedSasakianSphere::new(5, vec![1.0; 5]).is_err()); // S^9 too big
    }

    #[test]
    fn embedding_lands_on_sphere() {
        let s = WeightedSasakianSphere::new(2, vec![1.0, 2.0]).unwrap();
        let q = [0.2, -0.3, 0.4];
        for chart_idx in 0..s.chart_count() {
            let jets: Vec<Jet2> = q
                .iter()
                .enumerate()
                .map(|(i, &v)| Jet2::coordinate(v, i, 3))
                .collect();
            let u = s.embed(chart_idx, &jets);
            let r2: f64 = u.iter().map(|j| j.value() * j.value()).sum();
            assert!((r2 - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn round_weights_give_round_metric() {
        // w = (1,1): g_w must equal the graph-chart round metric
        // delta_ij + q_i q_j / (1 - |q|^2), here derived independently from
        // the Euclidean pullback.
        let s = WeightedSasakianSphere::new(2, vec![1.0, 1.0]).unwrap();
        let q = [0.3, 0.1, -0.4];
        let jets: Vec<Jet2> = q
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet2::coordinate(v, i, 3))
            .collect();
        let norm2: f64 = q.iter().map(|x| x * x).sum();
        for chart_idx in [0, 3, 5] {
            let g = s.metric_components(chart_idx, &jets);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 1.0 } else { 0.0 } + q[i] * q[j] / (1.0 - norm2);
                    assert!(
                        (g[i * 3 + j].value() - expect).abs() < 1e-10,
                        "chart {chart_idx} g[{i}][{j}] = {} vs {}",
                        g[i * 3 + j].value(),
                        expect
                    );
                }
            }
        }
    }

    #[test]
    fn metric_is_spd_on_samples() {
        let s = WeightedSasakianSphere::new(2, vec![1.0, 2.0]).unwrap();
        let m = s.manifold();
        let plan = crate::chart::SamplingPlan::new(50, 5);
        for chart in &m.charts {
            for p in chart.sample(&plan).unwrap() {
                let geo = crate::ops::ChartGeometry::at(chart, &p).unwrap();
                assert!(geo.sqrt_det > 0.0);
            }
        }
    }

    #[test]
    fn circle_case_matches_hand_computation() {
        // n = 1: g_w = (1/w^2) d theta^2 on the unit circle, so the chart
        // metric at (x, y) with y solved is 1/(w^2 y^2).
        let s = WeightedSasakianSphere::new(1, vec![3.0]).unwrap();
        let x = 0.6;
        let jets = vec![Jet2::coordinate(x, 0, 1)];
        let g = s.metric_components(0, &jets); // drop x (index 0), chart coord is y
        // chart 0 drops ambient index 0 = x coordinate; chart coord q = y,
        // solved x = sqrt(1 - y^2). E = (dx/dy, 1) = (-y/x, 1),
        // round |E|^2 = 1/x^2, g_w = |E|^2 / w^2 evaluated below.
        let y = x; // q value
        let solved = (1.0 - y * y).sqrt();
        let expect = 1.0 / (9.0 * solved * solved);
        assert!(
            (g[0].value() - expect).abs() < 1e-12,
            "{} vs {}",
            g[0].value(),
            expect
        );
    }
}
