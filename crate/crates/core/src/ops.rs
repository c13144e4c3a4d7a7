//! The two fundamental differential operators evaluated in a chart.
//!
//! `tau` is the Laplace-Beltrami operator (tension field) with the sign
//! convention div(grad): eigenvalues on compact manifolds are negative.
//! `kappa` is the conformality operator, the complex-bilinear pairing of
//! gradients (no conjugation).
//!
//! The primary `tau` route goes through Christoffel symbols assembled from
//! first derivatives of the metric jets. A second, independent route
//! evaluates the divergence form `(1/sqrt|g|) d_j (g^ij sqrt|g| d_i f)`
//! using matrix inversion and determinants carried out in jet arithmetic;
//! it exists purely as a cross-check oracle.

use num_complex::Complex64;

use crate::chart::Chart;
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::jet::{FieldData, Jet2};
use crate::jetmat;
use crate::linalg;

/// Metric data assembled at one point: component values, inverse, volume
/// density and Christoffel symbols.
#[derive(Clone, Debug)]
pub struct ChartGeometry {
    pub dim: usize,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    pub sqrt_det: f64,
    /// `Gamma^k_{ij}` at `k * n * n + i * n + j`.
    pub christoffel: Vec<f64>,
}

impl ChartGeometry {
    pub fn at(chart: &Chart, p: &[f64]) -> Result<Self> {
        if !chart.contains(p) {
            return Err(GeometryError::OutsideDomain { point: p.to_vec() });
        }
        let xs = chart.coordinate_jets(p);
        Self::from_metric_jets(chart.dim(), &chart.metric(&xs), p)
    }

    pub fn from_metric_jets(n: usize, gm: &[Jet2], p: &[f64]) -> Result<Self> {
        assert_eq!(gm.len(), n * n);
        let g: Vec<f64> = gm.iter().map(|j| j.value()).collect();
        let min_eig = linalg::min_eigenvalue(n, &g);
        if min_eig <= 0.0 {
            return Err(GeometryError::MetricNotSpd {
                point: p.to_vec(),
                eigenvalue: min_eig,
            });
        }
        let ginv = linalg::invert(n, &g).ok_or_else(|| GeometryError::Singular {
            context: format!("inverting the metric at {p:?}"),
        })?;
        let sqrt_det = linalg::det(n, &g).sqrt();
        // dg[l][i][j] = d_l g_ij from the metric jets
        let mut christoffel = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        let d_i_gjl = gm[j * n + l].grad(i);
                        let d_j_gil = gm[i * n + l].grad(j);
                        let d_l_gij = gm[i * n + j].grad(l);
                        s += ginv[k * n + l] * (d_i_gjl + d_j_gil - d_l_gij);
                    }
                    christoffel[k * n * n + i * n + j] = 0.5 * s;
                }
            }
        }
        Ok(ChartGeometry {
            dim: n,
            g,
            ginv,
            sqrt_det,
            christoffel,
        })
    }

    /// Laplace-Beltrami of a field from its evaluated 2-jet:
    /// `g^ij (f_ij - Gamma^k_ij f_k)`.
    pub fn tau(&self, f: &FieldData) -> Complex64 {
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let mut corr = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    corr += self.christoffel[k * n * n + i * n + j] * f.grad[k];
                }
                acc += self.ginv[i * n + j] * (f.hess_at(i, j) - corr);
            }
        }
        acc
    }

    /// Conformality pairing `g^ij d_i f d_j h` (complex-bilinear).
    pub fn kappa(&self, f: &FieldData, h: &FieldData) -> Complex64 {
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.ginv[i * n + j] * f.grad[i] * h.grad[j];
            }
        }
        acc
    }

    /// Pairing of two real coordinate-gradient vectors through `g^ij`.
    #[allow(clippy::needless_range_loop)]
    pub fn pair_real(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.ginv[i * n + j] * a[i] * b[j];
            }
        }
        acc
    }

    /// Contravariant gradient components `g^ij d_j f`.
    pub fn grad_contravariant(&self, f: &FieldData) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.ginv[i * n + j] * f.grad[j])
                    .sum::<Complex64>()
            })
            .collect()
    }
}

fn field_data_at(f: &ComplexField, chart: &Chart, p: &[f64]) -> Result<FieldData> {
    if !chart.contains(p) {
        return Err(GeometryError::OutsideDomain { point: p.to_vec() });
    }
    let xs = chart.coordinate_jets(p);
    f.eval(chart.index(), &xs)
        .map(|j| j.data())
        .ok_or_else(|| GeometryError::InvalidArgument(format!(
            "field {} is excluded or non-finite at {p:?}",
            f.label()
        )))
}

/// Contravariant gradient of `f` at `p`.
pub fn grad(f: &ComplexField, chart: &Chart, p: &[f64]) -> Result<Vec<Complex64>> {
    let geo = ChartGeometry::at(chart, p)?;
    let data = field_data_at(f, chart, p)?;
    Ok(geo.grad_contravariant(&data))
}

/// Conformality operator `kappa(f, h)` at `p`.
pub fn kappa(f: &ComplexField, h: &ComplexField, chart: &Chart, p: &[f64]) -> Result<Complex64> {
    let geo = ChartGeometry::at(chart, p)?;
    let fd = field_data_at(f, chart, p)?;
    let hd = field_data_at(h, chart, p)?;
    Ok(geo.kappa(&fd, &hd))
}

/// Laplace-Beltrami operator `tau(f)` at `p` (Christoffel form).
pub fn tau(f: &ComplexField, chart: &Chart, p: &[f64]) -> Result<Complex64> {
    let geo = ChartGeometry::at(chart, p)?;
    let data = field_data_at(f, chart, p)?;
    Ok(geo.tau(&data))
}

/// Divergence-form Laplacian, kept as an independent oracle for `tau`:
/// inverse and determinant of the metric are differentiated in jet
/// arithmetic rather than through Christoffel symbols.
pub fn tau_divergence(f: &ComplexField, chart: &Chart, p: &[f64]) -> Result<Complex64> {
    if !chart.contains(p) {
        return Err(GeometryError::OutsideDomain { point: p.to_vec() });
    }
    let n = chart.dim();
    let xs = chart.coordinate_jets(p);
    let gm = chart.metric(&xs);
    let ginv = jetmat::jet_inverse(n, &gm)?;
    let sqrt_det = jetmat::jet_det(n, &gm).sqrt();
    let data = field_data_at(f, chart, p)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let w = ginv[i * n + j] * sqrt_det; // g^ij sqrt|g| as a jet
            acc += w.grad(j) * data.grad[i] + w.value() * data.hess_at(i, j);
        }
    }
    Ok(acc / sqrt_det.value())
}

/// Residual of the product rule `tau(fh) = tau(f) h + 2 kappa(f,h) + f tau(h)`
/// at `p`; a self-consistency probe for the whole operator stack.
pub fn product_rule_residual(
    f: &ComplexField,
    h: &ComplexField,
    chart: &Chart,
    p: &[f64],
) -> Result<f64> {
    let geo = ChartGeometry::at(chart, p)?;
    if !chart.contains(p) {
        return Err(GeometryError::OutsideDomain { point: p.to_vec() });
    }
    let xs = chart.coordinate_jets(p);
    let fj = f.eval(chart.index(), &xs).ok_or_else(|| {
        GeometryError::InvalidArgument(format!("field {} excluded at {p:?}", f.label()))
    })?;
    let hj = h.eval(chart.index(), &xs).ok_or_else(|| {
        GeometryError::InvalidArgument(format!("field {} excluded at {p:?}", h.label()))
    })?;
    let prod = (fj * hj).data();
    let fd = fj.data();
    let hd = hj.data();
    let lhs = geo.tau(&prod);
    let rhs = geo.tau(&fd) * hd.value + 2.0 * geo.kappa(&fd, &hd) + fd.value * geo.tau(&hd);
    Ok((lhs - rhs).norm())
}

/// Central-difference derivative estimates of a field: an oracle that is
/// independent of the jet machinery. Returns coordinate partials and the
/// coordinate Hessian, both O(h^2)-accurate.
pub fn fd_oracle(
    f: &ComplexField,
    chart: &Chart,
    p: &[f64],
    h: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = chart.dim();
    if !chart.contains(p) {
        return Err(GeometryError::OutsideDomain { point: p.to_vec() });
    }
    for (i, &(lo, hi)) in chart.domain().iter().enumerate() {
        if p[i] - lo <= 2.0 * h || hi - p[i] <= 2.0 * h {
            return Err(GeometryError::StepTooLarge {
                step: h,
                point: p.to_vec(),
            });
        }
    }
    let value = |q: &[f64]| -> Result<Complex64> {
        f.value(chart.index(), q).ok_or_else(|| {
            GeometryError::InvalidArgument(format!("field {} excluded at {q:?}", f.label()))
        })
    };
    let f0 = value(p)?;
    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        let mut pp = p.to_vec();
        let mut pm = p.to_vec();
        pp[i] += h;
        pm[i] -= h;
        grad.push((value(&pp)? - value(&pm)?) / (2.0 * h));
    }
    let mut hess = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let second = if i == j {
                let mut pp = p.to_vec();
                let mut pm = p.to_vec();
                pp[i] += h;
                pm[i] -= h;
                (value(&pp)? - 2.0 * f0 + value(&pm)?) / (h * h)
            } else {
                let mut ppp = p.to_vec();
                let mut ppm = p.to_vec();
                let mut pmp = p.to_vec();
                let mut pmm = p.to_vec();
                ppp[i] += h;
                ppp[j] += h;
                ppm[i] += h;
                ppm[j] -= h;
                pmp[i] -= h;
                pmp[j] += h;
                pmm[i] -= h;
                pmm[j] -= h;
                (value(&ppp)? - value(&ppm)? - value(&pmp)? + value(&pmm)?) / (4.0 * h * h)
            };
            hess[i * n + j] = second;
            hess[j * n + i] = second;
        }
    }
    Ok((grad, hess))
}
