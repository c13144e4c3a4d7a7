//! Numerical criteria for harmonic Riemannian submersions to circles and
//! tori, and the mapping-torus volume-density condition.
//!
//! The submersion conditions are checked through the Gram matrix of the
//! angle gradients `grad theta_i = Im(grad phi_i / phi_i)` rather than by
//! constructing an actual quotient-target map: a nonvanishing field of
//! constant modulus descends to a circle/torus submersion exactly when the
//! angle gradients pair to the prescribed constants and each `theta_i` is
//! harmonic.

use serde::{Deserialize, Serialize};

use crate::chart::{ChartedManifold, SamplingPlan};
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::jet::Jet2;
use crate::jetmat;
use crate::linalg;
use crate::manifolds::{mapping_torus, MappingTorusSpec};
use crate::ops::ChartGeometry;
use crate::report::{IdentityReport, ResidualNorm, ResidualStat, VerificationReport};
use crate::verify::EigenFamilySpec;

/// The Gram matrix `g(grad theta_i, grad theta_j)` at one point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AngleGram {
    pub k: usize,
    pub entries: Vec<f64>,
}

impl AngleGram {
    /// Branch-free assembly from the field jets: `grad theta_i` is the
    /// imaginary part of the logarithmic gradient.
    pub fn at(geo: &ChartGeometry, fields: &[crate::jet::FieldData]) -> AngleGram {
        let k = fields.len();
        let grads: Vec<Vec<f64>> = fields
            .iter()
            .map(|f| f.log_data().grad.iter().map(|z| z.im).collect())
            .collect();
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v = geo.pair_real(&grads[i], &grads[j]);
                entries[i * k + j] = v;
                entries[j * k + i] = v;
            }
        }
        AngleGram { k, entries }
    }
}

fn modulus_identity(name: String, min: f64, max: f64, tol: f64) -> (IdentityReport, bool) {
    let spread = max - min;
    let passed = spread <= tol * (1.0 + max);
    (
        IdentityReport {
            name,
            max_abs: spread,
            mean_abs: spread,
            max_rel: spread / (1.0 + max),
            argmax: None,
            tolerance: tol,
            norm: ResidualNorm::Relative,
            passed,
        },
        passed,
    )
}

/// Criteria for `x -> phi(x)/|phi(x_0)|` to be a harmonic Riemannian
/// submersion onto the circle with metric `dt^2 / |lambda|`:
/// (a) `|phi|` constant, (b) `tau(theta) = 0`, (c) `kappa(theta, theta) =
/// |lambda|`. The normalization point drops out: everything is computed
/// from `grad phi / phi`.
pub fn circle_submersion_check(
    phi: &ComplexField,
    lambda: f64,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<VerificationReport> {
    if lambda >= 0.0 || lambda.is_nan() {
        return Err(GeometryError::InvalidArgument(format!(
            "circle submersions need lambda < 0, got {lambda}"
        )));
    }
    let mut s_tau = ResidualStat::new("tau(theta) = 0".to_string());
    let mut s_kappa = ResidualStat::new("kappa(theta,theta) = |lambda|".to_string());
    let mut min_mod = f64::INFINITY;
    let mut max_mod = 0.0f64;
    let mut evaluated = 0usize;
    let mut excluded = 0usize;
    for (ci, chart) in m.charts.iter().enumerate() {
        for p in chart.sample(plan)? {
            let geo = match ChartGeometry::at(chart, &p) {
                Ok(g) => g,
                Err(_) => {
                    excluded += 1;
                    continue;
                }
            };
            let xs = chart.coordinate_jets(&p);
            let data = match phi.eval(ci, &xs) {
                Some(j) => j.data(),
                None => {
                    excluded += 1;
                    continue;
                }
            };
            let r = data.value.norm();
            if r <= 1e-12 {
                excluded += 1;
                continue;
            }
            evaluated += 1;
            min_mod = min_mod.min(r);
            max_mod = max_mod.max(r);
            let log = data.log_data();
            let grad_t: Vec<f64> = log.grad.iter().map(|z| z.im).collect();
            s_tau.record(geo.tau(&log).im.abs(), 0.0, ci, &p);
            s_kappa.record(
                (geo.pair_real(&grad_t, &grad_t) - lambda.abs()).abs(),
                lambda.abs(),
                ci,
                &p,
            );
        }
    }
    let total = evaluated + excluded;
    let mut notes = Vec::new();
    let valid = total > 0 && (excluded as f64) <= 0.5 * total as f64;
    if !valid {
        notes.push(format!("{excluded} of {total} points excluded"));
    }
    let (mod_id, mod_ok) = modulus_identity(
        format!("|{}| constant", phi.label()),
        min_mod.min(max_mod),
        max_mod,
        tol,
    );
    if !mod_ok {
        notes.push(format!(
            "modulus not constant (|phi| in [{:.6}, {:.6}]): not a (lambda,lambda)-eigenfunction",
            min_mod, max_mod
        ));
    }
    let identities = vec![
        mod_id,
        s_tau.into_report(tol, ResidualNorm::Relative),
        s_kappa.into_report(tol, ResidualNorm::Relative),
    ];
    Ok(VerificationReport::from_identities(
        "circle_submersion_check",
        identities,
        evaluated,
        excluded,
        notes,
        valid,
    ))
}

/// Criteria for `x -> (phi_1(x)/|phi_1(x_0)|, ..., phi_k(x)/|phi_k(x_0)|)`
/// to be a harmonic Riemannian submersion onto the torus with metric
/// `A^{-1}`, where the family metadata claims eigendata `(-A_ii, -A_ij)`:
/// the angle Gram must equal `A = -Re(A_family)` pointwise, each `theta_i`
/// must be harmonic, every modulus constant, and `A` positive definite.
pub fn torus_submersion_check(
    fam: &EigenFamilySpec,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<VerificationReport> {
    let k = fam.len();
    let mut notes = Vec::new();
    let mut precondition_ok = true;
    if !fam.is_lambda_diagonal(tol.max(1e-9)) {
        notes.push("family metadata is not lambda-diagonal (lambda_i != A_ii)".into());
        precondition_ok = false;
    }
    // target torus matrix: A = -Re(A_family), must be positive definite
    let mut target = vec![0.0; k * k];
    let mut max_imag = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            target[i * k + j] = -fam.a[i][j].re;
            max_imag = max_imag.max(fam.a[i][j].im.abs());
        }
    }
    let scale = target.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if max_imag > 1e-9 * scale {
        notes.push("family A-matrix is not real".into());
        precondition_ok = false;
    }
    let min_eig = linalg::min_eigenvalue(k, &target);
    if min_eig.abs() <= tol.max(1e-9) * scale {
        notes.push("target matrix A is degenerate: family is not reduced".into());
        precondition_ok = false;
    } else if min_eig < 0.0 {
        notes.push("target matrix A is not positive definite".into());
        precondition_ok = false;
    }
    if !precondition_ok {
        return Ok(VerificationReport::from_identities(
            "torus_submersion_check",
            Vec::new(),
            0,
            0,
            notes,
            false,
        ));
    }

    let mut gram_stats: Vec<ResidualStat> = Vec::new();
    for i in 0..k {
        for j in i..k {
            gram_stats.push(ResidualStat::new(format!(
                "g(grad theta_{},grad theta_{}) = A_{}{}",
                i + 1,
                j + 1,
                i + 1,
                j + 1
            )));
        }
    }
    let mut tau_stats: Vec<ResidualStat> = (0..k)
        .map(|i| ResidualStat::new(format!("tau(theta_{}) = 0", i + 1)))
        .collect();
    let mut moduli = vec![(f64::INFINITY, 0.0f64); k];
    let mut evaluated = 0usize;
    let mut excluded = 0usize;
    for (ci, chart) in m.charts.iter().enumerate() {
        for p in chart.sample(plan)? {
            let geo = match ChartGeometry::at(chart, &p) {
                Ok(g) => g,
                Err(_) => {
                    excluded += 1;
                    continue;
                }
            };
            let xs = chart.coordinate_jets(&p);
            let mut datas = Vec::with_capacity(k);
            let mut ok = true;
            for f in &fam.fields {
                match f.eval(ci, &xs) {
                    Some(j) if j.value().norm() > 1e-12 => datas.push(j.data()),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                excluded += 1;
                continue;
            }
            evaluated += 1;
            for (i, d) in datas.iter().enumerate() {
                let r = d.value.norm();
                moduli[i].0 = moduli[i].0.min(r);
                moduli[i].1 = moduli[i].1.max(r);
            }
            let gram = AngleGram::at(&geo, &datas);
            let mut idx = 0;
            for i in 0..k {
                for j in i..k {
                    let lhs = gram.entries[i * k + j];
                    let rhs = target[i * k + j];
                    gram_stats[idx].record((lhs - rhs).abs(), rhs.abs(), ci, &p);
                    idx += 1;
                }
            }
            for (i, d) in datas.iter().enumerate() {
                tau_stats[i].record(geo.tau(&d.log_data()).im.abs(), 0.0, ci, &p);
            }
        }
    }
    let total = evaluated + excluded;
    let valid = total > 0 && (excluded as f64) <= 0.05 * total as f64;
    if !valid {
        notes.push(format!("{excluded} of {total} points excluded"));
    }
    let mut identities = Vec::new();
    for (i, &(lo, hi)) in moduli.iter().enumerate() {
        let (id, ok) = modulus_identity(
            format!("|{}| constant", fam.fields[i].label()),
            lo.min(hi),
            hi,
            tol,
        );
        if !ok {
            notes.push(format!(
                "modulus of {} not constant: not a (lambda,lambda)-eigenfunction",
                fam.fields[i].label()
            ));
        }
        identities.push(id);
    }
    identities.extend(gram_stats.into_iter().map(|s| s.into_report(tol, ResidualNorm::Relative)));
    identities.extend(tau_stats.into_iter().map(|s| s.into_report(tol, ResidualNorm::Relative)));
    Ok(VerificationReport::from_identities(
        "torus_submersion_check",
        identities,
        evaluated,
        excluded,
        notes,
        valid,
    ))
}

/// Residual `|d/dt ln det G(t)|` over sampled times: the volume density of
/// the fiber metric is constant exactly when this vanishes. The derivative
/// runs through a jet-valued determinant.
pub fn volume_density_check(
    spec: &MappingTorusSpec,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<VerificationReport> {
    let m = spec.fiber_dim();
    let mut stat = ResidualStat::new("d/dt ln det G(t) = 0".to_string());
    let ts = sample_times(plan);
    for &tv in &ts {
        let t = Jet2::coordinate(tv, 0, 1);
        let gm = spec.fiber_metric(&t);
        let vals: Vec<f64> = gm.iter().map(|j| j.value()).collect();
        let min_eig = linalg::min_eigenvalue(m, &vals);
        if min_eig <= 0.0 {
            return Err(GeometryError::MetricNotSpd {
                point: vec![tv],
                eigenvalue: min_eig,
            });
        }
        let residual = jetmat::jet_det(m, &gm).ln().grad(0).abs();
        stat.record(residual, 0.0, 0, &[tv]);
    }
    let identities = vec![stat.into_report(tol, ResidualNorm::Absolute)];
    Ok(VerificationReport::from_identities(
        "volume_density_check",
        identities,
        ts.len(),
        0,
        Vec::new(),
        true,
    ))
}

/// End-to-end cross-check of `volume_density_check` through an unrelated
/// code path: build the mapping-torus chart and verify that the projection
/// `e^{it}` is a harmonic Riemannian submersion onto the circle of metric
/// `dt^2 / |lambda|` using the chart operators directly.
pub fn projection_harmonicity_check(
    spec: &MappingTorusSpec,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<VerificationReport> {
    let (manifold, projection) = mapping_torus(spec)?;
    let inner = circle_submersion_check(&projection, spec.lambda(), &manifold, plan, tol)?;
    Ok(VerificationReport::from_identities(
        "projection_harmonicity_check",
        inner.identities,
        inner.evaluated_points,
        inner.excluded_points,
        inner.notes,
        inner.valid,
    ))
}

fn sample_times(plan: &SamplingPlan) -> Vec<f64> {
    // t is periodic, so no boundary margin is needed
    let chart = crate::chart::Chart::euclidean("circle", vec![(0.0, 2.0 * std::f64::consts::PI)]);
    let t_plan = SamplingPlan {
        count: plan.count,
        seed: plan.seed,
        boundary_margin: 0.0,
    };
    chart
        .sample(&t_plan)
        .expect("unconstrained 1d sampling cannot fail")
        .into_iter()
        .map(|p| p[0])
        .collect()
}
