//! Browser bindings for the eigenfamily verifier.
//!
//! Three operations back the demo page: explore a weighted Sasakian sphere,
//! compose its coordinate family with a monomial, and probe a mapping torus
//! for constant volume density. Inputs and outputs are JSON strings so the
//! page needs no generated glue beyond wasm-bindgen itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use eigenverify::jet::Jet2;
use eigenverify::manifolds::{weighted_sasakian, MappingTorusSpec, TrigPoly};
use eigenverify::submersions::{projection_harmonicity_check, volume_density_check};
use eigenverify::transforms::{
    compose_monomial, composed_family, harmonic_morphism_check, predict_composed_eigenvalues,
    MonomialDegree, ACCEPTANCE_GUARD, CONSTRUCTION_GUARD,
};
use eigenverify::verify::{check_a_structure, multiplicative_relation, verify_family};
use eigenverify::{ResidualNorm, SamplingPlan, VerificationReport};

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::to_string(&serde_json::json!({ "error": message.to_string() }))
        .expect("error serialization")
}

fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct ResidualSummary {
    passed: bool,
    max_abs: f64,
    max_rel: f64,
    worst_identity: String,
}

impl ResidualSummary {
    fn of(report: &VerificationReport) -> Self {
        let worst = report
            .identities
            .iter()
            .max_by(|a, b| a.max_abs.partial_cmp(&b.max_abs).unwrap());
        ResidualSummary {
            passed: report.passed,
            max_abs: report.max_abs_residual(),
            max_rel: report.max_rel_residual(),
            worst_identity: worst.map_or(String::new(), |r| r.name.clone()),
        }
    }
}

#[derive(Serialize)]
struct SasakianReport {
    n: usize,
    w: Vec<f64>,
    lambda: Vec<[f64; 2]>,
    a: Vec<Vec<[f64; 2]>>,
    verify: ResidualSummary,
    eigenvalues_of_a: Vec<f64>,
    is_neg_semidefinite: bool,
    is_reduced: bool,
    kernel: Vec<Vec<f64>>,
    relation_alpha: Option<Vec<f64>>,
    relation_residual: Option<f64>,
    points_per_chart: usize,
    charts: usize,
}

/// Verify the coordinate eigenfamily of the weighted Sasakian sphere
/// `S^{2n-1}` with weights `w` (JSON array of positive numbers).
#[wasm_bindgen]
pub fn sasakian_explore(n: usize, w_json: &str, points: usize, seed: u64) -> String {
    let w: Vec<f64> = match serde_json::from_str(w_json) {
        Ok(w) => w,
        Err(e) => return err_json(format!("weights: {e}")),
    };
    let (manifold, family) = match weighted_sasakian(n, &w) {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let plan = SamplingPlan::new(points.clamp(10, 2000), seed);
    let report = match verify_family(&manifold, &family, &plan, 1e-7, ResidualNorm::Relative) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let structure = match check_a_structure(&family.a, 1e-9) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let relation = multiplicative_relation(&family, &manifold, &plan, 1e-9).ok().flatten();
    let out = SasakianReport {
        n,
        w,
        lambda: family.lambda.iter().map(|&z| complex_pair(z)).collect(),
        a: family
            .a
            .iter()
            .map(|row| row.iter().map(|&z| complex_pair(z)).collect())
            .collect(),
        verify: ResidualSummary::of(&report),
        eigenvalues_of_a: structure.eigenvalues,
        is_neg_semidefinite: structure.is_real_neg_semidefinite,
        is_reduced: structure.is_reduced,
        kernel: structure.kernel,
        relation_alpha: relation.as_ref().map(|r| r.alpha.clone()),
        relation_residual: relation.as_ref().map(|r| r.max_residual),
        points_per_chart: plan.count,
        charts: manifold.charts.len(),
    };
    serde_json::to_string(&out).unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct ComposeReport {
    d: Vec<i32>,
    lambda_tilde: [f64; 2],
    mu_tilde: [f64; 2],
    harmonic_morphism: bool,
    verify: ResidualSummary,
    hm_check: Option<ResidualSummary>,
    excluded_points: usize,
    evaluated_points: usize,
}

/// Compose the Sasakian coordinate family with the monomial of exponent
/// vector `d` (JSON array of integers) and verify the predicted
/// eigenvalues; when the prediction says harmonic morphism, also run that
/// check on the guard region.
#[wasm_bindgen]
pub fn compose_explore(n: usize, w_json: &str, d_json: &str, points: usize, seed: u64) -> String {
    let w: Vec<f64> = match serde_json::from_str(w_json) {
        Ok(w) => w,
        Err(e) => return err_json(format!("weights: {e}")),
    };
    let d: Vec<i32> = match serde_json::from_str(d_json) {
        Ok(d) => d,
        Err(e) => return err_json(format!("degrees: {e}")),
    };
    let (manifold, family) = match weighted_sasakian(n, &w) {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let degree = match MonomialDegree::new(d.clone()) {
        Ok(d) => d,
        Err(e) => return err_json(e),
    };
    let predicted = match predict_composed_eigenvalues(&family, &degree) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let guard = if d.iter().any(|&x| x < 0) {
        ACCEPTANCE_GUARD
    } else {
        CONSTRUCTION_GUARD
    };
    let (field, eig) = match compose_monomial(&family, &degree, guard) {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let plan = SamplingPlan::new(points.clamp(10, 2000), seed);
    let composed = composed_family(field.clone(), eig);
    let report = match verify_family(&manifold, &composed, &plan, 1e-7, ResidualNorm::Relative) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let hm = if predicted.harmonic_morphism {
        harmonic_morphism_check(&field, &manifold, &plan, 1e-6)
            .ok()
            .map(|r| ResidualSummary::of(&r))
    } else {
        None
    };
    let out = ComposeReport {
        d,
        lambda_tilde: complex_pair(predicted.lambda),
        mu_tilde: complex_pair(predicted.mu),
        harmonic_morphism: predicted.harmonic_morphism,
        verify: ResidualSummary::of(&report),
        hm_check: hm,
        excluded_points: report.excluded_points,
        evaluated_points: report.evaluated_points,
    };
    serde_json::to_string(&out).unwrap_or_else(err_json)
}

#[derive(Deserialize)]
struct MappingTorusInput {
    metric: Vec<Vec<TrigPoly>>,
    lambda: f64,
}

#[derive(Serialize)]
struct MappingTorusReport {
    t: Vec<f64>,
    det: Vec<f64>,
    log_det_rate: Vec<f64>,
    volume_density_passed: bool,
    volume_density_max_residual: f64,
    projection_passed: bool,
    projection_max_residual: f64,
    verdicts_agree: bool,
}

/// Probe a mapping torus given as `{"metric": [[TrigPoly; m]; m],
/// "lambda": negative}`: sample `det G(t)` and `d/dt ln det G(t)` for
/// plotting and run both density criteria.
#[wasm_bindgen]
pub fn mapping_torus_explore(spec_json: &str, points: usize, seed: u64) -> String {
    let input: MappingTorusInput = match serde_json::from_str(spec_json) {
        Ok(x) => x,
        Err(e) => return err_json(format!("spec: {e}")),
    };
    let fiber_dim = input.metric.len();
    let spec = match MappingTorusSpec::from_trig_polys(input.metric, input.lambda, None) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let plan = SamplingPlan::new(points.clamp(10, 2000), seed);
    let vd = match volume_density_check(&spec, &plan, 1e-8) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let ph = match projection_harmonicity_check(&spec, &plan, 1e-8) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    // curve for the canvas: uniform grid over one period
    let grid = 257usize;
    let mut t = Vec::with_capacity(grid);
    let mut det = Vec::with_capacity(grid);
    let mut rate = Vec::with_capacity(grid);
    for i in 0..grid {
        let tv = 2.0 * std::f64::consts::PI * i as f64 / (grid - 1) as f64;
        let tj = Jet2::coordinate(tv, 0, 1);
        let gm = spec.fiber_metric(&tj);
        let d = eigenverify::jetmat::jet_det(fiber_dim, &gm);
        t.push(tv);
        det.push(d.value());
        rate.push(d.ln().grad(0));
    }
    let out = MappingTorusReport {
        t,
        det,
        log_det_rate: rate,
        volume_density_passed: vd.passed,
        volume_density_max_residual: vd.max_abs_residual(),
        projection_passed: ph.passed,
        projection_max_residual: ph
            .identity("tau(theta) = 0")
            .map_or(0.0, |r| r.max_abs),
        verdicts_agree: vd.passed == ph.passed,
    };
    serde_json::to_string(&out).unwrap_or_else(err_json)
}
