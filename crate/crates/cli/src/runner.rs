//! Turns a parsed manifest into manifold + family + transforms, runs the
//! requested checks and assembles the report document.

use anyhow::{anyhow, bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use eigenverify::manifolds::{
    flat_torus, mapping_torus, torus_family, weighted_sasakian, Lattice, MappingTorusSpec,
};
use eigenverify::submersions::{
    circle_submersion_check, projection_harmonicity_check, torus_submersion_check,
    volume_density_check,
};
use eigenverify::transforms::{
    check_guard_exclusions, compose_monomial, composed_family, harmonic_morphism_check,
    quotient_field, MonomialDegree, Poly, PolyPair, CONSTRUCTION_GUARD,
};
use eigenverify::verify::{
    check_a_structure, modulus_diagnostics, multiplicative_relation, polar_checks, verify_family,
};
use eigenverify::{
    ChartedManifold, ComplexField, EigenFamilySpec, ResidualNorm, SamplingPlan,
};

use crate::catalog;
use crate::manifest::{
    CheckSpec, FamilySpec, Manifest, ManifoldSpec, PolyTermSpec, TransformSpec,
};

pub const REPORT_SCHEMA: &str = "eigenfamily-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool_version: String,
    pub manifest: Manifest,
    pub checks: Vec<CheckOutcome>,
    pub overall_verdict: String,
    pub wall_clock_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub verdict: String,
    pub data: serde_json::Value,
}

pub struct RunOutcome {
    pub document: ReportDocument,
    pub all_passed: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum ManifoldClass {
    Torus,
    Sasakian,
    MappingTorus,
}

fn c64(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn poly_from_terms(terms: &[PolyTermSpec]) -> anyhow::Result<Poly> {
    Poly::new(
        terms
            .iter()
            .map(|t| (t.exponents.clone(), c64(t.coeff)))
            .collect(),
    )
    .map_err(|e| anyhow!("{e}"))
}

/// Execute the manifest. Any error here is a configuration problem (exit
/// code 2); check failures are reported through the document verdicts.
pub fn run(manifest: &Manifest) -> anyhow::Result<RunOutcome> {
    let start = std::time::Instant::now();
    let plan = SamplingPlan {
        count: manifest.sampling.count,
        seed: manifest.sampling.seed,
        boundary_margin: manifest.sampling.boundary_margin,
    };

    // manifold
    let (manifold, class, mt_spec, lattice) = build_manifold(&manifest.manifold)?;

    // family
    let mut family = build_family(
        &manifest.family,
        &manifest.manifold,
        &manifold,
        mt_spec.as_ref(),
        lattice.as_ref(),
    )?;

    // transforms replace the working family by the constructed field with
    // its predicted eigendata
    for (i, transform) in manifest.transforms.iter().enumerate() {
        family = apply_transform(transform, &family, &manifold, &plan)
            .with_context(|| format!("transform {}", i + 1))?;
    }

    // checks
    let mut outcomes = Vec::with_capacity(manifest.checks.len());
    for (i, check) in manifest.checks.iter().enumerate() {
        let outcome = run_check(check, &family, &manifold, class, mt_spec.as_ref(), &plan)
            .with_context(|| format!("check {} ({})", i + 1, check.name))?;
        outcomes.push(outcome);
    }

    let all_passed = outcomes.iter().all(|o| o.verdict == "pass");
    let document = ReportDocument {
        schema: REPORT_SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        manifest: manifest.clone(),
        checks: outcomes,
        overall_verdict: if all_passed { "pass" } else { "fail" }.to_string(),
        wall_clock_ms: start.elapsed().as_millis() as u64,
    };
    Ok(RunOutcome {
        document,
        all_passed,
    })
}

type BuiltManifold = (
    ChartedManifold,
    ManifoldClass,
    Option<MappingTorusSpec>,
    Option<Lattice>,
);

fn build_manifold(spec: &ManifoldSpec) -> anyhow::Result<BuiltManifold> {
    match spec {
        ManifoldSpec::FlatTorus { basis } => {
            let lattice = Lattice::from_generators(basis).map_err(|e| anyhow!("{e}"))?;
            Ok((
                flat_torus(&lattice),
                ManifoldClass::Torus,
                None,
                Some(lattice),
            ))
        }
        ManifoldSpec::WeightedSasakian { n, w } => {
            let (m, _) = weighted_sasakian(*n, w).map_err(|e| anyhow!("{e}"))?;
            Ok((m, ManifoldClass::Sasakian, None, None))
        }
        ManifoldSpec::MappingTorus {
            fiber_dim,
            metric,
            lambda,
            monodromy,
        } => {
            if metric.len() != *fiber_dim {
                bail!(
                    "fiber metric has {} rows but fiber_dim is {fiber_dim}",
                    metric.len()
                );
            }
            let mono = monodromy
                .as_ref()
                .map(|rows| rows.iter().flatten().copied().collect::<Vec<i64>>());
            let spec = MappingTorusSpec::from_trig_polys(metric.clone(), *lambda, mono)
                .map_err(|e| anyhow!("{e}"))?;
            let (m, _) = mapping_torus(&spec).map_err(|e| anyhow!("{e}"))?;
            Ok((m, ManifoldClass::MappingTorus, Some(spec), None))
        }
    }
}

fn build_family(
    family: &FamilySpec,
    manifold_spec: &ManifoldSpec,
    manifold: &ChartedManifold,
    mt_spec: Option<&MappingTorusSpec>,
    lattice: Option<&Lattice>,
) -> anyhow::Result<EigenFamilySpec> {
    match family {
        FamilySpec::TorusCharacters {
            k,
            lambda_override,
            a_override,
        } => {
            let lattice = lattice
                .ok_or_else(|| anyhow!("torus_characters requires a flat_torus manifold"))?;
            let mut fam = torus_family(lattice, k).map_err(|e| anyhow!("{e}"))?;
            if let Some(lo) = lambda_override {
                if lo.len() != fam.lambda.len() {
                    bail!("lambda_override must list {} values", fam.lambda.len());
                }
                fam.lambda = lo.iter().map(|&p| c64(p)).collect();
            }
            if let Some(ao) = a_override {
                if ao.len() != fam.a.len() || ao.iter().any(|r| r.len() != fam.a.len()) {
                    bail!("a_override must be a {0}x{0} matrix", fam.a.len());
                }
                fam.a = ao
                    .iter()
                    .map(|row| row.iter().map(|&p| c64(p)).collect())
                    .collect();
            }
            Ok(fam)
        }
        FamilySpec::SasakianCoordinates => match manifold_spec {
            ManifoldSpec::WeightedSasakian { n, w } => {
                let (_, fam) = weighted_sasakian(*n, w).map_err(|e| anyhow!("{e}"))?;
                Ok(fam)
            }
            _ => bail!("sasakian_coordinates requires a weighted_sasakian manifold"),
        },
        FamilySpec::Projection => {
            let spec = mt_spec
                .ok_or_else(|| anyhow!("the projection family requires a mapping_torus manifold"))?;
            let (_, projection) = mapping_torus(spec).map_err(|e| anyhow!("{e}"))?;
            let lam = Complex64::new(spec.lambda(), 0.0);
            EigenFamilySpec::new(vec![projection], vec![lam], vec![vec![lam]])
                .map_err(|e| anyhow!("{e}"))
        }
        FamilySpec::Explicit { fields, lambda, a } => {
            let dim = manifold.charts[0].dim();
            let mut built = Vec::with_capacity(fields.len());
            for (i, f) in fields.iter().enumerate() {
                let poly = poly_from_terms(&f.terms)
                    .with_context(|| format!("explicit field {}", i + 1))?;
                if poly.arity() != dim {
                    bail!(
                        "explicit field {} uses {} variables but the charts have dimension {dim}",
                        i + 1,
                        poly.arity()
                    );
                }
                let label = f
                    .label
                    .clone()
                    .unwrap_or_else(|| format!("explicit_{}", i + 1));
                built.push(ComplexField::global(label, move |xs| {
                    let z: Vec<eigenverify::CJet2> =
                        xs.iter().map(|&x| eigenverify::CJet2::from_re(x)).collect();
                    poly.eval(&z)
                }));
            }
            EigenFamilySpec::new(
                built,
                lambda.iter().map(|&p| c64(p)).collect(),
                a.iter()
                    .map(|row| row.iter().map(|&p| c64(p)).collect())
                    .collect(),
            )
            .map_err(|e| anyhow!("{e}"))
        }
    }
}

fn apply_transform(
    transform: &TransformSpec,
    family: &EigenFamilySpec,
    manifold: &ChartedManifold,
    plan: &SamplingPlan,
) -> anyhow::Result<EigenFamilySpec> {
    match transform {
        TransformSpec::Monomial { d, guard } => {
            let guard = guard.unwrap_or(CONSTRUCTION_GUARD);
            let degree = MonomialDegree::new(d.clone()).map_err(|e| anyhow!("{e}"))?;
            let (field, eig) = compose_monomial(family, &degree, guard).map_err(|e| anyhow!("{e}"))?;
            if d.iter().any(|&x| x < 0) {
                check_guard_exclusions(&field, manifold, plan, guard).map_err(|e| anyhow!("{e}"))?;
            }
            Ok(composed_family(field, eig))
        }
        TransformSpec::Quotient { p, q, guard } => {
            let guard = guard.unwrap_or(CONSTRUCTION_GUARD);
            let pair = PolyPair::new(poly_from_terms(p)?, poly_from_terms(q)?)
                .map_err(|e| anyhow!("{e}"))?;
            let field = quotient_field(family, &pair, guard).map_err(|e| anyhow!("{e}"))?;
            check_guard_exclusions(&field, manifold, plan, guard).map_err(|e| anyhow!("{e}"))?;
            let zero = Complex64::new(0.0, 0.0);
            EigenFamilySpec::new(vec![field], vec![zero], vec![vec![zero]])
                .map_err(|e| anyhow!("{e}"))
        }
    }
}

fn real_part_of(pair: Option<[f64; 2]>, fallback: Complex64, what: &str) -> anyhow::Result<f64> {
    let z = pair.map(c64).unwrap_or(fallback);
    if z.im.abs() > 1e-9 * (1.0 + z.re.abs()) {
        bail!("{what} must be real for this check, got {z}");
    }
    Ok(z.re)
}

fn run_check(
    check: &CheckSpec,
    family: &EigenFamilySpec,
    manifold: &ChartedManifold,
    class: ManifoldClass,
    mt_spec: Option<&MappingTorusSpec>,
    plan: &SamplingPlan,
) -> anyhow::Result<CheckOutcome> {
    let info = catalog::find(&check.name)
        .ok_or_else(|| anyhow!("unknown check name {:?}", check.name))?;
    let default_norm = match class {
        ManifoldClass::Sasakian => ResidualNorm::Relative,
        _ => ResidualNorm::Absolute,
    };
    let default_tol = match (info.name, class) {
        ("verify_family", ManifoldClass::Sasakian) => 1e-7,
        _ => info.default_tol,
    };
    let tol = check.tol.unwrap_or(default_tol);
    let norm = match check.norm.as_deref() {
        None => default_norm,
        Some("absolute") => ResidualNorm::Absolute,
        Some("relative") => ResidualNorm::Relative,
        Some(other) => bail!("norm must be \"absolute\" or \"relative\", got {other:?}"),
    };
    let field_index = check.field_index.unwrap_or(0);
    let field = |idx: usize| -> anyhow::Result<&ComplexField> {
        family
            .fields
            .get(idx)
            .ok_or_else(|| anyhow!("field_index {idx} out of range (family has {})", family.len()))
    };

    let (verdict, data) = match check.name.as_str() {
        "verify_family" => {
            let report =
                verify_family(manifold, family, plan, tol, norm).map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        "check_a_structure" => {
            let report = check_a_structure(&family.a, tol).map_err(|e| anyhow!("{e}"))?;
            (report.is_real_neg_semidefinite, serde_json::to_value(&report)?)
        }
        "multiplicative_relation" => {
            let relation =
                multiplicative_relation(family, manifold, plan, tol).map_err(|e| anyhow!("{e}"))?;
            let pass = relation.as_ref().is_none_or(|r| r.max_residual <= tol);
            (pass, json!({ "relation": relation }))
        }
        "polar_checks" => {
            let phi = field(field_index)?;
            let lambda = real_part_of(check.lambda, family.lambda[field_index], "lambda")?;
            let mu = real_part_of(check.mu, family.a[field_index][field_index], "mu")?;
            let min_modulus = check.min_modulus.unwrap_or(1e-6);
            let report = polar_checks(phi, lambda, mu, manifold, plan, tol, min_modulus)
                .map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        "modulus_diagnostics" => {
            let phi = field(field_index)?;
            let report =
                modulus_diagnostics(phi, manifold, plan, tol).map_err(|e| anyhow!("{e}"))?;
            (true, serde_json::to_value(&report)?)
        }
        "harmonic_morphism_check" => {
            let phi = field(field_index)?;
            let report =
                harmonic_morphism_check(phi, manifold, plan, tol).map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        "circle_submersion_check" => {
            let phi = field(field_index)?;
            let lambda = real_part_of(check.lambda, family.lambda[field_index], "lambda")?;
            let report = circle_submersion_check(phi, lambda, manifold, plan, tol)
                .map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        "torus_submersion_check" => {
            let report =
                torus_submersion_check(family, manifold, plan, tol).map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        "volume_density_check" => {
            let spec = mt_spec
                .ok_or_else(|| anyhow!("volume_density_check requires a mapping_torus manifold"))?;
            let report = volume_density_check(spec, plan, tol).map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        "projection_harmonicity_check" => {
            let spec = mt_spec.ok_or_else(|| {
                anyhow!("projection_harmonicity_check requires a mapping_torus manifold")
            })?;
            let report =
                projection_harmonicity_check(spec, plan, tol).map_err(|e| anyhow!("{e}"))?;
            (report.passed, serde_json::to_value(&report)?)
        }
        other => bail!("unknown check name {other:?}"),
    };
    Ok(CheckOutcome {
        name: check.name.clone(),
        verdict: if verdict { "pass" } else { "fail" }.to_string(),
        data,
    })
}
