//! Family-level verification sweeps for the torus and Sasakian corpora.

use num_complex::Complex64;

use eigenverify::manifolds::{
    dual_lattice, flat_torus, torus_family, weighted_sasakian, Lattice, WeightedSasakianSphere,
};
use eigenverify::verify::{check_a_structure, multiplicative_relation, verify_family};
use eigenverify::{ResidualNorm, SamplingPlan};

const PI2: f64 = std::f64::consts::PI;

#[test]
fn square_torus_families_verify_to_machine_precision() {
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0], vec![2.0, 1.0]]).unwrap();
    let report = verify_family(&m, &fam, &SamplingPlan::new(500, 42), 1e-9, ResidualNorm::Absolute)
        .unwrap();
    assert!(report.passed, "{report:#?}");
    assert!(report.max_abs_residual() <= 1e-9);
}

#[test]
fn perturbed_lambda_fails_with_unit_residual() {
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let mut fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    fam.lambda[0] += Complex64::new(1.0, 0.0);
    let report = verify_family(&m, &fam, &SamplingPlan::new(200, 42), 1e-9, ResidualNorm::Absolute)
        .unwrap();
    assert!(!report.passed);
    // residual is |delta lambda| * |f| = 1 at every point
    let tau_id = &report.identities[0];
    assert!((tau_id.max_abs - 1.0).abs() < 1e-9, "{tau_id:?}");
    assert!(tau_id.argmax.is_some());
}

#[test]
fn hexagonal_torus_family_verifies() {
    let s = 3.0f64.sqrt() / 2.0;
    let l = Lattice::new(2, vec![1.0, 0.5, 0.0, s]).unwrap();
    let m = flat_torus(&l);
    let dual = dual_lattice(&l).unwrap();
    let ks = vec![dual.generator(0), dual.generator(1)];
    let fam = torus_family(&l, &ks).unwrap();
    let report = verify_family(&m, &fam, &SamplingPlan::new(300, 7), 1e-9, ResidualNorm::Absolute)
        .unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn sasakian_w12_verifies_claimed_eigendata() {
    let (m, fam) = weighted_sasakian(2, &[1.0, 2.0]).unwrap();
    assert_eq!(fam.lambda[0], Complex64::new(-3.0, 0.0));
    assert_eq!(fam.lambda[1], Complex64::new(-8.0, 0.0));
    assert_eq!(fam.a[0][1], Complex64::new(-2.0, 0.0));
    let report = verify_family(&m, &fam, &SamplingPlan::new(120, 3), 1e-7, ResidualNorm::Relative)
        .unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn sasakian_round_case_has_sphere_eigenvalue() {
    // w = (1,1): coordinate functions of the round S^3, eigenvalue -(2n-1).
    let (m, fam) = weighted_sasakian(2, &[1.0, 1.0]).unwrap();
    assert_eq!(fam.lambda, vec![Complex64::new(-3.0, 0.0); 2]);
    assert_eq!(fam.a, vec![vec![Complex64::new(-1.0, 0.0); 2]; 2]);
    let report = verify_family(&m, &fam, &SamplingPlan::new(120, 5), 1e-7, ResidualNorm::Relative)
        .unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn sasakian_weight_sweep_verifies() {
    // 500 points per chart across weight vectors and both supported
    // ambient dimensions
    for (n, w) in [
        (2usize, vec![1.0, 1.0]),
        (2, vec![1.0, 2.0]),
        (2, vec![2.0, 3.0]),
        (3, vec![1.0, 1.0, 1.0]),
        (3, vec![1.0, 2.0, 2.0]),
        (3, vec![2.0, 3.0, 1.0]),
    ] {
        let (m, fam) = weighted_sasakian(n, &w).unwrap();
        let report =
            verify_family(&m, &fam, &SamplingPlan::new(500, 11), 1e-7, ResidualNorm::Relative)
                .unwrap();
        assert!(report.passed, "w = {w:?}: {report:#?}");
    }
}

#[test]
fn seven_sphere_at_the_dimension_ceiling_verifies() {
    // n = 4 is the largest ambient complex dimension the jets support
    let (m, fam) = weighted_sasakian(4, &[1.0, 2.0, 1.0, 3.0]).unwrap();
    assert_eq!(m.charts.len(), 16);
    assert_eq!(m.charts[0].dim(), 7);
    let report = verify_family(&m, &fam, &SamplingPlan::new(40, 5), 1e-7, ResidualNorm::Relative)
        .unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn multiplicative_relation_requires_lambda_diagonal_metadata() {
    // the Sasakian coordinate family has lambda_i != A_ii
    let (m, fam) = weighted_sasakian(2, &[1.0, 2.0]).unwrap();
    match multiplicative_relation(&fam, &m, &SamplingPlan::new(20, 1), 1e-9) {
        Err(eigenverify::GeometryError::NotLambdaDiagonal { index, .. }) => {
            assert_eq!(index, 1);
        }
        other => panic!("expected lambda-diagonal rejection, got {other:?}"),
    }
}

#[test]
fn sasakian_chart_transitions_pull_back_consistently() {
    // Metric components of overlapping graph charts must agree under the
    // chart transition Jacobian.
    let sphere = WeightedSasakianSphere::new(2, vec![1.0, 2.0]).unwrap();
    let chart_a = 0usize; // drops ambient coordinate 0, positive sign
    let chart_b = 2usize; // drops ambient coordinate 1, positive sign
    let nn = sphere.ambient_dim();
    let m = nn - 1;
    let mut checked = 0usize;
    let mut idx = 1u64;
    while checked < 50 {
        idx += 1;
        // deterministic ambient points on the sphere with both dropped
        // coordinates comfortably positive
        let raw: Vec<f64> = (0..nn)
            .map(|axis| {
                let x = ((idx as f64) * 0.6180339887498949 * (axis as f64 + 1.0)).fract();
                0.2 + 0.8 * x
            })
            .collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        if u.iter().any(|&x| x < 0.15) {
            continue;
        }
        checked += 1;
        // chart coordinates: drop the respective ambient coordinate
        let qa: Vec<f64> = (0..nn).filter(|&i| i != 0).map(|i| u[i]).collect();
        let qb: Vec<f64> = (0..nn).filter(|&i| i != 1).map(|i| u[i]).collect();
        let jets_b: Vec<eigenverify::Jet2> = qb
            .iter()
            .enumerate()
            .map(|(i, &v)| eigenverify::Jet2::coordinate(v, i, m))
            .collect();
        let g_b = sphere.metric_components(chart_b, &jets_b);
        let jets_a: Vec<eigenverify::Jet2> = qa
            .iter()
            .enumerate()
            .map(|(i, &v)| eigenverify::Jet2::coordinate(v, i, m))
            .collect();
        let g_a = sphere.metric_components(chart_a, &jets_a);
        // transition T: chart-b coords -> chart-a coords goes through the
        // ambient embedding of chart b; its Jacobian falls out of the
        // embedding jets.
        let u_jets = sphere.embed(chart_b, &jets_b);
        let a_coords: Vec<eigenverify::Jet2> =
            (0..nn).filter(|&i| i != 0).map(|i| u_jets[i]).collect();
        // pullback: g_b[k][l] =? sum_ij J_ik g_a[i][j] J_jl with
        // J_ik = d(a_i)/d(b_k)
        for k in 0..m {
            for l in 0..m {
                let mut pulled = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        pulled += a_coords[i].grad(k)
                            * g_a[i * m + j].value()
                            * a_coords[j].grad(l);
                    }
                }
                let direct = g_b[k * m + l].value();
                assert!(
                    (pulled - direct).abs() <= 1e-8 * (1.0 + direct.abs()),
                    "transition mismatch at point {checked}: {pulled} vs {direct}"
                );
            }
        }
    }
}

#[test]
fn two_character_lambda_lambda_family_is_rejected() {
    // Two distinct characters claimed as a (lambda, lambda)-family must
    // fail: on a compact manifold such families are one-dimensional.
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let pairs = [
        (vec![1.0, 0.0], vec![0.0, 1.0]),
        (vec![1.0, 0.0], vec![1.0, 1.0]),
        (vec![2.0, 1.0], vec![1.0, 2.0]),
    ];
    for (k1, k2) in pairs {
        let lam = -4.0 * PI2 * PI2 * k1.iter().map(|x| x * x).sum::<f64>();
        let fields = torus_family(&l, &[k1.clone(), k2.clone()]).unwrap().fields;
        let fam = eigenverify::EigenFamilySpec::new(
            fields,
            vec![Complex64::new(lam, 0.0); 2],
            vec![vec![Complex64::new(lam, 0.0); 2]; 2],
        )
        .unwrap();
        let report =
            verify_family(&m, &fam, &SamplingPlan::new(150, 13), 1e-9, ResidualNorm::Absolute)
                .unwrap();
        assert!(!report.passed, "k1={k1:?} k2={k2:?}");
        assert!(
            report.max_abs_residual() >= 1.0,
            "residual too small for k1={k1:?} k2={k2:?}: {}",
            report.max_abs_residual()
        );
    }
}

#[test]
fn phase_rotation_leaves_residuals_invariant() {
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let rotated = fam.rotated(0.83);
    let plan = SamplingPlan::new(150, 21);
    let a = verify_family(&m, &fam, &plan, 1e-9, ResidualNorm::Absolute).unwrap();
    let b = verify_family(&m, &rotated, &plan, 1e-9, ResidualNorm::Absolute).unwrap();
    for (ra, rb) in a.identities.iter().zip(&b.identities) {
        assert!((ra.max_abs - rb.max_abs).abs() <= 1e-12);
    }
}

#[test]
fn multiplicative_relation_on_dependent_characters() {
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let fam = torus_family(&l, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
    let rel = multiplicative_relation(&fam, &m, &SamplingPlan::new(100, 1), 1e-9)
        .unwrap()
        .expect("degenerate family must yield a relation");
    assert_eq!(rel.alpha, vec![1.0, 1.0, -1.0]);
    assert!(rel.max_residual <= 1e-9, "{rel:?}");

    // independent pair: no relation
    let fam2 = torus_family(&l, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert!(multiplicative_relation(&fam2, &m, &SamplingPlan::new(50, 1), 1e-9)
        .unwrap()
        .is_none());

    // single character: no relation
    let fam3 = torus_family(&l, &[vec![1.0, 0.0]]).unwrap();
    assert!(multiplicative_relation(&fam3, &m, &SamplingPlan::new(50, 1), 1e-9)
        .unwrap()
        .is_none());
}

#[test]
fn a_structure_flags_lambda_diagonal_families_as_semidefinite() {
    // every lambda-diagonal family that verifies should have negative
    // semidefinite A; spot-check the torus and Sasakian A matrices
    let l = Lattice::standard(2);
    let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let s = check_a_structure(&fam.a, 1e-9).unwrap();
    assert!(s.is_real_neg_semidefinite);
    assert!(s.is_reduced);

    let (_, sas) = weighted_sasakian(2, &[1.0, 2.0]).unwrap();
    let s = check_a_structure(&sas.a, 1e-9).unwrap();
    assert!(s.is_real_neg_semidefinite);
    assert!(!s.is_reduced);
    assert_eq!(s.kernel[0], vec![2.0, -1.0]);
}
