//! Composition coherence: every composed field must verify against its
//! predicted eigenvalues, and quotients of uniform families must be
//! harmonic morphisms on the guard region.

use num_complex::Complex64;

use eigenverify::manifolds::{flat_torus, torus_family, weighted_sasakian, Lattice};
use eigenverify::transforms::{
    check_guard_exclusions, compose_monomial, composed_family, harmonic_morphism_check,
    predict_composed_eigenvalues, quotient_field, MonomialDegree, Poly, PolyPair,
    ACCEPTANCE_GUARD, CONSTRUCTION_GUARD,
};
use eigenverify::verify::verify_family;
use eigenverify::{ResidualNorm, SamplingPlan};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn composition_coherence_on_the_torus() {
    // every |d_i| <= 3 on a two-character family: composed field passes
    // verify_family against the predicted eigenvalues
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let plan = SamplingPlan::new(60, 33);
    let mut checked = 0;
    for d1 in -3i32..=3 {
        for d2 in -3i32..=3 {
            if d1 == 0 && d2 == 0 {
                continue;
            }
            let d = MonomialDegree::new(vec![d1, d2]).unwrap();
            let (field, eig) = compose_monomial(&fam, &d, CONSTRUCTION_GUARD).unwrap();
            let composed = composed_family(field, eig);
            let report =
                verify_family(&m, &composed, &plan, 1e-9, ResidualNorm::Absolute).unwrap();
            assert!(report.passed, "d = ({d1},{d2}): {report:#?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 48);
}

#[test]
fn composition_coherence_on_the_sasakian_sphere() {
    let (m, fam) = weighted_sasakian(2, &[1.0, 2.0]).unwrap();
    let plan = SamplingPlan::new(40, 27);
    // positive exponents need no guard; the mixed one runs on the
    // acceptance guard region
    for (d, guard) in [
        (vec![1, 1], CONSTRUCTION_GUARD),
        (vec![2, 1], CONSTRUCTION_GUARD),
        (vec![3, 2], CONSTRUCTION_GUARD),
        (vec![2, -1], ACCEPTANCE_GUARD),
        (vec![-1, 1], ACCEPTANCE_GUARD),
    ] {
        let d = MonomialDegree::new(d).unwrap();
        let (field, eig) = compose_monomial(&fam, &d, guard).unwrap();
        let composed = composed_family(field, eig);
        let report = verify_family(&m, &composed, &plan, 1e-7, ResidualNorm::Relative).unwrap();
        assert!(report.passed, "d = {d:?}: {report:#?}");
    }
}

#[test]
fn sasakian_harmonic_morphism_from_weights() {
    // w = (1,2), d = (2,-1): predicted (0,0), and the composed field passes
    // the harmonic morphism check on the guard region
    let (m, fam) = weighted_sasakian(2, &[1.0, 2.0]).unwrap();
    let d = MonomialDegree::new(vec![2, -1]).unwrap();
    let eig = predict_composed_eigenvalues(&fam, &d).unwrap();
    assert!(eig.harmonic_morphism);
    assert!(eig.lambda.norm() < 1e-12 && eig.mu.norm() < 1e-12);
    let (field, _) = compose_monomial(&fam, &d, ACCEPTANCE_GUARD).unwrap();
    let report = harmonic_morphism_check(&field, &m, &SamplingPlan::new(80, 41), 1e-6).unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn hopf_quotient_is_a_harmonic_morphism() {
    // round S^3: phi_1 / phi_2 on |phi_2| >= 0.1
    let (m, fam) = weighted_sasakian(2, &[1.0, 1.0]).unwrap();
    let pair = PolyPair::new(
        Poly::new(vec![(vec![1, 0], c(1.0))]).unwrap(),
        Poly::new(vec![(vec![0, 1], c(1.0))]).unwrap(),
    )
    .unwrap();
    let field = quotient_field(&fam, &pair, ACCEPTANCE_GUARD).unwrap();
    let plan = SamplingPlan::new(80, 55);
    let excl = check_guard_exclusions(&field, &m, &plan, ACCEPTANCE_GUARD).unwrap();
    assert!(excl < 0.5);
    let report = harmonic_morphism_check(&field, &m, &plan, 1e-7).unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn plus_minus_quotient_is_a_harmonic_morphism() {
    // (z1 + z2) / (z1 - z2) on round S^3
    let (m, fam) = weighted_sasakian(2, &[1.0, 1.0]).unwrap();
    let pair = PolyPair::new(
        Poly::new(vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(1.0))]).unwrap(),
        Poly::new(vec![(vec![1, 0], c(1.0)), (vec![0, 1], c(-1.0))]).unwrap(),
    )
    .unwrap();
    let field = quotient_field(&fam, &pair, ACCEPTANCE_GUARD).unwrap();
    let report = harmonic_morphism_check(&field, &m, &SamplingPlan::new(80, 59), 1e-6).unwrap();
    assert!(report.passed, "{report:#?}");
}

#[test]
fn random_degree_two_quotients_are_harmonic_morphisms() {
    // five deterministic pseudo-random independent pairs of degree <= 2
    let (m, fam) = weighted_sasakian(2, &[1.0, 1.0]).unwrap();
    let mut state = 0xabcd_ef12_u64;
    let mut unit = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) as f64 / 2f64.powi(64)
    };
    let exps_by_degree: [Vec<Vec<u32>>; 2] = [
        vec![vec![1, 0], vec![0, 1]],
        vec![vec![2, 0], vec![1, 1], vec![0, 2]],
    ];
    let plan = SamplingPlan::new(50, 61);
    let mut found = 0usize;
    while found < 5 {
        let degree = if unit() < 0.5 { 0 } else { 1 };
        let make = |unit: &mut dyn FnMut() -> f64| {
            Poly::new(
                exps_by_degree[degree]
                    .iter()
                    .map(|e| {
                        (
                            e.clone(),
                            Complex64::new(2.0 * unit() - 1.0, 2.0 * unit() - 1.0),
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        let p = make(&mut unit);
        let q = make(&mut unit);
        let Ok(pair) = PolyPair::new(p, q) else {
            continue;
        };
        found += 1;
        let field = quotient_field(&fam, &pair, ACCEPTANCE_GUARD).unwrap();
        let report = harmonic_morphism_check(&field, &m, &plan, 1e-6).unwrap();
        assert!(report.valid, "{report:#?}");
        assert!(report.passed, "pair {found}: {report:#?}");
    }
}

#[test]
fn identity_degree_vector_returns_the_field() {
    let l = Lattice::standard(2);
    let m = flat_torus(&l);
    let fam = torus_family(&l, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let d = MonomialDegree::new(vec![1, 0]).unwrap();
    let (field, eig) = compose_monomial(&fam, &d, CONSTRUCTION_GUARD).unwrap();
    assert_eq!(eig.lambda, fam.lambda[0]);
    assert_eq!(eig.mu, fam.a[0][0]);
    for p in m.charts[0].sample(&SamplingPlan::new(20, 1)).unwrap() {
        let a = field.value(0, &p).unwrap();
        let b = fam.fields[0].value(0, &p).unwrap();
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn harmonic_morphism_flag_is_scale_invariant() {
    let (_, fam) = weighted_sasakian(2, &[1.0, 2.0]).unwrap();
    for c_scale in 1..=4i32 {
        let d = MonomialDegree::new(vec![2 * c_scale, -c_scale]).unwrap();
        let eig = predict_composed_eigenvalues(&fam, &d).unwrap();
        assert!(eig.harmonic_morphism, "scale {c_scale}");
    }
    // non-harmonic direction stays non-harmonic under scaling
    for c_scale in 1..=4i32 {
        let d = MonomialDegree::new(vec![c_scale, c_scale]).unwrap();
        let eig = predict_composed_eigenvalues(&fam, &d).unwrap();
        assert!(!eig.harmonic_morphism, "scale {c_scale}");
    }
}
