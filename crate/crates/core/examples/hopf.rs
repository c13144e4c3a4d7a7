//! Quotients of the round-sphere coordinate family are harmonic morphisms:
//! build S^3, form z1/z2, and watch the residuals vanish.
//!
//! ```bash
//! cargo run -p eigenverify --example hopf
//! ```

use num_complex::Complex64;

use eigenverify::manifolds::weighted_sasakian;
use eigenverify::transforms::{
    harmonic_morphism_check, quotient_field, Poly, PolyPair, ACCEPTANCE_GUARD,
};
use eigenverify::verify::verify_family;
use eigenverify::{ResidualNorm, SamplingPlan};

fn main() {
    let (sphere, family) = weighted_sasakian(2, &[1.0, 1.0]).unwrap();
    println!("manifold: {} ({} graph charts)", sphere.name, sphere.charts.len());
    println!(
        "family:   phi_1, phi_2 with lambda = ({}, {}), mu = {}",
        family.lambda[0].re, family.lambda[1].re, family.a[0][0].re
    );

    let plan = SamplingPlan::new(300, 7);
    let report = verify_family(&sphere, &family, &plan, 1e-7, ResidualNorm::Relative).unwrap();
    println!(
        "verify_family: {} (max relative residual {:.2e} over {} points)",
        if report.passed { "pass" } else { "fail" },
        report.max_rel_residual(),
        report.evaluated_points
    );

    // the quotient z1/z2, defined wherever z2 stays away from zero
    let one = Complex64::new(1.0, 0.0);
    let pair = PolyPair::new(
        Poly::new(vec![(vec![1, 0], one)]).unwrap(),
        Poly::new(vec![(vec![0, 1], one)]).unwrap(),
    )
    .unwrap();
    let quotient = quotient_field(&family, &pair, ACCEPTANCE_GUARD).unwrap();

    let hm = harmonic_morphism_check(&quotient, &sphere, &plan, 1e-6).unwrap();
    println!(
        "harmonic morphism check on phi_1/phi_2: {}",
        if hm.passed { "pass" } else { "fail" }
    );
    for identity in &hm.identities {
        println!("  {:<40} max residual {:.2e}", identity.name, identity.max_abs);
    }
    println!(
        "({} points evaluated, {} excluded by the |denominator| >= {} guard)",
        hm.evaluated_points, hm.excluded_points, ACCEPTANCE_GUARD
    );
}
