//! Building new eigenfunctions from old: monomial composition with exactly
//! predicted eigenvalues, and polynomial quotients of uniform families.
//!
//! Composing an eigenfamily with a multi-homogeneous map of degree vector
//! `d` produces a `(lambda~, mu~)`-eigenfunction with
//!
//! ```text
//! lambda~ = sum_i d_i (lambda_i - A_ii) + sum_ij d_i d_j A_ij
//! mu~     = sum_ij d_i d_j A_ij
//! ```
//!
//! and both sums vanishing is exactly the harmonic-morphism case.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartedManifold, SamplingPlan};
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::jet::CJet2;
use crate::ops::ChartGeometry;
use crate::report::{ResidualNorm, ResidualStat, VerificationReport};
use crate::verify::EigenFamilySpec;

/// Modulus floor used when constructing fields with denominators.
pub const CONSTRUCTION_GUARD: f64 = 1e-3;
/// Tighter floor used when a construction is being judged numerically.
pub const ACCEPTANCE_GUARD: f64 = 0.1;

/// Exponent vector of a monomial composition; negative entries divide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialDegree(pub Vec<i32>);

impl MonomialDegree {
    pub fn new(d: Vec<i32>) -> Result<Self> {
        if d.is_empty() || d.iter().all(|&x| x == 0) {
            return Err(GeometryError::InvalidArgument(
                "monomial degree vector must be nonzero".into(),
            ));
        }
        Ok(MonomialDegree(d))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Predicted eigendata of a composed field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComposedEigenvalues {
    pub lambda: Complex64,
    pub mu: Complex64,
    /// Both defining sums vanish: the composition is a harmonic morphism.
    pub harmonic_morphism: bool,
}

/// Evaluate the composition formulas exactly from the family eigendata.
pub fn predict_composed_eigenvalues(
    fam: &EigenFamilySpec,
    d: &MonomialDegree,
) -> Result<ComposedEigenvalues> {
    let k = fam.len();
    if d.len() != k {
        return Err(GeometryError::InvalidArgument(format!(
            "degree vector has length {}, family has {k} fields",
            d.len()
        )));
    }
    let mut linear = Complex64::new(0.0, 0.0); // sum_i d_i (lambda_i - A_ii)
    let mut quad = Complex64::new(0.0, 0.0); // sum_ij d_i d_j A_ij
    for i in 0..k {
        let di = f64::from(d.0[i]);
        linear += di * (fam.lambda[i] - fam.a[i][i]);
        for j in 0..k {
            quad += di * f64::from(d.0[j]) * fam.a[i][j];
        }
    }
    let scale = fam
        .a
        .iter()
        .flatten()
        .chain(fam.lambda.iter())
        .fold(0.0f64, |m, z| m.max(z.norm()))
        .max(1.0);
    let eps = 1e-12 * scale * d.0.iter().map(|&x| f64::from(x * x)).sum::<f64>().max(1.0);
    Ok(ComposedEigenvalues {
        lambda: linear + quad,
        mu: quad,
        harmonic_morphism: quad.norm() <= eps && linear.norm() <= eps,
    })
}

/// The monomial composition `prod phi_i^{d_i}` with its predicted
/// eigenvalues attached. Negative exponents exclude points where the base
/// modulus falls below `guard`.
pub fn compose_monomial(
    fam: &EigenFamilySpec,
    d: &MonomialDegree,
    guard: f64,
) -> Result<(ComplexField, ComposedEigenvalues)> {
    let predicted = predict_composed_eigenvalues(fam, d)?;
    let mut field: Option<ComplexField> = None;
    for (f, &di) in fam.fields.iter().zip(&d.0) {
        if di == 0 {
            continue;
        }
        let factor = if di == 1 { f.clone() } else { f.powi(di, guard) };
        field = Some(match field {
            None => factor,
            Some(acc) => acc.product(&factor),
        });
    }
    let field = field.expect("degree vector is nonzero");
    Ok((field, predicted))
}

/// Package a composed field as a one-element family with its predicted
/// eigendata, ready for `verify_family`.
pub fn composed_family(field: ComplexField, eig: ComposedEigenvalues) -> EigenFamilySpec {
    EigenFamilySpec::new(vec![field], vec![eig.lambda], vec![vec![eig.mu]])
        .expect("one-field family is always well-formed")
}

/// A multivariate complex polynomial as a list of (exponents, coefficient)
/// terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub terms: Vec<(Vec<u32>, [f64; 2])>,
}

impl Poly {
    pub fn new(terms: Vec<(Vec<u32>, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(GeometryError::InvalidArgument(
                "polynomial must have at least one term".into(),
            ));
        }
        let arity = terms[0].0.len();
        if terms.iter().any(|(e, _)| e.len() != arity) {
            return Err(GeometryError::InvalidArgument(
                "all polynomial terms must use the same number of variables".into(),
            ));
        }
        Ok(Poly {
            terms: terms
                .into_iter()
                .map(|(e, c)| (e, [c.re, c.im]))
                .collect(),
        })
    }

    pub fn arity(&self) -> usize {
        self.terms[0].0.len()
    }

    /// Total degree when every term agrees, i.e. the polynomial is
    /// homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d: u32 = self.terms[0].0.iter().sum();
        self.terms
            .iter()
            .all(|(e, _)| e.iter().sum::<u32>() == d)
            .then_some(d)
    }

    pub fn eval(&self, z: &[CJet2]) -> CJet2 {
        let n = z[0].dim();
        let mut acc = CJet2::constant(Complex64::new(0.0, 0.0), n);
        for (exps, c) in &self.terms {
            let mut term = CJet2::constant(Complex64::new(c[0], c[1]), n);
            for (zi, &e) in z.iter().zip(exps) {
                if e > 0 {
                    term = term * zi.powi(e as i32);
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn eval_values(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, c) in &self.terms {
            let mut term = Complex64::new(c[0], c[1]);
            for (zi, &e) in z.iter().zip(exps) {
                term *= zi.powu(e);
            }
            acc += term;
        }
        acc
    }

    fn label(&self, var: &str) -> String {
        self.terms
            .iter()
            .map(|(exps, c)| {
                let mono: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("{var}{}", i + 1)
                        } else {
                            format!("{var}{}^{e}", i + 1)
                        }
                    })
                    .collect();
                let coeff = Complex64::new(c[0], c[1]);
                if mono.is_empty() {
                    format!("({coeff})")
                } else if (coeff - Complex64::new(1.0, 0.0)).norm() < 1e-15 {
                    mono.join("*")
                } else {
                    format!("({coeff})*{}", mono.join("*"))
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Numerator and denominator for a quotient: linearly independent
/// homogeneous polynomials of the same positive degree.
#[derive(Clone, Debug)]
pub struct PolyPair {
    pub p: Poly,
    pub q: Poly,
}

impl PolyPair {
    pub fn new(p: Poly, q: Poly) -> Result<Self> {
        if p.arity() != q.arity() {
            return Err(GeometryError::InvalidArgument(
                "numerator and denominator must use the same variables".into(),
            ));
        }
        let dp = p.homogeneous_degree().ok_or_else(|| {
            GeometryError::InvalidArgument("numerator is not homogeneous".into())
        })?;
        let dq = q.homogeneous_degree().ok_or_else(|| {
            GeometryError::InvalidArgument("denominator is not homogeneous".into())
        })?;
        if dp != dq || dp == 0 {
            return Err(GeometryError::InvalidArgument(format!(
                "polynomials must share the same positive degree (got {dp} and {dq})"
            )));
        }
        if !linearly_independent(&p, &q) {
            return Err(GeometryError::InvalidArgument(
                "numerator and denominator are linearly dependent".into(),
            ));
        }
        Ok(PolyPair { p, q })
    }
}

fn linearly_independent(p: &Poly, q: &Poly) -> bool {
    // union of monomials, then a 2 x m rank test by 2x2 minors
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for (e, _) in p.terms.iter().chain(q.terms.iter()) {
        if !basis.contains(e) {
            basis.push(e.clone());
        }
    }
    let coeff = |poly: &Poly, e: &Vec<u32>| -> Complex64 {
        poly.terms
            .iter()
            .filter(|(te, _)| te == e)
            .map(|(_, c)| Complex64::new(c[0], c[1]))
            .sum()
    };
    let pv: Vec<Complex64> = basis.iter().map(|e| coeff(p, e)).collect();
    let qv: Vec<Complex64> = basis.iter().map(|e| coeff(q, e)).collect();
    let scale = pv
        .iter()
        .chain(&qv)
        .fold(0.0f64, |m, z| m.max(z.norm()))
        .max(1e-300);
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if (pv[i] * qv[j] - pv[j] * qv[i]).norm() > 1e-12 * scale * scale {
                return true;
            }
        }
    }
    false
}

/// The quotient field `P(phi_1, ..., phi_k) / Q(phi_1, ..., phi_k)` of a
/// uniform `(lambda, mu)`-eigenfamily, guarded by `|Q(phi)| >= guard`.
pub fn quotient_field(fam: &EigenFamilySpec, pair: &PolyPair, guard: f64) -> Result<ComplexField> {
    fam.uniform_eigendata(1e-9)
        .map_err(|reason| GeometryError::NotUniformFamily { reason })?;
    if pair.p.arity() != fam.len() {
        return Err(GeometryError::InvalidArgument(format!(
            "polynomials use {} variables but the family has {} fields",
            pair.p.arity(),
            fam.len()
        )));
    }
    let fields = fam.fields.clone();
    let p = pair.p.clone();
    let q = pair.q.clone();
    let label = format!("({})/({})", p.label("phi"), q.label("phi"));
    Ok(ComplexField::per_chart(label, move |ci, xs| {
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            values.push(f.eval(ci, xs)?);
        }
        let den = q.eval(&values);
        if den.value().norm() < guard {
            return None;
        }
        Some(p.eval(&values) / den)
    }))
}

/// Check `tau(f) = 0` and `kappa(f, f) = 0` over the sample sweep; the
/// defining identities of a complex-valued harmonic morphism.
pub fn harmonic_morphism_check(
    f: &ComplexField,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<VerificationReport> {
    let mut s_tau = ResidualStat::new(format!("tau({}) = 0", f.label()));
    let mut s_kappa = ResidualStat::new(format!("kappa({0},{0}) = 0", f.label()));
    let mut evaluated = 0usize;
    let mut excluded = 0usize;
    let mut max_grad = 0.0f64;
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
            let data = match f.eval(ci, &xs) {
                Some(j) => j.data(),
                None => {
                    excluded += 1;
                    continue;
                }
            };
            evaluated += 1;
            s_tau.record(geo.tau(&data).norm(), 0.0, ci, &p);
            s_kappa.record(geo.kappa(&data, &data).norm(), 0.0, ci, &p);
            max_grad = max_grad.max(data.grad.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    let total = evaluated + excluded;
    let mut notes = Vec::new();
    if max_grad <= 1e-12 && evaluated > 0 {
        notes.push("constant".into());
    }
    let valid = total > 0 && (excluded as f64) <= 0.5 * total as f64;
    if !valid {
        notes.push(format!(
            "{excluded} of {total} points excluded by the denominator guard"
        ));
    }
    let identities = vec![
        s_tau.into_report(tol, ResidualNorm::Absolute),
        s_kappa.into_report(tol, ResidualNorm::Absolute),
    ];
    Ok(VerificationReport::from_identities(
        "harmonic_morphism_check",
        identities,
        evaluated,
        excluded,
        notes,
        valid,
    ))
}

/// Fraction of sampled points a guarded field excludes; errors when the
/// guard eats more than half the sweep.
pub fn check_guard_exclusions(
    f: &ComplexField,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    guard: f64,
) -> Result<f64> {
    let mut excluded = 0usize;
    let mut total = 0usize;
    for (ci, chart) in m.charts.iter().enumerate() {
        for p in chart.sample(plan)? {
            total += 1;
            if f.value(ci, &p).is_none() {
                excluded += 1;
            }
        }
    }
    if excluded * 2 > total {
        return Err(GeometryError::DenominatorTooSmall {
            guard,
            excluded,
            total,
        });
    }
    Ok(excluded as f64 / total.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{torus_family, Lattice};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn prediction_collapses_for_unit_vector() {
        let l = Lattice::standard(2);
        let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let e = predict_composed_eigenvalues(&fam, &MonomialDegree::new(vec![1, 0]).unwrap())
            .unwrap();
        assert_eq!(e.lambda, fam.lambda[0]);
        assert_eq!(e.mu, fam.a[0][0]);
    }

    #[test]
    fn sasakian_2_minus1_is_harmonic_morphism() {
        // w = (1,2): lambda = (-3,-8), A = -w w^T; d = (2,-1) gives (0,0).
        let lambda = vec![c(-3.0), c(-8.0)];
        let a = vec![vec![c(-1.0), c(-2.0)], vec![c(-2.0), c(-4.0)]];
        let fam = EigenFamilySpec::new(
            vec![
                ComplexField::constant(c(1.0)),
                ComplexField::constant(c(1.0)),
            ],
            lambda,
            a,
        )
        .unwrap();
        let e = predict_composed_eigenvalues(&fam, &MonomialDegree::new(vec![2, -1]).unwrap())
            .unwrap();
        assert!(e.lambda.norm() < 1e-12);
        assert!(e.mu.norm() < 1e-12);
        assert!(e.harmonic_morphism);
        // flag invariant under d -> c d
        let e2 = predict_composed_eigenvalues(&fam, &MonomialDegree::new(vec![6, -3]).unwrap())
            .unwrap();
        assert!(e2.harmonic_morphism);
    }

    #[test]
    fn torus_prediction_matches_gram_expansion() {
        let l = Lattice::standard(2);
        let k1 = vec![1.0, 0.0];
        let k2 = vec![0.0, 1.0];
        let fam = torus_family(&l, &[k1, k2]).unwrap();
        for d in [[1, 1], [2, -1], [3, 2], [-1, 2]] {
            let e = predict_composed_eigenvalues(
                &fam,
                &MonomialDegree::new(d.to_vec()).unwrap(),
            )
            .unwrap();
            let combo = [f64::from(d[0]), f64::from(d[1])];
            let norm2 = combo[0] * combo[0] + combo[1] * combo[1];
            let expect = -4.0 * std::f64::consts::PI.powi(2) * norm2;
            assert!((e.mu.re - expect).abs() < 1e-9);
            assert!((e.lambda - e.mu).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_degree_vector_rejected() {
        assert!(MonomialDegree::new(vec![0, 0]).is_err());
        assert!(MonomialDegree::new(vec![]).is_err());
    }

    #[test]
    fn poly_pair_validation() {
        let z1 = Poly::new(vec![(vec![1, 0], c(1.0))]).unwrap();
        let z2 = Poly::new(vec![(vec![0, 1], c(1.0))]).unwrap();
        assert!(PolyPair::new(z1.clone(), z2.clone()).is_ok());
        // P = Q rejected: linearly dependent
        assert!(PolyPair::new(z1.clone(), z1.clone()).is_err());
        // scalar multiples rejected too
        let z1_scaled = Poly::new(vec![(vec![1, 0], c(2.5))]).unwrap();
        assert!(PolyPair::new(z1.clone(), z1_scaled).is_err());
        // mixed degrees rejected
        let quad = Poly::new(vec![(vec![2, 0], c(1.0))]).unwrap();
        assert!(PolyPair::new(z1.clone(), quad).is_err());
        // inhomogeneous rejected
        let inhom = Poly::new(vec![(vec![1, 0], c(1.0)), (vec![2, 0], c(1.0))]).unwrap();
        assert!(PolyPair::new(inhom, z2).is_err());
    }

    #[test]
    fn quotient_requires_uniform_family() {
        let l = Lattice::standard(2);
        // lambdas differ: not a uniform (lambda, mu) family
        let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let pair = PolyPair::new(
            Poly::new(vec![(vec![1, 0], c(1.0))]).unwrap(),
            Poly::new(vec![(vec![0, 1], c(1.0))]).unwrap(),
        )
        .unwrap();
        match quotient_field(&fam, &pair, CONSTRUCTION_GUARD) {
            Err(GeometryError::NotUniformFamily { .. }) => {}
            other => panic!("expected uniformity rejection, got {other:?}"),
        }
    }

    #[test]
    fn character_composition_closes_over_the_dual_lattice() {
        use crate::manifolds::{character_field, flat_torus};
        let l = Lattice::standard(2);
        let m = flat_torus(&l);
        let fam = torus_family(&l, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let d = MonomialDegree::new(vec![1, 1]).unwrap();
        let (composed, eig) = compose_monomial(&fam, &d, CONSTRUCTION_GUARD).unwrap();
        assert!((eig.lambda.re + 8.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9);
        let target = character_field(&[1.0, 1.0]);
        for p in m.charts[0]
            .sample(&SamplingPlan::new(50, 17))
            .unwrap()
        {
            let a = composed.value(0, &p).unwrap();
            let b = target.value(0, &p).unwrap();
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn torus_character_is_not_a_harmonic_morphism() {
        use crate::manifolds::flat_torus;
        let l = Lattice::standard(2);
        let m = flat_torus(&l);
        let fam = torus_family(&l, &[vec![1.0, 0.0]]).unwrap();
        let report =
            harmonic_morphism_check(&fam.fields[0], &m, &SamplingPlan::new(100, 3), 1e-6)
                .unwrap();
        assert!(!report.passed);
        // kappa(f, f) = -4 pi^2 f^2 has modulus 4 pi^2 everywhere
        let k = report.identity("kappa(f_(1,0),f_(1,0)) = 0").unwrap();
        assert!((k.max_abs - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn constant_field_is_flagged() {
        use crate::manifolds::flat_torus;
        let m = flat_torus(&Lattice::standard(2));
        let f = ComplexField::constant(c(2.0));
        let report = harmonic_morphism_check(&f, &m, &SamplingPlan::new(20, 0), 1e-9).unwrap();
        assert!(report.passed);
        assert!(report.notes.iter().any(|n| n == "constant"));
    }
}
