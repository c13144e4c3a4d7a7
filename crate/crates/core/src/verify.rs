//! The residual engine: defining identities of eigenfunctions and families,
//! polar-form identities, modulus diagnostics and the structure of the
//! conformality matrix A.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartedManifold, SamplingPlan};
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::linalg;
use crate::ops::ChartGeometry;
use crate::report::{ResidualNorm, ResidualStat, VerificationReport};

/// A family of complex fields together with the claimed eigendata:
/// `tau(phi_i) = lambda_i phi_i` and `kappa(phi_i, phi_j) = A_ij phi_i phi_j`.
#[derive(Clone, Debug)]
pub struct EigenFamilySpec {
    pub fields: Vec<ComplexField>,
    pub lambda: Vec<Complex64>,
    pub a: Vec<Vec<Complex64>>,
}

impl EigenFamilySpec {
    pub fn new(
        fields: Vec<ComplexField>,
        lambda: Vec<Complex64>,
        a: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let k = fields.len();
        if k == 0 {
            return Err(GeometryError::InvalidArgument(
                "eigenfamily needs at least one field".into(),
            ));
        }
        if lambda.len() != k || a.len() != k || a.iter().any(|row| row.len() != k) {
            return Err(GeometryError::InvalidArgument(format!(
                "eigendata shape mismatch: {} fields, {} lambdas, {}x{} A",
                k,
                lambda.len(),
                a.len(),
                a.first().map_or(0, |r| r.len())
            )));
        }
        let scale = a
            .iter()
            .flatten()
            .fold(0.0f64, |m, z| m.max(z.norm()))
            .max(1.0);
        #[allow(clippy::needless_range_loop)]
        for i in 0..k {
            for j in 0..i {
                if (a[i][j] - a[j][i]).norm() > 1e-12 * scale {
                    return Err(GeometryError::InvalidArgument(format!(
                        "A is not symmetric: A[{i}][{j}] = {} vs A[{j}][{i}] = {}",
                        a[i][j], a[j][i]
                    )));
                }
            }
        }
        Ok(EigenFamilySpec { fields, lambda, a })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// `lambda_i = A_ii` for all i, within `tol * (1 + |A_ii|)`.
    pub fn is_lambda_diagonal(&self, tol: f64) -> bool {
        self.lambda
            .iter()
            .zip(self.a.iter().enumerate().map(|(i, row)| row[i]))
            .all(|(&l, aii)| (l - aii).norm() <= tol * (1.0 + aii.norm()))
    }

    /// For a uniform `(lambda, mu)` family (all lambdas equal, all A entries
    /// equal) returns the pair; otherwise reports what differs.
    pub fn uniform_eigendata(&self, tol: f64) -> std::result::Result<(Complex64, Complex64), String> {
        let l0 = self.lambda[0];
        for (i, &l) in self.lambda.iter().enumerate() {
            if (l - l0).norm() > tol * (1.0 + l0.norm()) {
                return Err(format!("lambda_{} = {} differs from lambda_1 = {}", i + 1, l, l0));
            }
        }
        let mu = self.a[0][0];
        for (i, row) in self.a.iter().enumerate() {
            for (j, &aij) in row.iter().enumerate() {
                if (aij - mu).norm() > tol * (1.0 + mu.norm()) {
                    return Err(format!(
                        "A[{}][{}] = {} differs from A[1][1] = {}",
                        i + 1,
                        j + 1,
                        aij,
                        mu
                    ));
                }
            }
        }
        Ok((l0, mu))
    }

    /// Replace every field by `e^{i theta} phi_i` (used by phase-invariance
    /// tests and base-point normalization).
    pub fn rotated(&self, theta: f64) -> EigenFamilySpec {
        let phase = Complex64::from_polar(1.0, theta);
        EigenFamilySpec {
            fields: self.fields.iter().map(|f| f.scale(phase)).collect(),
            lambda: self.lambda.clone(),
            a: self.a.clone(),
        }
    }
}

/// Check `tau(phi_i) = lambda_i phi_i` and `kappa(phi_i, phi_j) = A_ij
/// phi_i phi_j` for all i <= j at every sampled point of every chart.
pub fn verify_family(
    m: &ChartedManifold,
    fam: &EigenFamilySpec,
    plan: &SamplingPlan,
    tol: f64,
    norm: ResidualNorm,
) -> Result<VerificationReport> {
    let k = fam.len();
    let mut tau_stats: Vec<ResidualStat> = (0..k)
        .map(|i| {
            ResidualStat::new(format!(
                "tau({lbl}) = lambda_{n}*{lbl}",
                lbl = fam.fields[i].label(),
                n = i + 1
            ))
        })
        .collect();
    let mut kappa_stats: Vec<ResidualStat> = Vec::new();
    for i in 0..k {
        for j in i..k {
            kappa_stats.push(ResidualStat::new(format!(
                "kappa({},{}) = A_{}{}*{}*{}",
                fam.fields[i].label(),
                fam.fields[j].label(),
                i + 1,
                j + 1,
                fam.fields[i].label(),
                fam.fields[j].label()
            )));
        }
    }

    let mut evaluated = 0usize;
    let mut excluded = 0usize;
    for (ci, chart) in m.charts.iter().enumerate() {
        let points = chart.sample(plan)?;
        for p in &points {
            let geo = match ChartGeometry::at(chart, p) {
                Ok(g) => g,
                Err(_) => {
                    excluded += 1;
                    continue;
                }
            };
            let xs = chart.coordinate_jets(p);
            let mut datas = Vec::with_capacity(k);
            let mut ok = true;
            for f in &fam.fields {
                match f.eval(ci, &xs) {
                    Some(j) => datas.push(j.data()),
                    None => {
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
            for i in 0..k {
                let lhs = geo.tau(&datas[i]);
                let rhs = fam.lambda[i] * datas[i].value;
                tau_stats[i].record((lhs - rhs).norm(), rhs.norm(), ci, p);
            }
            let mut idx = 0;
            for i in 0..k {
                for j in i..k {
                    let lhs = geo.kappa(&datas[i], &datas[j]);
                    let rhs = fam.a[i][j] * datas[i].value * datas[j].value;
                    kappa_stats[idx].record((lhs - rhs).norm(), rhs.norm(), ci, p);
                    idx += 1;
                }
            }
        }
    }

    let total = evaluated + excluded;
    let mut notes = Vec::new();
    let valid = total > 0 && (excluded as f64) <= 0.05 * total as f64;
    if !valid {
        notes.push(format!(
            "{excluded} of {total} points were excluded; verdict not meaningful"
        ));
    }
    let identities = tau_stats
        .into_iter()
        .chain(kappa_stats)
        .map(|s| s.into_report(tol, norm))
        .collect();
    Ok(VerificationReport::from_identities(
        "verify_family",
        identities,
        evaluated,
        excluded,
        notes,
        valid,
    ))
}

/// Structural analysis of the conformality matrix A.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AStructureReport {
    pub k: usize,
    /// Largest imaginary part found in A.
    pub max_imag: f64,
    /// Eigenvalues of the real part, ascending.
    pub eigenvalues: Vec<f64>,
    pub is_real_neg_semidefinite: bool,
    /// Non-degenerate: `|det A| > tol * ||A||^k`.
    pub is_reduced: bool,
    /// Basis of the (numerical) kernel, integer-rescaled when entries snap
    /// to small rationals.
    pub kernel: Vec<Vec<f64>>,
}

/// Eigenvalue test of the claimed A-matrix: negative semidefiniteness,
/// reducedness (non-degeneracy) and a kernel basis when degenerate.
pub fn check_a_structure(a: &[Vec<Complex64>], tol: f64) -> Result<AStructureReport> {
    let k = a.len();
    if k == 0 || a.iter().any(|row| row.len() != k) {
        return Err(GeometryError::InvalidArgument("A must be square".into()));
    }
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, z| m.max(z.norm()))
        .max(1.0);
    let mut max_asym = 0.0f64;
    let mut max_imag = 0.0f64;
    let mut re = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            max_asym = max_asym.max((a[i][j] - a[j][i]).norm());
            max_imag = max_imag.max(a[i][j].im.abs());
            re[i * k + j] = a[i][j].re;
        }
    }
    if max_asym > 1e-9 * scale {
        return Err(GeometryError::InvalidArgument(format!(
            "A must be symmetric (max asymmetry {max_asym:.3e})"
        )));
    }
    let (vals, vecs) = linalg::sym_eigen(k, &re);
    let is_real = max_imag <= tol * scale;
    let semidefinite = is_real && vals.iter().all(|&v| v <= tol * scale);
    let det: f64 = vals.iter().product();
    let norm_inf = re.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let is_reduced = det.abs() > tol * norm_inf.powi(k as i32);
    let kernel = vals
        .iter()
        .zip(&vecs)
        .filter(|(v, _)| v.abs() <= tol * scale)
        .map(|(_, vec)| integer_rescale(vec))
        .collect();
    Ok(AStructureReport {
        k,
        max_imag,
        eigenvalues: vals,
        is_real_neg_semidefinite: semidefinite,
        is_reduced,
        kernel,
    })
}

/// Snap a kernel vector to the smallest integer form when its entries are
/// within 1e-6 of rationals with denominator <= 12; otherwise return it
/// normalized. The first nonzero entry is made positive.
fn integer_rescale(v: &[f64]) -> Vec<f64> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return v.to_vec();
    }
    let w: Vec<f64> = v.iter().map(|x| x / max).collect();
    for den in 1..=12u32 {
        let scaled: Vec<f64> = w.iter().map(|x| x * den as f64).collect();
        if scaled.iter().all(|x| (x - x.round()).abs() <= 1e-6 * den as f64) {
            let ints: Vec<i64> = scaled.iter().map(|x| x.round() as i64).collect();
            let g = ints
                .iter()
                .fold(0i64, |acc, &x| gcd(acc, x.abs()))
                .max(1);
            let mut out: Vec<f64> = ints.iter().map(|&x| (x / g) as f64).collect();
            fix_sign(&mut out);
            return out;
        }
    }
    let mut out = w;
    fix_sign(&mut out);
    out
}

fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A confirmed multiplicative dependency `prod phi_i^{alpha_i} = const`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicativeRelation {
    pub alpha: Vec<f64>,
    pub max_residual: f64,
    pub mean_residual: f64,
}

/// For a lambda-diagonal family with degenerate A, extract a kernel vector
/// `alpha` and confirm `sum alpha_i grad(phi_i)/phi_i = 0` at the sampled
/// points. Returns `None` for non-degenerate A.
pub fn multiplicative_relation(
    fam: &EigenFamilySpec,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<Option<MultiplicativeRelation>> {
    let k = fam.len();
    for i in 0..k {
        let aii = fam.a[i][i];
        if (fam.lambda[i] - aii).norm() > tol * (1.0 + aii.norm()) {
            return Err(GeometryError::NotLambdaDiagonal {
                index: i + 1,
                lambda: fam.lambda[i].to_string(),
                a_ii: aii.to_string(),
            });
        }
    }
    let structure = check_a_structure(&fam.a, tol)?;
    if structure.is_reduced || structure.kernel.is_empty() {
        return Ok(None);
    }
    let alpha = structure.kernel[0].clone();

    let mut max_res = 0.0f64;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for (ci, chart) in m.charts.iter().enumerate() {
        for p in chart.sample(plan)? {
            let geo = ChartGeometry::at(chart, &p)?;
            let xs = chart.coordinate_jets(&p);
            let n = chart.dim();
            let mut combo = vec![Complex64::new(0.0, 0.0); n];
            for (i, f) in fam.fields.iter().enumerate() {
                let j = f.eval(ci, &xs).ok_or_else(|| GeometryError::VanishingField {
                    label: f.label().to_string(),
                    point: p.clone(),
                })?;
                let data = j.data();
                if data.value.norm() <= 1e-9 {
                    return Err(GeometryError::VanishingField {
                        label: f.label().to_string(),
                        point: p.clone(),
                    });
                }
                let log = data.log_data();
                for (c, g) in combo.iter_mut().zip(geo.grad_contravariant(&log)) {
                    *c += alpha[i] * g;
                }
            }
            let res = combo.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            max_res = max_res.max(res);
            sum += res;
            count += 1;
        }
    }
    Ok(Some(MultiplicativeRelation {
        alpha,
        max_residual: max_res,
        mean_residual: if count > 0 { sum / count as f64 } else { 0.0 },
    }))
}

/// The four polar-form identities of a nonvanishing `(lambda, mu)`
/// eigenfunction `phi = e^{i theta} |phi|`, all computed branch-free from
/// `grad(phi)/phi = grad(ln|phi|) + i grad(theta)`:
///
/// 1. `tau(theta) = 0`
/// 2. `tau(ln|phi|) = lambda - mu`
/// 3. `kappa(theta, |phi|) = 0`
/// 4. `kappa(ln|phi|, ln|phi|) = kappa(theta, theta) + mu`
///
/// Points with `|phi| <= min_modulus` are excluded; more than half excluded
/// invalidates the report.
pub fn polar_checks(
    phi: &ComplexField,
    lambda: f64,
    mu: f64,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    tol: f64,
    min_modulus: f64,
) -> Result<VerificationReport> {
    let mut s1 = ResidualStat::new("tau(theta) = 0");
    let mut s2 = ResidualStat::new("tau(ln|phi|) = lambda - mu");
    let mut s3 = ResidualStat::new("kappa(theta,|phi|) = 0");
    let mut s4 = ResidualStat::new("kappa(ln|phi|,ln|phi|) = kappa(theta,theta) + mu");
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
            let modulus = data.value.norm();
            if modulus <= min_modulus {
                excluded += 1;
                continue;
            }
            evaluated += 1;
            let log = data.log_data();
            let tau_log = geo.tau(&log);
            let grad_l: Vec<f64> = log.grad.iter().map(|z| z.re).collect();
            let grad_t: Vec<f64> = log.grad.iter().map(|z| z.im).collect();
            let k_tt = geo.pair_real(&grad_t, &grad_t);
            let k_ll = geo.pair_real(&grad_l, &grad_l);
            let k_tl = geo.pair_real(&grad_t, &grad_l);
            s1.record(tau_log.im.abs(), 0.0, ci, &p);
            s2.record((tau_log.re - (lambda - mu)).abs(), (lambda - mu).abs(), ci, &p);
            s3.record((modulus * k_tl).abs(), 0.0, ci, &p);
            s4.record((k_ll - (k_tt + mu)).abs(), (k_tt + mu).abs(), ci, &p);
        }
    }
    let total = evaluated + excluded;
    let mut notes = Vec::new();
    let valid = total > 0 && (excluded as f64) <= 0.5 * total as f64;
    if !valid {
        notes.push(format!(
            "{excluded} of {total} points excluded (|phi| <= {min_modulus}); report invalid"
        ));
    }
    let identities = vec![
        s1.into_report(tol, ResidualNorm::Relative),
        s2.into_report(tol, ResidualNorm::Relative),
        s3.into_report(tol, ResidualNorm::Relative),
        s4.into_report(tol, ResidualNorm::Relative),
    ];
    Ok(VerificationReport::from_identities(
        "polar_checks",
        identities,
        evaluated,
        excluded,
        notes,
        valid,
    ))
}

/// Observed modulus range of a field over the sample sweep; constancy of
/// `|phi|` is the numerical detector for `lambda = mu`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusDiagnostics {
    pub modulus_constant: bool,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub points: usize,
}

pub fn modulus_diagnostics(
    phi: &ComplexField,
    m: &ChartedManifold,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<ModulusDiagnostics> {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut count = 0usize;
    let mut excluded = 0usize;
    for (ci, chart) in m.charts.iter().enumerate() {
        for p in chart.sample(plan)? {
            match phi.value(ci, &p) {
                Some(v) => {
                    let r = v.norm();
                    min = min.min(r);
                    max = max.max(r);
                    count += 1;
                }
                None => excluded += 1,
            }
        }
    }
    if count == 0 {
        return Err(GeometryError::TooManyExclusions {
            excluded,
            total: excluded,
        });
    }
    Ok(ModulusDiagnostics {
        modulus_constant: (max - min) <= tol * (1.0 + max),
        min_modulus: min,
        max_modulus: max,
        points: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_rescale_snaps_small_rationals() {
        let n = (5.0f64).sqrt();
        assert_eq!(integer_rescale(&[2.0 / n, -1.0 / n]), vec![2.0, -1.0]);
        assert_eq!(integer_rescale(&[-0.5, -0.5, 0.5]), vec![1.0, 1.0, -1.0]);
        // irrational ratio: left normalized, sign fixed
        let v = integer_rescale(&[-std::f64::consts::SQRT_2, 1.0]);
        assert!(v[0] > 0.0);
    }

    #[test]
    fn a_structure_of_negative_definite_matrix() {
        let w = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let a = vec![
            vec![Complex64::new(-w, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(-w, 0.0)],
        ];
        let s = check_a_structure(&a, 1e-9).unwrap();
        assert!(s.is_real_neg_semidefinite);
        assert!(s.is_reduced);
        assert!(s.kernel.is_empty());
    }

    #[test]
    fn a_structure_of_rank_one_matrix() {
        // -w w^T with w = (1,2): semidefinite, degenerate, kernel (2,-1)
        let a = vec![
            vec![Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 0.0)],
            vec![Complex64::new(-2.0, 0.0), Complex64::new(-4.0, 0.0)],
        ];
        let s = check_a_structure(&a, 1e-9).unwrap();
        assert!(s.is_real_neg_semidefinite);
        assert!(!s.is_reduced);
        assert_eq!(s.kernel.len(), 1);
        assert_eq!(s.kernel[0], vec![2.0, -1.0]);
    }

    #[test]
    fn a_structure_flags_positive_eigenvalue() {
        let a = vec![
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
        ];
        let s = check_a_structure(&a, 1e-9).unwrap();
        assert!(!s.is_real_neg_semidefinite);
    }
}
