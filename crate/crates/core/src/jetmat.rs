//! Matrix operations carried out in jet arithmetic, so that derivatives of
//! inverses and determinants propagate exactly. Used by the divergence-form
//! Laplacian oracle and the mapping-torus volume-density check.

use crate::error::{GeometryError, Result};
use crate::jet::Jet2;

/// Inverse of a jet-valued matrix by Gauss-Jordan elimination, pivoting on
/// the value part.
pub fn jet_inverse(n: usize, a: &[Jet2]) -> Result<Vec<Jet2>> {
    assert_eq!(a.len(), n * n);
    let dim = a[0].dim();
    let mut m = a.to_vec();
    let mut inv: Vec<Jet2> = (0..n * n)
        .map(|idx| Jet2::constant(if idx % (n + 1) == 0 { 1.0 } else { 0.0 }, dim))
        .collect();
    let scale = a
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.value().abs()))
        .max(1.0);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].value().abs() > m[piv * n + col].value().abs() {
                piv = r;
            }
        }
        if m[piv * n + col].value().abs() < 1e-14 * scale {
            return Err(GeometryError::Singular {
                context: "inverting a jet-valued matrix".into(),
            });
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
                inv.swap(col * n + j, piv * n + j);
            }
        }
        let d = m[col * n + col].recip();
        for j in 0..n {
            m[col * n + j] = m[col * n + j] * d;
            inv[col * n + j] = inv[col * n + j] * d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f.value() != 0.0 || f.grad_vec().iter().any(|&g| g != 0.0) {
                for j in 0..n {
                    m[r * n + j] = m[r * n + j] - f * m[col * n + j];
                    inv[r * n + j] = inv[r * n + j] - f * inv[col * n + j];
                }
            }
        }
    }
    Ok(inv)
}

/// Determinant of a jet-valued matrix: cofactor expansion for n <= 4,
/// elimination with value-pivoting beyond.
pub fn jet_det(n: usize, a: &[Jet2]) -> Jet2 {
    assert_eq!(a.len(), n * n);
    if n <= 4 {
        return cofactor_det(n, a);
    }
    let dim = a[0].dim();
    let mut m = a.to_vec();
    let mut d = Jet2::constant(1.0, dim);
    let mut sign = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].value().abs() > m[piv * n + col].value().abs() {
                piv = r;
            }
        }
        if m[piv * n + col].value() == 0.0 {
            return Jet2::constant(0.0, dim);
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            sign = -sign;
        }
        let p = m[col * n + col];
        d = d * p;
        let pinv = p.recip();
        for r in col + 1..n {
            let f = m[r * n + col] * pinv;
            for j in col..n {
                m[r * n + j] = m[r * n + j] - f * m[col * n + j];
            }
        }
    }
    d.scale(sign)
}

fn cofactor_det(n: usize, a: &[Jet2]) -> Jet2 {
    let dim = a[0].dim();
    match n {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            let mut acc = Jet2::constant(0.0, dim);
            let mut sign = 1.0;
            for col in 0..n {
                let minor: Vec<Jet2> = (1..n)
                    .flat_map(|r| {
                        (0..n)
                            .filter(move |&c| c != col)
                            .map(move |c| a[r * n + c])
                    })
                    .collect();
                let term = a[col] * cofactor_det(n - 1, &minor);
                acc = acc + term.scale(sign);
                sign = -sign;
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_jet(t: f64) -> Jet2 {
        Jet2::coordinate(t, 0, 1)
    }

    #[test]
    fn inverse_of_tdependent_matrix() {
        // M(t) = [[1 + t^2, t], [t, 2]]; check M * M^-1 = I with derivatives.
        let t = t_jet(0.6);
        let one = Jet2::constant(1.0, 1);
        let two = Jet2::constant(2.0, 1);
        let m = vec![one + t * t, t, t, two];
        let inv = jet_inverse(2, &m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Jet2::constant(0.0, 1);
                for k in 0..2 {
                    s = s + m[i * 2 + k] * inv[k * 2 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s.value() - expect).abs() < 1e-13);
                assert!(s.grad(0).abs() < 1e-12);
                assert!(s.hess(0, 0).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn determinant_derivative_of_unimodular_family() {
        // G(t) = diag(a, 1/a) with a = 1 + sin(t)/2: det = 1 identically.
        let t = t_jet(1.1);
        let a = t.sin().scale(0.5) + 1.0;
        let zero = Jet2::constant(0.0, 1);
        let g = vec![a, zero, zero, a.recip()];
        let d = jet_det(2, &g);
        assert!((d.value() - 1.0).abs() < 1e-14);
        assert!(d.grad(0).abs() < 1e-13);
    }

    #[test]
    fn determinant_derivative_matches_hand_value() {
        // G(t) = diag(1 + sin(t)/2, 1): d/dt ln det = cos(t)/(2 + sin(t)).
        let tv = 0.0;
        let t = t_jet(tv);
        let a = t.sin().scale(0.5) + 1.0;
        let zero = Jet2::constant(0.0, 1);
        let one = Jet2::constant(1.0, 1);
        let g = vec![a, zero, zero, one];
        let ld = jet_det(2, &g).ln();
        assert!((ld.grad(0) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn elimination_det_agrees_with_cofactor_at_dim_5() {
        // pseudo-random symmetric-ish 5x5 built from jets in one variable
        let t = t_jet(0.3);
        let mut m = Vec::new();
        for i in 0..5usize {
            for j in 0..5usize {
                let base = ((i * 7 + j * 3) % 5) as f64 * 0.25 + if i == j { 2.0 } else { 0.0 };
                let entry = Jet2::constant(base, 1) + t.sin().scale(0.1 * ((i + j) as f64));
                m.push(entry);
            }
        }
        let by_elim = jet_det(5, &m);
        let by_cof = cofactor_det(5, &m);
        assert!((by_elim.value() - by_cof.value()).abs() < 1e-10 * by_cof.value().abs());
        assert!((by_elim.grad(0) - by_cof.grad(0)).abs() < 1e-9);
    }
}
