//! Flat tori from lattices and their character eigenfamilies.
//!
//! For a lattice `Gamma` with basis matrix B (columns are generators) the
//! torus `R^n / Gamma` carries, for every dual vector k (integral pairing
//! with all generators), the character `f_k(x) = e^{2 pi i <k, x>}` with
//! `tau(f_k) = -4 pi^2 <k,k> f_k` and
//! `kappa(f_k, f_k') = -4 pi^2 <k,k'> f_k f_k'`.

use num_complex::Complex64;

use crate::chart::{Chart, ChartedManifold};
use crate::error::{GeometryError, Result};
use crate::field::ComplexField;
use crate::jet::CJet2;
use crate::linalg;
use crate::verify::EigenFamilySpec;

const TAU_COEFF: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Tolerance for the integral-pairing test of dual vectors; inputs are
/// expected exact-rational in practice.
pub const DUAL_PAIRING_TOL: f64 = 1e-9;

/// A full-rank lattice in R^n, stored as the basis matrix with generators
/// in the columns (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    n: usize,
    basis: Vec<f64>,
}

impl Lattice {
    pub fn new(n: usize, basis: Vec<f64>) -> Result<Self> {
        if n == 0 || basis.len() != n * n {
            return Err(GeometryError::InvalidArgument(format!(
                "lattice basis must be {n}x{n}"
            )));
        }
        if linalg::det(n, &basis).abs() <= 1e-12 {
            return Err(GeometryError::Singular {
                context: "constructing a lattice from a near-singular basis".into(),
            });
        }
        Ok(Lattice { n, basis })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut basis = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(GeometryError::InvalidArgument(
                    "lattice basis must be square".into(),
                ));
            }
            basis.extend_from_slice(r);
        }
        Lattice::new(n, basis)
    }

    /// Build from a list of generator vectors (they become the columns of
    /// the basis matrix).
    pub fn from_generators(gens: &[Vec<f64>]) -> Result<Self> {
        let n = gens.len();
        let mut basis = vec![0.0; n * n];
        for (j, g) in gens.iter().enumerate() {
            if g.len() != n {
                return Err(GeometryError::InvalidArgument(format!(
                    "generator {j} has length {}, expected {n}",
                    g.len()
                )));
            }
            for i in 0..n {
                basis[i * n + j] = g[i];
            }
        }
        Lattice::new(n, basis)
    }

    pub fn standard(n: usize) -> Self {
        Lattice::new(n, linalg::identity(n)).expect("identity basis")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The j-th generator (column of the basis matrix).
    pub fn generator(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.basis[i * self.n + j]).collect()
    }

    pub fn basis(&self) -> &[f64] {
        &self.basis
    }
}

/// The dual lattice: basis `B^{-T}`, whose columns pair integrally (in fact
/// as the Kronecker delta) with the input generators.
pub fn dual_lattice(l: &Lattice) -> Result<Lattice> {
    let n = l.n;
    let inv = linalg::invert(n, &l.basis).ok_or_else(|| GeometryError::Singular {
        context: "inverting the lattice basis for the dual".into(),
    })?;
    let mut dual = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dual[i * n + j] = inv[j * n + i];
        }
    }
    Lattice::new(n, dual)
}

/// Chart for the flat torus `R^n / Gamma`: the axis-aligned bounding box of
/// the fundamental parallelepiped in ambient coordinates, with the identity
/// metric. Characters are periodic, so pointwise identities see every value
/// class inside any full-dimensional box.
pub fn flat_torus(l: &Lattice) -> ChartedManifold {
    let n = l.n;
    let mut domain = Vec::with_capacity(n);
    for i in 0..n {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for j in 0..n {
            let b = l.basis[i * n + j];
            lo += b.min(0.0);
            hi += b.max(0.0);
        }
        domain.push((lo, hi));
    }
    ChartedManifold::single(
        format!("flat_torus_{n}d"),
        Chart::euclidean("fundamental_box", domain),
    )
}

/// A dual-lattice character `f_k(x) = e^{2 pi i <k, x>}`.
#[derive(Clone, Debug)]
pub struct TorusCharacter {
    pub k: Vec<f64>,
    pub field: ComplexField,
}

impl TorusCharacter {
    /// Build the character, verifying integral pairing against the lattice.
    pub fn new(l: &Lattice, k: Vec<f64>, k_index: usize) -> Result<Self> {
        if k.len() != l.n {
            return Err(GeometryError::InvalidArgument(format!(
                "dual vector has length {} but the lattice dimension is {}",
                k.len(),
                l.n
            )));
        }
        for j in 0..l.n {
            let gamma = l.generator(j);
            let pairing: f64 = k.iter().zip(&gamma).map(|(a, b)| a * b).sum();
            if (pairing - pairing.round()).abs() > DUAL_PAIRING_TOL {
                return Err(GeometryError::NonIntegralCharacter {
                    k_index,
                    basis_index: j,
                    pairing,
                });
            }
        }
        Ok(TorusCharacter {
            field: character_field(&k),
            k,
        })
    }
}

/// The field `x -> e^{2 pi i <k, x>}` (no lattice validation).
pub fn character_field(k: &[f64]) -> ComplexField {
    let k = k.to_vec();
    let label = format!(
        "f_({})",
        k.iter()
            .map(|v| format_coord(*v))
            .collect::<Vec<_>>()
            .join(",")
    );
    ComplexField::global(label, move |xs| {
        let n = xs[0].dim();
        let mut phase = crate::jet::Jet2::constant(0.0, n);
        for (i, &ki) in k.iter().enumerate() {
            phase = phase + xs[i].scale(ki);
        }
        CJet2::cis(&phase.scale(2.0 * std::f64::consts::PI))
    })
}

fn format_coord(v: f64) -> String {
    if (v - v.round()).abs() < 1e-12 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v}")
    }
}

/// The eigenfamily of characters for dual vectors K, with the claimed
/// eigendata `lambda_i = -4 pi^2 <k_i, k_i>`, `A_ij = -4 pi^2 <k_i, k_j>`.
pub fn torus_family(l: &Lattice, ks: &[Vec<f64>]) -> Result<EigenFamilySpec> {
    let mut fields = Vec::with_capacity(ks.len());
    for (i, k) in ks.iter().enumerate() {
        fields.push(TorusCharacter::new(l, k.clone(), i)?.field);
    }
    let lambda = ks
        .iter()
        .map(|k| Complex64::new(-TAU_COEFF * dot(k, k), 0.0))
        .collect();
    let a = ks
        .iter()
        .map(|ki| {
            ks.iter()
                .map(|kj| Complex64::new(-TAU_COEFF * dot(ki, kj), 0.0))
                .collect()
        })
        .collect();
    EigenFamilySpec::new(fields, lambda, a)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_of_identity_is_identity() {
        let l = Lattice::standard(2);
        let d = dual_lattice(&l).unwrap();
        assert_eq!(d.basis(), linalg::identity(2).as_slice());
    }

    #[test]
    fn dual_of_diagonal_lattice() {
        let l = Lattice::new(2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let d = dual_lattice(&l).unwrap();
        assert_eq!(d.basis(), &[0.5, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn dual_of_hexagonal_lattice_pairs_integrally() {
        // B = [[1, 1/2], [0, sqrt(3)/2]]
        let s = 3.0f64.sqrt() / 2.0;
        let l = Lattice::new(2, vec![1.0, 0.5, 0.0, s]).unwrap();
        let d = dual_lattice(&l).unwrap();
        // <k_i, gamma_j> = delta_ij
        for i in 0..2 {
            let k = d.generator(i);
            for j in 0..2 {
                let gamma = l.generator(j);
                let pairing = dot(&k, &gamma);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((pairing - expect).abs() < 1e-12);
            }
        }
        // matrix-inverse oracle: B^{-T} computed by hand
        let by_hand = [1.0, 0.0, -1.0 / 3.0f64.sqrt(), 2.0 / 3.0f64.sqrt()];
        for (a, b) in d.basis().iter().zip(by_hand.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_is_involutive() {
        let l = Lattice::new(2, vec![1.0, 0.5, 0.0, 3.0f64.sqrt() / 2.0]).unwrap();
        let dd = dual_lattice(&dual_lattice(&l).unwrap()).unwrap();
        for (a, b) in dd.basis().iter().zip(l.basis().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_basis_rejected() {
        assert!(Lattice::new(2, vec![1.0, 2.0, 0.5, 1.0]).is_err());
    }

    #[test]
    fn flat_torus_charts() {
        let m = flat_torus(&Lattice::standard(2));
        assert_eq!(m.charts[0].domain(), &[(0.0, 1.0), (0.0, 1.0)]);
        let m2 = flat_torus(&Lattice::new(2, vec![2.0, 0.0, 0.0, 1.0]).unwrap());
        assert_eq!(m2.charts[0].domain(), &[(0.0, 2.0), (0.0, 1.0)]);
        // identity metric: sqrt|g| = 1 everywhere
        let geo = crate::ops::ChartGeometry::at(&m2.charts[0], &[0.5, 0.5]).unwrap();
        assert_eq!(geo.sqrt_det, 1.0);
    }

    #[test]
    fn torus_family_eigendata() {
        let l = Lattice::standard(2);
        let fam = torus_family(&l, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let c = TAU_COEFF;
        assert!((fam.lambda[0].re + c).abs() < 1e-12);
        assert!((fam.lambda[1].re + 2.0 * c).abs() < 1e-12);
        // A = -4 pi^2 [[1, 1], [1, 2]]
        assert!((fam.a[0][0].re + c).abs() < 1e-12);
        assert!((fam.a[0][1].re + c).abs() < 1e-12);
        assert!((fam.a[1][1].re + 2.0 * c).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_gives_constant_family() {
        let l = Lattice::standard(2);
        let fam = torus_family(&l, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(fam.lambda[0], Complex64::new(0.0, 0.0));
        assert_eq!(fam.a[0][0], Complex64::new(0.0, 0.0));
        let v = fam.fields[0].value(0, &[0.3, 0.7]).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn non_integral_k_rejected_with_pairing() {
        let l = Lattice::standard(2);
        match torus_family(&l, &[vec![0.5, 0.0]]) {
            Err(GeometryError::NonIntegralCharacter {
                k_index,
                basis_index,
                pairing,
            }) => {
                assert_eq!(k_index, 0);
                assert_eq!(basis_index, 0);
                assert!((pairing - 0.5).abs() < 1e-12);
            }
            other => panic!("expected integrality rejection, got {other:?}"),
        }
    }
}
