//! The JSON manifest: manifold, family, transforms, checks, sampling.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major arrays of
//! arrays. Polynomials are term lists `{ "exponents": [..], "coeff": [re, im] }`.

use serde::{Deserialize, Serialize};

use eigenverify::manifolds::TrigPoly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub manifold: ManifoldSpec,
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformSpec>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub sampling: SamplingSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    /// Flat torus `R^n / Gamma`; `basis` lists the lattice generators.
    FlatTorus { basis: Vec<Vec<f64>> },
    /// Weighted Sasakian sphere `S^{2n-1}` with weights `w`.
    WeightedSasakian { n: usize, w: Vec<f64> },
    /// Mapping torus with a trigonometric-polynomial fiber metric.
    MappingTorus {
        fiber_dim: usize,
        metric: Vec<Vec<TrigPoly>>,
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        monodromy: Option<Vec<Vec<i64>>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Characters `f_k` for the listed dual vectors. The overrides exist
    /// for falsification experiments: claim wrong eigendata on purpose and
    /// watch the verifier reject it.
    TorusCharacters {
        k: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_override: Option<Vec<[f64; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_override: Option<Vec<Vec<[f64; 2]>>>,
    },
    /// The coordinate family `phi_i = x_i + i y_i` of a Sasakian sphere.
    SasakianCoordinates,
    /// The projection `e^{it}` of a mapping torus, claimed as a
    /// `(lambda, lambda)`-eigenfunction.
    Projection,
    /// Fields given as polynomials in the chart coordinates, with claimed
    /// eigendata.
    Explicit {
        fields: Vec<PolyFieldSpec>,
        lambda: Vec<[f64; 2]>,
        a: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub terms: Vec<PolyTermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTermSpec {
    pub exponents: Vec<u32>,
    pub coeff: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformSpec {
    /// Replace the working family by `prod phi_i^{d_i}` with its predicted
    /// eigenvalues.
    Monomial {
        d: Vec<i32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        guard: Option<f64>,
    },
    /// Replace the working family by `P(phi)/Q(phi)` (requires a uniform
    /// family); the claimed eigendata is `(0, 0)`.
    Quotient {
        p: Vec<PolyTermSpec>,
        q: Vec<PolyTermSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        guard: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// "absolute" or "relative"; default depends on the manifold class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    /// Field the check applies to (polar, circle, modulus, harmonic
    /// morphism); defaults to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_modulus: Option<f64>,
}

impl CheckSpec {
    pub fn named(name: &str) -> Self {
        CheckSpec {
            name: name.to_string(),
            tol: None,
            norm: None,
            field_index: None,
            lambda: None,
            mu: None,
            min_modulus: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_margin")]
    pub boundary_margin: f64,
}

fn default_count() -> usize {
    200
}

fn default_margin() -> f64 {
    0.05
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            count: default_count(),
            seed: 0,
            boundary_margin: default_margin(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrips_through_json() {
        let text = r#"{
            "manifold": {"type": "flat_torus", "basis": [[1, 0], [0, 1]]},
            "family": {"type": "torus_characters", "k": [[1, 0], [1, 1]]},
            "checks": [{"name": "verify_family"}],
            "sampling": {"count": 100, "seed": 7}
        }"#;
        let m: Manifest = serde_json::from_str(text).unwrap();
        assert_eq!(m.sampling.count, 100);
        assert_eq!(m.sampling.boundary_margin, 0.05);
        let emitted = serde_json::to_string(&m).unwrap();
        let back: Manifest = serde_json::from_str(&emitted).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "manifold": {"type": "flat_torus", "basis": [[1]]},
            "family": {"type": "torus_characters", "k": [[1]]},
            "checks": [],
            "frobnicate": true
        }"#;
        assert!(serde_json::from_str::<Manifest>(text).is_err());
    }
}
