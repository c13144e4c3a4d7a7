//! Static catalog of the checks a manifest can request.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckInfo {
    pub name: &'static str,
    pub parameters: &'static [&'static str],
    pub default_tol: f64,
    pub description: &'static str,
}

/// Stable, ordered list of every check the runner knows.
pub fn catalog() -> &'static [CheckInfo] {
    &[
        CheckInfo {
            name: "verify_family",
            parameters: &["tol", "norm"],
            default_tol: 1e-9,
            description: "residuals of tau(phi_i) = lambda_i phi_i and kappa(phi_i, phi_j) = A_ij phi_i phi_j over the sample sweep (defaults: absolute 1e-9, relative 1e-7 on Sasakian spheres)",
        },
        CheckInfo {
            name: "check_a_structure",
            parameters: &["tol"],
            default_tol: 1e-9,
            description: "eigenvalue analysis of the claimed A-matrix: real negative semidefiniteness, reducedness, kernel basis; passes when A is real negative semidefinite",
        },
        CheckInfo {
            name: "multiplicative_relation",
            parameters: &["tol"],
            default_tol: 1e-9,
            description: "for lambda-diagonal families with degenerate A: extract alpha with prod phi_i^alpha_i constant and confirm the gradient residual",
        },
        CheckInfo {
            name: "polar_checks",
            parameters: &["tol", "field_index", "lambda", "mu", "min_modulus"],
            default_tol: 1e-7,
            description: "the four polar-form identities of a nonvanishing (lambda, mu)-eigenfunction, branch-free via grad(phi)/phi",
        },
        CheckInfo {
            name: "modulus_diagnostics",
            parameters: &["tol", "field_index"],
            default_tol: 1e-9,
            description: "modulus range of a field over the sweep; constancy detects lambda = mu (informational, always passes)",
        },
        CheckInfo {
            name: "harmonic_morphism_check",
            parameters: &["tol", "field_index"],
            default_tol: 1e-6,
            description: "tau(f) = 0 and kappa(f, f) = 0 at guarded points",
        },
        CheckInfo {
            name: "circle_submersion_check",
            parameters: &["tol", "field_index", "lambda"],
            default_tol: 1e-7,
            description: "modulus constancy, tau(theta) = 0 and kappa(theta, theta) = |lambda|: harmonic Riemannian submersion onto the circle of metric dt^2/|lambda|",
        },
        CheckInfo {
            name: "torus_submersion_check",
            parameters: &["tol"],
            default_tol: 1e-7,
            description: "angle-gradient Gram equals -A pointwise, each theta_i harmonic, A negative definite: harmonic Riemannian submersion onto the torus of metric (-A)^{-1}",
        },
        CheckInfo {
            name: "volume_density_check",
            parameters: &["tol"],
            default_tol: 1e-8,
            description: "mapping torus: |d/dt ln det G(t)| over sampled times (constant volume density)",
        },
        CheckInfo {
            name: "projection_harmonicity_check",
            parameters: &["tol"],
            default_tol: 1e-8,
            description: "mapping torus: the projection e^{it} is a harmonic Riemannian submersion, checked through the chart operators",
        },
    ]
}

pub fn find(name: &str) -> Option<&'static CheckInfo> {
    catalog().iter().find(|c| c.name == name)
}
