//! Residual reports produced by the verification drivers.

use serde::{Deserialize, Serialize};

/// How a residual is compared against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualNorm {
    /// `max |lhs - rhs| <= tol`. For identities whose exactness is limited
    /// only by roundoff of the jet arithmetic.
    Absolute,
    /// `max |lhs - rhs| / (1 + |rhs|) <= tol`. For identities evaluated
    /// through chart-pullback metrics, where magnitudes vary.
    Relative,
}

/// Where the worst residual of an identity occurred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxPoint {
    pub chart: usize,
    pub coords: Vec<f64>,
}

/// Residual statistics for a single identity checked over the sample sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub argmax: Option<ArgmaxPoint>,
    pub tolerance: f64,
    pub norm: ResidualNorm,
    pub passed: bool,
}

/// Accumulates residuals for one identity across points and charts.
#[derive(Clone, Debug)]
pub struct ResidualStat {
    pub name: String,
    max_abs: f64,
    max_rel: f64,
    sum_abs: f64,
    count: usize,
    argmax: Option<ArgmaxPoint>,
}

impl ResidualStat {
    pub fn new(name: impl Into<String>) -> Self {
        ResidualStat {
            name: name.into(),
            max_abs: 0.0,
            max_rel: 0.0,
            sum_abs: 0.0,
            count: 0,
            argmax: None,
        }
    }

    /// Record a point: `abs` is `|lhs - rhs|`, `rhs_norm` is `|rhs|`.
    pub fn record(&mut self, abs: f64, rhs_norm: f64, chart: usize, coords: &[f64]) {
        let rel = abs / (1.0 + rhs_norm);
        if abs > self.max_abs || self.argmax.is_none() {
            self.max_abs = self.max_abs.max(abs);
            self.argmax = Some(ArgmaxPoint {
                chart,
                coords: coords.to_vec(),
            });
        }
        self.max_rel = self.max_rel.max(rel);
        self.sum_abs += abs;
        self.count += 1;
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn max_rel(&self) -> f64 {
        self.max_rel
    }

    pub fn into_report(self, tolerance: f64, norm: ResidualNorm) -> IdentityReport {
        let observed = match norm {
            ResidualNorm::Absolute => self.max_abs,
            ResidualNorm::Relative => self.max_rel,
        };
        IdentityReport {
            name: self.name,
            max_abs: self.max_abs,
            mean_abs: if self.count > 0 {
                self.sum_abs / self.count as f64
            } else {
                0.0
            },
            max_rel: self.max_rel,
            argmax: self.argmax,
            tolerance,
            norm,
            passed: self.count > 0 && observed <= tolerance,
        }
    }
}

/// Full result of one named check: per-identity records plus bookkeeping of
/// excluded points. `valid` is false when too many points were excluded for
/// the verdict to mean anything; `passed` is the conjunction of identity
/// verdicts and validity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub identities: Vec<IdentityReport>,
    pub evaluated_points: usize,
    pub excluded_points: usize,
    pub notes: Vec<String>,
    pub valid: bool,
    pub passed: bool,
}

impl VerificationReport {
    pub fn from_identities(
        check: impl Into<String>,
        identities: Vec<IdentityReport>,
        evaluated_points: usize,
        excluded_points: usize,
        notes: Vec<String>,
        valid: bool,
    ) -> Self {
        let passed = valid && identities.iter().all(|r| r.passed);
        VerificationReport {
            check: check.into(),
            identities,
            evaluated_points,
            excluded_points,
            notes,
            valid,
            passed,
        }
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.identities.iter().fold(0.0, |m, r| m.max(r.max_abs))
    }

    pub fn max_rel_residual(&self) -> f64 {
        self.identities.iter().fold(0.0, |m, r| m.max(r.max_rel))
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityReport> {
        self.identities.iter().find(|r| r.name == name)
    }
}
