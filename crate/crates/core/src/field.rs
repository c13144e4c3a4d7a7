//! Complex-valued fields on charted manifolds.

use std::sync::Arc;

use num_complex::Complex64;

use crate::jet::{CJet2, Jet2};

type EvalFn = dyn Fn(usize, &[Jet2]) -> Option<CJet2> + Send + Sync;

/// A complex-valued function evaluable in jet arithmetic on every chart of
/// its manifold. The evaluator receives the chart index so multi-chart
/// manifolds can dispatch; guarded constructions (quotients, negative
/// powers) return `None` at points they exclude.
#[derive(Clone)]
pub struct ComplexField {
    eval: Arc<EvalFn>,
    label: String,
}

impl ComplexField {
    /// Field whose evaluator ignores the chart index.
    pub fn global<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> CJet2 + Send + Sync + 'static,
    {
        ComplexField {
            eval: Arc::new(move |_, xs| Some(f(xs))),
            label: label.into(),
        }
    }

    /// Field with chart-dependent evaluation.
    pub fn per_chart<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize, &[Jet2]) -> Option<CJet2> + Send + Sync + 'static,
    {
        ComplexField {
            eval: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        ComplexField::global(format!("const({c})"), move |xs| {
            CJet2::constant(c, xs[0].dim())
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Evaluate at jet coordinates on chart `chart_idx`. Returns `None` at
    /// excluded points and for non-finite results.
    pub fn eval(&self, chart_idx: usize, xs: &[Jet2]) -> Option<CJet2> {
        let out = (self.eval)(chart_idx, xs)?;
        out.is_finite().then_some(out)
    }

    /// Plain value at a point (chart coordinates), without derivative
    /// bookkeeping beyond what the evaluator needs internally.
    pub fn value(&self, chart_idx: usize, p: &[f64]) -> Option<Complex64> {
        let n = p.len();
        let xs: Vec<Jet2> = p
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet2::coordinate(v, i, n))
            .collect();
        self.eval(chart_idx, &xs).map(|j| j.value())
    }

    /// Pointwise product.
    pub fn product(&self, other: &ComplexField) -> ComplexField {
        let a = self.eval.clone();
        let b = other.eval.clone();
        ComplexField {
            eval: Arc::new(move |c, xs| Some(a(c, xs)? * b(c, xs)?)),
            label: format!("{}*{}", self.label, other.label),
        }
    }

    /// Integer power. Negative exponents exclude points where the base
    /// modulus falls below `guard`.
    pub fn powi(&self, k: i32, guard: f64) -> ComplexField {
        let a = self.eval.clone();
        ComplexField {
            eval: Arc::new(move |c, xs| {
                let base = a(c, xs)?;
                if k < 0 && base.value().norm() < guard {
                    return None;
                }
                Some(base.powi(k))
            }),
            label: format!("{}^{}", self.label, k),
        }
    }

    /// Multiply by a complex constant.
    pub fn scale(&self, c: Complex64) -> ComplexField {
        let a = self.eval.clone();
        ComplexField {
            eval: Arc::new(move |ci, xs| Some(a(ci, xs)?.scale(c))),
            label: format!("({c})*{}", self.label),
        }
    }
}

impl std::fmt::Debug for ComplexField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ComplexField({})", self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_scale_compose() {
        let f = ComplexField::global("x+iy", |xs| CJet2 {
            re: xs[0],
            im: xs[1],
        });
        let g = f.scale(Complex64::new(0.0, 1.0)); // i*(x+iy)
        let p = [0.3, 0.4];
        let fv = f.value(0, &p).unwrap();
        let gv = g.value(0, &p).unwrap();
        assert!((gv - Complex64::i() * fv).norm() < 1e-15);
        let prod = f.product(&g).value(0, &p).unwrap();
        assert!((prod - fv * gv).norm() < 1e-15);
    }

    #[test]
    fn negative_power_guard_excludes_small_modulus() {
        let f = ComplexField::global("x+iy", |xs| CJet2 {
            re: xs[0],
            im: xs[1],
        });
        let inv = f.powi(-1, 1e-3);
        assert!(inv.value(0, &[1e-5, 0.0]).is_none());
        let v = inv.value(0, &[0.5, 0.0]).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
