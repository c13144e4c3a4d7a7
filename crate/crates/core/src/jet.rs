//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries a function value together with its gradient and Hessian
//! with respect to the chart coordinates. All arithmetic propagates the exact
//! chain rule, so derivatives of anything built from jet arithmetic are exact
//! up to floating-point roundoff. [`CJet2`] is a complex scalar realized as a
//! pair of real jets; holomorphic operations (mul, div, exp, integer powers)
//! are implemented componentwise on the pair, which keeps everything
//! branch-free: no complex logarithm is ever taken.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Maximum chart dimension supported by the jet arithmetic.
///
/// Covers tori up to dimension 8, weighted Sasakian spheres up to `S^7`
/// (ambient complex dimension 4) and mapping tori with fibers up to `T^7`.
pub const MAX_DIM: usize = 8;

/// A real-valued 2-jet: value, gradient and (symmetric) Hessian in `n`
/// coordinates. Fixed-capacity storage keeps the type `Copy`.
#[derive(Clone, Copy, Debug)]
pub struct Jet2 {
    n: usize,
    v: f64,
    g: [f64; MAX_DIM],
    h: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet2 {
    /// Jet of a constant: zero gradient and Hessian.
    pub fn constant(v: f64, n: usize) -> Self {
        assert!(n <= MAX_DIM, "jet dimension {n} exceeds MAX_DIM={MAX_DIM}");
        Jet2 {
            n,
            v,
            g: [0.0; MAX_DIM],
            h: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// Jet of the `i`-th coordinate function evaluated at `v`.
    pub fn coordinate(v: f64, i: usize, n: usize) -> Self {
        assert!(i < n, "coordinate index {i} out of range for dimension {n}");
        let mut j = Jet2::constant(v, n);
        j.g[i] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn grad(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.g[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        self.h[i][j]
    }

    pub fn grad_vec(&self) -> Vec<f64> {
        self.g[..self.n].to_vec()
    }

    /// True when value, gradient and Hessian are all finite.
    pub fn is_finite(&self) -> bool {
        if !self.v.is_finite() {
            return false;
        }
        for i in 0..self.n {
            if !self.g[i].is_finite() {
                return false;
            }
            for j in 0..self.n {
                if !self.h[i][j].is_finite() {
                    return false;
                }
            }
        }
        true
    }

    /// Propagate a scalar function through the jet given its value and first
    /// two derivatives at `self.v`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let mut out = Jet2::constant(f0, self.n);
        for i in 0..self.n {
            out.g[i] = f1 * self.g[i];
        }
        for i in 0..self.n {
            for j in 0..self.n {
                out.h[i][j] = f1 * self.h[i][j] + f2 * self.g[i] * self.g[j];
            }
        }
        out
    }

    pub fn recip(&self) -> Jet2 {
        let iv = 1.0 / self.v;
        self.chain(iv, -iv * iv, 2.0 * iv * iv * iv)
    }

    pub fn sqrt(&self) -> Jet2 {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet2 {
        let iv = 1.0 / self.v;
        self.chain(self.v.ln(), iv, -iv * iv)
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    /// Integer power `v^k`, including negative exponents.
    pub fn powi(&self, k: i32) -> Jet2 {
        match k {
            0 => Jet2::constant(1.0, self.n),
            1 => *self,
            _ => {
                let kf = f64::from(k);
                let f0 = self.v.powi(k);
                let f1 = kf * self.v.powi(k - 1);
                let f2 = kf * (kf - 1.0) * self.v.powi(k - 2);
                self.chain(f0, f1, f2)
            }
        }
    }

    /// Two-argument arctangent `atan2(self, x)` with full second-order
    /// propagation through both arguments.
    pub fn atan2(&self, x: &Jet2) -> Jet2 {
        assert_eq!(self.n, x.n);
        let y = self;
        let (a, b) = (x.v, y.v); // a = x, b = y
        let r2 = a * a + b * b;
        let r4 = r2 * r2;
        // first partials of atan2(b, a)
        let da = -b / r2;
        let db = a / r2;
        // second partials
        let daa = 2.0 * a * b / r4;
        let dab = (b * b - a * a) / r4;
        let dbb = -2.0 * a * b / r4;
        let mut out = Jet2::constant(b.atan2(a), self.n);
        for i in 0..self.n {
            out.g[i] = da * x.g[i] + db * y.g[i];
        }
        for i in 0..self.n {
            for j in 0..self.n {
                out.h[i][j] = da * x.h[i][j]
                    + db * y.h[i][j]
                    + daa * x.g[i] * x.g[j]
                    + dab * (x.g[i] * y.g[j] + y.g[i] * x.g[j])
                    + dbb * y.g[i] * y.g[j];
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Jet2 {
        let mut out = *self;
        out.v *= c;
        for i in 0..self.n {
            out.g[i] *= c;
            for j in 0..self.n {
                out.h[i][j] *= c;
            }
        }
        out
    }

    pub fn add_scalar(&self, c: f64) -> Jet2 {
        let mut out = *self;
        out.v += c;
        out
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        assert_eq!(self.n, rhs.n);
        let mut out = self;
        out.v += rhs.v;
        for i in 0..self.n {
            out.g[i] += rhs.g[i];
            for j in 0..self.n {
                out.h[i][j] += rhs.h[i][j];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        assert_eq!(self.n, rhs.n);
        let mut out = self;
        out.v -= rhs.v;
        for i in 0..self.n {
            out.g[i] -= rhs.g[i];
            for j in 0..self.n {
                out.h[i][j] -= rhs.h[i][j];
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        assert_eq!(self.n, rhs.n);
        let mut out = Jet2::constant(self.v * rhs.v, self.n);
        for i in 0..self.n {
            out.g[i] = self.g[i] * rhs.v + self.v * rhs.g[i];
        }
        for i in 0..self.n {
            for j in 0..self.n {
                out.h[i][j] = self.h[i][j] * rhs.v
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i]
                    + self.v * rhs.h[i][j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        self.add_scalar(rhs)
    }
}

/// A complex 2-jet: real and imaginary parts are independent real jets.
#[derive(Clone, Copy, Debug)]
pub struct CJet2 {
    pub re: Jet2,
    pub im: Jet2,
}

impl CJet2 {
    pub fn constant(c: Complex64, n: usize) -> Self {
        CJet2 {
            re: Jet2::constant(c.re, n),
            im: Jet2::constant(c.im, n),
        }
    }

    pub fn from_re(re: Jet2) -> Self {
        let n = re.dim();
        CJet2 {
            re,
            im: Jet2::constant(0.0, n),
        }
    }

    /// `e^{i theta}` for a real jet `theta`: `(cos theta, sin theta)`.
    pub fn cis(theta: &Jet2) -> Self {
        CJet2 {
            re: theta.cos(),
            im: theta.sin(),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn grad(&self, i: usize) -> Complex64 {
        Complex64::new(self.re.grad(i), self.im.grad(i))
    }

    pub fn hess(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re.hess(i, j), self.im.hess(i, j))
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> CJet2 {
        CJet2 {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(&self) -> Jet2 {
        self.re * self.re + self.im * self.im
    }

    pub fn modulus(&self) -> Jet2 {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> CJet2 {
        let inv = self.norm_sqr().recip();
        CJet2 {
            re: self.re * inv,
            im: (-self.im) * inv,
        }
    }

    pub fn exp(&self) -> CJet2 {
        let scale = self.re.exp();
        CJet2 {
            re: scale * self.im.cos(),
            im: scale * self.im.sin(),
        }
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn powi(&self, k: i32) -> CJet2 {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut acc = CJet2::constant(Complex64::new(1.0, 0.0), self.dim());
        let mut base = *self;
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> CJet2 {
        CJet2 {
            re: self.re.scale(c.re) - self.im.scale(c.im),
            im: self.re.scale(c.im) + self.im.scale(c.re),
        }
    }

    /// Snapshot of value, coordinate partials and coordinate Hessian.
    pub fn data(&self) -> FieldData {
        let n = self.dim();
        let grad = (0..n).map(|i| self.grad(i)).collect();
        let hess = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.hess(i, j))
            .collect();
        FieldData {
            n,
            value: self.value(),
            grad,
            hess,
        }
    }
}

impl Add for CJet2 {
    type Output = CJet2;
    fn add(self, rhs: CJet2) -> CJet2 {
        CJet2 {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for CJet2 {
    type Output = CJet2;
    fn sub(self, rhs: CJet2) -> CJet2 {
        CJet2 {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for CJet2 {
    type Output = CJet2;
    fn neg(self) -> CJet2 {
        CJet2 {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for CJet2 {
    type Output = CJet2;
    fn mul(self, rhs: CJet2) -> CJet2 {
        CJet2 {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for CJet2 {
    type Output = CJet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: CJet2) -> CJet2 {
        self * rhs.recip()
    }
}

/// Evaluated 2-jet of a complex field at one point: value, coordinate
/// partials `d_i f` and coordinate Hessian `d_i d_j f` (row-major).
#[derive(Clone, Debug)]
pub struct FieldData {
    pub n: usize,
    pub value: Complex64,
    pub grad: Vec<Complex64>,
    pub hess: Vec<Complex64>,
}

impl FieldData {
    pub fn hess_at(&self, i: usize, j: usize) -> Complex64 {
        self.hess[i * self.n + j]
    }

    /// Derivative data of `log f`, computed branch-free from `f` alone:
    /// `d(log f) = df/f` and `d_i d_j log f = f_ij/f - f_i f_j / f^2`.
    ///
    /// Only the derivatives carry meaning; the stored value is `ln|f|`
    /// (real part of any local logarithm).
    pub fn log_data(&self) -> FieldData {
        let n = self.n;
        let v = self.value;
        let grad: Vec<Complex64> = self.grad.iter().map(|gi| gi / v).collect();
        let mut hess = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                hess.push(self.hess_at(i, j) / v - grad[i] * grad[j]);
            }
        }
        FieldData {
            n,
            value: Complex64::new(0.5 * v.norm_sqr().ln(), 0.0),
            grad,
            hess,
        }
    }
}
