//! Faddeeva function and closed-form integrals of `exp(−P y² + Q y + S)`.

use errorfunctions::ComplexErrorFunctions;
use std::sync::OnceLock;

use crate::C64;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `w(z) = e^{−z²} erfc(−iz)`.
pub fn faddeeva(z: C64) -> C64 {
    z.w()
}

/// Quadratic exponent `f(y) = −P y² + Q y + S`.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic {
    pub p: C64,
    pub q: C64,
    pub s: C64,
}

impl Quadratic {
    pub fn eval(&self, y: f64) -> C64 {
        -self.p * y * y + self.q * y + self.s
    }

    fn scaled_tail(&self, sp: C64, y0: C64, y: f64, upper: bool) -> C64 {
        // exp(f(y)) w(±i u(y)); vanishes at ±∞ when Re P > 0
        if y.is_infinite() {
            return C64::new(0.0, 0.0);
        }
        let u = sp * (y - y0);
        let arg = if upper { C64::new(-u.im, u.re) } else { C64::new(u.im, -u.re) };
        let w = faddeeva(arg);
        if w == C64::new(0.0, 0.0) {
            return w;
        }
        (self.eval(y) + w.ln()).exp()
    }

    /// `∫_a^b exp(f(y)) dy`, endpoints may be infinite when `Re P > 0`.
    ///
    /// Written through `w` so that no intermediate exceeds the size of the
    /// integrand on `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        if a == b {
            return C64::new(0.0, 0.0);
        }
        if a > b {
            return -self.integral(b, a);
        }
        let sp = self.p.sqrt();
        let y0 = self.q / (2.0 * self.p);
        let ua = if a.is_infinite() { f64::NEG_INFINITY } else { (sp * (a - y0)).re };
        let ub = if b.is_infinite() { f64::INFINITY } else { (sp * (b - y0)).re };
        let c = SQRT_PI / (2.0 * sp);
        if ua >= 0.0 {
            c * (self.scaled_tail(sp, y0, a, true) - self.scaled_tail(sp, y0, b, true))
        } else if ub <= 0.0 {
            c * (self.scaled_tail(sp, y0, b, false) - self.scaled_tail(sp, y0, a, false))
        } else {
            let peak = (self.q * self.q / (4.0 * self.p) + self.s).exp();
            c * (2.0 * peak
                - self.scaled_tail(sp, y0, b, true)
                - self.scaled_tail(sp, y0, a, false))
        }
    }

    /// `∫_a^b y exp(f(y)) dy`.
    pub fn first_moment(&self, a: f64, b: f64) -> C64 {
        let edge = |y: f64| {
            if y.is_infinite() {
                C64::new(0.0, 0.0)
            } else {
                self.eval(y).exp()
            }
        };
        (self.q * self.integral(a, b) - (edge(b) - edge(a))) / (2.0 * self.p)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// The 20-point rule, built once.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}
