//! Transforms `ψ̂_0^(j)(k) = ∫_{x_{j-1}}^{x_j} e^{−ikx} ψ_0(x) dx` of the initial
//! data restricted to one region, and the free-propagator term of each
//! region's solution.
//!
//! Both supported kinds of initial data give entire functions of `k`: the
//! Gaussian closed forms converge on half-lines for every complex `k`, and
//! tabulated data have compact support. `hat_psi0` enforces the half-plane
//! of the definition; the solvers, whose contours leave the closed fourth
//! quadrant, call the continued form.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::initial::{Cell, GaussTerm, InitialCondition};
use crate::kernel::PiecewisePotential;
use crate::special::{gl20, Quadratic};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);
const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformValue {
    pub region: usize,
    pub k: C64,
    pub value: C64,
    pub error: f64,
}

/// Free-propagator term of one region and its `x`-derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierTerm {
    pub value: C64,
    pub dx: C64,
    pub err: f64,
}

/// `ψ̂_0^(j)(k)`, rejecting `k` outside the half-plane where the defining
/// integral converges for arbitrary `L¹` data.
pub fn hat_psi0(region: usize, pot: &PiecewisePotential, ic: &InitialCondition, k: C64) -> Result<TransformValue> {
    check_half_plane(region, pot, k)?;
    let (a, b) = pot.bounds(region);
    let value = segment_transform(ic, a, b, k);
    Ok(TransformValue { region, k, value, error: transform_error(ic, a, b, k, value) })
}

fn check_half_plane(region: usize, pot: &PiecewisePotential, k: C64) -> Result<()> {
    let n = pot.n();
    if region == 0 || region > n + 1 {
        return Err(Error::Argument(format!("region {region} out of 1..={}", n + 1)));
    }
    if (region == 1 && k.im < 0.0) || (region == n + 1 && k.im > 0.0) {
        return Err(Error::Domain { region, k });
    }
    Ok(())
}

fn transform_error(ic: &InitialCondition, a: f64, b: f64, k: C64, value: C64) -> f64 {
    // closed forms: rounding relative to the size of the integrand
    let grow = if k.im == 0.0 {
        1.0
    } else {
        // |e^{−ikx}| = e^{x Im k} at the far end of the data
        let reach = |x: f64| if x.is_finite() { (x * k.im).exp() } else { 1.0 };
        reach(a).max(reach(b)).max(1.0)
    };
    64.0 * EPS * (ic.l1_bound(a, b) * grow).max(value.norm())
}

/// `∫_a^b e^{−ikx} ψ_0(x) dx` for any complex `k`.
pub fn segment_transform(ic: &InitialCondition, a: f64, b: f64, k: C64) -> C64 {
    segment_transform_shifted(ic, a, b, k, 0.0)
}

/// `e^{iks} ∫_a^b e^{−ikx} ψ_0(x) dx`, with the factor folded into the
/// integrand so that neither part overflows on its own.
pub fn segment_transform_shifted(ic: &InitialCondition, a: f64, b: f64, k: C64, shift: f64) -> C64 {
    match ic.table() {
        Some(t) => t.cells.iter().map(|c| cell_transform(c, a, b, k, shift)).sum(),
        None => ic.terms().iter().map(|g| gauss_transform(g, a, b, k, shift)).sum(),
    }
}

fn gauss_transform(g: &GaussTerm, a: f64, b: f64, k: C64, shift: f64) -> C64 {
    let w2 = g.width * g.width;
    let quad = Quadratic {
        p: C64::new(1.0 / w2, 0.0),
        q: C64::new(2.0 * g.center / w2, 0.0) + I * (g.wavenumber - k),
        s: C64::new(-g.center * g.center / w2, 0.0) + I * k * shift,
    };
    g.amp * quad.integral(a, b)
}

/// `e^{iks} ∫ p(x − mid) e^{−ikx} dx` over the part of a cell inside `[a, b]`.
fn cell_transform(c: &Cell, a: f64, b: f64, k: C64, shift: f64) -> C64 {
    let lo = c.lo.max(a);
    let hi = c.hi.min(b);
    if !(hi > lo) {
        return C64::new(0.0, 0.0);
    }
    let q = -I * k;
    let (ua, ub) = (lo - c.mid, hi - c.mid);
    let span = ua.abs().max(ub.abs());
    let base = c.mid - shift;
    if q.norm() * span <= 2.0 {
        // Σ_n q^n/n! Σ_j c_j ∫ u^{j+n}
        let mut sum = C64::new(0.0, 0.0);
        let mut qn = C64::new(1.0, 0.0);
        for n in 0..60 {
            let mut inner = C64::new(0.0, 0.0);
            for (j, cj) in c.coef.iter().enumerate() {
                let p = (j + n + 1) as i32;
                inner += cj * ((ub.powi(p) - ua.powi(p)) / p as f64);
            }
            sum += qn * inner;
            qn *= q / (n + 1) as f64;
            // bound on every later term
            let rest = qn.norm() * span.powi(n as i32 + 2) * c.coef.iter().enumerate().map(|(j, v)| v.norm() * span.powi(j as i32)).sum::<f64>();
            if rest <= EPS * sum.norm() || rest == 0.0 {
                break;
            }
        }
        (q * base).exp() * sum
    } else {
        // repeated integration by parts, exact for the cubic
        let prim = |u: f64| {
            let d = [
                ((c.coef[3] * u + c.coef[2]) * u + c.coef[1]) * u + c.coef[0],
                (3.0 * c.coef[3] * u + 2.0 * c.coef[2]) * u + c.coef[1],
                6.0 * c.coef[3] * u + 2.0 * c.coef[2],
                6.0 * c.coef[3],
            ];
            let mut s = C64::new(0.0, 0.0);
            let mut qp = q;
            for (m, dm) in d.iter().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * dm / qp;
                qp *= q;
            }
            (q * (u + base)).exp() * s
        };
        prim(ub) - prim(ua)
    }
}

/// Free-propagator term of region `j`:
/// `e^{−iα_j t} (4πit)^{−1/2} ∫_{x_{j-1}}^{x_j} e^{i(x−y)²/(4t)} ψ_0(y) dy`,
/// equal to `(1/2π)∫_ℝ e^{ikx−ω_j t} ψ̂_0^(j)(k) dk`.
pub fn fourier_term(region: usize, pot: &PiecewisePotential, ic: &InitialCondition, x: f64, t: f64) -> Result<FourierTerm> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Argument(format!("propagator needs t > 0, got {t}")));
    }
    check_half_plane(region, pot, C64::new(0.0, 0.0))?;
    let (a, b) = pot.bounds(region);
    let pref = C64::new(0.0, -pot.level(region) * t).exp() / (4.0 * std::f64::consts::PI * I * t).sqrt();
    let (v, m1, err) = match ic.table() {
        Some(tab) => chirp_table(&tab.cells, a, b, x, t),
        None => {
            let (mut v, mut m1) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            let mut scale = 0.0;
            for g in ic.terms() {
                let w2 = g.width * g.width;
                let quad = Quadratic {
                    p: C64::new(1.0 / w2, -0.25 / t),
                    q: C64::new(2.0 * g.center / w2, g.wavenumber - 0.5 * x / t),
                    s: C64::new(-g.center * g.center / w2, 0.25 * x * x / t),
                };
                v += g.amp * quad.integral(a, b);
                m1 += g.amp * quad.first_moment(a, b);
                scale += g.amp.norm() * g.width * (1.0 + g.center.abs() + g.width);
            }
            (v, m1, 64.0 * EPS * scale.max(v.norm()))
        }
    };
    let dx = (I / (2.0 * t)) * (x * v - m1);
    let pn = pref.norm();
    Ok(FourierTerm { value: pref * v, dx: pref * dx, err: pn * err * (1.0 + (x.abs() + 1.0) / t) })
}

/// `∫ e^{i(x−y)²/(4t)} p(y) dy` and its first moment over the cells, by
/// Gauss–Legendre panels short enough that the chirp turns by at most a few
/// radians on each.
fn chirp_table(cells: &[Cell], a: f64, b: f64, x: f64, t: f64) -> (C64, C64, f64) {
    let (nodes, weights) = gl20();
    let (mut v, mut m1) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let mut l1 = 0.0;
    for c in cells {
        let lo = c.lo.max(a);
        let hi = c.hi.min(b);
        if !(hi > lo) {
            continue;
        }
        let mut y0 = lo;
        while y0 < hi {
            // (|x−y0| + h) h / (2t) ≤ 6 bounds the turn of the chirp
            let d = (x - y0).abs();
            let h_max = 24.0 * t / (d + (d * d + 48.0 * t).sqrt());
            let h = h_max.max(1e-6 * (hi - lo)).min(hi - y0);
            let y1 = if hi - (y0 + h) < 1e-12 * (hi - lo) { hi } else { y0 + h };
            let (mid, half) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
            for (s, w) in nodes.iter().zip(weights) {
                let y = mid + half * s;
                let u = y - c.mid;
                let p = ((c.coef[3] * u + c.coef[2]) * u + c.coef[1]) * u + c.coef[0];
                let e = C64::new(0.0, (x - y) * (x - y) / (4.0 * t)).exp();
                let f = e * p * (w * half);
                v += f;
                m1 += f * y;
                l1 += p.norm() * w * half * (1.0 + y.abs());
            }
            y0 = y1;
        }
    }
    (v, m1, 1e3 * EPS * l1)
}

type Key = (usize, u64, u64, u64);

/// Transforms of one problem, with an optional memo table.
#[derive(Debug)]
pub struct Transforms {
    pot: PiecewisePotential,
    ic: InitialCondition,
    cache: Option<RwLock<HashMap<Key, C64>>>,
}

impl Clone for Transforms {
    fn clone(&self) -> Self {
        Transforms { pot: self.pot.clone(), ic: self.ic.clone(), cache: self.cache.as_ref().map(|_| RwLock::new(HashMap::new())) }
    }
}

impl Transforms {
    pub fn new(pot: PiecewisePotential, ic: InitialCondition) -> Self {
        Transforms { pot, ic, cache: None }
    }

    /// Memoize `continued` by the exact bit pattern of `(j, k)`.
    pub fn with_cache(mut self) -> Self {
        self.cache = Some(RwLock::new(HashMap::new()));
        self
    }

    pub fn potential(&self) -> &PiecewisePotential {
        &self.pot
    }

    pub fn initial(&self) -> &InitialCondition {
        &self.ic
    }

    pub fn strict(&self, region: usize, k: C64) -> Result<TransformValue> {
        hat_psi0(region, &self.pot, &self.ic, k)
    }

    /// `ψ̂_0^(j)(k)` continued to the whole plane.
    pub fn continued(&self, region: usize, k: C64) -> C64 {
        self.shifted(region, k, 0.0)
    }

    /// `e^{iks} ψ̂_0^(j)(k)`.
    pub fn shifted(&self, region: usize, k: C64, shift: f64) -> C64 {
        let key = (region, k.re.to_bits(), k.im.to_bits(), shift.to_bits());
        if let Some(c) = &self.cache {
            if let Some(v) = c.read().expect("transform cache poisoned").get(&key) {
                return *v;
            }
        }
        let (a, b) = self.pot.bounds(region);
        let v = segment_transform_shifted(&self.ic, a, b, k, shift);
        if let Some(c) = &self.cache {
            c.write().expect("transform cache poisoned").insert(key, v);
        }
        v
    }

    /// Whole-line transform `Σ_j ψ̂_0^(j)(k)`.
    pub fn whole(&self, k: C64) -> C64 {
        segment_transform(&self.ic, f64::NEG_INFINITY, f64::INFINITY, k)
    }

    pub fn fourier(&self, region: usize, x: f64, t: f64) -> Result<FourierTerm> {
        fourier_term(region, &self.pot, &self.ic, x, t)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.read().expect("transform cache poisoned").len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn gauss() -> InitialCondition {
        InitialCondition::gaussian(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn half_gaussian_at_zero() {
        let v = hat_psi0(1, &PiecewisePotential::step(0.0, 0.0), &gauss(), c(0.0, 0.0)).unwrap();
        assert!((v.value.re - 0.886_226_925_452_758).abs() < 1e-14 && v.value.im.abs() < 1e-15);
    }

    #[test]
    fn unit_box_interior() {
        // ψ_0 ≡ 1 on [0, 1], sampled densely enough that the cubic is exact
        let xs: Vec<f64> = (0..=10).map(|i| -1.0 + 0.3 * i as f64).collect();
        let ic = InitialCondition::tabulated(xs.clone(), vec![c(1.0, 0.0); xs.len()]).unwrap();
        let pot = PiecewisePotential::new(vec![0.0, 0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let v = hat_psi0(2, &pot, &ic, c(2.0, 0.0)).unwrap().value;
        let exact = (1.0 - c(0.0, -2.0).exp()) / c(0.0, 2.0);
        assert!((v - exact).norm() < 1e-14, "{v} vs {exact}");
        assert!((exact - c(0.454_648_713_412_841, -0.708_073_418_273_571)).norm() < 1e-12);
    }

    #[test]
    fn complex_argument_against_quadrature() {
        let k = c(1.0, -0.5);
        let opts = QuadOptions::with_tol(1e-14);
        // e^{−ikx} e^{−x²} on (−∞, 0], truncated where e^{−x²} is negligible
        let r = integrate(|x: f64| [(-I * k * x).exp() * (-x * x).exp()], -12.0, 0.0, &opts).unwrap();
        let v = Transforms::new(PiecewisePotential::step(0.0, 0.0), gauss()).continued(1, k);
        assert!((v - r.value[0]).norm() < 1e-12, "{v} vs {}", r.value[0]);
        assert!(matches!(hat_psi0(1, &PiecewisePotential::step(0.0, 0.0), &gauss(), k), Err(Error::Domain { .. })));
    }

    #[test]
    fn tabulated_cells_match_quadrature_both_branches() {
        let xs: Vec<f64> = (0..40).map(|i| -4.0 + 0.2 * i as f64).collect();
        let vals: Vec<C64> = xs.iter().map(|&x| c((-x * x).exp(), 0.2 * x * (-x * x).exp())).collect();
        let ic = InitialCondition::tabulated(xs, vals).unwrap();
        let pot = PiecewisePotential::new(vec![0.0, 1.0, 0.0], vec![0.0, 1.3]).unwrap();
        let opts = QuadOptions::with_tol(1e-13);
        // small |k| uses the series, large |k| the closed form
        for k in [c(0.3, 0.1), c(25.0, -3.0), c(-7.0, 2.0)] {
            for j in 1..=3 {
                let (a, b) = pot.bounds(j);
                let (a, b) = (a.max(-4.0), b.min(3.8));
                let r = integrate(|x: f64| [(-I * k * x).exp() * ic.eval(x)], a, b, &opts).unwrap();
                let v = Transforms::new(pot.clone(), ic.clone()).continued(j, k);
                assert!((v - r.value[0]).norm() < 1e-10 * (1.0 + r.value[0].norm()), "j={j} k={k}: {v} vs {}", r.value[0]);
            }
        }
    }

    #[test]
    fn shift_is_a_phase() {
        let xs: Vec<f64> = (0..30).map(|i| -3.0 + 0.2 * i as f64).collect();
        let vals: Vec<C64> = xs.iter().map(|&x| c((-x * x).exp(), 0.0)).collect();
        let pot = PiecewisePotential::new(vec![0.0, 1.0, 0.0], vec![0.0, 1.0]).unwrap();
        for ic in [gauss(), InitialCondition::tabulated(xs, vals).unwrap()] {
            let tr = Transforms::new(pot.clone(), ic);
            let k = c(0.7, -2.3);
            for j in 1..=3 {
                let a = tr.shifted(j, k, 1.0);
                let b = (I * k).exp() * tr.continued(j, k);
                assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
            }
        }
    }

    #[test]
    fn decays_along_real_axis() {
        let tr = Transforms::new(PiecewisePotential::step(1.0, 2.0), InitialCondition::gaussian(1.0, 0.3, 0.8).unwrap());
        for j in 1..=2 {
            let a = tr.continued(j, c(100.0, 0.0)).norm();
            let b = tr.continued(j, c(1000.0, 0.0)).norm();
            assert!(a < 0.05 && b < a, "j={j}: {a} {b}");
        }
    }

    #[test]
    fn propagator_branch_on_free_gaussian() {
        let pot = PiecewisePotential::step(0.0, 0.0);
        for &(x, t) in &[(0.7, 0.3), (-1.5, 1.0), (0.0, 0.05)] {
            let z = c(1.0, 4.0 * t);
            let exact = z.powf(-0.5) * (-(x * x) / z).exp();
            let dexact = exact * (-2.0 * x / z);
            let f1 = fourier_term(1, &pot, &gauss(), x, t).unwrap();
            let f2 = fourier_term(2, &pot, &gauss(), x, t).unwrap();
            assert!((f1.value + f2.value - exact).norm() < 1e-13);
            assert!((f1.dx + f2.dx - dexact).norm() < 1e-12);
        }
    }

    #[test]
    fn tabulated_propagator_matches_gaussian() {
        let xs: Vec<f64> = (0..=600).map(|i| -6.0 + 0.02 * i as f64).collect();
        let vals: Vec<C64> = xs.iter().map(|&x| c((-x * x).exp(), 0.0)).collect();
        let tab = InitialCondition::tabulated(xs, vals).unwrap();
        let pot = PiecewisePotential::step(1.0, 2.0);
        for &(x, t) in &[(-0.5, 0.2), (1.0, 0.7)] {
            for j in 1..=2 {
                let a = fourier_term(j, &pot, &gauss(), x, t).unwrap();
                let b = fourier_term(j, &pot, &tab, x, t).unwrap();
                assert!((a.value - b.value).norm() < 1e-6, "{} vs {}", a.value, b.value);
                assert!((a.dx - b.dx).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn cache_returns_identical_bits() {
        let tr = Transforms::new(PiecewisePotential::step(1.0, 2.0), gauss()).with_cache();
        let k = c(0.37, -1.2);
        let a = tr.continued(2, k);
        let b = tr.continued(2, k);
        assert_eq!(a, b);
        assert_eq!(tr.cache_len(), 1);
    }

    proptest! {
        #[test]
        fn sum_rule(k in -8.0f64..8.0, c0 in -1.0f64..1.0, x2 in 0.1f64..2.0) {
            let ic = InitialCondition::gaussian(1.0, c0, 0.9).unwrap();
            let tr = Transforms::new(PiecewisePotential::new(vec![0.0, 3.0, -1.0], vec![0.0, x2]).unwrap(), ic);
            let k = c(k, 0.0);
            let s: C64 = (1..=3).map(|j| tr.continued(j, k)).sum();
            prop_assert!((s - tr.whole(k)).norm() < 1e-8);
        }

        #[test]
        fn conjugation_for_real_data(k in -20.0f64..20.0, c0 in -1.0f64..1.0) {
            let tr = Transforms::new(PiecewisePotential::step(1.0, 2.0), InitialCondition::gaussian(1.3, c0, 0.7).unwrap());
            for j in 1..=2 {
                let a = tr.continued(j, c(-k, 0.0));
                let b = tr.continued(j, c(k, 0.0)).conj();
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
