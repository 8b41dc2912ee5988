//! Finite well or barrier: `α = 0` outside `[0, x₂]`, `α` inside.
//!
//! The correction integrals are written over the fourth-quadrant contour in
//! `κ` with every exponential rescaled by `E = e^{i x₂ ν}` so that numerators
//! and the determinant stay bounded where `E` is large or small. The `k`-plane
//! quadrant forms are the same integrals under `κ = ±ik`.

use std::f64::consts::PI;

use crate::contours::integrate_sided;
use crate::general::{plan_for, ContourPlan};
use crate::kernel::{nu, Location};
use crate::transforms::Transforms;
use crate::{Error, FieldValue, InitialCondition, Numerics, PiecewisePotential, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// `Δ(κ) = 4iπ[(α+2κ²) sin(x₂ν) + 2κν cos(x₂ν)]` with `ν = ν^(2)(κ)`.
pub fn delta(alpha: f64, width: f64, kappa: C64) -> Result<C64> {
    let v = nu(alpha, kappa)?;
    Ok(delta_with(alpha, width, kappa, v))
}

fn delta_with(alpha: f64, width: f64, kappa: C64, v: C64) -> C64 {
    let z = v * width;
    4.0 * I * PI * ((alpha + 2.0 * kappa * kappa) * z.sin() + 2.0 * kappa * v * z.cos())
}

/// Which correction integral of the well solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WellTerm {
    /// `x < 0`, prefactor `e^{κx}`.
    Left,
    /// `x > x₂`, prefactor `e^{−κ(x−x₂)}`.
    Right,
    /// `0 < x < x₂`, wave leaving the right wall: `e^{−iν(x−x₂)}`.
    InnerRight,
    /// `0 < x < x₂`, wave leaving the left wall: `e^{iνx}`.
    InnerLeft,
}

/// Well solver built on the closed-form `n = 2` solution.
#[derive(Clone, Debug)]
pub struct WellSolver {
    tr: Transforms,
    alpha: f64,
    width: f64,
    plan: ContourPlan,
}

impl WellSolver {
    pub fn new(alpha: f64, width: f64, ic: InitialCondition, numerics: Numerics) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidPotential(format!("well needs finite α and width > 0, got α={alpha}, width={width}")));
        }
        let pot = PiecewisePotential::well(alpha, width)?;
        let plan = plan_for(&pot, &numerics)?;
        Ok(WellSolver { tr: Transforms::new(pot, ic), alpha, width, plan })
    }

    pub fn potential(&self) -> &PiecewisePotential {
        self.tr.potential()
    }

    /// Integrand of one correction term at `κ`, `[value, ∂_x value]`.
    pub fn integrand(&self, term: WellTerm, x: f64, t: f64, kappa: C64) -> Result<[C64; 2]> {
        let (al, l) = (self.alpha, self.width);
        let k = kappa;
        let v = nu(al, k)?;
        let e = (I * l * v).exp();
        let e2 = e * e;
        let m = k - I * v;
        // κ + iν = −α/(κ − iν), free of cancellation for large κ
        let p = if al == 0.0 { C64::new(0.0, 0.0) } else { -al / m };
        let t1 = self.tr.continued(1, I * k);
        let t2p = self.tr.shifted(2, v, l);
        let t2m = self.tr.continued(2, -v);
        let t3 = self.tr.shifted(3, -I * k, l);
        let den = 2.0 * PI * ((al + 2.0 * k * k) * (e2 - 1.0) + 2.0 * I * k * v * (e2 + 1.0));
        let ia = I * al;
        let (num, pre, dfac) = match term {
            WellTerm::Left => (
                -ia * (e2 - 1.0) * t1 + 2.0 * I * e * k * p * t2p - 2.0 * I * k * m * t2m - 4.0 * k * v * e * t3,
                k * x,
                k,
            ),
            WellTerm::Right => (
                -4.0 * k * v * e * t1 - 2.0 * I * k * m * t2p + 2.0 * I * k * p * e * t2m - ia * (e2 - 1.0) * t3,
                -k * (x - l),
                -k,
            ),
            WellTerm::InnerRight => (
                2.0 * I * k * p * e * t1 + (al * k / v) * t2p + k * p * p * e / v * t2m - 2.0 * I * k * m * t3,
                -I * v * (x - l),
                -I * v,
            ),
            WellTerm::InnerLeft => (
                -2.0 * I * k * m * t1 + e * k * p * p / v * t2p + (al * k / v) * t2m + 2.0 * I * k * p * e * t3,
                I * v * x,
                I * v,
            ),
        };
        let w = (pre + I * k * k * t).exp() * num / den;
        Ok([w, w * dfac])
    }

    fn term(&self, term: WellTerm, x: f64, t: f64) -> Result<FieldValue> {
        let l = self.width;
        let d = match term {
            WellTerm::Left => -x,
            WellTerm::Right => x - l,
            WellTerm::InnerRight => l - x,
            WellTerm::InnerLeft => x,
        }
        .max(0.0);
        let mut plan = self.plan;
        let mut last = None;
        for _ in 0..5 {
            let path = plan.path(d, t);
            let f = |k: C64, _| self.integrand(term, x, t, k).unwrap_or([C64::new(f64::NAN, 0.0); 2]);
            let env = |k: C64| (-k * d + I * k * k * t).re;
            match integrate_sided(&path, f, Some(&env)) {
                Ok(r) if r.value.iter().all(|z| z.is_finite()) => {
                    return Ok(FieldValue { psi: r.value[0], dpsi: r.value[1], err: r.error })
                }
                Ok(_) => last = Some(Error::NearSingular { kappa: C64::new(f64::NAN, f64::NAN), condition: f64::INFINITY }),
                Err(e @ (Error::Quadrature { .. } | Error::NearSingular { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
            plan = plan.widened();
        }
        Err(last.expect("at least one attempt"))
    }

    /// Region formula (1, 2 or 3) at `x` on the closure of that region.
    pub fn region_field(&self, region: usize, x: f64, t: f64) -> Result<FieldValue> {
        let f = self.tr.fourier(region, x, t)?;
        let mut out = FieldValue { psi: f.value, dpsi: f.dx, err: f.err };
        let terms: &[WellTerm] = match region {
            1 => &[WellTerm::Left],
            2 => &[WellTerm::InnerRight, WellTerm::InnerLeft],
            3 => &[WellTerm::Right],
            _ => return Err(Error::Argument(format!("a well has regions 1..=3, got {region}"))),
        };
        for &term in terms {
            out.add(&self.term(term, x, t)?);
        }
        Ok(out)
    }

    pub fn field(&self, x: f64, t: f64) -> Result<FieldValue> {
        if !x.is_finite() || !t.is_finite() || t < 0.0 {
            return Err(Error::Argument(format!("bad point ({x}, {t})")));
        }
        if t == 0.0 {
            let ic = self.tr.initial();
            return Ok(FieldValue { psi: ic.eval(x), dpsi: ic.deriv(x), err: 0.0 });
        }
        match self.potential().locate(x) {
            Location::Region(j) => self.region_field(j, x, t),
            Location::Interface(j) => {
                let a = self.region_field(j, x, t)?;
                let b = self.region_field(j + 1, x, t)?;
                Ok(FieldValue::mean(&a, &b))
            }
        }
    }
}

/// `a(ξ)` of the well, the (1,1) entry of its scattering matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringCoefficient {
    pub xi: C64,
    pub a_value: C64,
}

/// `a(ξ) = e^{iξx₂}(cosh(x₂σ) − i(2ξ²−α)/(2ξσ) sinh(x₂σ))`, `σ = √(α−ξ²)`.
pub fn scattering_a(alpha: f64, x2: f64, xi: C64) -> Result<ScatteringCoefficient> {
    if xi == C64::new(0.0, 0.0) {
        return Err(Error::Domain { region: 0, k: xi });
    }
    let sigma = (alpha - xi * xi).sqrt();
    let z = x2 * sigma;
    // sinh(x₂σ)/σ, even in σ
    let sinhc = if z.norm() < 1e-3 {
        let z2 = z * z;
        x2 * (1.0 + z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        z.sinh() / sigma
    };
    let a = (I * xi * x2).exp() * (z.cosh() - I * (2.0 * xi * xi - alpha) / (2.0 * xi) * sinhc);
    Ok(ScatteringCoefficient { xi, a_value: a })
}

/// `e^{ηx₂} a(iη)`, real for `η > 0`.
fn a_on_imaginary_axis(alpha: f64, x2: f64, eta: f64) -> f64 {
    let xi = C64::new(0.0, eta);
    let a = scattering_a(alpha, x2, xi).expect("η > 0").a_value;
    (a * (eta * x2).exp()).re
}

/// `Δ(κ)/(4iπ)` for real `κ` in `(0, √−α)`, where `ν` is real on either side
/// of its cut; the value changes sign with the side, not its zeros.
fn delta_real(alpha: f64, x2: f64, kappa: f64) -> f64 {
    let v = (-alpha - kappa * kappa).max(0.0).sqrt();
    (alpha + 2.0 * kappa * kappa) * (x2 * v).sin() + 2.0 * kappa * v * (x2 * v).cos()
}

/// Roots of `f` on `(lo, hi)` by sign changes on a uniform grid, each refined
/// by bisection to `tol`.
pub fn bracket_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Vec<f64> {
    let h = (hi - lo) / points as f64;
    let mut out = Vec::new();
    let mut xa = lo + 0.5 * h;
    let mut fa = f(xa);
    for i in 1..points {
        let xb = lo + (i as f64 + 0.5) * h;
        let fb = f(xb);
        if fa == 0.0 {
            out.push(xa);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let (mut a, mut b, mut sa) = (xa, xb, fa.signum());
            while b - a > tol {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == sa {
                    a = m;
                    sa = fm.signum();
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    out
}

/// Zeros `ξ = iη` of `a` on the positive imaginary axis, as `η`.
pub fn bound_state_roots(alpha: f64, x2: f64) -> Vec<f64> {
    if !(alpha < 0.0) {
        return Vec::new();
    }
    let top = (-alpha).sqrt();
    bracket_roots(|e| a_on_imaginary_axis(alpha, x2, e), 0.0, top, 1000, 1e-12)
}

/// Zeros of `Δ` on the positive real `κ` axis.
pub fn delta_roots(alpha: f64, x2: f64) -> Vec<f64> {
    if !(alpha < 0.0) {
        return Vec::new();
    }
    let top = (-alpha).sqrt();
    bracket_roots(|k| delta_real(alpha, x2, k), 0.0, top, 1000, 1e-12)
}

/// A zero of `a` paired with the nearest zero of `Δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub xi_root: C64,
    pub kappa_root: Option<f64>,
    /// `|Δ(κ)|` at `κ = Im ξ`, the point where the outer-region relation
    /// `iξ² = ω(k) = ik²` with `κ = ik` and `k = −ξ` places the zero.
    pub residual: f64,
}

/// Pairs every bound-state zero of `a` with a zero of `Δ` found
/// independently. Unmatched roots are returned with `kappa_root = None`.
pub fn eigenvalue_correspondence(alpha: f64, x2: f64) -> Vec<EigenPair> {
    let etas = bound_state_roots(alpha, x2);
    let kappas = delta_roots(alpha, x2);
    etas.iter()
        .map(|&eta| {
            let near = kappas.iter().copied().min_by(|a, b| (a - eta).abs().total_cmp(&(b - eta).abs()));
            let kappa_root = near.filter(|k| (k - eta).abs() < 1e-8 * (1.0 + eta));
            let residual = 4.0 * PI * delta_real(alpha, x2, eta).abs();
            EigenPair { xi_root: C64::new(0.0, eta), kappa_root, residual }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::general::{full_matrix, GeneralSolver};
    use crate::kernel::scaled_root;
    use crate::oracle::free_gaussian;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn closed_form_delta_is_the_normalized_determinant() {
        let (al, l) = (-3.0, 1.3);
        let pot = PiecewisePotential::well(al, l).unwrap();
        let mut ratios = Vec::new();
        for i in 0..30 {
            let k = C64::from_polar(0.8 + 0.2 * i as f64, -1.5 + 0.1 * i as f64);
            let det = full_matrix(&pot, k).unwrap().determinant();
            // the region-3 row carries e^{iν^(3) x₂} = e^{−κx₂}
            ratios.push(det * (k * l).exp() / delta(al, l, k).unwrap());
        }
        for r in &ratios {
            assert!((r - 1.0 / (2.0 * PI)).norm() < 1e-12, "{r}");
        }
    }

    #[test]
    fn integrands_match_the_general_system() {
        use crate::general::solve_unknowns;
        let ic = InitialCondition::gaussian(1.0, -0.6, 0.9).unwrap();
        for al in [4.0, -4.0] {
            let w = WellSolver::new(al, 1.0, ic.clone(), Numerics::default()).unwrap();
            let tr = &w.tr;
            for (i, &(x, t)) in [(-0.7, 0.4), (0.3, 0.8), (1.6, 0.5)].iter().enumerate() {
                let k = C64::from_polar(2.0 + i as f64, -0.3 - 0.4 * i as f64);
                let u = solve_unknowns(tr, k).unwrap();
                let v = &u.nus;
                let g = |j: usize| -> C64 {
                    // region-j correction integrand of the general solver
                    let mut s = C64::new(0.0, 0.0);
                    if j <= 2 {
                        s += -(-I * v[j - 1] * (x - tr.potential().x(j)) + I * k * k * t).exp() * k
                            * (u.g1(j) / v[j - 1] + u.g0(j))
                            / (2.0 * PI);
                    }
                    if j >= 2 {
                        s += (I * v[j - 1] * (x - tr.potential().x(j - 1)) + I * k * k * t).exp() * k
                            * (u.g1(j - 1) / v[j - 1] - u.g0(j - 1))
                            / (2.0 * PI);
                    }
                    s
                };
                let region = match tr.potential().locate(x) {
                    Location::Region(j) => j,
                    _ => unreachable!(),
                };
                let mine = match region {
                    1 => w.integrand(WellTerm::Left, x, t, k).unwrap()[0],
                    3 => w.integrand(WellTerm::Right, x, t, k).unwrap()[0],
                    _ => w.integrand(WellTerm::InnerRight, x, t, k).unwrap()[0] + w.integrand(WellTerm::InnerLeft, x, t, k).unwrap()[0],
                };
                let r = g(region);
                assert!((mine - r).norm() < 1e-11 * (1.0 + r.norm()), "α={al} region {region}: {mine} vs {r}");
            }
        }
    }

    #[test]
    fn k_plane_form_of_region_one() {
        // the k-plane integrand in closed form, against ours under κ = ik (dκ = i dk)
        let (al, l) = (2.5, 0.8);
        let ic = InitialCondition::gaussian(1.0, -1.0, 1.0).unwrap();
        let w = WellSolver::new(al, l, ic, Numerics::default()).unwrap();
        let tr = &w.tr;
        let (x, t) = (-0.4, 0.3);
        for i in 0..6 {
            let k = C64::from_polar(2.5 + 0.3 * i as f64, -2.3 + 0.25 * i as f64);
            let s = scaled_root(-al, k).unwrap() / k;
            let om = I * k * k;
            let dl = delta(al, l, I * k).unwrap();
            let e = |z: C64| (z - om * t).exp();
            let closed = (al * ((-I * k * l * s).exp() - (I * k * l * s).exp()) * e(I * k * x) * tr.continued(1, -k)
                - 2.0 * k * k * (1.0 + s) * e(I * k * (x + l * s)) * tr.continued(2, k * s)
                + 2.0 * k * k * (1.0 - s) * e(I * k * (x - l * s)) * tr.continued(2, -k * s)
                - 4.0 * k * k * s * e(I * k * (x + l)) * tr.continued(3, k))
                / dl;
            let ours = I * w.integrand(WellTerm::Left, x, t, I * k).unwrap()[0];
            assert!((closed - ours).norm() < 1e-10 * (1.0 + ours.norm()), "{closed} vs {ours}");
        }
    }

    #[test]
    fn free_limit() {
        let ic = InitialCondition::gaussian(1.0, 0.0, 1.0).unwrap();
        let w = WellSolver::new(0.0, 1.0, ic, Numerics::default()).unwrap();
        for &(x, t) in &[(-1.0, 0.2), (0.5, 0.5), (2.0, 1.0)] {
            assert!((w.field(x, t).unwrap().psi - free_gaussian(x, t, 0.0, 1.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn agrees_with_general_solver() {
        let ic = InitialCondition::gaussian(1.0, -1.0, 1.0).unwrap();
        for al in [4.0, -4.0] {
            let w = WellSolver::new(al, 1.0, ic.clone(), Numerics::default()).unwrap();
            let g = GeneralSolver::new(PiecewisePotential::well(al, 1.0).unwrap(), ic.clone(), Numerics::default()).unwrap();
            for &(x, t) in &[(-1.0, 0.3), (0.5, 0.6), (1.8, 1.0)] {
                let (a, b) = (w.field(x, t).unwrap(), g.field(x, t).unwrap());
                assert!((a.psi - b.psi).norm() <= 5.0 * (a.err + b.err) + 1e-12, "α={al} {x},{t}: {} vs {}", a.psi, b.psi);
            }
        }
    }

    #[test]
    fn a_is_one_without_potential() {
        for i in 1..50 {
            let xi = c(-5.0 + 0.2 * i as f64 + 0.01, 0.0);
            assert!((scattering_a(0.0, 1.0, xi).unwrap().a_value - 1.0).norm() < 1e-12);
        }
        assert!((scattering_a(0.0, 1.0, c(2.0, 0.0)).unwrap().a_value - 1.0).norm() < 1e-15);
        assert!(matches!(scattering_a(1.0, 1.0, c(0.0, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn series_branch_near_sigma_zero() {
        let (al, l) = (4.0, 1.0);
        let xi = c(2.0 + 1e-9, 0.0);
        let a = scattering_a(al, l, xi).unwrap().a_value;
        let lim = (I * xi * l).exp() * (1.0 - I * (2.0 * xi * xi - al) * l / (2.0 * xi));
        assert!((a - lim).norm() < 1e-8);
    }

    #[test]
    fn bound_states_pair_up() {
        let p = eigenvalue_correspondence(-4.0, 1.0);
        assert!(!p.is_empty());
        for e in &p {
            assert!(e.kappa_root.is_some());
            assert!(e.residual < 1e-8, "{e:?}");
        }
        let deep = eigenvalue_correspondence(-100.0, 1.0);
        assert_eq!(deep.len(), 4);
        assert!(deep.iter().all(|e| e.kappa_root.is_some() && e.residual < 1e-8));
        assert!(eigenvalue_correspondence(0.0, 1.0).is_empty());
    }
}
