//! Interface system for `n` interfaces and the solution built from it.
//!
//! Unknowns are ordered `X_1..X_n` (traces of `ψ`) then `X_{n+1}..X_{2n}`
//! (traces of `ψ_x`), all transformed at `ν^(j)(κ)`. Rows are the global
//! relations: one "upper" row per region `m = 1..n` (evaluated at `ν^(m)`)
//! and one "lower" row per region `ℓ+1 = 2..n+1` (evaluated at `−ν^(ℓ+1)`).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::contours::{crossing_path, integrate_sided, winding_number, ContourPath, Leg, PathLeg};
use crate::kernel::{nu, Location};
use crate::transforms::Transforms;
use crate::{Error, FieldValue, InitialCondition, Numerics, PiecewisePotential, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Condition estimate beyond which the system is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// `ν^(1)(κ)..ν^(n+1)(κ)`.
pub fn nus(pot: &PiecewisePotential, kappa: C64) -> Result<Vec<C64>> {
    pot.levels().iter().map(|&a| nu(a, kappa)).collect()
}

fn zeros(n: usize) -> DMatrix<C64> {
    DMatrix::from_element(2 * n, 2 * n, C64::new(0.0, 0.0))
}

/// The full matrix `𝒜(κ)`.
pub fn full_matrix(pot: &PiecewisePotential, kappa: C64) -> Result<DMatrix<C64>> {
    let n = pot.n();
    let v = nus(pot, kappa)?;
    let mut a = zeros(n);
    for m in 1..=n {
        let nm = v[m - 1];
        let r = m - 1;
        if m >= 2 {
            let e = (-I * nm * pot.x(m - 1)).exp();
            a[(r, m - 2)] = nm * e;
            a[(r, n + m - 2)] = -e;
        }
        let e = (-I * nm * pot.x(m)).exp();
        a[(r, m - 1)] = -nm * e;
        a[(r, n + m - 1)] = e;
    }
    for l in 1..=n {
        let nm = v[l];
        let r = n + l - 1;
        let e = (I * nm * pot.x(l)).exp();
        a[(r, l - 1)] = -nm * e;
        a[(r, n + l - 1)] = -e;
        if l < n {
            let e = (I * nm * pot.x(l + 1)).exp();
            a[(r, l)] = nm * e;
            a[(r, n + l)] = e;
        }
    }
    Ok(a)
}

/// Diagonal of `𝒜^L`, the row scaling that leaves `𝒜^M` bounded.
pub fn left_factor(pot: &PiecewisePotential, kappa: C64) -> Result<DVector<C64>> {
    let n = pot.n();
    let v = nus(pot, kappa)?;
    Ok(DVector::from_fn(2 * n, |r, _| {
        if r < n {
            (-I * v[r] * pot.x(r + 1)).exp()
        } else {
            let l = r - n + 1;
            (I * v[l] * pot.x(l)).exp()
        }
    }))
}

/// `𝒜^M = (𝒜^L)^{−1} 𝒜`, assembled directly from interface spacings.
pub fn middle_factor(pot: &PiecewisePotential, kappa: C64) -> Result<DMatrix<C64>> {
    let v = nus(pot, kappa)?;
    Ok(middle_from(pot, &v))
}

fn middle_from(pot: &PiecewisePotential, v: &[C64]) -> DMatrix<C64> {
    let n = pot.n();
    let mut a = zeros(n);
    for m in 1..=n {
        let nm = v[m - 1];
        let r = m - 1;
        a[(r, m - 1)] = -nm;
        a[(r, n + m - 1)] = C64::new(1.0, 0.0);
        if m >= 2 {
            let e = (I * nm * (pot.x(m) - pot.x(m - 1))).exp();
            a[(r, m - 2)] = nm * e;
            a[(r, n + m - 2)] = -e;
        }
    }
    for l in 1..=n {
        let nm = v[l];
        let r = n + l - 1;
        a[(r, l - 1)] = -nm;
        a[(r, n + l - 1)] = C64::new(-1.0, 0.0);
        if l < n {
            let e = (I * nm * (pot.x(l + 1) - pot.x(l))).exp();
            a[(r, l)] = nm * e;
            a[(r, n + l)] = e;
        }
    }
    a
}

/// Right-hand side `Y` of `𝒜 X = Y`.
pub fn full_rhs(tr: &Transforms, kappa: C64) -> Result<DVector<C64>> {
    let pot = tr.potential();
    let n = pot.n();
    let v = nus(pot, kappa)?;
    Ok(DVector::from_fn(2 * n, |r, _| {
        if r < n {
            -tr.continued(r + 1, v[r])
        } else {
            let l = r - n + 1;
            -tr.continued(l + 1, -v[l])
        }
    }))
}

/// `(𝒜^L)^{−1} Y`; with `only` set, rows fed by other regions' data are zero.
fn scaled_rhs(tr: &Transforms, v: &[C64], only: Option<usize>) -> DVector<C64> {
    let pot = tr.potential();
    let n = pot.n();
    let keep = |j: usize| only.map_or(true, |o| o == j);
    DVector::from_fn(2 * n, |r, _| {
        let zero = C64::new(0.0, 0.0);
        if r < n {
            if keep(r + 1) {
                -tr.shifted(r + 1, v[r], pot.x(r + 1))
            } else {
                zero
            }
        } else {
            let l = r - n + 1;
            if keep(l + 1) {
                -tr.shifted(l + 1, -v[l], pot.x(l))
            } else {
                zero
            }
        }
    })
}

/// Solution of the interface system at one `κ`.
#[derive(Clone, Debug)]
pub struct InterfaceUnknowns {
    pub kappa: C64,
    pub nus: Vec<C64>,
    /// `X_1..X_{2n}`.
    pub x: Vec<C64>,
    /// `‖𝒜^M X − b‖ / ‖b‖`.
    pub backward_error: f64,
    /// `‖𝒜^M‖₁ ‖(𝒜^M)^{−1}‖₁`.
    pub condition: f64,
}

impl InterfaceUnknowns {
    /// Transformed trace of `ψ` at `x_j`.
    pub fn g0(&self, j: usize) -> C64 {
        self.x[j - 1]
    }

    /// Transformed trace of `ψ_x` at `x_j`.
    pub fn g1(&self, j: usize) -> C64 {
        self.x[self.x.len() / 2 + j - 1]
    }
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solves `M X = b`; Cramer's rule up to 4×4, LU beyond.
pub fn solve_linear(m: &DMatrix<C64>, b: &DVector<C64>, kappa: C64) -> Result<(Vec<C64>, f64, f64)> {
    let size = m.nrows();
    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::NearSingular { kappa, condition: f64::INFINITY })?;
    let condition = norm1(m) * norm1(&inv);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NearSingular { kappa, condition });
    }
    let x: DVector<C64> = if size <= 4 {
        let det = m.determinant();
        DVector::from_fn(size, |c, _| {
            let mut mc = m.clone();
            mc.set_column(c, b);
            mc.determinant() / det
        })
    } else {
        &inv * b
    };
    let bn = b.norm();
    let backward = if bn > 0.0 { (m * &x - b).norm() / bn } else { (m * &x).norm() };
    Ok((x.iter().copied().collect(), backward, condition))
}

/// Interface unknowns at `κ` from the scaled system `𝒜^M X = (𝒜^L)^{−1} Y`.
pub fn solve_unknowns(tr: &Transforms, kappa: C64) -> Result<InterfaceUnknowns> {
    solve_unknowns_from(tr, kappa, None)
}

/// As `solve_unknowns`, optionally keeping only the initial data of one region.
pub fn solve_unknowns_from(tr: &Transforms, kappa: C64, only_region: Option<usize>) -> Result<InterfaceUnknowns> {
    let pot = tr.potential();
    let v = nus(pot, kappa)?;
    let m = middle_from(pot, &v);
    let b = scaled_rhs(tr, &v, only_region);
    let (x, backward_error, condition) = solve_linear(&m, &b, kappa)?;
    Ok(InterfaceUnknowns { kappa, nus: v, x, backward_error, condition })
}

/// Where the correction contour meets the real and imaginary axes before any
/// dependence on `x` and `t`: past every cut and real bound-state pole.
pub fn crossing_radii(pot: &PiecewisePotential, numerics: &Numerics) -> Result<(f64, f64)> {
    let neg = pot.levels().iter().fold(0.0f64, |m, &a| m.max(-a));
    let pos = pot.levels().iter().fold(0.0f64, |m, &a| m.max(a));
    if let Some(r) = numerics.radius {
        let bound = pot.cut_radius();
        if !(r > bound) || !r.is_finite() {
            return Err(Error::RadiusTooSmall { radius: r, bound, lambda: pot.lambda() });
        }
        return Ok((r, r));
    }
    let pick = |l: f64| (1.25 * (2.0 * l).sqrt()).max(0.5);
    Ok((pick(neg), pick(pos)))
}

/// Contour parameters for one family of correction integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourPlan {
    /// Real-axis crossing.
    pub a: f64,
    /// Imaginary-axis crossing floor.
    pub b: f64,
    /// Offset of the downward leg in the third quadrant, if any.
    pub turn: Option<f64>,
    pub tolerance: f64,
}

impl ContourPlan {
    /// Path for a term whose exponential is `e^{−κd + iκ²t}` near infinity.
    pub fn path(&self, d: f64, t: f64) -> ContourPath {
        let yb = self.b.max(d / (2.0 * t));
        let eps = (std::f64::consts::SQRT_2 / (t * self.a.max(yb))).max(0.02);
        let mut p = crossing_path(self.a, yb, eps, self.turn);
        p.tolerance = self.tolerance;
        p
    }

    pub fn widened(&self) -> Self {
        ContourPlan { a: self.a * 1.5, b: self.b * 1.5, turn: self.turn.map(|c| c * 0.5), tolerance: self.tolerance }
    }
}

/// Picks the third-quadrant leg offset so that no zero of `det 𝒜^M` lies
/// between it and the imaginary axis below `−i b`. For `n = 1` the
/// determinant is `ν^(1)+ν^(2)` and never vanishes off the cuts.
pub fn plan_for(pot: &PiecewisePotential, numerics: &Numerics) -> Result<ContourPlan> {
    let (a, b) = crossing_radii(pot, numerics)?;
    let tolerance = numerics.tolerance;
    if pot.n() == 1 {
        return Ok(ContourPlan { a, b, turn: None, tolerance });
    }
    let mut c = numerics.shift;
    let width = pot.x(pot.n()) - pot.x(1);
    let det = |k: C64| -> Result<C64> { Ok(middle_factor(pot, k)?.determinant()) };
    for _ in 0..8 {
        let depth = 4.0 * b + 40.0;
        let corners = [C64::new(0.0, -b), C64::new(-c, -b), C64::new(-c, -depth), C64::new(0.0, -depth)];
        let legs = (0..4)
            .map(|i| PathLeg::plain(Leg::Line { from: corners[i], to: corners[(i + 1) % 4] }))
            .collect();
        let strip = ContourPath::new(legs, f64::INFINITY, tolerance);
        let samples = (40.0 * depth * (1.0 + width)) as usize + 2000;
        if winding_number(&strip, det, samples)? == 0 {
            return Ok(ContourPlan { a, b, turn: Some(c), tolerance });
        }
        c *= 0.5;
    }
    Err(Error::NearSingular { kappa: C64::new(-c, -b), condition: f64::INFINITY })
}

/// Solver for an arbitrary number of interfaces.
#[derive(Clone, Debug)]
pub struct GeneralSolver {
    tr: Transforms,
    plan: ContourPlan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    /// Trace at the right end `x_j` of region `j`.
    Right,
    /// Trace at the left end `x_{j−1}`.
    Left,
}

impl GeneralSolver {
    pub fn new(pot: PiecewisePotential, ic: InitialCondition, numerics: Numerics) -> Result<Self> {
        let plan = plan_for(&pot, &numerics)?;
        Ok(GeneralSolver { tr: Transforms::new(pot, ic), plan })
    }

    pub fn transforms(&self) -> &Transforms {
        &self.tr
    }

    pub fn plan(&self) -> ContourPlan {
        self.plan
    }

    /// `ψ` and `ψ_x` at `(x, t)`. On an interface both neighbouring formulas
    /// are evaluated and averaged; their gap is added to the error.
    pub fn field(&self, x: f64, t: f64) -> Result<FieldValue> {
        if !x.is_finite() || !t.is_finite() || t < 0.0 {
            return Err(Error::Argument(format!("bad point ({x}, {t})")));
        }
        let ic = self.tr.initial();
        if t == 0.0 {
            return Ok(FieldValue { psi: ic.eval(x), dpsi: ic.deriv(x), err: 0.0 });
        }
        match self.tr.potential().locate(x) {
            Location::Region(j) => self.region_field(j, x, t),
            Location::Interface(j) => {
                let l = self.region_field(j, x, t)?;
                let r = self.region_field(j + 1, x, t)?;
                Ok(FieldValue::mean(&l, &r))
            }
        }
    }

    /// The region-`j` formula at `x`; meaningful on the closure of region `j`.
    pub fn region_field(&self, j: usize, x: f64, t: f64) -> Result<FieldValue> {
        let pot = self.tr.potential();
        let f = self.tr.fourier(j, x, t)?;
        let mut out = FieldValue { psi: f.value, dpsi: f.dx, err: f.err };
        if j <= pot.n() {
            out.add(&self.term(j, Term::Right, x, t)?);
        }
        if j >= 2 {
            out.add(&self.term(j, Term::Left, x, t)?);
        }
        Ok(out)
    }

    fn term(&self, j: usize, which: Term, x: f64, t: f64) -> Result<FieldValue> {
        let pot = self.tr.potential();
        let (d, edge) = match which {
            Term::Right => (pot.x(j) - x, pot.x(j)),
            Term::Left => (x - pot.x(j - 1), pot.x(j - 1)),
        };
        let d = d.max(0.0);
        let mut plan = self.plan;
        let mut last = None;
        for _ in 0..5 {
            let path = plan.path(d, t);
            let f = |k: C64, _| -> [C64; 2] {
                let u = match solve_unknowns(&self.tr, k) {
                    Ok(u) => u,
                    Err(_) => return [C64::new(f64::NAN, 0.0); 2],
                };
                let v = u.nus[j - 1];
                let (arg, amp, dfac) = match which {
                    Term::Right => (-I * v * (x - edge), -(u.g1(j) / v + u.g0(j)), -I * v),
                    Term::Left => (I * v * (x - edge), u.g1(j - 1) / v - u.g0(j - 1), I * v),
                };
                let w = (arg + I * k * k * t).exp() * k * amp / (2.0 * PI);
                [w, w * dfac]
            };
            let env = |k: C64| (-k * d + I * k * k * t).re;
            match integrate_sided(&path, f, Some(&env)) {
                Ok(r) if r.value.iter().all(|z| z.is_finite()) => {
                    return Ok(FieldValue { psi: r.value[0], dpsi: r.value[1], err: r.error });
                }
                Ok(_) => last = Some(Error::NearSingular { kappa: C64::new(f64::NAN, f64::NAN), condition: f64::INFINITY }),
                Err(e @ (Error::Quadrature { .. } | Error::NearSingular { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
            plan = plan.widened();
        }
        Err(last.expect("at least one attempt"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::free_gaussian;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn three() -> PiecewisePotential {
        PiecewisePotential::new(vec![1.0, -2.0, 3.0, 0.5], vec![0.0, 0.7, 1.5]).unwrap()
    }

    fn sample_kappas() -> Vec<C64> {
        (0..20).map(|i| C64::from_polar(2.0 + 0.3 * i as f64, -1.4 + 0.17 * i as f64)).collect()
    }

    #[test]
    fn factorization_holds() {
        for pot in [three(), PiecewisePotential::well(-4.0, 1.0).unwrap()] {
            for k in sample_kappas() {
                let a = full_matrix(&pot, k).unwrap();
                let l = left_factor(&pot, k).unwrap();
                let m = middle_factor(&pot, k).unwrap();
                let lm = DMatrix::from_diagonal(&l) * m;
                let scale = a.norm().max(1.0);
                assert!((a - lm).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn three_interface_sparsity() {
        let a = full_matrix(&three(), c(1.3, -0.4)).unwrap();
        let nz = a.iter().filter(|z| z.norm() > 0.0).count();
        // each of the 2n rows couples two interfaces, minus the two end rows
        assert_eq!(nz, 4 * (2 * 3) - 4);
    }

    #[test]
    fn single_interface_closed_form() {
        let pot = PiecewisePotential::step(1.0, 2.0);
        let ic = InitialCondition::gaussian(1.0, -0.3, 1.0).unwrap();
        let tr = Transforms::new(pot.clone(), ic);
        for k in sample_kappas() {
            let v = nus(&pot, k).unwrap();
            let det = full_matrix(&pot, k).unwrap().determinant();
            assert!((det - (v[0] + v[1])).norm() < 1e-12 * det.norm());
            let u = solve_unknowns(&tr, k).unwrap();
            let a = tr.continued(1, v[0]);
            let b = tr.continued(2, -v[1]);
            let x1 = (a + b) / (v[0] + v[1]);
            let x2 = (v[0] * b - v[1] * a) / (v[0] + v[1]);
            assert!((u.g0(1) - x1).norm() < 1e-12 * (1.0 + x1.norm()));
            assert!((u.g1(1) - x2).norm() < 1e-12 * (1.0 + x2.norm()));
        }
    }

    #[test]
    fn scaled_and_full_systems_agree() {
        let pot = three();
        let ic = InitialCondition::gaussian(1.0, 0.4, 0.8).unwrap();
        let tr = Transforms::new(pot.clone(), ic);
        let k = c(2.1, -0.8);
        let u = solve_unknowns(&tr, k).unwrap();
        assert!(u.backward_error < 1e-10);
        let a = full_matrix(&pot, k).unwrap();
        let y = full_rhs(&tr, k).unwrap();
        let x = DVector::from_vec(u.x.clone());
        assert!((a * x - &y).norm() < 1e-9 * y.norm());
    }

    #[test]
    fn near_singular_is_reported() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0 + 1e-15, 0.0)]);
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(solve_linear(&m, &b, c(1.0, 0.0)), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn free_problem_is_recovered() {
        // equal levels: the interfaces must be invisible
        let pot = PiecewisePotential::new(vec![0.0, 0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let ic = InitialCondition::gaussian(1.0, 0.0, 1.0).unwrap();
        let s = GeneralSolver::new(pot, ic, Numerics::default()).unwrap();
        for &(x, t) in &[(-1.0, 0.3), (0.5, 0.3), (1.0, 0.7), (2.5, 1.0)] {
            let f = s.field(x, t).unwrap();
            assert!((f.psi - free_gaussian(x, t, 0.0, 1.0)).norm() < 1e-8, "{x} {t} {:?}", f);
        }
    }

    #[test]
    fn duplicated_level_matches_single_interface() {
        let ic = InitialCondition::gaussian(1.0, -0.5, 1.0).unwrap();
        let one = GeneralSolver::new(PiecewisePotential::step(1.0, 2.0), ic.clone(), Numerics::default()).unwrap();
        let two = GeneralSolver::new(
            PiecewisePotential::new(vec![1.0, 2.0, 2.0], vec![0.0, 0.8]).unwrap(),
            ic,
            Numerics::default(),
        )
        .unwrap();
        for &x in &[-1.2, 0.4, 1.5] {
            let a = one.field(x, 0.5).unwrap();
            let b = two.field(x, 0.5).unwrap();
            assert!((a.psi - b.psi).norm() < 1e-8, "{x}: {} vs {}", a.psi, b.psi);
            assert!((a.dpsi - b.dpsi).norm() < 1e-7);
        }
    }

    #[test]
    fn radius_below_cuts_is_rejected() {
        let pot = PiecewisePotential::step(1.0, 4.0);
        let n = Numerics { radius: Some(1.5), ..Numerics::default() };
        assert!(matches!(crossing_radii(&pot, &n), Err(Error::RadiusTooSmall { .. })));
    }
}
