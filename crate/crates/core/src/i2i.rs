//! Initial-to-interface map: `ψ(x_j, t)` and `ψ_x(x_j, t)` straight from the
//! initial data, one contour integral each, with no spatial evaluation.
//!
//! With `X_j` the solution of the interface system,
//! `ψ(x_j,t) = −(1/π) ∫ e^{iκ²t} κ X_j dκ` and
//! `ψ_x(x_j,t) = (i/π) ∫ e^{iκ²t} κ X_{n+j} dκ`
//! over the fourth-quadrant contour.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::contours::{integrate_sided, rotated_boundary_d4, ContourPath};
use crate::general::{plan_for, solve_unknowns_from, ContourPlan};
use crate::transforms::Transforms;
use crate::{Error, InitialCondition, Numerics, PiecewisePotential, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Contour used for the map integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapContour {
    /// The correction-integral path through `−i b`, valid for every `n`.
    Crossing,
    /// `∂D_R^(4)` with both rays turned by `δ` towards decay. Only for one
    /// interface: for `n ≥ 2` the turned third-quadrant ray would sweep
    /// across zeros of the determinant.
    Rotated { delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapOptions {
    pub contour: MapContour,
    /// Keep only the initial data of this region.
    pub only_region: Option<usize>,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { contour: MapContour::Crossing, only_region: None }
    }
}

/// One time sample of an interface trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub psi: C64,
    pub dpsi: C64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceTrace {
    pub interface: usize,
    pub samples: Vec<TraceSample>,
}

/// Evaluator of the map for one potential and initial condition.
#[derive(Clone, Debug)]
pub struct InterfaceMap {
    tr: Transforms,
    plan: ContourPlan,
    numerics: Numerics,
    options: MapOptions,
}

impl InterfaceMap {
    pub fn new(pot: PiecewisePotential, ic: InitialCondition, numerics: Numerics, options: MapOptions) -> Result<Self> {
        if let Some(r) = options.only_region {
            if r == 0 || r > pot.n() + 1 {
                return Err(Error::Config(format!("only_region {r} outside 1..={}", pot.n() + 1)));
            }
        }
        if let MapContour::Rotated { delta } = options.contour {
            if pot.n() != 1 {
                return Err(Error::Config("the rotated contour is only valid for a single interface".into()));
            }
            if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_4) {
                return Err(Error::Config(format!("rotation angle {delta} must lie in (0, π/4)")));
            }
        }
        let plan = plan_for(&pot, &numerics)?;
        Ok(InterfaceMap { tr: Transforms::new(pot, ic), plan, numerics, options })
    }

    pub fn potential(&self) -> &PiecewisePotential {
        self.tr.potential()
    }

    fn path(&self, t: f64) -> ContourPath {
        match self.options.contour {
            MapContour::Crossing => self.plan.path(0.0, t),
            MapContour::Rotated { delta } => {
                let r = self.numerics.radius.unwrap_or_else(|| self.potential().default_radius());
                let mut p = rotated_boundary_d4(r, delta);
                p.tolerance = self.numerics.tolerance;
                p
            }
        }
    }

    /// `(ψ(x_j,t), ψ_x(x_j,t), error)`.
    pub fn interface_values(&self, j: usize, t: f64) -> Result<TraceSample> {
        let n = self.potential().n();
        if j == 0 || j > n {
            return Err(Error::Argument(format!("interface {j} outside 1..={n}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Argument(format!("the map needs t > 0, got {t}")));
        }
        let only = self.options.only_region;
        let mut plan = self.plan;
        let mut last = None;
        for _ in 0..5 {
            let path = match self.options.contour {
                MapContour::Crossing => plan.path(0.0, t),
                MapContour::Rotated { .. } => self.path(t),
            };
            let f = |k: C64, _| -> [C64; 2] {
                match solve_unknowns_from(&self.tr, k, only) {
                    Ok(u) => {
                        let w = (I * k * k * t).exp() * k / PI;
                        [-w * u.g0(j), I * w * u.g1(j)]
                    }
                    Err(_) => [C64::new(f64::NAN, 0.0); 2],
                }
            };
            let env = |k: C64| (I * k * k * t).re;
            match integrate_sided(&path, f, Some(&env)) {
                Ok(r) if r.value.iter().all(|z| z.is_finite()) => {
                    return Ok(TraceSample { t, psi: r.value[0], dpsi: r.value[1], err: r.error });
                }
                Ok(_) => last = Some(Error::NearSingular { kappa: C64::new(f64::NAN, f64::NAN), condition: f64::INFINITY }),
                Err(e @ (Error::Quadrature { .. } | Error::NearSingular { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
            plan = plan.widened();
        }
        Err(last.expect("at least one attempt"))
    }

    /// Trace at interface `j` over `times`, evaluated in parallel.
    pub fn trace(&self, j: usize, times: &[f64]) -> Result<InterfaceTrace> {
        let samples = times.par_iter().map(|&t| self.interface_values(j, t)).collect::<Result<Vec<_>>>()?;
        Ok(InterfaceTrace { interface: j, samples })
    }
}

/// One-shot form of `InterfaceMap::interface_values` with default options.
pub fn interface_values(pot: &PiecewisePotential, ic: &InitialCondition, j: usize, t: f64) -> Result<TraceSample> {
    InterfaceMap::new(pot.clone(), ic.clone(), Numerics::default(), MapOptions::default())?.interface_values(j, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::general::GeneralSolver;
    use crate::oracle::free_gaussian;

    fn gauss(c: f64) -> InitialCondition {
        InitialCondition::gaussian(1.0, c, 1.0).unwrap()
    }

    #[test]
    fn free_trace_at_the_origin() {
        let pot = PiecewisePotential::step(0.0, 0.0);
        for t in [0.1, 0.5, 1.0] {
            let s = interface_values(&pot, &gauss(0.0), 1, t).unwrap();
            let e = (C64::new(1.0, 4.0 * t)).powf(-0.5);
            assert!((s.psi - e).norm() < 1e-9, "t={t}: {} vs {e}", s.psi);
        }
    }

    #[test]
    fn free_derivative_off_centre() {
        let pot = PiecewisePotential::step(0.0, 0.0);
        let t = 0.4;
        let s = interface_values(&pot, &gauss(0.7), 1, t).unwrap();
        let h = 1e-5;
        let d = (free_gaussian(h, t, 0.7, 1.0) - free_gaussian(-h, t, 0.7, 1.0)) / (2.0 * h);
        assert!((s.psi - free_gaussian(0.0, t, 0.7, 1.0)).norm() < 1e-9);
        assert!((s.dpsi - d).norm() < 1e-7, "{} vs {d}", s.dpsi);
    }

    #[test]
    fn rotation_angle_does_not_matter() {
        let pot = PiecewisePotential::step(1.0, 2.0);
        let mk = |delta| {
            let o = MapOptions { contour: MapContour::Rotated { delta }, only_region: None };
            InterfaceMap::new(pot.clone(), gauss(-0.3), Numerics::default(), o).unwrap()
        };
        let a = mk(std::f64::consts::PI / 8.0).interface_values(1, 0.5).unwrap();
        let b = mk(std::f64::consts::PI / 6.0).interface_values(1, 0.5).unwrap();
        let c = InterfaceMap::new(pot.clone(), gauss(-0.3), Numerics::default(), MapOptions::default())
            .unwrap()
            .interface_values(1, 0.5)
            .unwrap();
        assert!((a.psi - b.psi).norm() < 1e-8 && (a.psi - c.psi).norm() < 1e-8);
        assert!((a.dpsi - b.dpsi).norm() < 1e-8 && (a.dpsi - c.dpsi).norm() < 1e-8);
        let bad = MapOptions { contour: MapContour::Rotated { delta: 0.3 }, only_region: None };
        let three = PiecewisePotential::well(4.0, 1.0).unwrap();
        assert!(InterfaceMap::new(three, gauss(0.0), Numerics::default(), bad).is_err());
    }

    #[test]
    fn matches_the_full_solution_at_both_walls() {
        let pot = PiecewisePotential::well(4.0, 1.0).unwrap();
        let ic = gauss(-1.0);
        let m = InterfaceMap::new(pot.clone(), ic.clone(), Numerics::default(), MapOptions::default()).unwrap();
        let g = GeneralSolver::new(pot, ic, Numerics::default()).unwrap();
        for (j, x) in [(1, 0.0), (2, 1.0)] {
            let s = m.interface_values(j, 0.5).unwrap();
            let f = g.field(x, 0.5).unwrap();
            assert!((s.psi - f.psi).norm() <= 5.0 * (s.err + f.err) + 1e-9, "j={j}: {} vs {}", s.psi, f.psi);
            assert!((s.dpsi - f.dpsi).norm() <= 5.0 * (s.err + f.err) + 1e-8);
        }
    }

    #[test]
    fn region_contributions_add_up() {
        let pot = PiecewisePotential::well(-2.0, 1.0).unwrap();
        let ic = gauss(0.3);
        let all = InterfaceMap::new(pot.clone(), ic.clone(), Numerics::default(), MapOptions::default()).unwrap();
        let total = all.interface_values(2, 0.5).unwrap();
        let mut sum = C64::new(0.0, 0.0);
        for r in 1..=3 {
            let o = MapOptions { only_region: Some(r), ..MapOptions::default() };
            sum += InterfaceMap::new(pot.clone(), ic.clone(), Numerics::default(), o).unwrap().interface_values(2, 0.5).unwrap().psi;
        }
        assert!((sum - total.psi).norm() < 1e-9);
    }

    #[test]
    fn map_is_linear() {
        let pot = PiecewisePotential::step(-1.0, 1.0);
        let a = gauss(-0.5);
        let b = InitialCondition::modulated(0.5, 0.8, 0.7, 2.0).unwrap();
        let at = |ic: &InitialCondition| interface_values(&pot, ic, 1, 0.3).unwrap();
        let (sa, sb, sab) = (at(&a), at(&b), at(&a.plus(&b).unwrap()));
        assert!((sa.psi + sb.psi - sab.psi).norm() < 1e-9);
        assert!((sa.dpsi + sb.dpsi - sab.dpsi).norm() < 1e-9);
    }

    #[test]
    fn short_time_limit() {
        let ic = gauss(0.2);
        let free = interface_values(&PiecewisePotential::step(1.5, 1.5), &ic, 1, 1e-4).unwrap();
        assert!((free.psi - ic.eval(0.0)).norm() < 1e-3);
        assert!((free.dpsi - ic.deriv(0.0)).norm() < 1e-3);
        // across a jump the slope leaves ψ_0' like |Δα ψ_0(0)| √(t/π)
        let pot = PiecewisePotential::step(1.0, 2.0);
        for t in [1e-4, 1e-5] {
            let s = interface_values(&pot, &ic, 1, t).unwrap();
            assert!((s.psi - ic.eval(0.0)).norm() < 1e-3);
            let law = ic.eval(0.0).norm() * (t / PI).sqrt();
            let dev = (s.dpsi - ic.deriv(0.0)).norm();
            assert!((dev / law - 1.0).abs() < 0.05, "t={t}: {dev} vs {law}");
        }
    }
}
