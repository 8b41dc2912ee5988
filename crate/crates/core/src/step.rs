//! Single step `α_1` on `x < 0`, `α_2` on `x > 0`, in three equivalent
//! integral representations selected by name.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::contours::{integrate_sided, ContourPath, CutSide, Leg, PathLeg};
use crate::general::{crossing_radii, ContourPlan};
use crate::kernel::{nu, omega, scaled_root, scaled_root_side, Location};
use crate::transforms::Transforms;
use crate::{Error, FieldValue, InitialCondition, Numerics, PiecewisePotential, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Reflection and transmission factors of the quadrant-form integrands.
///
/// In region 1, `s = √(1 + (α_1−α_2)/k²)` and the integrand amplitude is
/// `reflect ψ̂_1(−k) + transmit ψ̂_2(k s)`; region 2 swaps the roles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepCoefficients {
    pub reflect: C64,
    pub transmit: C64,
    /// `k s`, the argument handed to the other region's transform.
    pub root: C64,
}

/// Coefficients for `region` (1 or 2). `side` picks a boundary value when
/// `k` lies on the cut of `s`.
pub fn step_coefficients(alpha1: f64, alpha2: f64, region: usize, k: C64, side: Option<CutSide>) -> Result<StepCoefficients> {
    let b = match region {
        1 => alpha1 - alpha2,
        2 => alpha2 - alpha1,
        _ => return Err(Error::Argument(format!("a step has regions 1 and 2, got {region}"))),
    };
    let root = match side {
        None => scaled_root(b, k)?,
        Some(CutSide::Above) | Some(CutSide::Right) => scaled_root_side(b, k, true)?,
        Some(CutSide::Below) | Some(CutSide::Left) => scaled_root_side(b, k, false)?,
    };
    let s = root / k;
    Ok(StepCoefficients { reflect: (1.0 - s) / (1.0 + s), transmit: 2.0 / (1.0 + s), root })
}

/// The data every representation works from.
#[derive(Clone, Debug)]
pub struct StepProblem {
    pub tr: Transforms,
    pub numerics: Numerics,
}

impl StepProblem {
    pub fn alphas(&self) -> (f64, f64) {
        let p = self.tr.potential();
        (p.level(1), p.level(2))
    }
}

/// One way of writing the correction integral of the step solution.
pub trait StepRepresentation: Send + Sync {
    fn name(&self) -> &'static str;

    /// The correction (everything but the free-propagator term) of the
    /// region-`region` formula at `(x, t)`, `t > 0`.
    fn correction(&self, p: &StepProblem, region: usize, x: f64, t: f64) -> Result<FieldValue>;

    /// Whether the representation is available for `α_1 → α_2`.
    fn supports(&self, _alpha1: f64, _alpha2: f64) -> Result<()> {
        Ok(())
    }
}

fn finish(r: crate::contours::PathIntegral<2>) -> Result<FieldValue> {
    if r.value.iter().any(|z| !z.is_finite()) {
        return Err(Error::Quadrature { leg: 0, error: f64::INFINITY, tolerance: 0.0 });
    }
    Ok(FieldValue { psi: r.value[0], dpsi: r.value[1], err: r.error })
}

const NAN2: [C64; 2] = [C64::new(f64::NAN, 0.0), C64::new(f64::NAN, 0.0)];

/// Fourth-quadrant form in `κ`, with `ν^(1)`, `ν^(2)` both explicit.
pub struct D4;

impl StepRepresentation for D4 {
    fn name(&self) -> &'static str {
        "d4"
    }

    fn correction(&self, p: &StepProblem, region: usize, x: f64, t: f64) -> Result<FieldValue> {
        let (a1, a2) = p.alphas();
        let (ra, rb) = crossing_radii(p.tr.potential(), &p.numerics)?;
        let plan = ContourPlan { a: ra, b: rb, turn: None, tolerance: p.numerics.tolerance };
        let path = plan.path(x.abs(), t);
        let tr = &p.tr;
        let f = |k: C64, _| -> [C64; 2] {
            let (n1, n2) = match (nu(a1, k), nu(a2, k)) {
                (Ok(u), Ok(v)) => (u, v),
                _ => return NAN2,
            };
            let h1 = tr.continued(1, n1);
            let h2 = tr.continued(2, -n2);
            let den = n1 + n2;
            let w = (I * k * k * t).exp() * k / (2.0 * PI * den);
            if region == 1 {
                let v = -w * (-I * n1 * x).exp() * (h1 * (n1 - n2) / n1 + 2.0 * h2);
                [v, -I * n1 * v]
            } else {
                let v = w * (I * n2 * x).exp() * (h2 * (n1 - n2) / n2 - 2.0 * h1);
                [v, I * n2 * v]
            }
        };
        let d = x.abs();
        let env = |k: C64| (-k * d + I * k * k * t).re;
        finish(integrate_sided(&path, f, Some(&env))?)
    }
}

/// Quadrant form in `k`: region 1 over the boundary of the third quadrant,
/// region 2 over the boundary of the first.
pub struct Quadrant;

impl StepRepresentation for Quadrant {
    fn name(&self) -> &'static str {
        "quadrant"
    }

    fn correction(&self, p: &StepProblem, region: usize, x: f64, t: f64) -> Result<FieldValue> {
        let (a1, a2) = p.alphas();
        let (own, other) = if region == 1 { (a1, a2) } else { (a2, a1) };
        // cut of k√(1 + (own−other)/k²): imaginary if own > other, real if not
        let (ra, rb) = match p.numerics.radius {
            Some(_) => crossing_radii(p.tr.potential(), &p.numerics)?,
            None => {
                let pick = |l: f64| (1.25 * (2.0 * l).sqrt()).max(0.5);
                (pick((own - other).max(0.0)), pick((other - own).max(0.0)))
            }
        };
        let plan = ContourPlan { a: ra, b: rb, turn: None, tolerance: p.numerics.tolerance };
        let (u, sign) = if region == 1 { (-I, -1.0) } else { (I, 1.0) };
        let path = plan.path(x.abs(), t).rotated(u);
        let f = |k: C64, side| -> [C64; 2] { quadrant_integrand(p, region, x, t, k, side, sign) };
        let env = |k: C64| (I * k * x - omega(own, k) * t).re;
        finish(integrate_sided(&path, f, Some(&env))?)
    }
}

fn quadrant_integrand(p: &StepProblem, region: usize, x: f64, t: f64, k: C64, side: Option<CutSide>, sign: f64) -> [C64; 2] {
    let (a1, a2) = p.alphas();
    let own = if region == 1 { a1 } else { a2 };
    let other_region = 3 - region;
    let c = match step_coefficients(a1, a2, region, k, side) {
        Ok(c) => c,
        Err(_) => return NAN2,
    };
    let amp = c.reflect * p.tr.continued(region, -k) + c.transmit * p.tr.continued(other_region, c.root);
    let v = sign * (I * k * x - omega(own, k) * t).exp() * amp / (2.0 * PI);
    [v, I * k * v]
}

/// Real-line form for `α_2 > α_1`: region 1 is a principal-branch integral
/// over `ℝ` taken below the real cut, region 2 adds the two sides of the
/// imaginary cut. `α_2 < α_1` is handled by reflecting the problem.
pub struct RealLine;

impl RealLine {
    fn path(x: f64, t: f64, gap: f64, region: usize) -> ContourPath {
        let h = gap.sqrt();
        let k = (x.abs() / (2.0 * t) + 1.0).max(1.2 * h);
        let re = |v: f64| C64::new(v, 0.0);
        let line = |a: f64, b: f64| Leg::Line { from: re(a), to: re(b) };
        let mut legs = vec![PathLeg::plain(Leg::Ray {
            origin: re(-k),
            dir: C64::from_polar(1.0, 3.0 * FRAC_PI_4),
            inbound: true,
            length: None,
        })];
        if region == 1 {
            legs.push(PathLeg::plain(line(-k, -h)));
            legs.push(PathLeg::sided(line(-h, 0.0), CutSide::Below));
            legs.push(PathLeg::sided(line(0.0, h), CutSide::Below));
            legs.push(PathLeg::plain(line(h, k)));
        } else {
            let tip = C64::new(0.0, h);
            legs.push(PathLeg::plain(line(-k, 0.0)));
            legs.push(PathLeg::sided(Leg::Line { from: re(0.0), to: tip }, CutSide::Left));
            legs.push(PathLeg::sided(Leg::Line { from: tip, to: re(0.0) }, CutSide::Right));
            legs.push(PathLeg::plain(line(0.0, k)));
        }
        legs.push(PathLeg::plain(Leg::Ray { origin: re(k), dir: C64::from_polar(1.0, -FRAC_PI_4), inbound: false, length: None }));
        ContourPath::new(legs, f64::INFINITY, 1e-10)
    }
}

impl StepRepresentation for RealLine {
    fn name(&self) -> &'static str {
        "realline"
    }

    fn supports(&self, alpha1: f64, alpha2: f64) -> Result<()> {
        if alpha1 == alpha2 {
            return Err(Error::Representation("real-line form needs α_1 ≠ α_2".into()));
        }
        Ok(())
    }

    fn correction(&self, p: &StepProblem, region: usize, x: f64, t: f64) -> Result<FieldValue> {
        let (a1, a2) = p.alphas();
        if !(a2 > a1) {
            return Err(Error::Representation("real-line form is written for α_2 > α_1".into()));
        }
        let own = if region == 1 { a1 } else { a2 };
        let mut path = Self::path(x, t, a2 - a1, region);
        path.tolerance = p.numerics.tolerance;
        let f = |k: C64, side| -> [C64; 2] { quadrant_integrand(p, region, x, t, k, side, 1.0) };
        let env = |k: C64| (I * k * x - omega(own, k) * t).re;
        finish(integrate_sided(&path, f, Some(&env))?)
    }
}

type Factory = fn() -> Box<dyn StepRepresentation>;

const REPRESENTATIONS: &[(&str, Factory)] = &[
    ("d4", || Box::new(D4)),
    ("quadrant", || Box::new(Quadrant)),
    ("realline", || Box::new(RealLine)),
];

pub const DEFAULT_REPRESENTATION: &str = "quadrant";

pub fn representation_names() -> Vec<&'static str> {
    REPRESENTATIONS.iter().map(|(n, _)| *n).collect()
}

pub fn representation(name: &str) -> Result<Box<dyn StepRepresentation>> {
    REPRESENTATIONS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
        .ok_or_else(|| Error::Config(format!("unknown representation '{name}'; known: {}", representation_names().join(", "))))
}

/// Step solution in a chosen representation.
pub struct StepSolver {
    problem: StepProblem,
    repr: Box<dyn StepRepresentation>,
    /// Reflected problem, used by the real-line form when `α_2 < α_1`.
    mirror: Option<Box<StepSolver>>,
}

impl StepSolver {
    pub fn new(alpha1: f64, alpha2: f64, ic: InitialCondition, numerics: Numerics, repr: &str) -> Result<Self> {
        let r = representation(repr)?;
        r.supports(alpha1, alpha2)?;
        let pot = PiecewisePotential::step(alpha1, alpha2);
        crossing_radii(&pot, &numerics)?;
        let mirror = if r.name() == "realline" && alpha2 < alpha1 {
            Some(Box::new(StepSolver::new(alpha2, alpha1, ic.mirrored(), numerics, repr)?))
        } else {
            None
        };
        Ok(StepSolver { problem: StepProblem { tr: Transforms::new(pot, ic), numerics }, repr: r, mirror })
    }

    pub fn representation(&self) -> &str {
        self.repr.name()
    }

    pub fn potential(&self) -> &PiecewisePotential {
        self.problem.tr.potential()
    }

    /// Region formula evaluated at `x` (region 1 or 2, `x` on its closure).
    pub fn region_field(&self, region: usize, x: f64, t: f64) -> Result<FieldValue> {
        if let Some(m) = &self.mirror {
            let f = m.region_field(3 - region, -x, t)?;
            return Ok(FieldValue { psi: f.psi, dpsi: -f.dpsi, err: f.err });
        }
        let fr = self.problem.tr.fourier(region, x, t)?;
        let mut out = FieldValue { psi: fr.value, dpsi: fr.dx, err: fr.err };
        out.add(&self.repr.correction(&self.problem, region, x, t)?);
        Ok(out)
    }

    pub fn field(&self, x: f64, t: f64) -> Result<FieldValue> {
        if !x.is_finite() || !t.is_finite() || t < 0.0 {
            return Err(Error::Argument(format!("bad point ({x}, {t})")));
        }
        if t == 0.0 {
            let ic = self.problem.tr.initial();
            return Ok(FieldValue { psi: ic.eval(x), dpsi: ic.deriv(x), err: 0.0 });
        }
        match self.potential().locate(x) {
            Location::Region(j) => self.region_field(j, x, t),
            Location::Interface(_) => {
                let l = self.region_field(1, x, t)?;
                let r = self.region_field(2, x, t)?;
                Ok(FieldValue::mean(&l, &r))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::general::GeneralSolver;
    use crate::oracle::free_gaussian;

    fn gauss() -> InitialCondition {
        InitialCondition::gaussian(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn registry_lists_all_forms() {
        assert_eq!(representation_names(), vec!["d4", "quadrant", "realline"]);
        assert!(matches!(representation("keyhole"), Err(Error::Config(_))));
    }

    #[test]
    fn coefficients_at_equal_levels() {
        let c = step_coefficients(1.0, 1.0, 1, C64::new(0.3, -2.0), None).unwrap();
        assert!(c.reflect.norm() < 1e-15);
        assert!((c.transmit - 1.0).norm() < 1e-15);
    }

    #[test]
    fn free_limit_in_every_form() {
        for name in ["d4", "quadrant"] {
            let s = StepSolver::new(0.0, 0.0, gauss(), Numerics::default(), name).unwrap();
            for &(x, t) in &[(-2.0, 0.1), (0.0, 0.5), (1.5, 1.0)] {
                let f = s.field(x, t).unwrap();
                let e = free_gaussian(x, t, 0.0, 1.0);
                assert!((f.psi - e).norm() < 1e-8, "{name} {x} {t}: {} vs {e}", f.psi);
            }
        }
        assert!(matches!(
            StepSolver::new(0.0, 0.0, gauss(), Numerics::default(), "realline"),
            Err(Error::Representation(_))
        ));
    }

    #[test]
    fn forms_agree_with_each_other_and_the_general_solver() {
        let ic = InitialCondition::gaussian(1.0, -0.5, 1.0).unwrap();
        let g = GeneralSolver::new(PiecewisePotential::step(1.0, 2.0), ic.clone(), Numerics::default()).unwrap();
        let forms: Vec<StepSolver> =
            representation_names().iter().map(|n| StepSolver::new(1.0, 2.0, ic.clone(), Numerics::default(), n).unwrap()).collect();
        for &(x, t) in &[(-1.5, 0.25), (-0.2, 0.5), (0.0, 0.5), (0.7, 1.0), (2.0, 0.25)] {
            let r = g.field(x, t).unwrap();
            for s in &forms {
                let f = s.field(x, t).unwrap();
                assert!((f.psi - r.psi).norm() < 1e-8, "{} at {x},{t}: {} vs {}", s.representation(), f.psi, r.psi);
                assert!((f.dpsi - r.dpsi).norm() < 1e-7, "{} dx at {x},{t}", s.representation());
            }
        }
    }

    #[test]
    fn mirrored_real_line_for_a_downward_step() {
        let ic = InitialCondition::gaussian(1.0, 0.4, 1.0).unwrap();
        let a = StepSolver::new(2.0, 1.0, ic.clone(), Numerics::default(), "realline").unwrap();
        let b = StepSolver::new(2.0, 1.0, ic, Numerics::default(), "d4").unwrap();
        for &(x, t) in &[(-1.0, 0.5), (0.5, 0.5), (1.2, 1.0)] {
            let (fa, fb) = (a.field(x, t).unwrap(), b.field(x, t).unwrap());
            assert!((fa.psi - fb.psi).norm() < 1e-8);
            assert!((fa.dpsi - fb.dpsi).norm() < 1e-7);
        }
    }
}
