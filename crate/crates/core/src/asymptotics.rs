//! Leading-order large-time behaviour of the step solution along rays
//! `x = γ t`, by stationary phase at `k = γ/2`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::contours::{integrate_sided, ContourPath, CutSide, Leg, PathLeg};
use crate::kernel::omega;
use crate::step::step_coefficients;
use crate::transforms::Transforms;
use crate::{Error, InitialCondition, PiecewisePotential, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// A ray `x/t = γ`: `γ < 0` lies in region 1, `γ > 0` in region 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySpec {
    pub gamma: f64,
    pub t_range: (f64, f64),
}

impl RaySpec {
    pub fn new(gamma: f64, t_range: (f64, f64)) -> Result<Self> {
        if !(gamma != 0.0) || !gamma.is_finite() {
            return Err(Error::Argument(format!("ray slope must be finite and nonzero, got {gamma}")));
        }
        if !(t_range.0 > 0.0 && t_range.1 >= t_range.0) {
            return Err(Error::Argument(format!("bad time range {:?}", t_range)));
        }
        Ok(RaySpec { gamma, t_range })
    }

    pub fn region(&self) -> usize {
        if self.gamma < 0.0 {
            1
        } else {
            2
        }
    }
}

/// `1 ± 4(α_1−α_2)/γ²`, `+` in region 1.
pub fn radicand(alpha1: f64, alpha2: f64, gamma: f64) -> f64 {
    let r = 4.0 * (alpha1 - alpha2) / (gamma * gamma);
    if gamma < 0.0 {
        1.0 + r
    } else {
        1.0 - r
    }
}

/// Large-time evaluator for one step problem.
#[derive(Clone, Debug)]
pub struct StepAsymptotics {
    tr: Transforms,
}

impl StepAsymptotics {
    pub fn new(alpha1: f64, alpha2: f64, ic: InitialCondition) -> Self {
        StepAsymptotics { tr: Transforms::new(PiecewisePotential::step(alpha1, alpha2), ic) }
    }

    fn alphas(&self) -> (f64, f64) {
        let p = self.tr.potential();
        (p.level(1), p.level(2))
    }

    /// The bracket multiplying the `t^{−1/2}` envelope: the region's own
    /// transform plus the reflected/transmitted amplitude, all at `k = γ/2`.
    pub fn amplitude(&self, gamma: f64) -> Result<C64> {
        let (a1, a2) = self.alphas();
        let rad = radicand(a1, a2, gamma);
        if !(rad > 0.0) {
            return Err(Error::ForbiddenCone { gamma, radicand: rad });
        }
        let region = if gamma < 0.0 { 1 } else { 2 };
        let k = C64::new(0.5 * gamma, 0.0);
        let c = step_coefficients(a1, a2, region, k, None)?;
        let own = self.tr.continued(region, k);
        let reflected = self.tr.continued(region, -k);
        let transmitted = self.tr.continued(3 - region, c.root);
        Ok(own + c.reflect * reflected + c.transmit * transmitted)
    }

    /// `e^{i(γ²/4 − α_j)t − iπ/4} / (2√(πt))` times the amplitude.
    pub fn leading_order(&self, ray: &RaySpec, t: f64) -> Result<C64> {
        if !(t > 0.0) {
            return Err(Error::Argument(format!("t must be positive, got {t}")));
        }
        let (a1, a2) = self.alphas();
        let g = ray.gamma;
        let alpha = if ray.region() == 1 { a1 } else { a2 };
        let amp = self.amplitude(g)?;
        let phase = C64::new(0.0, (0.25 * g * g - alpha) * t - FRAC_PI_4).exp();
        Ok(phase * amp / (2.0 * (PI * t).sqrt()))
    }

    /// The region-2 integral along both sides of the cut `[0, i√(α_2−α_1)]`,
    /// which the leading-order formula leaves out.
    pub fn dropped_cut_term(&self, x: f64, t: f64) -> Result<C64> {
        let (a1, a2) = self.alphas();
        if !(a2 > a1) {
            return Ok(C64::new(0.0, 0.0));
        }
        let tip = C64::new(0.0, (a2 - a1).sqrt());
        let zero = C64::new(0.0, 0.0);
        let path = ContourPath::new(
            vec![
                PathLeg::sided(Leg::Line { from: zero, to: tip }, CutSide::Left),
                PathLeg::sided(Leg::Line { from: tip, to: zero }, CutSide::Right),
            ],
            f64::INFINITY,
            1e-12,
        );
        let f = |k: C64, side| -> [C64; 1] {
            match step_coefficients(a1, a2, 2, k, side) {
                Ok(c) => {
                    let amp = c.reflect * self.tr.continued(2, -k) + c.transmit * self.tr.continued(1, c.root);
                    [(I * k * x - omega(a2, k) * t).exp() * amp / (2.0 * PI)]
                }
                Err(_) => [C64::new(f64::NAN, 0.0)],
            }
        };
        Ok(integrate_sided(&path, f, None)?.value[0])
    }
}

/// One-shot form of `StepAsymptotics::leading_order`.
pub fn leading_order_step(alpha1: f64, alpha2: f64, psi0: &InitialCondition, ray: &RaySpec, t: f64) -> Result<C64> {
    StepAsymptotics::new(alpha1, alpha2, psi0.clone()).leading_order(ray, t)
}
