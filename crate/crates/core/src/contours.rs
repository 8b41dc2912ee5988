//! Piecewise-smooth paths in the spectral plane and quadrature along them.
//!
//! Besides the literal quadrant boundaries `∂D_R^(j)` and their real-line
//! keyhole deformations, this module builds the descent paths the solvers
//! actually integrate on: straight lines at ±45° through a crossing point on
//! an axis, optionally bent into a vertical leg, with infinite rays truncated
//! where a caller-supplied exponential envelope has decayed.

use crate::kernel::PiecewisePotential;
use crate::quad::{self, QuadOptions, QuadResult};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Which side of a branch cut a leg runs along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutSide {
    Left,
    Right,
    Above,
    Below,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Leg {
    Line { from: C64, to: C64 },
    /// `center + radius e^{iθ}`, `θ` from `theta0` to `theta1`.
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
    /// `origin + s·dir`, `s ≥ 0`; `inbound` rays are traversed from infinity
    /// towards the origin. `length: None` means truncation by envelope.
    Ray { origin: C64, dir: C64, inbound: bool, length: Option<f64> },
}

impl Leg {
    pub fn start(&self) -> C64 {
        match *self {
            Leg::Line { from, .. } => from,
            Leg::Arc { center, radius, theta0, .. } => center + C64::from_polar(radius, theta0),
            Leg::Ray { origin, dir, inbound, length } => {
                if inbound {
                    origin + dir * length.unwrap_or(f64::INFINITY)
                } else {
                    origin
                }
            }
        }
    }

    pub fn end(&self) -> C64 {
        match *self {
            Leg::Line { to, .. } => to,
            Leg::Arc { center, radius, theta1, .. } => center + C64::from_polar(radius, theta1),
            Leg::Ray { origin, dir, inbound, length } => {
                if inbound {
                    origin
                } else {
                    origin + dir * length.unwrap_or(f64::INFINITY)
                }
            }
        }
    }

    pub fn reversed(&self) -> Leg {
        match *self {
            Leg::Line { from, to } => Leg::Line { from: to, to: from },
            Leg::Arc { center, radius, theta0, theta1 } => Leg::Arc { center, radius, theta0: theta1, theta1: theta0 },
            Leg::Ray { origin, dir, inbound, length } => Leg::Ray { origin, dir, inbound: !inbound, length },
        }
    }

    fn rotated(&self, u: C64) -> Leg {
        let arg = u.arg();
        match *self {
            Leg::Line { from, to } => Leg::Line { from: from * u, to: to * u },
            Leg::Arc { center, radius, theta0, theta1 } => {
                Leg::Arc { center: center * u, radius, theta0: theta0 + arg, theta1: theta1 + arg }
            }
            Leg::Ray { origin, dir, inbound, length } => Leg::Ray { origin: origin * u, dir: dir * u, inbound, length },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathLeg {
    pub leg: Leg,
    /// Set on legs that hug a cut; the integrand receives it.
    pub side: Option<CutSide>,
    /// Simple poles on a `Line` leg, as points of the leg (principal value).
    pub pv: Vec<C64>,
}

impl PathLeg {
    pub fn plain(leg: Leg) -> Self {
        PathLeg { leg, side: None, pv: Vec::new() }
    }

    pub fn sided(leg: Leg, side: CutSide) -> Self {
        PathLeg { leg, side: Some(side), pv: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourPath {
    pub legs: Vec<PathLeg>,
    /// Radius at which envelope-free infinite rays are cut.
    pub truncation_radius: f64,
    pub tolerance: f64,
}

/// Log-magnitude of the dominant exponential factor of an integrand.
pub type Envelope<'a> = &'a dyn Fn(C64) -> f64;

impl ContourPath {
    pub fn new(legs: Vec<PathLeg>, truncation_radius: f64, tolerance: f64) -> Self {
        ContourPath { legs, truncation_radius, tolerance }
    }

    /// Same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let legs = self
            .legs
            .iter()
            .rev()
            .map(|l| PathLeg { leg: l.leg.reversed(), side: l.side, pv: l.pv.clone() })
            .collect();
        ContourPath { legs, ..self.clone() }
    }

    /// Image under `z ↦ u z` for a unit `u`.
    pub fn rotated(&self, u: C64) -> Self {
        let legs = self
            .legs
            .iter()
            .map(|l| PathLeg { leg: l.leg.rotated(u), side: l.side, pv: l.pv.iter().map(|p| p * u).collect() })
            .collect();
        ContourPath { legs, ..self.clone() }
    }

    /// Largest gap between consecutive leg endpoints (0 for a continuous path).
    pub fn continuity_gap(&self) -> f64 {
        self.legs
            .windows(2)
            .map(|w| {
                let (e, s) = (w[0].leg.end(), w[1].leg.start());
                if e.norm().is_infinite() && s.norm().is_infinite() {
                    0.0
                } else {
                    (e - s).norm()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Boundary of `D_R^(j) = {k in quadrant j : |k| > R}`, oriented with the
/// region on the left: ray in from infinity along the later axis, arc of
/// radius `R` clockwise, ray out along the earlier axis.
pub fn boundary_of_dr(quadrant: u8, radius: f64, truncation: f64, lambda: f64) -> Result<ContourPath> {
    if !(1..=4).contains(&quadrant) {
        return Err(Error::Config(format!("quadrant must be 1..4, got {quadrant}")));
    }
    let bound = (2.0 * lambda).sqrt();
    if !(radius > bound) {
        return Err(Error::RadiusTooSmall { radius, bound, lambda });
    }
    if !(truncation > radius) {
        return Err(Error::Config(format!("truncation {truncation} must exceed R = {radius}")));
    }
    let hi = f64::from(quadrant) * std::f64::consts::FRAC_PI_2;
    let lo = hi - std::f64::consts::FRAC_PI_2;
    let (dhi, dlo) = (C64::from_polar(1.0, hi), C64::from_polar(1.0, lo));
    let legs = vec![
        PathLeg::plain(Leg::Line { from: dhi * truncation, to: dhi * radius }),
        PathLeg::plain(Leg::Arc { center: C64::new(0.0, 0.0), radius, theta0: hi, theta1: lo }),
        PathLeg::plain(Leg::Line { from: dlo * radius, to: dlo * truncation }),
    ];
    Ok(ContourPath::new(legs, truncation, 1e-10))
}

/// `boundary_of_dr` with `R` checked against the potential.
pub fn boundary_for(pot: &PiecewisePotential, quadrant: u8, radius: f64, truncation: f64) -> Result<ContourPath> {
    boundary_of_dr(quadrant, radius, truncation, pot.lambda())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutAxis {
    Imaginary,
    Real,
}

/// Cut hugged by a keyhole: `[0, ±i h]` or `[−h, h]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyholeSpec {
    pub axis: CutAxis,
    pub half_length: f64,
}

impl KeyholeSpec {
    /// Local angular parameterization around the branch point used on each
    /// side: `(−π/2, 3π/2]` for an imaginary cut seen from the first quadrant,
    /// `(−3π/2, π/2]` from the third, `(−π, π]` for a real cut.
    pub fn angular_range(&self, quadrant: u8) -> (f64, f64) {
        use std::f64::consts::PI;
        match (self.axis, quadrant) {
            (CutAxis::Imaginary, 1) => (-PI / 2.0, 3.0 * PI / 2.0),
            (CutAxis::Imaginary, _) => (-3.0 * PI / 2.0, PI / 2.0),
            (CutAxis::Real, _) => (-PI, PI),
        }
    }
}

/// The real line (truncated at `±truncation`) that `∂D_R^(1)` or `∂D_R^(3)`
/// collapses onto, with keyhole legs around an imaginary cut in the swept
/// half-plane, or side markers on a real cut. For quadrant 3 the legs run
/// right to left, which is the global minus sign.
pub fn deform_to_real_line(quadrant: u8, cut: Option<KeyholeSpec>, truncation: f64) -> Result<ContourPath> {
    if quadrant != 1 && quadrant != 3 {
        return Err(Error::Config(format!("real-line deformation needs quadrant 1 or 3, got {quadrant}")));
    }
    if let Some(c) = cut {
        if !(c.half_length > 0.0) || !c.half_length.is_finite() || c.half_length >= truncation {
            return Err(Error::Config(format!("keyhole half-length {} invalid", c.half_length)));
        }
    }
    let t = truncation;
    let zero = C64::new(0.0, 0.0);
    let line = |a: f64, b: f64| Leg::Line { from: C64::new(a, 0.0), to: C64::new(b, 0.0) };
    let mut legs = Vec::new();
    match cut {
        None => legs.push(PathLeg::plain(line(-t, t))),
        Some(KeyholeSpec { axis: CutAxis::Real, half_length: h }) => {
            // built for quadrant 1; the reflection below moves it under the cut
            let side = CutSide::Above;
            legs.push(PathLeg::plain(line(-t, -h)));
            legs.push(PathLeg::sided(line(-h, h), side));
            legs.push(PathLeg::plain(line(h, t)));
        }
        Some(KeyholeSpec { axis: CutAxis::Imaginary, half_length: h }) => {
            // up the left side of [0, ih], down the right side
            let tip = C64::new(0.0, h);
            legs.push(PathLeg::plain(line(-t, 0.0)));
            legs.push(PathLeg::sided(Leg::Line { from: zero, to: tip }, CutSide::Left));
            legs.push(PathLeg::sided(Leg::Line { from: tip, to: zero }, CutSide::Right));
            legs.push(PathLeg::plain(line(0.0, t)));
        }
    }
    let mut path = ContourPath::new(legs, t, 1e-10);
    if quadrant == 3 {
        // the mirror image through the origin, traversed right to left
        path = path.rotated(C64::new(-1.0, 0.0));
        for l in path.legs.iter_mut() {
            l.side = l.side.map(|s| match s {
                CutSide::Above => CutSide::Below,
                CutSide::Below => CutSide::Above,
                CutSide::Left => CutSide::Right,
                CutSide::Right => CutSide::Left,
            });
        }
        // the real segment is symmetric, so only the side marker of a real
        // cut flips; the keyhole now hangs below the axis
    }
    Ok(path)
}

/// Line through `−i y_c` at 45°, from the first quadrant at infinity into the
/// third: the canonical descent path of the fourth-quadrant integrals.
pub fn descent_line(y_c: f64) -> ContourPath {
    let c = C64::new(0.0, -y_c);
    let d = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    ContourPath::new(
        vec![
            PathLeg::plain(Leg::Ray { origin: c, dir: d, inbound: true, length: None }),
            PathLeg::plain(Leg::Ray { origin: c, dir: -d, inbound: false, length: None }),
        ],
        f64::INFINITY,
        1e-10,
    )
}

/// Path used by the correction integrals. It comes in along the 45° ray to
/// `a` on the positive real axis, crosses the fourth quadrant through
/// `ε e^{−iπ/4}` to `−i b`, then leaves into the third quadrant at 45°.
/// With `turn = Some(c)` the last ray bends down at `Re κ = −c`.
///
/// Crossing the fourth quadrant close to the origin keeps `|e^{iκ²t}|`
/// below `e^{√2 t ε max(a, b)}` there.
pub fn crossing_path(a: f64, b: f64, eps: f64, turn: Option<f64>) -> ContourPath {
    let d = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let pa = C64::new(a, 0.0);
    let pb = C64::new(0.0, -b);
    let pc = C64::from_polar(eps, -std::f64::consts::FRAC_PI_4);
    let mut legs = vec![PathLeg::plain(Leg::Ray { origin: pa, dir: d, inbound: true, length: None })];
    // the bend is skipped when it would not bring the path closer in
    let chord = std::f64::consts::SQRT_2 * a * b / (a + b);
    if eps < chord {
        legs.push(PathLeg::plain(Leg::Line { from: pa, to: pc }));
        legs.push(PathLeg::plain(Leg::Line { from: pc, to: pb }));
    } else {
        legs.push(PathLeg::plain(Leg::Line { from: pa, to: pb }));
    }
    match turn {
        None => legs.push(PathLeg::plain(Leg::Ray { origin: pb, dir: -d, inbound: false, length: None })),
        Some(c) => {
            let corner = C64::new(-c, -b - c);
            legs.push(PathLeg::plain(Leg::Line { from: pb, to: corner }));
            legs.push(PathLeg::plain(Leg::Ray { origin: corner, dir: -I, inbound: false, length: None }));
        }
    }
    ContourPath::new(legs, f64::INFINITY, 1e-10)
}

/// Rays of `∂D_R^(4)` turned by `δ` towards decay of `e^{iκ²t}` (into the
/// first and third quadrants), joined by the arc of radius `R`.
pub fn rotated_boundary_d4(radius: f64, delta: f64) -> ContourPath {
    use std::f64::consts::FRAC_PI_2;
    let (t0, t1) = (delta, -FRAC_PI_2 - delta);
    let zero = C64::new(0.0, 0.0);
    ContourPath::new(
        vec![
            PathLeg::plain(Leg::Ray {
                origin: C64::from_polar(radius, t0),
                dir: C64::from_polar(1.0, t0),
                inbound: true,
                length: None,
            }),
            PathLeg::plain(Leg::Arc { center: zero, radius, theta0: t0, theta1: t1 }),
            PathLeg::plain(Leg::Ray {
                origin: C64::from_polar(radius, t1),
                dir: C64::from_polar(1.0, t1),
                inbound: false,
                length: None,
            }),
        ],
        f64::INFINITY,
        1e-10,
    )
}

/// Result of a path integral; `tail` is the part of `error` charged to ray
/// truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathIntegral<const N: usize> {
    pub value: [C64; N],
    pub error: f64,
    pub tail: f64,
    pub l1: f64,
}

impl<const N: usize> PathIntegral<N> {
    pub fn zero() -> Self {
        PathIntegral { value: [C64::new(0.0, 0.0); N], error: 0.0, tail: 0.0, l1: 0.0 }
    }

    fn absorb(&mut self, r: &QuadResult<N>, tail: f64) {
        for m in 0..N {
            self.value[m] += r.value[m];
        }
        self.error += r.error + tail;
        self.tail += tail;
        self.l1 += r.l1;
    }
}

/// `∫_path f(z) dz` for a side-agnostic scalar integrand. Infinite rays are
/// cut at `path.truncation_radius`.
pub fn integrate<F>(path: &ContourPath, f: F) -> Result<PathIntegral<1>>
where
    F: Fn(C64) -> C64,
{
    integrate_sided(path, |z, _| [f(z)], None)
}

/// `∫_path f(z, side) dz`. With an envelope, infinite rays are truncated
/// where `|f|` is predicted to fall below `tolerance/100`, and an analytic
/// tail bound is added to the error.
pub fn integrate_sided<const N: usize, F>(path: &ContourPath, f: F, envelope: Option<Envelope>) -> Result<PathIntegral<N>>
where
    F: Fn(C64, Option<CutSide>) -> [C64; N],
{
    let nlegs = path.legs.len().max(1);
    let leg_tol = path.tolerance / nlegs as f64;
    let opts = QuadOptions::with_tol(leg_tol);
    let mut out = PathIntegral::zero();
    for (idx, pl) in path.legs.iter().enumerate() {
        let side = pl.side;
        let tag = |e: Error| match e {
            Error::Quadrature { error, tolerance, .. } => Error::Quadrature { leg: idx, error, tolerance },
            other => other,
        };
        match pl.leg {
            Leg::Line { from, to } => {
                let d = to - from;
                let g = |u: f64| scale(f(from + d * u, side), d);
                let r = if pl.pv.is_empty() {
                    quad::integrate(g, 0.0, 1.0, &opts)
                } else {
                    let mut pv = pl.pv.clone();
                    pv.sort_by(|p, q| ((p - from) / d).re.total_cmp(&((q - from) / d).re));
                    let poles: Vec<f64> = pv.iter().map(|p| ((p - from) / d).re).collect();
                    let pair = |i: usize, s: f64| {
                        let (u, v) = (f(pv[i] + d * s, side), f(pv[i] - d * s, side));
                        let mut w = [C64::new(0.0, 0.0); N];
                        for m in 0..N {
                            w[m] = (u[m] + v[m]) * d;
                        }
                        w
                    };
                    quad::integrate_pv_pairs(g, pair, 0.0, 1.0, &poles, &opts)
                }
                .map_err(tag)?;
                out.absorb(&r, 0.0);
            }
            Leg::Arc { center, radius, theta0, theta1 } => {
                let g = |th: f64| {
                    let e = C64::from_polar(radius, th);
                    scale(f(center + e, side), I * e)
                };
                let r = quad::integrate(g, theta0, theta1, &opts).map_err(tag)?;
                out.absorb(&r, 0.0);
            }
            Leg::Ray { origin, dir, inbound, length } => {
                let sign = if inbound { -1.0 } else { 1.0 };
                let g = |s: f64| scale(f(origin + dir * s, side), dir * sign);
                let (len, tail) = match (length, envelope) {
                    (Some(l), _) => (l, 0.0),
                    (None, Some(env)) => truncate_ray(&g, |s| env(origin + dir * s), leg_tol),
                    (None, None) => ((path.truncation_radius - origin.norm()).max(0.0), 0.0),
                };
                if !len.is_finite() {
                    return Err(Error::Quadrature { leg: idx, error: f64::INFINITY, tolerance: leg_tol });
                }
                let r = quad::integrate(g, 0.0, len, &opts).map_err(tag)?;
                out.absorb(&r, tail);
            }
        }
    }
    Ok(out)
}

fn scale<const N: usize>(mut v: [C64; N], c: C64) -> [C64; N] {
    for x in v.iter_mut() {
        *x *= c;
    }
    v
}

fn max_norm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.norm()))
}

/// Length at which a ray can be cut and a bound for the discarded tail.
///
/// The non-exponential amplitude `|f| e^{−env}` is sampled along the ray and
/// allowed to grow linearly beyond the samples.
fn truncate_ray<const N: usize, G, E>(g: &G, env: E, tol: f64) -> (f64, f64)
where
    G: Fn(f64) -> [C64; N],
    E: Fn(f64) -> f64,
{
    let target = (tol / 100.0).ln();
    let sample = |s: f64| {
        let a = max_norm(&g(s)).ln() - env(s);
        if a.is_finite() {
            a
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut amp = [0.0, 0.25, 0.5].iter().fold(f64::NEG_INFINITY, |m, &s| m.max(sample(s)));
    let mut s = 1.0f64;
    for _ in 0..60 {
        amp = amp.max(sample(s)).max(sample(0.5 * s)).max(sample(0.75 * s));
        let e = env(s);
        let slope = (env(s * 1.01) - e) / (0.01 * s);
        let bound = amp + (1.0 + s).ln() + e;
        if slope < 0.0 && bound < target {
            // tail of A(1+s) e^{env}, env at least linear beyond s
            let tail = (bound).exp() / (-slope) * (1.0 + 1.0 / ((1.0 + s) * -slope));
            return (s, tail);
        }
        s *= 1.5;
    }
    (f64::INFINITY, f64::INFINITY)
}

/// Number of zeros minus poles of `f` inside a closed path, from the change
/// of `arg f` along the legs sampled `samples_per_leg` times.
pub fn winding_number<F>(path: &ContourPath, f: F, samples_per_leg: usize) -> Result<i64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut total = 0.0;
    let mut prev: Option<C64> = None;
    for pl in &path.legs {
        let pts: Vec<C64> = (0..=samples_per_leg)
            .map(|i| {
                let u = i as f64 / samples_per_leg as f64;
                match pl.leg {
                    Leg::Line { from, to } => from + (to - from) * u,
                    Leg::Arc { center, radius, theta0, theta1 } => {
                        center + C64::from_polar(radius, theta0 + (theta1 - theta0) * u)
                    }
                    Leg::Ray { origin, dir, inbound, length } => {
                        let l = length.unwrap_or(path.truncation_radius);
                        if inbound {
                            origin + dir * (l * (1.0 - u))
                        } else {
                            origin + dir * (l * u)
                        }
                    }
                }
            })
            .collect();
        for z in pts {
            let v = f(z)?;
            if let Some(p) = prev {
                let step = (v / p).arg();
                if step.abs() > 2.0 {
                    return Err(Error::Argument(format!("argument jump {step:.2} at {z}; sample more densely")));
                }
                total += step;
            }
            prev = Some(v);
        }
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadrant_four_geometry() {
        let p = boundary_of_dr(4, 2.0, 50.0, 1.0).unwrap();
        assert!((p.legs[0].leg.start() - c(50.0, 0.0)).norm() < 1e-12);
        assert!((p.legs[0].leg.end() - c(2.0, 0.0)).norm() < 1e-12);
        assert!((p.legs[1].leg.end() - c(0.0, -2.0)).norm() < 1e-12);
        assert!((p.legs[2].leg.end() - c(0.0, -50.0)).norm() < 1e-12);
        assert!(p.continuity_gap() < 1e-12);
    }

    #[test]
    fn quadrant_one_arc_passes_diagonal() {
        let p = boundary_of_dr(1, 3.0, 40.0, 1.0).unwrap();
        let Leg::Arc { theta0, theta1, radius, .. } = p.legs[1].leg else { panic!() };
        let mid = C64::from_polar(radius, 0.5 * (theta0 + theta1));
        assert!((mid - C64::from_polar(3.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-12);
    }

    #[test]
    fn radius_checked_against_lambda() {
        assert!(matches!(boundary_of_dr(4, 1.0, 10.0, 2.0), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn closed_circle_of_inverse_square() {
        let legs = vec![PathLeg::plain(Leg::Arc { center: c(0.0, 0.0), radius: 2.0, theta0: 0.0, theta1: 6.283185307179586 })];
        let p = ContourPath::new(legs, 10.0, 1e-12);
        let r = integrate(&p, |z| 1.0 / (z * z)).unwrap();
        assert!(r.value[0].norm() < 1e-12);
    }

    #[test]
    fn closed_square_of_exponential() {
        let pts = [c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0)];
        let legs = pts.windows(2).map(|w| PathLeg::plain(Leg::Line { from: w[0], to: w[1] })).collect();
        let p = ContourPath::new(legs, 10.0, 1e-12);
        let r = integrate(&p, |z| z.exp()).unwrap();
        assert!(r.value[0].norm() < 1e-12);
    }

    #[test]
    fn reversing_negates() {
        let p = boundary_of_dr(4, 2.0, 6.0, 1.0).unwrap();
        let f = |z: C64| (-z * z * 0.1).exp() * z;
        let a = integrate(&p, f).unwrap().value[0];
        let b = integrate(&p.reversed(), f).unwrap().value[0];
        assert!((a + b).norm() < 1e-13);
    }

    #[test]
    fn real_line_pv_with_pole() {
        let mut p = deform_to_real_line(1, None, 40.0).unwrap();
        p.legs[0].pv.push(c(1.0, 0.0));
        p.tolerance = 1e-12;
        let r = integrate(&p, |z| 1.0 / (z - 1.0)).unwrap();
        assert!((r.value[0].re - (39f64.ln() - 41f64.ln())).abs() < 1e-10);
    }

    #[test]
    fn quadrant_three_is_negated_real_line() {
        let f = |z: C64| (-z * z).exp() * (z + 0.3);
        let p1 = deform_to_real_line(1, None, 30.0).unwrap();
        let p3 = deform_to_real_line(3, None, 30.0).unwrap();
        let a = integrate(&p1, f).unwrap().value[0];
        let b = integrate(&p3, f).unwrap().value[0];
        assert!((a + b).norm() < 1e-12);
        assert!((a.re - 0.3 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn keyhole_legs_see_both_sides() {
        let p = deform_to_real_line(1, Some(KeyholeSpec { axis: CutAxis::Imaginary, half_length: 1.0 }), 10.0).unwrap();
        assert_eq!(p.legs.len(), 4);
        assert_eq!(p.legs[1].side, Some(CutSide::Left));
        assert_eq!(p.legs[2].side, Some(CutSide::Right));
        assert!(p.continuity_gap() < 1e-15);
        // a side-dependent constant integrates to (left − right)·i·h
        let r = integrate_sided(
            &p,
            |_, s| match s {
                Some(CutSide::Left) => [c(1.0, 0.0)],
                Some(CutSide::Right) => [c(-1.0, 0.0)],
                _ => [c(0.0, 0.0)],
            },
            None,
        )
        .unwrap();
        assert!((r.value[0] - c(0.0, 2.0)).norm() < 1e-13);
        let q = deform_to_real_line(3, Some(KeyholeSpec { axis: CutAxis::Real, half_length: 1.0 }), 10.0).unwrap();
        assert_eq!(q.legs[1].side, Some(CutSide::Below));
        assert!(deform_to_real_line(2, None, 10.0).is_err());
    }

    #[test]
    fn envelope_truncation_reports_tail() {
        let t = 0.7;
        let mut p = descent_line(0.0001);
        p.tolerance = 1e-11;
        let env = |z: C64| (I * z * z * t).re;
        let r = integrate_sided(&p, |z, _| [(I * z * z * t).exp()], Some(&env)).unwrap();
        let d = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        // the full line traversed from +∞·d to −∞·d; the offset does not matter
        let exact = -d * (std::f64::consts::PI / t).sqrt();
        assert!((r.value[0] - exact).norm() < 1e-9, "{} vs {}", r.value[0], exact);
        assert!(r.tail < 1e-11);
    }

    #[test]
    fn winding_counts_zeros() {
        let legs = vec![PathLeg::plain(Leg::Arc { center: c(0.0, 0.0), radius: 2.0, theta0: 0.0, theta1: 6.283185307179586 })];
        let p = ContourPath::new(legs, 10.0, 1e-12);
        let n = winding_number(&p, |z| Ok((z - 1.0) * (z + c(0.0, 1.5)) * (z - 3.0)), 400).unwrap();
        assert_eq!(n, 2);
    }
}
