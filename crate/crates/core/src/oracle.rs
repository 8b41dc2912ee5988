//! Crank–Nicolson reference solver on `[−L, L]` with Dirichlet walls, and the
//! closed-form free evolution of a Gaussian.

use crate::kernel::PiecewisePotential;
use crate::{Error, InitialCondition, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Evolution of `e^{−((x−c)/w)²}` under `iψ_t = −ψ_xx`.
pub fn free_gaussian(x: f64, t: f64, center: f64, width: f64) -> C64 {
    let w2 = width * width;
    let z = C64::new(w2, 4.0 * t);
    let y = x - center;
    (C64::new(w2, 0.0) / z).sqrt() * (-(y * y) / z).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdGrid {
    /// Half-width of the domain.
    pub l: f64,
    pub dx: f64,
    pub dt: f64,
}

impl Default for FdGrid {
    fn default() -> Self {
        FdGrid { l: 30.0, dx: 0.02, dt: 0.002 }
    }
}

impl FdGrid {
    pub fn halved(&self) -> Self {
        FdGrid { l: self.l, dx: 0.5 * self.dx, dt: 0.5 * self.dt }
    }

    pub fn nodes(&self) -> usize {
        (2.0 * self.l / self.dx).round() as usize + 1
    }

    fn validate(&self, pot: &PiecewisePotential) -> Result<()> {
        if !(self.l > 0.0 && self.dx > 0.0 && self.dt > 0.0) {
            return Err(Error::Config(format!("oracle grid needs positive L, dx, dt; got {self:?}")));
        }
        let cells = 2.0 * self.l / self.dx;
        if (cells - cells.round()).abs() > 1e-9 * cells {
            return Err(Error::Config(format!("2L = {} is not a multiple of dx = {}", 2.0 * self.l, self.dx)));
        }
        for &x in pot.interfaces() {
            let s = (x + self.l) / self.dx;
            if (s - s.round()).abs() > 1e-9 * s.max(1.0) {
                return Err(Error::Config(format!("interface {x} does not fall on a grid node (dx = {})", self.dx)));
            }
            if x.abs() >= self.l {
                return Err(Error::Config(format!("interface {x} outside [−L, L]")));
            }
        }
        Ok(())
    }
}

/// Snapshot of the discrete field.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub t: f64,
    pub x0: f64,
    pub dx: f64,
    pub psi: Vec<C64>,
}

impl Field {
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// Discrete `Σ |ψ_i|² dx`.
    pub fn mass(&self) -> f64 {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * self.dx
    }

    /// Trapezoidal `∫_{x > a} |ψ|²`.
    pub fn mass_right_of(&self, a: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.psi.len() {
            let x = self.x(i);
            if x > a + 1e-12 {
                s += self.psi[i].norm_sqr() * self.dx;
            } else if (x - a).abs() <= 1e-12 {
                s += 0.5 * self.psi[i].norm_sqr() * self.dx;
            }
        }
        s
    }

    /// Four-point Lagrange interpolation.
    pub fn at(&self, x: f64) -> C64 {
        let n = self.psi.len();
        let s = (x - self.x0) / self.dx;
        let i = s.round();
        if (s - i).abs() < 1e-10 && i >= 0.0 && (i as usize) < n {
            return self.psi[i as usize];
        }
        let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let u = s - base as f64;
        let mut v = C64::new(0.0, 0.0);
        for m in 0..4 {
            let mut w = 1.0;
            for q in 0..4 {
                if q != m {
                    w *= (u - q as f64) / (m as f64 - q as f64);
                }
            }
            v += self.psi[base + m] * w;
        }
        v
    }
}

/// Potential sampled on the nodes; nodes on an interface take the mean of
/// the two adjacent levels.
fn sampled_potential(pot: &PiecewisePotential, grid: &FdGrid, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = -grid.l + i as f64 * grid.dx;
            let hit = pot.interfaces().iter().position(|&xi| (x - xi).abs() < 1e-9 * grid.dx.max(1.0));
            match hit {
                Some(j) => 0.5 * (pot.level(j + 1) + pot.level(j + 2)),
                None => match pot.locate(x) {
                    crate::kernel::Location::Region(j) => pot.level(j),
                    crate::kernel::Location::Interface(j) => 0.5 * (pot.level(j) + pot.level(j + 1)),
                },
            }
        })
        .collect()
}

/// LU factors of the constant tridiagonal `I + i dt/2 H` on interior nodes.
struct Factored {
    lower: Vec<C64>,
    diag: Vec<C64>,
    upper: C64,
}

impl Factored {
    fn new(v: &[f64], dx: f64, dt: f64) -> Self {
        let m = v.len();
        let r = I * (0.5 * dt / (dx * dx));
        let upper = -r;
        let mut diag = vec![C64::new(0.0, 0.0); m];
        let mut lower = vec![C64::new(0.0, 0.0); m];
        for i in 0..m {
            let d = 1.0 + 2.0 * r + I * (0.5 * dt * v[i]);
            if i == 0 {
                diag[0] = d;
            } else {
                lower[i] = -r / diag[i - 1];
                diag[i] = d - lower[i] * upper;
            }
        }
        Factored { lower, diag, upper }
    }

    fn solve(&self, b: &mut [C64]) {
        let m = b.len();
        for i in 1..m {
            let l = self.lower[i];
            b[i] -= l * b[i - 1];
        }
        b[m - 1] /= self.diag[m - 1];
        for i in (0..m - 1).rev() {
            b[i] = (b[i] - self.upper * b[i + 1]) / self.diag[i];
        }
    }
}

/// Fraction of the initial mass allowed near the walls.
const LEAK_LIMIT: f64 = 1e-6;

/// Evolves `ψ_0` and returns snapshots at the requested times (any order).
pub fn crank_nicolson_evolve(pot: &PiecewisePotential, ic: &InitialCondition, grid: &FdGrid, times: &[f64]) -> Result<Vec<Field>> {
    grid.validate(pot)?;
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::Config("oracle times must be finite and nonnegative".into()));
    }
    let n = grid.nodes();
    let v = sampled_potential(pot, grid, n);
    let mut psi: Vec<C64> = (0..n).map(|i| ic.eval(-grid.l + i as f64 * grid.dx)).collect();
    psi[0] = C64::new(0.0, 0.0);
    psi[n - 1] = C64::new(0.0, 0.0);
    let mass0 = psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * grid.dx;
    let edge = (n / 20).max(2);
    let leak = |psi: &[C64]| -> f64 {
        let s: f64 = psi[..edge].iter().chain(&psi[n - edge..]).map(|p| p.norm_sqr()).sum::<f64>() * grid.dx;
        s / mass0.max(f64::MIN_POSITIVE)
    };
    if leak(&psi) > LEAK_LIMIT {
        return Err(Error::DomainTooSmall { leak: leak(&psi) });
    }

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut out: Vec<Option<Field>> = vec![None; times.len()];
    let mut now = 0.0;
    let mut rhs = vec![C64::new(0.0, 0.0); n - 2];
    let r = I * (0.5 / (grid.dx * grid.dx));
    for &idx in &order {
        let span = times[idx] - now;
        if span > 0.0 {
            // uniform steps that land exactly on the snapshot time
            let steps = (span / grid.dt - 1e-9).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            let lu = Factored::new(&v[1..n - 1], grid.dx, dt);
            for step in 0..steps {
                for i in 1..n - 1 {
                    let lap = psi[i - 1] - 2.0 * psi[i] + psi[i + 1];
                    rhs[i - 1] = psi[i] + r * dt * lap - I * (0.5 * dt * v[i]) * psi[i];
                }
                lu.solve(&mut rhs);
                psi[1..n - 1].copy_from_slice(&rhs);
                if step % 16 == 15 || step + 1 == steps {
                    let l = leak(&psi);
                    if l > LEAK_LIMIT {
                        return Err(Error::DomainTooSmall { leak: l });
                    }
                }
            }
            now = times[idx];
        }
        out[idx] = Some(Field { t: times[idx], x0: -grid.l, dx: grid.dx, psi: psi.clone() });
    }
    Ok(out.into_iter().map(|f| f.expect("every time visited")).collect())
}

/// Oracle value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSample {
    pub x: f64,
    pub t: f64,
    pub psi: C64,
    pub err: f64,
}

/// Richardson extrapolation of runs at `(dx, dt)` and `(dx/2, dt/2)`; the
/// reported error is the size of the correction.
pub fn richardson(pot: &PiecewisePotential, ic: &InitialCondition, grid: &FdGrid, points: &[(f64, f64)]) -> Result<Vec<OracleSample>> {
    let mut times: Vec<f64> = points.iter().map(|p| p.1).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let coarse = crank_nicolson_evolve(pot, ic, grid, &times)?;
    let fine = crank_nicolson_evolve(pot, ic, &grid.halved(), &times)?;
    Ok(points
        .iter()
        .map(|&(x, t)| {
            let k = times.iter().position(|&s| s == t).expect("time listed");
            let (c, f) = (coarse[k].at(x), fine[k].at(x));
            let corr = (f - c) / 3.0;
            OracleSample { x, t, psi: f + corr, err: corr.norm() }
        })
        .collect())
}
