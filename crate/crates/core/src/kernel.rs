//! Dispersion relation and the branch-aware square root shared by all solvers.

use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Levels `α_1..α_{n+1}` separated by interfaces `0 = x_1 < x_2 < … < x_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePotential {
    levels: Vec<f64>,
    interfaces: Vec<f64>,
    lambda: f64,
}

/// Where a point sits relative to the interfaces (1-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Region(usize),
    Interface(usize),
}

impl PiecewisePotential {
    pub fn new(levels: Vec<f64>, interfaces: Vec<f64>) -> Result<Self> {
        if interfaces.is_empty() {
            return Err(Error::InvalidPotential("at least one interface is required".into()));
        }
        if levels.len() != interfaces.len() + 1 {
            return Err(Error::InvalidPotential(format!(
                "{} levels for {} interfaces; expected {}",
                levels.len(),
                interfaces.len(),
                interfaces.len() + 1
            )));
        }
        if levels.iter().chain(&interfaces).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("non-finite entry".into()));
        }
        if interfaces[0] != 0.0 {
            return Err(Error::InvalidPotential(format!(
                "first interface must be at 0, got {}",
                interfaces[0]
            )));
        }
        if interfaces.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPotential("interfaces must be strictly increasing".into()));
        }
        let lambda = levels.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        Ok(PiecewisePotential { levels, interfaces, lambda })
    }

    pub fn step(alpha1: f64, alpha2: f64) -> Self {
        Self::new(vec![alpha1, alpha2], vec![0.0]).expect("finite step levels")
    }

    /// Zero outside `[0, width]`, `alpha` inside.
    pub fn well(alpha: f64, width: f64) -> Result<Self> {
        Self::new(vec![0.0, alpha, 0.0], vec![0.0, width])
    }

    /// Number of interfaces `n`.
    pub fn n(&self) -> usize {
        self.interfaces.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// `α_j`, 1-based.
    pub fn level(&self, j: usize) -> f64 {
        self.levels[j - 1]
    }

    /// `x_j`, 1-based.
    pub fn x(&self, j: usize) -> f64 {
        self.interfaces[j - 1]
    }

    /// `Λ = max |α_j|`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Radius beyond which every ν^(j) is free of cuts.
    pub fn cut_radius(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// `1.25 √(2Λ)`, floored at 0.5 so that the free problem still gets a
    /// contour that stays off the origin.
    pub fn default_radius(&self) -> f64 {
        (1.25 * (2.0 * self.lambda).sqrt()).max(0.5)
    }

    /// Bounds `(x_{j-1}, x_j)` of region `j`, with infinities outside.
    pub fn bounds(&self, j: usize) -> (f64, f64) {
        let n = self.n();
        let lo = if j == 1 { f64::NEG_INFINITY } else { self.x(j - 1) };
        let hi = if j == n + 1 { f64::INFINITY } else { self.x(j) };
        (lo, hi)
    }

    pub fn locate(&self, x: f64) -> Location {
        for (idx, &xi) in self.interfaces.iter().enumerate() {
            if x == xi {
                return Location::Interface(idx + 1);
            }
            if x < xi {
                return Location::Region(idx + 1);
            }
        }
        Location::Region(self.n() + 1)
    }

    /// Same problem reflected through `x ↦ x_n − x`, with levels reversed.
    pub fn mirrored(&self) -> Self {
        let xn = *self.interfaces.last().unwrap();
        let mut interfaces: Vec<f64> = self.interfaces.iter().map(|x| xn - x).collect();
        interfaces.reverse();
        let mut levels = self.levels.clone();
        levels.reverse();
        Self::new(levels, interfaces).expect("mirror of a valid potential")
    }
}

/// `ω(k) = i(α + k²)`.
pub fn omega(alpha: f64, k: C64) -> C64 {
    I * (alpha + k * k)
}

fn on_cut(alpha: f64, kappa: C64) -> bool {
    if alpha > 0.0 {
        kappa.re == 0.0 && kappa.im.abs() <= alpha.sqrt()
    } else if alpha < 0.0 {
        kappa.im == 0.0 && kappa.re.abs() <= (-alpha).sqrt()
    } else {
        false
    }
}

/// `k √(1 + b/k²)` with the principal root, evaluated without forming `b/k²`.
///
/// Fails on the cut of the root, i.e. where `1 + b/k² ≤ 0`.
pub fn scaled_root(b: f64, k: C64) -> Result<C64> {
    if k == C64::new(0.0, 0.0) {
        return Err(Error::Argument("kappa = 0 is a branch point".into()));
    }
    if b == 0.0 {
        return Ok(k);
    }
    if on_cut(b, k) {
        return Err(Error::PointOnCut { alpha: b, kappa: k });
    }
    let r = (k * k + b).sqrt();
    // r/k must have a nonnegative real part to match the principal root
    let c = r.re * k.re + r.im * k.im;
    if c == 0.0 {
        return Err(Error::PointOnCut { alpha: b, kappa: k });
    }
    Ok(if c > 0.0 { r } else { -r })
}

/// Boundary value of `k √(1 + b/k²)` on its cut, approached from above
/// (`above = true`) or below.
pub fn scaled_root_side(b: f64, k: C64, above: bool) -> Result<C64> {
    if !on_cut(b, k) {
        return scaled_root(b, k);
    }
    if b < 0.0 {
        // k real in [-√-b, √-b]: the root is ±i√(-(k²+b)), +i from above
        let m = (-(k.re * k.re + b)).max(0.0).sqrt();
        let s = if above { 1.0 } else { -1.0 };
        Ok(C64::new(0.0, s * m))
    } else {
        // k = iy, |y| ≤ √b: k² + b = b − y² ≥ 0, root = ±√(b − y²);
        // "above" here means the right-hand side (Re k > 0)
        let m = (b - k.im * k.im).max(0.0).sqrt();
        let s = if above { 1.0 } else { -1.0 };
        Ok(C64::new(s * m, 0.0))
    }
}

/// `ν(κ) = iκ √(1 + α/κ²)` on the principal branch.
pub fn nu(alpha: f64, kappa: C64) -> Result<C64> {
    scaled_root(alpha, kappa).map(|r| I * r)
}

/// Sign of `Re(−i ν(κ))`; equals `sgn Re κ` wherever it is defined.
pub fn sign_of_re_minus_i_nu(alpha: f64, kappa: C64) -> Result<i8> {
    if kappa.re == 0.0 {
        return Err(Error::IndeterminateSign { alpha, kappa });
    }
    if alpha < 0.0 && kappa.im == 0.0 && kappa.re.abs() < (-alpha).sqrt() {
        return Err(Error::IndeterminateSign { alpha, kappa });
    }
    let v = nu(alpha, kappa)?;
    let re = (-I * v).re;
    if re == 0.0 {
        return Err(Error::IndeterminateSign { alpha, kappa });
    }
    Ok(if re > 0.0 { 1 } else { -1 })
}
