//! Transform-method solutions of `i ψ_t = −ψ_xx + α(x) ψ` for piecewise
//! constant `α`, with an initial-to-interface map, large-time asymptotics
//! and a finite-difference oracle.
//!
//! All quantities are dimensionless (`ħ = 1`, `m = 1`, time rescaled so the
//! kinetic term is `−ψ_xx`).

pub mod asymptotics;
pub mod contours;
pub mod error;
pub mod general;
pub mod i2i;
pub mod initial;
pub mod kernel;
pub mod oracle;
pub mod quad;
pub mod registry;
pub mod special;
pub mod step;
pub mod transforms;
pub mod well;

pub use error::{Error, Result};
pub use initial::InitialCondition;
pub use kernel::PiecewisePotential;
pub use num_complex::Complex64 as C64;

/// One evaluated point of the field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionSample {
    pub x: f64,
    pub t: f64,
    pub psi: C64,
    /// Estimated absolute error of `psi`.
    pub err: f64,
}

/// `ψ`, `ψ_x` and an absolute error estimate covering both.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldValue {
    pub psi: C64,
    pub dpsi: C64,
    pub err: f64,
}

impl FieldValue {
    pub fn add(&mut self, o: &FieldValue) {
        self.psi += o.psi;
        self.dpsi += o.dpsi;
        self.err += o.err;
    }

    /// Average of two one-sided values; half their gap joins the error.
    pub fn mean(a: &FieldValue, b: &FieldValue) -> FieldValue {
        let gap = (a.psi - b.psi).norm().max((a.dpsi - b.dpsi).norm());
        FieldValue {
            psi: (a.psi + b.psi) * 0.5,
            dpsi: (a.dpsi + b.dpsi) * 0.5,
            err: 0.5 * (a.err + b.err) + 0.5 * gap,
        }
    }
}

/// Numerical knobs shared by the contour-based solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Numerics {
    /// Where the correction contours cross the real and imaginary axes.
    /// `None` picks `1.25 √(2Λ₋)` and `1.25 √(2Λ₊)` from the most negative
    /// and most positive levels, floored at 0.5.
    pub radius: Option<f64>,
    /// Absolute tolerance per contour integral.
    pub tolerance: f64,
    /// Initial offset of the downward third-quadrant leg used for `n ≥ 2`;
    /// halved until no determinant zero lies inside it.
    pub shift: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { radius: None, tolerance: 1e-10, shift: 1.0 }
    }
}

impl Numerics {
    pub fn radius_for(&self, pot: &PiecewisePotential) -> f64 {
        self.radius.unwrap_or_else(|| pot.default_radius())
    }
}
