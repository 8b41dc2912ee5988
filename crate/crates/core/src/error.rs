use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("point on cut: kappa = {kappa} lies on the branch cut of alpha = {alpha}")]
    PointOnCut { alpha: f64, kappa: C64 },
    #[error("indeterminate sign of Re(-i nu) at kappa = {kappa} (alpha = {alpha})")]
    IndeterminateSign { alpha: f64, kappa: C64 },
    #[error("transform of region {region} requested at k = {k}, outside its half-plane")]
    Domain { region: usize, k: C64 },
    #[error("domain error: {0}")]
    Argument(String),
    #[error("R too small: R = {radius} must exceed sqrt(2 Lambda) = {bound} (Lambda = {lambda})")]
    RadiusTooSmall { radius: f64, bound: f64, lambda: f64 },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid initial condition: {0}")]
    InvalidInitial(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("quadrature failure on leg {leg}: error {error:e} above tolerance {tolerance:e}")]
    Quadrature { leg: usize, error: f64, tolerance: f64 },
    #[error("representation error: {0}")]
    Representation(String),
    #[error("kappa near determinant zero: kappa = {kappa}, condition {condition:e}")]
    NearSingular { kappa: C64, condition: f64 },
    #[error("ray inside forbidden cone: gamma = {gamma}, radicand = {radicand}")]
    ForbiddenCone { gamma: f64, radicand: f64 },
    #[error("domain too small: {leak:e} of the mass reached the walls")]
    DomainTooSmall { leak: f64 },
}
