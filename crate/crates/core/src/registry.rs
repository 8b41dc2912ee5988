//! Solvers behind one trait, looked up by name.
//!
//! Every backend answers point queries `ψ(x, t)`; batch queries default to a
//! parallel map and backends with a cheaper batch path (the oracle) override
//! it.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::asymptotics::{RaySpec, StepAsymptotics};
use crate::general::GeneralSolver;
use crate::i2i::{InterfaceMap, MapOptions};
use crate::oracle::{richardson, FdGrid};
use crate::step::{StepSolver, DEFAULT_REPRESENTATION};
use crate::well::WellSolver;
use crate::{Error, InitialCondition, Numerics, PiecewisePotential, Result, SolutionSample};

/// Everything a backend may need; each one reads only its own part.
#[derive(Clone, Debug)]
pub struct SolverSpec {
    pub potential: PiecewisePotential,
    pub initial: InitialCondition,
    pub numerics: Numerics,
    /// Step representation name.
    pub representation: String,
    pub grid: FdGrid,
    pub map: MapOptions,
}

impl SolverSpec {
    pub fn new(potential: PiecewisePotential, initial: InitialCondition) -> Self {
        SolverSpec {
            potential,
            initial,
            numerics: Numerics::default(),
            representation: DEFAULT_REPRESENTATION.to_string(),
            grid: FdGrid::default(),
            map: MapOptions::default(),
        }
    }
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample>;

    /// Results come back in the order of `points`.
    fn evaluate_all(&self, points: &[(f64, f64)]) -> Result<Vec<SolutionSample>> {
        points.par_iter().map(|&(x, t)| self.evaluate(x, t)).collect()
    }
}

type Factory = fn(&SolverSpec) -> Result<Box<dyn Solver>>;

fn sample(x: f64, t: f64, f: crate::FieldValue) -> SolutionSample {
    SolutionSample { x, t, psi: f.psi, err: f.err }
}

struct Step(StepSolver);

impl Solver for Step {
    fn name(&self) -> &'static str {
        "step"
    }
    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample> {
        Ok(sample(x, t, self.0.field(x, t)?))
    }
}

struct General(GeneralSolver);

impl Solver for General {
    fn name(&self) -> &'static str {
        "general"
    }
    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample> {
        Ok(sample(x, t, self.0.field(x, t)?))
    }
}

struct Well(WellSolver);

impl Solver for Well {
    fn name(&self) -> &'static str {
        "well"
    }
    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample> {
        Ok(sample(x, t, self.0.field(x, t)?))
    }
}

/// Leading-order value on the ray through `(x, t)`; no error estimate.
struct Asymptote(StepAsymptotics);

impl Solver for Asymptote {
    fn name(&self) -> &'static str {
        "asymptote"
    }
    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample> {
        if !(t > 0.0) {
            return Err(Error::Argument(format!("the asymptote needs t > 0, got {t}")));
        }
        let ray = RaySpec::new(x / t, (t, t))?;
        Ok(SolutionSample { x, t, psi: self.0.leading_order(&ray, t)?, err: f64::NAN })
    }
}

/// Only answers at interfaces.
struct Map(InterfaceMap);

impl Solver for Map {
    fn name(&self) -> &'static str {
        "interface-map"
    }
    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample> {
        let xs = self.0.potential().interfaces();
        let j = xs
            .iter()
            .position(|&xi| xi == x)
            .ok_or_else(|| Error::Argument(format!("x = {x} is not an interface ({xs:?})")))?;
        let s = self.0.interface_values(j + 1, t)?;
        Ok(SolutionSample { x, t, psi: s.psi, err: s.err })
    }
}

struct Oracle {
    pot: PiecewisePotential,
    ic: InitialCondition,
    grid: FdGrid,
}

impl Solver for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }
    fn evaluate(&self, x: f64, t: f64) -> Result<SolutionSample> {
        Ok(self.evaluate_all(&[(x, t)])?.remove(0))
    }
    fn evaluate_all(&self, points: &[(f64, f64)]) -> Result<Vec<SolutionSample>> {
        for &(x, t) in points {
            if x.abs() >= self.grid.l || t < 0.0 {
                return Err(Error::Argument(format!("({x}, {t}) outside the oracle domain |x| < {}", self.grid.l)));
            }
        }
        Ok(richardson(&self.pot, &self.ic, &self.grid, points)?
            .into_iter()
            .map(|s| SolutionSample { x: s.x, t: s.t, psi: s.psi, err: s.err })
            .collect())
    }
}

fn one_interface(spec: &SolverSpec, who: &str) -> Result<(f64, f64)> {
    let p = &spec.potential;
    if p.n() != 1 || p.x(1) != 0.0 {
        return Err(Error::Config(format!("{who} needs one interface at x = 0, got {:?}", p.interfaces())));
    }
    Ok((p.level(1), p.level(2)))
}

fn make_step(spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    let (a1, a2) = one_interface(spec, "step")?;
    Ok(Box::new(Step(StepSolver::new(a1, a2, spec.initial.clone(), spec.numerics, &spec.representation)?)))
}

fn make_general(spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    Ok(Box::new(General(GeneralSolver::new(spec.potential.clone(), spec.initial.clone(), spec.numerics)?)))
}

fn make_well(spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    let p = &spec.potential;
    if p.n() != 2 || p.x(1) != 0.0 || p.level(1) != 0.0 || p.level(3) != 0.0 {
        return Err(Error::Config("well needs levels (0, α, 0) with the first interface at x = 0".into()));
    }
    Ok(Box::new(Well(WellSolver::new(p.level(2), p.x(2), spec.initial.clone(), spec.numerics)?)))
}

fn make_asymptote(spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    let (a1, a2) = one_interface(spec, "asymptote")?;
    Ok(Box::new(Asymptote(StepAsymptotics::new(a1, a2, spec.initial.clone()))))
}

fn make_map(spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    Ok(Box::new(Map(InterfaceMap::new(spec.potential.clone(), spec.initial.clone(), spec.numerics, spec.map)?)))
}

fn make_oracle(spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    Ok(Box::new(Oracle { pot: spec.potential.clone(), ic: spec.initial.clone(), grid: spec.grid }))
}

fn factories() -> BTreeMap<&'static str, Factory> {
    let mut m: BTreeMap<&'static str, Factory> = BTreeMap::new();
    m.insert("step", make_step);
    m.insert("general", make_general);
    m.insert("well", make_well);
    m.insert("asymptote", make_asymptote);
    m.insert("interface-map", make_map);
    m.insert("oracle", make_oracle);
    m
}

pub fn solver_names() -> Vec<&'static str> {
    factories().keys().copied().collect()
}

pub fn build(name: &str, spec: &SolverSpec) -> Result<Box<dyn Solver>> {
    let f = factories()
        .get(name)
        .copied()
        .ok_or_else(|| Error::Config(format!("unknown solver {name:?}; known: {}", solver_names().join(", "))))?;
    f(spec)
}
