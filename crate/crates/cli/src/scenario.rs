//! Scenario files: one `key = value` per line, `#` starts a comment.
//!
//! ```text
//! solver = step
//! potential.levels = 1, 2
//! potential.interfaces = 0
//! initial.kind = gaussian
//! initial.params = 1, 0, 1        # amp, center, width[, wavenumber]; `;` adds terms
//! grid.x = -4:4:21                # a:b:n or a list
//! grid.t = 0.25, 0.5, 1
//! numerics.tolerance = 1e-10
//! output.path = out.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pcpot::i2i::{MapContour, MapOptions};
use pcpot::initial::{GaussTerm, IcKind};
use pcpot::oracle::FdGrid;
use pcpot::registry::SolverSpec;
use pcpot::step::DEFAULT_REPRESENTATION;
use pcpot::{InitialCondition, Numerics, PiecewisePotential, C64};

/// A config problem, tied to the key that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct Invalid {
    pub field: String,
    pub message: String,
}

impl Invalid {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Invalid { field: field.to_string(), message: message.into() }
    }
}

type Parsed<T> = Result<T, Invalid>;

#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Range { a: f64, b: f64, n: usize },
    List(Vec<f64>),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::List(v) => v.clone(),
            Axis::Range { a, n: 1, .. } => vec![*a],
            Axis::Range { a, b, n } => (0..*n).map(|i| a + (b - a) * i as f64 / (*n - 1) as f64).collect(),
        }
    }

    fn parse(field: &str, s: &str) -> Parsed<Axis> {
        if s.contains(':') {
            let p: Vec<&str> = s.split(':').map(str::trim).collect();
            if p.len() != 3 {
                return Err(Invalid::new(field, "a range is written a:b:n"));
            }
            let a = number(field, p[0])?;
            let b = number(field, p[1])?;
            let n = p[2].parse::<usize>().map_err(|_| Invalid::new(field, format!("point count {:?} is not a positive integer", p[2])))?;
            if n == 0 {
                return Err(Invalid::new(field, "a range needs at least one point"));
            }
            Ok(Axis::Range { a, b, n })
        } else {
            let v = numbers(field, s)?;
            if v.is_empty() {
                return Err(Invalid::new(field, "empty list"));
            }
            Ok(Axis::List(v))
        }
    }

    fn render(&self) -> String {
        match self {
            Axis::Range { a, b, n } => format!("{a}:{b}:{n}"),
            Axis::List(v) => join(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub solver: Option<String>,
    pub levels: Vec<f64>,
    pub interfaces: Vec<f64>,
    pub initial_kind: IcKind,
    /// One row per Gaussian term.
    pub initial_params: Vec<Vec<f64>>,
    pub initial_file: Option<String>,
    pub grid_x: Option<Axis>,
    pub grid_t: Option<Axis>,
    pub radius: Option<f64>,
    pub tolerance: f64,
    pub shift: f64,
    pub representation: String,
    pub oracle: FdGrid,
    pub map_contour: MapContour,
    pub map_region: Option<usize>,
    pub gamma: Vec<f64>,
    pub output: Option<String>,
    /// Directory of the config file; relative paths resolve against it.
    pub base: PathBuf,
}

fn number(field: &str, s: &str) -> Parsed<f64> {
    let v = s.trim().parse::<f64>().map_err(|_| Invalid::new(field, format!("{:?} is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(Invalid::new(field, "value must be finite"));
    }
    Ok(v)
}

fn numbers(field: &str, s: &str) -> Parsed<Vec<f64>> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(|p| number(field, p)).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

const KEYS: &[&str] = &[
    "solver",
    "potential.levels",
    "potential.interfaces",
    "initial.kind",
    "initial.params",
    "initial.file",
    "grid.x",
    "grid.t",
    "numerics.R",
    "numerics.tolerance",
    "numerics.shift",
    "numerics.representation",
    "oracle.L",
    "oracle.dx",
    "oracle.dt",
    "map.contour",
    "map.only_region",
    "asymptote.gamma",
    "output.path",
];

impl Scenario {
    pub fn load(path: &Path) -> Parsed<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Invalid::new("config", format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Scenario::parse(&text, base)
    }

    pub fn parse(text: &str, base: PathBuf) -> Parsed<Scenario> {
        let mut kv: Vec<(String, String)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Invalid::new("config", format!("line {}: expected key = value", ln + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Invalid::new(k, format!("unknown key (line {})", ln + 1)));
            }
            if kv.iter().any(|(q, _)| q == k) {
                return Err(Invalid::new(k, "given twice"));
            }
            kv.push((k.to_string(), v.trim().to_string()));
        }
        let get = |k: &str| kv.iter().find(|(q, _)| q == k).map(|(_, v)| v.as_str());

        let levels = numbers("potential.levels", get("potential.levels").ok_or_else(|| Invalid::new("potential.levels", "missing"))?)?;
        if levels.len() < 2 {
            return Err(Invalid::new("potential.levels", "need at least two levels"));
        }
        let interfaces = match get("potential.interfaces") {
            Some(s) => numbers("potential.interfaces", s)?,
            None if levels.len() == 2 => vec![0.0],
            None => return Err(Invalid::new("potential.interfaces", "missing (only a two-level step defaults to x = 0)")),
        };
        if interfaces.len() + 1 != levels.len() {
            return Err(Invalid::new("potential.interfaces", format!("{} levels need {} interfaces", levels.len(), levels.len() - 1)));
        }

        let initial_kind = match get("initial.kind").unwrap_or("gaussian") {
            "gaussian" => IcKind::Gaussian,
            "modulated-gaussian" | "modulated" => IcKind::ModulatedGaussian,
            "tabulated" => IcKind::Tabulated,
            other => return Err(Invalid::new("initial.kind", format!("unknown kind {other:?}"))),
        };
        let initial_file = get("initial.file").map(str::to_string);
        let mut initial_params = Vec::new();
        if initial_kind == IcKind::Tabulated {
            if initial_file.is_none() {
                return Err(Invalid::new("initial.file", "tabulated data needs a file"));
            }
        } else {
            let want = if initial_kind == IcKind::Gaussian { 3 } else { 4 };
            for term in get("initial.params").unwrap_or("1, 0, 1").split(';') {
                let mut p = numbers("initial.params", term)?;
                if initial_kind == IcKind::ModulatedGaussian && p.len() == 3 {
                    p.push(0.0);
                }
                if p.len() != want {
                    return Err(Invalid::new("initial.params", format!("each term needs {want} numbers, got {}", p.len())));
                }
                initial_params.push(p);
            }
        }

        let grid_x = get("grid.x").map(|s| Axis::parse("grid.x", s)).transpose()?;
        let grid_t = get("grid.t").map(|s| Axis::parse("grid.t", s)).transpose()?;
        if let Some(t) = &grid_t {
            if t.values().iter().any(|&t| t < 0.0) {
                return Err(Invalid::new("grid.t", "times must be non-negative"));
            }
        }
        let radius = get("numerics.R").map(|s| number("numerics.R", s)).transpose()?;
        let tolerance = get("numerics.tolerance").map(|s| number("numerics.tolerance", s)).transpose()?.unwrap_or(1e-10);
        if !(tolerance > 0.0) {
            return Err(Invalid::new("numerics.tolerance", "must be positive"));
        }
        let shift = get("numerics.shift").map(|s| number("numerics.shift", s)).transpose()?.unwrap_or(1.0);
        let representation = get("numerics.representation").unwrap_or(DEFAULT_REPRESENTATION).to_string();
        if !pcpot::step::representation_names().contains(&representation.as_str()) {
            return Err(Invalid::new("numerics.representation", format!("unknown representation {representation:?}")));
        }
        let d = FdGrid::default();
        let oracle = FdGrid {
            l: get("oracle.L").map(|s| number("oracle.L", s)).transpose()?.unwrap_or(d.l),
            dx: get("oracle.dx").map(|s| number("oracle.dx", s)).transpose()?.unwrap_or(d.dx),
            dt: get("oracle.dt").map(|s| number("oracle.dt", s)).transpose()?.unwrap_or(d.dt),
        };
        let map_contour = match get("map.contour").unwrap_or("crossing") {
            "crossing" => MapContour::Crossing,
            s if s.starts_with("rotated") => {
                let delta = match s.split_once(':') {
                    Some((_, d)) => number("map.contour", d)?,
                    None => std::f64::consts::PI / 8.0,
                };
                MapContour::Rotated { delta }
            }
            other => return Err(Invalid::new("map.contour", format!("expected crossing or rotated[:delta], got {other:?}"))),
        };
        let map_region = get("map.only_region")
            .map(|s| s.parse::<usize>().map_err(|_| Invalid::new("map.only_region", "expected a region index")))
            .transpose()?;
        let gamma = get("asymptote.gamma").map(|s| numbers("asymptote.gamma", s)).transpose()?.unwrap_or_default();

        Ok(Scenario {
            solver: get("solver").map(str::to_string),
            levels,
            interfaces,
            initial_kind,
            initial_params,
            initial_file,
            grid_x,
            grid_t,
            radius,
            tolerance,
            shift,
            representation,
            oracle,
            map_contour,
            map_region,
            gamma,
            output: get("output.path").map(str::to_string),
            base,
        })
    }

    /// Canonical text form; `parse` reads it back to an equal scenario.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        if let Some(v) = &self.solver {
            put("solver", v.clone());
        }
        put("potential.levels", join(&self.levels));
        put("potential.interfaces", join(&self.interfaces));
        put("initial.kind", self.initial_kind.name().to_string());
        if !self.initial_params.is_empty() {
            put("initial.params", self.initial_params.iter().map(|p| join(p)).collect::<Vec<_>>().join("; "));
        }
        if let Some(f) = &self.initial_file {
            put("initial.file", f.clone());
        }
        if let Some(a) = &self.grid_x {
            put("grid.x", a.render());
        }
        if let Some(a) = &self.grid_t {
            put("grid.t", a.render());
        }
        if let Some(r) = self.radius {
            put("numerics.R", r.to_string());
        }
        put("numerics.tolerance", self.tolerance.to_string());
        put("numerics.shift", self.shift.to_string());
        put("numerics.representation", self.representation.clone());
        put("oracle.L", self.oracle.l.to_string());
        put("oracle.dx", self.oracle.dx.to_string());
        put("oracle.dt", self.oracle.dt.to_string());
        put(
            "map.contour",
            match self.map_contour {
                MapContour::Crossing => "crossing".to_string(),
                MapContour::Rotated { delta } => format!("rotated:{delta}"),
            },
        );
        if let Some(r) = self.map_region {
            put("map.only_region", r.to_string());
        }
        if !self.gamma.is_empty() {
            put("asymptote.gamma", join(&self.gamma));
        }
        if let Some(o) = &self.output {
            put("output.path", o.clone());
        }
        s
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn potential(&self) -> Parsed<PiecewisePotential> {
        PiecewisePotential::new(self.levels.clone(), self.interfaces.clone()).map_err(|e| Invalid::new("potential.interfaces", e.to_string()))
    }

    pub fn initial(&self) -> Parsed<InitialCondition> {
        if self.initial_kind == IcKind::Tabulated {
            let f = self.initial_file.as_deref().expect("checked at parse time");
            let path = self.resolve(f);
            let text = std::fs::read_to_string(&path).map_err(|e| Invalid::new("initial.file", format!("{}: {e}", path.display())))?;
            return InitialCondition::from_text(&text).map_err(|e| Invalid::new("initial.file", e.to_string()));
        }
        let terms = self
            .initial_params
            .iter()
            .map(|p| GaussTerm { amp: C64::new(p[0], 0.0), center: p[1], width: p[2], wavenumber: p.get(3).copied().unwrap_or(0.0) })
            .collect();
        InitialCondition::mixture(self.initial_kind, terms).map_err(|e| Invalid::new("initial.params", e.to_string()))
    }

    pub fn spec(&self) -> Parsed<SolverSpec> {
        let mut spec = SolverSpec::new(self.potential()?, self.initial()?);
        spec.numerics = Numerics { radius: self.radius, tolerance: self.tolerance, shift: self.shift };
        spec.representation = self.representation.clone();
        spec.grid = self.oracle;
        spec.map = MapOptions { contour: self.map_contour, only_region: self.map_region };
        Ok(spec)
    }

    pub fn axis(&self, field: &str) -> Parsed<Vec<f64>> {
        let a = if field == "grid.x" { &self.grid_x } else { &self.grid_t };
        a.as_ref().map(Axis::values).ok_or_else(|| Invalid::new(field, "missing"))
    }

    /// Time-major grid of evaluation points.
    pub fn points(&self) -> Parsed<Vec<(f64, f64)>> {
        let xs = self.axis("grid.x")?;
        let ts = self.axis("grid.t")?;
        Ok(ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "solver = well\npotential.levels = 0, -4, 0\npotential.interfaces = 0, 1.5\n\
        initial.kind = modulated-gaussian\ninitial.params = 1, -0.5, 0.7, 2; 0.25, 1, 1, 0\n\
        grid.x = -4:4:21\ngrid.t = 0.1, 0.30000000000000004\nnumerics.R = 3\nnumerics.tolerance = 1e-9\n\
        numerics.representation = d4\noracle.L = 20\nmap.contour = rotated:0.3\nmap.only_region = 2\n\
        asymptote.gamma = -4, 2\noutput.path = out.csv\n";

    #[test]
    fn echo_round_trips() {
        let s = Scenario::parse(FULL, PathBuf::new()).unwrap();
        assert_eq!(Scenario::parse(&s.echo(), PathBuf::new()).unwrap(), s);
        let m = Scenario::parse("potential.levels = 1, 2 # step\n", PathBuf::new()).unwrap();
        assert_eq!(Scenario::parse(&m.echo(), PathBuf::new()).unwrap(), m);
    }

    #[test]
    fn ranges_include_both_ends() {
        let a = Axis::parse("grid.x", "-4:4:21").unwrap().values();
        assert_eq!(a.len(), 21);
        assert_eq!((a[0], a[10], a[20]), (-4.0, 0.0, 4.0));
    }

    #[test]
    fn errors_name_the_field() {
        let e = Scenario::parse("solver = step\ngrid.t = 1\n", PathBuf::new()).unwrap_err();
        assert_eq!(e.field, "potential.levels");
        let e = Scenario::parse("potential.levels = 1, 2\nnumerics.truncation = 9\n", PathBuf::new()).unwrap_err();
        assert_eq!(e.field, "numerics.truncation");
        let e = Scenario::parse("potential.levels = 1, x\n", PathBuf::new()).unwrap_err();
        assert_eq!(e.field, "potential.levels");
    }
}
