//! Initial data: Gaussian mixtures (optionally modulated) or tabulated samples
//! interpolated by local cubics.

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcKind {
    Gaussian,
    ModulatedGaussian,
    Tabulated,
}

impl IcKind {
    pub fn name(self) -> &'static str {
        match self {
            IcKind::Gaussian => "gaussian",
            IcKind::ModulatedGaussian => "modulated-gaussian",
            IcKind::Tabulated => "tabulated",
        }
    }
}

/// `amp · exp(−((x−center)/width)²) · exp(i wavenumber x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussTerm {
    pub amp: C64,
    pub center: f64,
    pub width: f64,
    pub wavenumber: f64,
}

impl GaussTerm {
    pub fn eval(&self, x: f64) -> C64 {
        let z = (x - self.center) / self.width;
        self.amp * C64::new(-z * z, self.wavenumber * x).exp()
    }

    pub fn deriv(&self, x: f64) -> C64 {
        let z = (x - self.center) / self.width;
        self.eval(x) * C64::new(-2.0 * z / self.width, self.wavenumber)
    }
}

/// One interpolation cell `[lo, hi]` holding `p(u) = Σ c_j u^j`, `u = x − mid`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub mid: f64,
    pub coef: [C64; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub xs: Vec<f64>,
    pub values: Vec<C64>,
    pub cells: Vec<Cell>,
}

impl Table {
    pub fn new(xs: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::InvalidInitial("abscissae and values differ in length".into()));
        }
        if xs.len() < 4 {
            return Err(Error::InvalidInitial("a table needs at least 4 rows".into()));
        }
        if xs.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInitial("non-finite table entry".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInitial("table abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let mut slopes = vec![C64::new(0.0, 0.0); n];
        for i in 1..n - 1 {
            let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            slopes[i] = (h0 * h0 * (values[i + 1] - values[i]) + h1 * h1 * (values[i] - values[i - 1]))
                / (h0 * h1 * (h0 + h1));
        }
        let one_sided = |i0: usize, i1: usize, i2: usize| {
            let (h0, h1) = (xs[i1] - xs[i0], xs[i2] - xs[i1]);
            let (y0, y1, y2) = (values[i0], values[i1], values[i2]);
            // derivative at xs[i0] of the parabola through the three points
            -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * y0 + (h0 + h1) / (h0 * h1) * y1 - h0 / (h1 * (h0 + h1)) * y2
        };
        slopes[0] = one_sided(0, 1, 2);
        {
            let (h0, h1) = (xs[n - 2] - xs[n - 3], xs[n - 1] - xs[n - 2]);
            let (y0, y1, y2) = (values[n - 3], values[n - 2], values[n - 1]);
            slopes[n - 1] = h1 / (h0 * (h0 + h1)) * y0 - (h0 + h1) / (h0 * h1) * y1
                + (2.0 * h1 + h0) / (h1 * (h0 + h1)) * y2;
        }
        let cells = (0..n - 1)
            .map(|i| {
                let (lo, hi) = (xs[i], xs[i + 1]);
                let eta = 0.5 * (hi - lo);
                let a = 0.5 * (values[i + 1] + values[i]);
                let b = 0.5 * (values[i + 1] - values[i]);
                let d = 0.5 * (slopes[i + 1] + slopes[i]);
                let e = 0.5 * (slopes[i + 1] - slopes[i]);
                let c2 = e / (2.0 * eta);
                let c0 = a - c2 * eta * eta;
                let c3 = (d - b / eta) / (2.0 * eta * eta);
                let c1 = b / eta - c3 * eta * eta;
                Cell { lo, hi, mid: 0.5 * (lo + hi), coef: [c0, c1, c2, c3] }
            })
            .collect();
        Ok(Table { xs, values, cells })
    }

    fn cell_at(&self, x: f64) -> Option<&Cell> {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return None;
        }
        let i = self.xs.partition_point(|&v| v <= x).saturating_sub(1).min(self.cells.len() - 1);
        Some(&self.cells[i])
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.cell_at(x).map_or(C64::new(0.0, 0.0), |c| {
            let u = x - c.mid;
            ((c.coef[3] * u + c.coef[2]) * u + c.coef[1]) * u + c.coef[0]
        })
    }

    pub fn deriv(&self, x: f64) -> C64 {
        self.cell_at(x).map_or(C64::new(0.0, 0.0), |c| {
            let u = x - c.mid;
            (3.0 * c.coef[3] * u + 2.0 * c.coef[2]) * u + c.coef[1]
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition {
    kind: IcKind,
    terms: Vec<GaussTerm>,
    table: Option<Table>,
}

impl InitialCondition {
    /// `amp · exp(−((x−center)/width)²)`.
    pub fn gaussian(amp: f64, center: f64, width: f64) -> Result<Self> {
        Self::mixture(IcKind::Gaussian, vec![GaussTerm { amp: C64::new(amp, 0.0), center, width, wavenumber: 0.0 }])
    }

    /// Gaussian carrying the plane wave `e^{i p x}`.
    pub fn modulated(amp: f64, center: f64, width: f64, wavenumber: f64) -> Result<Self> {
        Self::mixture(IcKind::ModulatedGaussian, vec![GaussTerm { amp: C64::new(amp, 0.0), center, width, wavenumber }])
    }

    pub fn mixture(kind: IcKind, terms: Vec<GaussTerm>) -> Result<Self> {
        if kind == IcKind::Tabulated {
            return Err(Error::InvalidInitial("use `tabulated` for sampled data".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInitial("no Gaussian terms".into()));
        }
        for t in &terms {
            if !(t.width > 0.0) || !t.width.is_finite() {
                return Err(Error::InvalidInitial(format!("width must be positive, got {}", t.width)));
            }
            if !t.center.is_finite() || !t.wavenumber.is_finite() || !t.amp.re.is_finite() || !t.amp.im.is_finite() {
                return Err(Error::InvalidInitial("non-finite Gaussian parameter".into()));
            }
        }
        Ok(InitialCondition { kind, terms, table: None })
    }

    pub fn tabulated(xs: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        Ok(InitialCondition { kind: IcKind::Tabulated, terms: Vec::new(), table: Some(Table::new(xs, values)?) })
    }

    /// Parses two-column `x value` or three-column `x re im` text. Commas,
    /// tabs or spaces separate fields; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        let mut width = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|s| s.parse::<f64>()).collect();
            let parsed = match parsed {
                Ok(p) => p,
                // allow a single header line
                Err(_) if xs.is_empty() && width.is_none() => continue,
                Err(_) => return Err(Error::InvalidInitial(format!("line {}: not numeric", ln + 1))),
            };
            if parsed.len() != 2 && parsed.len() != 3 {
                return Err(Error::InvalidInitial(format!("line {}: expected 2 or 3 columns", ln + 1)));
            }
            if *width.get_or_insert(parsed.len()) != parsed.len() {
                return Err(Error::InvalidInitial(format!("line {}: column count changed", ln + 1)));
            }
            xs.push(parsed[0]);
            vals.push(C64::new(parsed[1], if parsed.len() == 3 { parsed[2] } else { 0.0 }));
        }
        Self::tabulated(xs, vals)
    }

    pub fn kind(&self) -> IcKind {
        self.kind
    }

    pub fn terms(&self) -> &[GaussTerm] {
        &self.terms
    }

    pub fn table(&self) -> Option<&Table> {
        self.table.as_ref()
    }

    pub fn eval(&self, x: f64) -> C64 {
        match &self.table {
            Some(t) => t.eval(x),
            None => self.terms.iter().map(|g| g.eval(x)).sum(),
        }
    }

    pub fn deriv(&self, x: f64) -> C64 {
        match &self.table {
            Some(t) => t.deriv(x),
            None => self.terms.iter().map(|g| g.deriv(x)).sum(),
        }
    }

    /// `ψ_0(−x)`.
    pub fn mirrored(&self) -> Self {
        match &self.table {
            Some(t) => {
                let xs = t.xs.iter().rev().map(|x| -x).collect();
                let vals = t.values.iter().rev().copied().collect();
                Self::tabulated(xs, vals).expect("mirror of a valid table")
            }
            None => InitialCondition {
                kind: self.kind,
                terms: self
                    .terms
                    .iter()
                    .map(|g| GaussTerm { center: -g.center, wavenumber: -g.wavenumber, ..*g })
                    .collect(),
                table: None,
            },
        }
    }

    /// `ψ_0 + other` (both Gaussian mixtures).
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.table.is_some() || other.table.is_some() {
            return Err(Error::InvalidInitial("sums are supported for Gaussian mixtures only".into()));
        }
        let kind = if self.kind == IcKind::Gaussian && other.kind == IcKind::Gaussian {
            IcKind::Gaussian
        } else {
            IcKind::ModulatedGaussian
        };
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::mixture(kind, terms)
    }

    /// Upper bound for `∫|ψ_0|` over `[a, b]`.
    pub fn l1_bound(&self, a: f64, b: f64) -> f64 {
        match &self.table {
            Some(t) => t
                .cells
                .iter()
                .filter(|c| c.hi > a && c.lo < b)
                .map(|c| {
                    let m = c.coef.iter().enumerate().map(|(j, v)| v.norm() * (0.5 * (c.hi - c.lo)).powi(j as i32)).sum::<f64>();
                    m * (c.hi.min(b) - c.lo.max(a))
                })
                .sum(),
            None => self.terms.iter().map(|g| g.amp.norm() * g.width * std::f64::consts::PI.sqrt()).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_reproduces_cubics() {
        let xs: Vec<f64> = (0..12).map(|i| -1.0 + 0.2 * i as f64 + 0.01 * (i % 3) as f64).collect();
        let f = |x: f64| C64::new(1.0 - 2.0 * x + 0.5 * x * x, 0.3 * x);
        let vals = xs.iter().map(|&x| f(x)).collect();
        let t = Table::new(xs.clone(), vals).unwrap();
        for i in 0..100 {
            let x = xs[0] + (xs[11] - xs[0]) * i as f64 / 99.0;
            assert!((t.eval(x) - f(x)).norm() < 1e-12, "x = {x}");
        }
        assert_eq!(t.eval(-5.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn parses_two_and_three_columns() {
        let two = "# x psi\nx,value\n0 1\n1 2\n2 3\n3 4\n";
        let ic = InitialCondition::from_text(two).unwrap();
        assert!((ic.eval(1.5) - C64::new(2.5, 0.0)).norm() < 1e-12);
        let three = "0,1,0\n1,2,1\n2,3,2\n3,4,3\n";
        let ic = InitialCondition::from_text(three).unwrap();
        assert!((ic.eval(2.0) - C64::new(3.0, 2.0)).norm() < 1e-12);
        assert!(InitialCondition::from_text("0 1\n1 2 3\n").is_err());
        assert!(InitialCondition::from_text("0 1\n0 2\n1 1\n2 2\n").is_err());
    }

    #[test]
    fn mirror_negates_argument() {
        let ic = InitialCondition::modulated(1.0, 0.5, 0.8, 2.0).unwrap();
        let m = ic.mirrored();
        for x in [-1.0, 0.2, 1.7] {
            assert!((m.eval(x) - ic.eval(-x)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_width() {
        assert!(InitialCondition::gaussian(1.0, 0.0, 0.0).is_err());
        assert!(InitialCondition::gaussian(1.0, 0.0, -1.0).is_err());
    }
}
