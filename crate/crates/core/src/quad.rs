//! Globally adaptive Gauss–Kronrod (10/21) quadrature of complex, possibly
//! vector-valued integrands on real parameter intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result, C64};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-10, rel_tol: 1e-13, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadOptions { abs_tol, ..Default::default() }
    }
}

/// Integral of an `N`-component integrand with a shared error estimate
/// (the largest component error).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub value: [C64; N],
    pub error: f64,
    /// `∫|f|`, largest component.
    pub l1: f64,
    pub evals: usize,
}

impl<const N: usize> QuadResult<N> {
    pub fn zero() -> Self {
        QuadResult { value: [C64::new(0.0, 0.0); N], error: 0.0, l1: 0.0, evals: 0 }
    }

    pub fn add(&mut self, other: &Self) {
        for (v, o) in self.value.iter_mut().zip(other.value.iter()) {
            *v += *o;
        }
        self.error += other.error;
        self.l1 += other.l1;
        self.evals += other.evals;
    }

    pub fn scaled(mut self, c: C64) -> Self {
        for v in self.value.iter_mut() {
            *v *= c;
        }
        self.error *= c.norm();
        self.l1 *= c.norm();
        self
    }
}

#[derive(Clone, Copy, Debug)]
struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [C64; N],
    error: f64,
    l1: f64,
}

struct ByError<const N: usize>(Piece<N>, usize);

impl<const N: usize> PartialEq for ByError<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for ByError<N> {}
impl<const N: usize> PartialOrd for ByError<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for ByError<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger error first; ties broken by insertion order for determinism
        self.0.error.total_cmp(&other.0.error).then_with(|| other.1.cmp(&self.1))
    }
}

fn gk21<const N: usize, F>(f: &F, a: f64, b: f64) -> Piece<N>
where
    F: Fn(f64) -> [C64; N],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [[C64::new(0.0, 0.0); N]; 21];
    fv[10] = f(c);
    for j in 0..10 {
        let dx = h * XGK[j];
        fv[j] = f(c - dx);
        fv[20 - j] = f(c + dx);
    }
    let mut value = [C64::new(0.0, 0.0); N];
    let mut error = 0.0f64;
    let mut l1 = 0.0f64;
    for m in 0..N {
        let mut resk = fv[10][m] * WGK[10];
        let mut resabs = fv[10][m].norm() * WGK[10];
        let mut resg = C64::new(0.0, 0.0);
        for j in 0..10 {
            let s = fv[j][m] + fv[20 - j][m];
            resk += s * WGK[j];
            resabs += (fv[j][m].norm() + fv[20 - j][m].norm()) * WGK[j];
            if j % 2 == 1 {
                resg += s * WG[j / 2];
            }
        }
        let mean = resk * 0.5;
        let mut resasc = WGK[10] * (fv[10][m] - mean).norm();
        for j in 0..10 {
            resasc += WGK[j] * ((fv[j][m] - mean).norm() + (fv[20 - j][m] - mean).norm());
        }
        let habs = h.abs();
        let (resabs, resasc) = (resabs * habs, resasc * habs);
        let mut err = ((resk - resg) * h).norm();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        if !err.is_finite() || !resk.re.is_finite() || !resk.im.is_finite() {
            err = f64::INFINITY;
        }
        value[m] = resk * h;
        error = error.max(err);
        l1 = l1.max(resabs);
    }
    Piece { a, b, value, error, l1 }
}

/// `∫_a^b f` to `max(abs_tol, rel_tol·|value|)`.
///
/// Subdivision also stops once the estimate is dominated by the roundoff
/// floor `50 ε ∫|f|`; the reported error never drops below that floor.
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [C64; N],
{
    if a == b {
        return Ok(QuadResult::zero());
    }
    if a > b {
        return integrate(f, b, a, opts).map(|r| r.scaled(C64::new(-1.0, 0.0)));
    }
    let first = gk21(&f, a, b);
    let mut heap = BinaryHeap::new();
    let mut counter = 0usize;
    heap.push(ByError(first, counter));
    let mut total_err = first.error;
    let mut evals = 21usize;
    // pieces too narrow to split keep their (honest) error but leave the queue
    let mut frozen: Vec<Piece<N>> = Vec::new();
    let (mut value, mut l1) = (first.value, first.l1);
    loop {
        let mag = value.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let target = opts.abs_tol.max(opts.rel_tol * mag);
        let floor = 50.0 * f64::EPSILON * l1;
        if total_err <= target || total_err <= 2.0 * floor || heap.is_empty() {
            if !total_err.is_finite() || total_err > target.max(2.0 * floor) {
                return Err(Error::Quadrature { leg: 0, error: total_err, tolerance: target });
            }
            return Ok(finish(heap.into_iter().map(|p| p.0).chain(frozen).collect(), evals));
        }
        if heap.len() + frozen.len() >= opts.max_intervals {
            return Err(Error::Quadrature { leg: 0, error: total_err, tolerance: target });
        }
        let ByError(worst, _) = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evals += 42;
        total_err += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        for m in 0..N {
            value[m] += left.value[m] + right.value[m] - worst.value[m];
        }
        if !total_err.is_finite() || counter % 64 == 0 {
            // resynchronise the running sums
            total_err = heap.iter().map(|p| p.0.error).chain(frozen.iter().map(|p| p.error)).sum::<f64>()
                + left.error
                + right.error;
        }
        counter += 1;
        heap.push(ByError(left, counter));
        counter += 1;
        heap.push(ByError(right, counter));
    }
}

fn sum_pieces<'a, const N: usize>(pieces: impl Iterator<Item = &'a Piece<N>>) -> ([C64; N], f64) {
    let mut v = [C64::new(0.0, 0.0); N];
    let mut l1 = 0.0;
    for p in pieces {
        for m in 0..N {
            v[m] += p.value[m];
        }
        l1 += p.l1;
    }
    (v, l1)
}

fn finish<const N: usize>(mut pieces: Vec<Piece<N>>, evals: usize) -> QuadResult<N> {
    // sum in left-to-right order so the result does not depend on heap layout
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let (value, l1) = sum_pieces(pieces.iter());
    let error = pieces.iter().map(|p| p.error).sum::<f64>().max(50.0 * f64::EPSILON * l1);
    QuadResult { value, error, l1, evals }
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<1>>
where
    F: Fn(f64) -> C64,
{
    integrate(|x| [f(x)], a, b, opts)
}

/// Principal value `PV ∫_a^b f` with simple poles at `poles`, by symmetric
/// exclusion: around each pole `p` the pair `f(p+s) + f(p−s)` is integrated
/// over `0 < s < h`, which is regular.
pub fn integrate_pv<const N: usize, F>(f: F, a: f64, b: f64, poles: &[f64], opts: &QuadOptions) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [C64; N],
{
    let poles: Vec<f64> = poles.iter().copied().filter(|p| *p > a && *p < b).collect();
    let pair = |i: usize, s: f64| {
        let (u, v) = (f(poles[i] + s), f(poles[i] - s));
        let mut w = u;
        for m in 0..N {
            w[m] += v[m];
        }
        w
    };
    integrate_pv_pairs(&f, pair, a, b, &poles, opts)
}

/// `integrate_pv` with the symmetric sums supplied by the caller:
/// `pair(i, s) = f(p_i + s) + f(p_i − s)`, for integrands that can place the
/// pole exactly where the parameter map cannot. `poles` must be sorted.
pub fn integrate_pv_pairs<const N: usize, F, P>(f: F, pair: P, a: f64, b: f64, poles: &[f64], opts: &QuadOptions) -> Result<QuadResult<N>>
where
    F: Fn(f64) -> [C64; N],
    P: Fn(usize, f64) -> [C64; N],
{
    debug_assert!(poles.windows(2).all(|w| w[0] < w[1]));
    if poles.is_empty() {
        return integrate(&f, a, b, opts);
    }
    // exclusion half-widths: never overlapping and never past the ends
    let mut half = Vec::with_capacity(poles.len());
    for (i, &p) in poles.iter().enumerate() {
        let left = if i == 0 { p - a } else { 0.5 * (p - poles[i - 1]) };
        let right = if i + 1 == poles.len() { b - p } else { 0.5 * (poles[i + 1] - p) };
        half.push(0.5 * left.min(right));
    }
    let parts = 2 * poles.len() + 1;
    let sub = QuadOptions { abs_tol: opts.abs_tol / parts as f64, ..*opts };
    let mut out = QuadResult::zero();
    let mut lo = a;
    for (i, (&p, &h)) in poles.iter().zip(&half).enumerate() {
        out.add(&integrate(&f, lo, p - h, &sub)?);
        out.add(&integrate(|s| pair(i, s), 0.0, h, &sub)?);
        lo = p + h;
    }
    out.add(&integrate(&f, lo, b, &sub)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(t: f64) -> QuadOptions {
        QuadOptions::with_tol(t)
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate_scalar(|k| C64::new((-k * k).exp(), 0.0), -50.0, 50.0, &opts(1e-12)).unwrap();
        assert!((r.value[0].re - std::f64::consts::PI.sqrt()).abs() < 1e-10);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn oscillatory_complex() {
        // ∫_0^10 e^{i 7 x} = (e^{70 i} − 1)/(7 i)
        let r = integrate_scalar(|x| C64::new(0.0, 7.0 * x).exp(), 0.0, 10.0, &opts(1e-12)).unwrap();
        let exact = (C64::new(0.0, 70.0).exp() - 1.0) / C64::new(0.0, 7.0);
        assert!((r.value[0] - exact).norm() < 1e-11);
    }

    #[test]
    fn principal_value_simple_pole() {
        let r = integrate_pv(|k| [C64::new(1.0 / (k - 1.0), 0.0)], -40.0, 40.0, &[1.0], &opts(1e-12)).unwrap();
        let exact = 39f64.ln() - 41f64.ln();
        assert!((r.value[0].re - exact).abs() < 1e-10, "{}", r.value[0].re);
        assert!((exact + 0.050_010_4).abs() < 1e-7);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} = 2
        let r = integrate_scalar(|x| C64::new(x.powf(-0.5), 0.0), 0.0, 1.0, &opts(1e-9)).unwrap();
        assert!((r.value[0].re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn failure_is_reported() {
        let o = QuadOptions { abs_tol: 1e-14, rel_tol: 0.0, max_intervals: 4 };
        let r = integrate_scalar(|x| C64::new((50.0 * x * x).sin(), 0.0), 0.0, 10.0, &o);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn vector_components_share_nodes() {
        let r = integrate(|x| [C64::new(x, 0.0), C64::new(0.0, x * x)], 0.0, 3.0, &opts(1e-12)).unwrap();
        assert!((r.value[0].re - 4.5).abs() < 1e-12);
        assert!((r.value[1].im - 9.0).abs() < 1e-12);
    }
}
