//! The Poisson-type kernel `R_r^α(u, v) = Σ_k r^k φ_k^α(u) φ_k^α(v)`: closed
//! form through `I_α`, truncated series with an envelope tail bound, and the
//! L² smoothness quantities behind the Hardy inequality, with sweeps that
//! estimate their implied constants.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bases::{turning_scale, Alpha, EnvelopeFit, PhiRecurrence};
use crate::error::{Error, Result};
use crate::func::{Decay, Func};
use crate::quadrature::{integrate_halfline, l2_diff_norm, l2_norm_halfline, QuadResult, QuadSpec};
use crate::specfun::ln_bessel_i_scaled_unchecked;
use crate::stats::{fit_loglog, SlopeFit};
use crate::sum::Compensated;

/// Type and radius of the kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelParams {
    alpha: Alpha,
    r: f64,
}

impl KernelParams {
    pub fn new(alpha: Alpha, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain("KernelParams::new", format!("r = {r} must lie in (0, 1)")));
        }
        Ok(KernelParams { alpha, r })
    }

    /// One-dimensional parameters.
    pub fn scalar(alpha: f64, r: f64) -> Result<Self> {
        KernelParams::new(Alpha::scalar(alpha)?, r)
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    fn alpha_1d(&self, op: &'static str) -> Result<f64> {
        match self.alpha.coords() {
            [a] => Ok(*a),
            c => Err(Error::Dimension { op, expected: 1, got: c.len() }),
        }
    }
}

/// `γ` in the kernel smoothness condition: `(d+2)/4`.
pub fn condition_gamma(d: usize) -> f64 {
    (d as f64 + 2.0) / 4.0
}

/// Power of `(1−r)^{−1}` attached to `|x−x'|^δ` in the smoothness condition.
pub fn condition_exponent(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    condition_gamma(d) * (df + 2.0 * delta) / (df + 2.0)
}

/// `E = γd/(d+2) + d/2`, which is `3d/4`.
pub fn admissible_exponent(d: usize) -> f64 {
    let df = d as f64;
    condition_gamma(d) * df / (df + 2.0) + df / 2.0
}

/// `ln R_r^α(u, v)` with the Gaussian and the Bessel growth combined before
/// exponentiation:
/// `−½(1+r)/(1−r)(u²+v²) + z = −(1+r)(u−v)²/(2(1−r)) − uv(1−√r)/(1+√r)`.
pub(crate) fn ln_kernel(alpha: f64, r: f64, u: f64, v: f64) -> f64 {
    let sr = r.sqrt();
    let one_m_r = 1.0 - r;
    let z = 2.0 * sr * u * v / one_m_r;
    let d = u - v;
    std::f64::consts::LN_2 + 0.5 * (u * v).ln() - (-r).ln_1p() - 0.5 * alpha * r.ln()
        - (1.0 + r) * d * d / (2.0 * one_m_r)
        - u * v * (1.0 - sr) / (1.0 + sr)
        + ln_bessel_i_scaled_unchecked(alpha, z)
}

const UNDERFLOW_LN: f64 = -690.775_527_898_213_7; // ln 1e−300

pub(crate) fn kernel_value(alpha: f64, r: f64, u: f64, v: f64) -> f64 {
    let l = ln_kernel(alpha, r, u, v);
    if l < UNDERFLOW_LN {
        0.0
    } else {
        l.exp()
    }
}

fn check_point(op: &'static str, u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("argument {u} must be positive")))
    }
}

/// Closed form of the one-dimensional kernel.
pub fn kernel_closed(p: &KernelParams, u: f64, v: f64) -> Result<f64> {
    let alpha = p.alpha_1d("kernel_closed")?;
    check_point("kernel_closed", u)?;
    check_point("kernel_closed", v)?;
    Ok(kernel_value(alpha, p.r, u, v))
}

/// `Π_i R_r^{α_i}(x_i, y_i)`.
pub fn kernel_closed_tensor(p: &KernelParams, x: &[f64], y: &[f64]) -> Result<f64> {
    let d = p.alpha.dim();
    for z in [x, y] {
        if z.len() != d {
            return Err(Error::Dimension { op: "kernel_closed_tensor", expected: d, got: z.len() });
        }
    }
    let mut ln = 0.0;
    for ((&a, &xi), &yi) in p.alpha.coords().iter().zip(x).zip(y) {
        check_point("kernel_closed_tensor", xi)?;
        check_point("kernel_closed_tensor", yi)?;
        ln += ln_kernel(a, p.r, xi, yi);
    }
    Ok(if ln < UNDERFLOW_LN { 0.0 } else { ln.exp() })
}

const ENVELOPE_FIT_KMAX: usize = 200;

/// Envelope fit for `α`, computed once per process.
pub fn envelope_fit(alpha: f64) -> Result<Arc<EnvelopeFit>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<EnvelopeFit>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&alpha.to_bits()) {
        return Ok(f.clone());
    }
    let fit = Arc::new(EnvelopeFit::fit(alpha, ENVELOPE_FIT_KMAX)?);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(alpha.to_bits(), fit.clone());
    Ok(fit)
}

const TAIL_TERMS_MAX: usize = 50_000_000;

/// Bound on `Σ_{k>n} r^k |φ_k(u) φ_k(v)|` from the fitted envelope. Once both
/// points sit in the flat regime the envelope product is `ν^{−1/2}`, which is
/// non-increasing, and the rest is summed as a geometric series.
pub fn series_tail_bound(fit: &EnvelopeFit, r: f64, u: f64, v: f64, n: usize) -> f64 {
    let c2 = fit.constant * fit.constant;
    let (lo, hi) = (u.min(v), u.max(v));
    let mut sum = Compensated::new();
    let mut k = n + 1;
    let mut rk = r.powi(k as i32);
    while k <= n + TAIL_TERMS_MAX {
        let term = c2 * rk * fit.envelope(k, u) * fit.envelope(k, v);
        sum.add(term);
        let nu = turning_scale(k, fit.alpha);
        if 1.0 / nu.sqrt() < lo && hi <= (nu / 2.0).sqrt() {
            sum.add(term * r / (1.0 - r));
            return sum.value();
        }
        if rk == 0.0 {
            return sum.value();
        }
        k += 1;
        rk *= r;
    }
    f64::INFINITY
}

/// A truncated kernel series with its certified remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `Σ_{k≤n} r^k φ_k(u) φ_k(v)` and the envelope bound on the rest.
pub fn kernel_series(p: &KernelParams, u: f64, v: f64, n: usize) -> Result<SeriesValue> {
    let alpha = p.alpha_1d("kernel_series")?;
    check_point("kernel_series", u)?;
    check_point("kernel_series", v)?;
    let rec = PhiRecurrence::new(alpha, n)?;
    let mut pu = vec![0.0; n + 1];
    let mut pv = vec![0.0; n + 1];
    rec.fill(u, &mut pu);
    rec.fill(v, &mut pv);
    let mut sum = Compensated::new();
    let mut rk = 1.0;
    for (a, b) in pu.iter().zip(&pv) {
        sum.add(rk * a * b);
        rk *= p.r;
    }
    let fit = envelope_fit(alpha)?;
    Ok(SeriesValue {
        value: sum.value(),
        tail_bound: series_tail_bound(&fit, p.r, u, v, n),
        terms: n + 1,
    })
}

const SERIES_ORDER_MAX: usize = 1 << 22;

/// Smallest truncation of the form `8·2^j` whose tail bound is at most `tol`.
pub fn series_order_for(p: &KernelParams, u: f64, v: f64, tol: f64) -> Result<usize> {
    let alpha = p.alpha_1d("series_order_for")?;
    let fit = envelope_fit(alpha)?;
    let mut n = 8;
    while series_tail_bound(&fit, p.r, u, v, n) > tol {
        n *= 2;
        if n > SERIES_ORDER_MAX {
            return Err(Error::fit("series_order_for", format!("tail bound above {tol:e} at N = {n}")));
        }
    }
    Ok(n)
}

/// Width `√((1−r)/(1+r))` of the Gaussian factor in `v`.
fn kernel_width(r: f64) -> f64 {
    ((1.0 - r) / (1.0 + r)).sqrt()
}

/// `v ↦ R_r^α(u, v)` with panel edges at its natural scales.
pub fn kernel_func(p: &KernelParams, u: f64) -> Result<Func> {
    let alpha = p.alpha_1d("kernel_func")?;
    check_point("kernel_func", u)?;
    let r = p.r;
    let s = kernel_width(r);
    let radius = u + 12.0 * s;
    let peak = 2.0 * r.sqrt() * u / (1.0 + r);
    let mut bps: Vec<f64> = (-8..=8).map(|j| peak + j as f64 * s).collect();
    bps.push(u);
    // below this v the Bessel argument is < 1
    bps.push((1.0 - r) / (2.0 * r.sqrt() * u));
    bps.retain(|&b| b > 0.0 && b < radius);
    Ok(Func::new(move |v| if v > 0.0 { kernel_value(alpha, r, u, v) } else { 0.0 }, Decay::Support(radius))
        .with_breakpoints(bps))
}

/// `∫_0^∞ R_r(u, v) φ_k(v) dv`, which equals `r^k φ_k(u)`.
pub fn reproduce(p: &KernelParams, u: f64, k: usize, spec: &QuadSpec) -> Result<QuadResult> {
    let alpha = p.alpha_1d("reproduce")?;
    let g = kernel_func(p, u)?.product(&crate::bases::phi_func(k, alpha)?);
    integrate_halfline(&g, spec)
}

/// Tolerances used for the kernel L² norms: the norms of differences can be
/// small, so the absolute tolerance is tiny and the relative one governs.
pub fn kernel_quad_spec() -> QuadSpec {
    QuadSpec::with_tol(1e-16, 1e-9)
}

/// `‖R_r(u, ·) − R_r(u', ·)‖_{L²(0,∞)}` by quadrature.
pub fn kernel_diff_l2(p: &KernelParams, u: f64, u2: f64, spec: &QuadSpec) -> Result<QuadResult> {
    if u == u2 {
        check_point("kernel_diff_l2", u)?;
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            tail: 0.0,
            panels: 0,
        });
    }
    l2_diff_norm(&kernel_func(p, u)?, &kernel_func(p, u2)?, spec)
}

/// The same norm through Parseval: `(Σ_{k≤n} r^{2k}(φ_k(u) − φ_k(u'))²)^{1/2}`.
pub fn kernel_diff_l2_series(p: &KernelParams, u: f64, u2: f64, n: usize) -> Result<f64> {
    let alpha = p.alpha_1d("kernel_diff_l2_series")?;
    check_point("kernel_diff_l2_series", u)?;
    check_point("kernel_diff_l2_series", u2)?;
    let rec = PhiRecurrence::new(alpha, n)?;
    let mut a = vec![0.0; n + 1];
    let mut b = vec![0.0; n + 1];
    rec.fill(u, &mut a);
    rec.fill(u2, &mut b);
    let mut sum = Compensated::new();
    let mut r2k = 1.0;
    for (x, y) in a.iter().zip(&b) {
        sum.add(r2k * (x - y) * (x - y));
        r2k *= p.r * p.r;
    }
    Ok(sum.value().sqrt())
}

/// `|u−u'|/(1−r)^{3/4} + |u−u'|^{α+1/2}/(1−r)^{(α+1)/2}`.
pub fn prop32_rhs(alpha: f64, r: f64, gap: f64) -> f64 {
    let q = 1.0 - r;
    gap / q.powf(0.75) + gap.powf(alpha + 0.5) / q.powf((alpha + 1.0) / 2.0)
}

/// Kernel difference norm over [`prop32_rhs`].
pub fn prop32_ratio(alpha: f64, r: f64, u: f64, u2: f64, spec: &QuadSpec) -> Result<f64> {
    if alpha < -0.5 {
        return Err(Error::domain("prop32_ratio", format!("alpha {alpha} must be >= -1/2")));
    }
    let gap = (u - u2).abs();
    if gap > 0.5 {
        return Err(Error::domain("prop32_ratio", format!("|u - u'| = {gap} exceeds 1/2")));
    }
    let p = KernelParams::scalar(alpha, r)?;
    let norm = kernel_diff_l2(&p, u, u2, spec)?;
    if gap == 0.0 {
        return Ok(0.0);
    }
    Ok(norm.value / prop32_rhs(alpha, r, gap))
}

fn check_open_half(op: &'static str, alpha: f64) -> Result<()> {
    if alpha > -0.5 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("alpha {alpha} must lie in (-1/2, 1/2)")))
    }
}

/// `|u−v|(k+1)^{−1/4} + |u−v|^{α+1/2}(k+1)^{α/2}`.
pub fn lemma33_rhs(k: usize, alpha: f64, gap: f64) -> f64 {
    let kp = (k + 1) as f64;
    gap * kp.powf(-0.25) + gap.powf(alpha + 0.5) * kp.powf(alpha / 2.0)
}

/// `|φ_k(u) − φ_k(v)|` over [`lemma33_rhs`], for `u, v ∈ (0, 1)`.
pub fn lemma33_ratio(k: usize, alpha: f64, u: f64, v: f64) -> Result<f64> {
    check_open_half("lemma33_ratio", alpha)?;
    for x in [u, v] {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain("lemma33_ratio", format!("point {x} must lie in (0, 1)")));
        }
    }
    if u == v {
        return Ok(0.0);
    }
    let rec = PhiRecurrence::new(alpha, k)?;
    Ok((rec.value(k, u) - rec.value(k, v)).abs() / lemma33_rhs(k, alpha, (u - v).abs()))
}

/// `(1−r)^{−3/4} + u^{α−1/2}(1−r)^{−(α+1)/2}`.
pub fn lemma34_rhs(alpha: f64, r: f64, u: f64) -> f64 {
    let q = 1.0 - r;
    q.powf(-0.75) + u.powf(alpha - 0.5) * q.powf(-(alpha + 1.0) / 2.0)
}

/// `‖u^{−1} R_r(u, ·)‖_{L²}` over [`lemma34_rhs`].
pub fn lemma34_ratio(alpha: f64, r: f64, u: f64, spec: &QuadSpec) -> Result<f64> {
    check_open_half("lemma34_ratio", alpha)?;
    if !(r > 0.5 && r < 1.0) {
        return Err(Error::domain("lemma34_ratio", format!("r = {r} must lie in (1/2, 1)")));
    }
    let p = KernelParams::scalar(alpha, r)?;
    let norm = l2_norm_halfline(&kernel_func(&p, u)?, spec)?;
    Ok(norm.value / u / lemma34_rhs(alpha, r, u))
}

/// Largest `|closed − series|` over an `n × n` grid on `[0.1, 5]²`, with the
/// series truncated where its tail bound drops below `tail_tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MehlerReport {
    pub alpha: f64,
    pub r: f64,
    pub grid: usize,
    pub max_abs_diff: f64,
    pub max_tail_bound: f64,
    pub max_terms: usize,
}

pub fn mehler_check(alpha: f64, r: f64, grid: usize, tail_tol: f64) -> Result<MehlerReport> {
    let p = KernelParams::scalar(alpha, r)?;
    let pts: Vec<f64> = (0..grid)
        .map(|i| 0.1 + 4.9 * i as f64 / (grid.max(2) - 1) as f64)
        .collect();
    let pairs: Vec<(f64, f64)> = pts.iter().flat_map(|&u| pts.iter().map(move |&v| (u, v))).collect();
    let rows: Vec<Result<(f64, f64, usize)>> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let n = series_order_for(&p, u, v, tail_tol)?;
            let s = kernel_series(&p, u, v, n)?;
            Ok(((kernel_closed(&p, u, v)? - s.value).abs(), s.tail_bound, s.terms))
        })
        .collect();
    let mut rep = MehlerReport {
        alpha,
        r,
        grid,
        max_abs_diff: 0.0,
        max_tail_bound: 0.0,
        max_terms: 0,
    };
    for row in rows {
        let (d, t, n) = row?;
        rep.max_abs_diff = rep.max_abs_diff.max(d);
        rep.max_tail_bound = rep.max_tail_bound.max(t);
        rep.max_terms = rep.max_terms.max(n);
    }
    Ok(rep)
}

/// Which bound a sweep checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCheck {
    Prop32,
    Lemma33,
    Lemma34,
}

/// One evaluated tuple of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSample {
    pub alpha: f64,
    pub r: Option<f64>,
    pub k: Option<usize>,
    pub u: f64,
    pub v: Option<f64>,
    pub ratio: f64,
}

/// Outcome of a sweep: the empirical implied constant and how the per-level
/// maxima trend with the driving parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub check: BoundCheck,
    pub grid_version: u32,
    pub alpha: f64,
    pub max_ratio: f64,
    pub arg_max: BoundSample,
    pub samples: usize,
    /// The implied constant, i.e. `max_ratio`.
    pub fitted_constant: f64,
    /// Name of the driving parameter of `slope`.
    pub driver: &'static str,
    /// Log-log slope of the per-level max ratio against the driving
    /// parameter, over the upper half (in log scale) of its range.
    pub slope: SlopeFit,
    /// The same slope over the whole range.
    pub slope_full: SlopeFit,
    pub secondary_driver: Option<&'static str>,
    pub secondary_slope: Option<SlopeFit>,
    #[serde(skip)]
    pub rows: Vec<BoundSample>,
}

/// Bounded-ness surrogate: fitted slope at most this.
pub const SLOPE_LIMIT: f64 = 0.05;

impl BoundCheckReport {
    pub fn bounded(&self) -> bool {
        self.max_ratio.is_finite() && self.slope.slope <= SLOPE_LIMIT
    }
}

/// Parameter grid for the kernel difference sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop32Grid {
    pub version: u32,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl Prop32Grid {
    pub fn v1() -> Self {
        Prop32Grid {
            version: 1,
            r: vec![0.5, 0.7, 0.9, 0.95, 0.99, 0.995, 0.999, 0.9995, 0.9999],
            u: vec![0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0],
            gaps: vec![1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3, 0.5],
        }
    }
}

/// Parameter grid for the pointwise difference sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma33Grid {
    pub version: u32,
    pub k: Vec<usize>,
    pub random_pairs: usize,
    pub seed: u64,
    pub anchors: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl Lemma33Grid {
    pub fn v1() -> Self {
        Lemma33Grid {
            version: 1,
            k: vec![0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 500, 1024, 2048, 4096, 8192],
            random_pairs: 2000,
            seed: 33,
            anchors: vec![0.01, 0.1, 0.3, 0.5, 0.7, 0.9],
            gaps: (0..=12).map(|j| 0.5 * 0.3f64.powi(j)).collect(),
        }
    }
}

/// Parameter grid for the weighted kernel norm sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma34Grid {
    pub version: u32,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

impl Lemma34Grid {
    pub fn v1() -> Self {
        Lemma34Grid {
            version: 1,
            r: vec![0.6, 0.75, 0.9, 0.95, 0.99, 0.995, 0.999, 0.9999],
            u: vec![0.001, 0.01, 0.1, 1.0, 5.0],
        }
    }
}

/// Per-level maxima `(level, max ratio)` in the order levels first appear.
fn level_maxima(rows: &[BoundSample], level: impl Fn(&BoundSample) -> f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in rows {
        let x = level(s);
        match xs.iter().position(|&v| v == x) {
            Some(i) => ys[i] = ys[i].max(s.ratio),
            None => {
                xs.push(x);
                ys.push(s.ratio);
            }
        }
    }
    (xs, ys)
}

/// Levels whose driver lies in the upper half of the range in log scale;
/// maxima that approach their supremum from below flatten out there.
fn upper_half(xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min).ln();
    let hi = xs.iter().copied().fold(0.0, f64::max).ln();
    let mid = 0.5 * (lo + hi);
    xs.iter().zip(ys).filter(|(x, _)| x.ln() >= mid).map(|(&x, &y)| (x, y)).unzip()
}

fn report(
    check: BoundCheck,
    grid_version: u32,
    alpha: f64,
    rows: Vec<BoundSample>,
    driver: (&'static str, &dyn Fn(&BoundSample) -> f64),
    secondary: Option<(&'static str, &dyn Fn(&BoundSample) -> f64)>,
) -> Result<BoundCheckReport> {
    let arg_max = *rows
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .ok_or_else(|| Error::fit("bound sweep", "empty grid"))?;
    let (xs, ys) = level_maxima(&rows, driver.1);
    let slope_full = fit_loglog(&xs, &ys)?;
    let (ux, uy) = upper_half(&xs, &ys);
    let slope = if ux.len() >= 2 { fit_loglog(&ux, &uy)? } else { slope_full };
    let (secondary_driver, secondary_slope) = match secondary {
        Some((name, f)) => {
            let (xs, ys) = level_maxima(&rows, f);
            (Some(name), Some(fit_loglog(&xs, &ys)?))
        }
        None => (None, None),
    };
    Ok(BoundCheckReport {
        check,
        grid_version,
        alpha,
        max_ratio: arg_max.ratio,
        arg_max,
        samples: rows.len(),
        fitted_constant: arg_max.ratio,
        driver: driver.0,
        slope,
        slope_full,
        secondary_driver,
        secondary_slope,
        rows,
    })
}

/// Kernel difference ratios over the grid; slope against `(1−r)^{−1}`,
/// secondary slope against `|u−u'|^{−1}`.
pub fn prop32_sweep(alpha: f64, grid: &Prop32Grid, spec: &QuadSpec) -> Result<BoundCheckReport> {
    let tuples: Vec<(f64, f64, f64)> = grid
        .r
        .iter()
        .flat_map(|&r| grid.u.iter().flat_map(move |&u| grid.gaps.iter().map(move |&g| (r, u, g))))
        .collect();
    let rows = tuples
        .par_iter()
        .map(|&(r, u, g)| {
            Ok(BoundSample {
                alpha,
                r: Some(r),
                k: None,
                u,
                v: Some(u + g),
                ratio: prop32_ratio(alpha, r, u, u + g, spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report(
        BoundCheck::Prop32,
        grid.version,
        alpha,
        rows,
        ("1/(1-r)", &|s| 1.0 / (1.0 - s.r.unwrap_or(0.0))),
        Some(("1/|u-u'|", &|s| 1.0 / (s.v.unwrap_or(0.0) - s.u).abs())),
    )
}

fn lemma33_pairs(grid: &Lemma33Grid) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut pairs: Vec<(f64, f64)> = (0..grid.random_pairs)
        .map(|_| (rng.gen_range(1e-6..1.0), rng.gen_range(1e-6..1.0)))
        .collect();
    for &a in &grid.anchors {
        for &g in &grid.gaps {
            if a + g < 1.0 {
                pairs.push((a, a + g));
            }
            if a - g > 0.0 {
                pairs.push((a - g, a));
            }
        }
    }
    pairs.retain(|(u, v)| u != v);
    pairs
}

/// Pointwise difference ratios; slope against `k + 1`.
pub fn lemma33_sweep(alpha: f64, grid: &Lemma33Grid) -> Result<BoundCheckReport> {
    check_open_half("lemma33_sweep", alpha)?;
    let k_max = grid.k.iter().copied().max().unwrap_or(0);
    let rec = PhiRecurrence::new(alpha, k_max)?;
    let pairs = lemma33_pairs(grid);
    let per_pair: Vec<Vec<BoundSample>> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let mut a = vec![0.0; k_max + 1];
            let mut b = vec![0.0; k_max + 1];
            rec.fill(u, &mut a);
            rec.fill(v, &mut b);
            grid.k
                .iter()
                .map(|&k| BoundSample {
                    alpha,
                    r: None,
                    k: Some(k),
                    u,
                    v: Some(v),
                    ratio: (a[k] - b[k]).abs() / lemma33_rhs(k, alpha, (u - v).abs()),
                })
                .collect()
        })
        .collect();
    let rows: Vec<BoundSample> = per_pair.into_iter().flatten().collect();
    report(
        BoundCheck::Lemma33,
        grid.version,
        alpha,
        rows,
        ("k+1", &|s| s.k.unwrap_or(0) as f64 + 1.0),
        Some(("1/|u-v|", &|s| 1.0 / (s.v.unwrap_or(0.0) - s.u).abs())),
    )
}

/// Weighted kernel norm ratios; slope against `(1−r)^{−1}`, secondary
/// against `u^{−1}`.
pub fn lemma34_sweep(alpha: f64, grid: &Lemma34Grid, spec: &QuadSpec) -> Result<BoundCheckReport> {
    let tuples: Vec<(f64, f64)> = grid
        .r
        .iter()
        .flat_map(|&r| grid.u.iter().map(move |&u| (r, u)))
        .collect();
    let rows = tuples
        .par_iter()
        .map(|&(r, u)| {
            Ok(BoundSample {
                alpha,
                r: Some(r),
                k: None,
                u,
                v: None,
                ratio: lemma34_ratio(alpha, r, u, spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report(
        BoundCheck::Lemma34,
        grid.version,
        alpha,
        rows,
        ("1/(1-r)", &|s| 1.0 / (1.0 - s.r.unwrap_or(0.0))),
        Some(("1/u", &|s| 1.0 / s.u)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::phi;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_reference_values() {
        // high-precision values of the closed form
        let cases = [
            (0.0, 0.5, 1.0, 1.0, 0.846_848_335_847_774),
            (-0.5, 0.9, 0.3, 2.1, 7.527_240_152_122_283e-14),
            (1.0, 0.999, 1.5, 1.52, 11.962_903_655_532_335),
            (0.3, 0.999, 0.01, 0.02, 12.163_441_720_842_736),
        ];
        for (a, r, u, v, want) in cases {
            let p = KernelParams::scalar(a, r).unwrap();
            assert_relative_eq!(kernel_closed(&p, u, v).unwrap(), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn symmetry_and_small_r_limit() {
        let p = KernelParams::scalar(0.7, 0.3).unwrap();
        assert_eq!(kernel_closed(&p, 0.4, 1.9).unwrap(), kernel_closed(&p, 1.9, 0.4).unwrap());
        let q = KernelParams::scalar(0.7, 1e-6).unwrap();
        for (u, v) in [(0.5, 1.0), (1.2, 2.0)] {
            let lead = phi(0, 0.7, u).unwrap() * phi(0, 0.7, v).unwrap();
            assert_relative_eq!(kernel_closed(&q, u, v).unwrap(), lead, max_relative = 1e-4);
        }
        assert!(KernelParams::scalar(0.0, 1.0).is_err());
        assert!(KernelParams::scalar(0.0, 0.0).is_err());
    }

    #[test]
    fn series_agrees_and_tail_decreases() {
        let p = KernelParams::scalar(0.0, 0.5).unwrap();
        let s = kernel_series(&p, 1.0, 1.0, 200).unwrap();
        assert!((s.value - kernel_closed(&p, 1.0, 1.0).unwrap()).abs() < 1e-12);
        let s0 = kernel_series(&p, 0.8, 1.3, 0).unwrap();
        assert_eq!(s0.value, phi(0, 0.0, 0.8).unwrap() * phi(0, 0.0, 1.3).unwrap());
        let fit = envelope_fit(0.0).unwrap();
        let mut last = f64::INFINITY;
        for n in [0, 5, 10, 20, 40, 80] {
            let t = series_tail_bound(&fit, 0.7, 0.3, 2.5, n);
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn exponents() {
        assert_eq!(admissible_exponent(1), 0.75);
        assert_eq!(admissible_exponent(3), 2.25);
        assert_eq!(condition_exponent(1, 1.0), 0.75);
        assert!((condition_exponent(1, 0.8) - 0.65).abs() < 1e-15);
    }

    #[test]
    fn norm_identity() {
        // ‖R_r(u, ·)‖² = R_{r²}(u, u)
        for (a, r, u) in [(0.0, 0.5, 1.0), (-0.3, 0.9, 0.2), (0.3, 0.99, 3.0)] {
            let p = KernelParams::scalar(a, r).unwrap();
            let q = KernelParams::scalar(a, r * r).unwrap();
            let n = l2_norm_halfline(&kernel_func(&p, u).unwrap(), &kernel_quad_spec()).unwrap().value;
            assert_relative_eq!(n * n, kernel_closed(&q, u, u).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn difference_norm_matches_parseval() {
        let spec = kernel_quad_spec();
        for (a, r, u, u2) in [(0.0, 0.5, 1.0, 1.1), (-0.3, 0.7, 0.2, 0.21), (1.0, 0.3, 2.0, 2.4)] {
            let p = KernelParams::scalar(a, r).unwrap();
            let q = kernel_diff_l2(&p, u, u2, &spec).unwrap().value;
            let s = kernel_diff_l2_series(&p, u, u2, 200).unwrap();
            assert!((q - s).abs() < 1e-7, "{a} {r}: {q} vs {s}");
        }
        let p = KernelParams::scalar(0.0, 0.5).unwrap();
        assert_eq!(kernel_diff_l2(&p, 1.0, 1.0, &spec).unwrap().value, 0.0);
    }

    #[test]
    fn lemma_ratios_edge_cases() {
        assert_eq!(lemma33_ratio(10, 0.0, 0.5, 0.5).unwrap(), 0.0);
        assert!(lemma33_ratio(10, 0.5, 0.2, 0.3).is_err());
        assert!(lemma33_ratio(10, 0.0, 0.2, 1.3).is_err());
        assert!(lemma34_ratio(0.0, 0.4, 1.0, &kernel_quad_spec()).is_err());
        assert_eq!(prop32_ratio(0.0, 0.5, 1.0, 1.0, &kernel_quad_spec()).unwrap(), 0.0);
        // doubling (1−r)^{−1} scales the first term by 2^{3/4}
        let a = lemma34_rhs(0.0, 0.9, 1e9) - 1e9f64.powf(-0.5) * 0.1f64.powf(-0.5);
        let b = lemma34_rhs(0.0, 0.95, 1e9) - 1e9f64.powf(-0.5) * 0.05f64.powf(-0.5);
        assert_relative_eq!(b / a, 2f64.powf(0.75), max_relative = 1e-12);
    }
}
