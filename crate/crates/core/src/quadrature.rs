//! Composite Gauss–Legendre quadrature on intervals, `(0, ∞)`, ℝ and their
//! products; inner products against the φ and h systems; L² norms.
//!
//! Two engines live here. The adaptive one bisects the panel with the largest
//! error estimate until the total meets the tolerance; it serves single
//! integrals. The projection engine integrates one function against every
//! basis element up to a degree in a single pass over a fixed panel set, with
//! two rule orders per panel for the error estimate.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::bases::{basis_radius, turning_scale, Alpha, HermiteTable, MultiIndex, PhiRecurrence};
use crate::error::{Error, Result};
use crate::func::{Decay, Func, FuncNd};
use crate::sum::{pairwise, pairwise_vectors};

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 0 { 1.0 } else { p1 };
                dp = nf * (x * p - p0) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Shared, lazily built rule of order `n`.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(n).or_insert_with(|| Arc::new(GaussLegendre::compute(n))).clone()
}

/// Tolerances and limits for one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Overrides the radius derived from the integrand's decay.
    pub truncation_radius: Option<f64>,
    pub panel_order: usize,
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            truncation_radius: None,
            panel_order: 32,
            max_panels: 20_000,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadSpec {
            abs_tol,
            rel_tol,
            ..QuadSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("QuadSpec", "tolerances must be positive"));
        }
        if self.panel_order < 2 {
            return Err(Error::domain("QuadSpec", "panel order must be at least 2"));
        }
        if let Some(r) = self.truncation_radius {
            if !(r > 0.0) {
                return Err(Error::domain("QuadSpec", "truncation radius must be positive"));
            }
        }
        Ok(())
    }

    /// Both tolerances halved.
    pub fn halved(&self) -> Self {
        QuadSpec {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            ..*self
        }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn radius(&self, decay: Decay) -> f64 {
        self.truncation_radius.unwrap_or_else(|| decay.radius())
    }
}

/// An integral with its error estimate and the truncation tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Discretization error estimate.
    pub error: f64,
    /// Bound on the part beyond the truncation radius, from the decay metadata.
    pub tail: f64,
    pub panels: usize,
}

impl QuadResult {
    fn plus(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            tail: self.tail + other.tail,
            panels: self.panels + other.panels,
        }
    }
}

/// Bound on `∫_R^∞ |g|` implied by the decay metadata.
fn tail_bound(decay: Decay, r: f64) -> f64 {
    match decay {
        Decay::Support(s) if r >= s => 0.0,
        Decay::Support(_) => f64::INFINITY,
        Decay::Gaussian(a) => (-a * r * r).exp() / (2.0 * a * r),
        Decay::Exponential(a) => (-a * r).exp() / a,
    }
}

// On a panel touching a declared edge the integrand may be singular, and
// bisection then gains only a fixed factor ρ per level. The error left in the
// refined value is about raw · ρ/(1−ρ); ρ is read off the parent panel.
const ROUNDOFF: f64 = 16.0 * f64::EPSILON;
const EDGE_MARGIN: f64 = 2.0;
const RHO_DEFAULT: f64 = 0.9;
const RHO_MAX: f64 = 0.95;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    raw: f64,
    err: f64,
    edge_l: bool,
    edge_r: bool,
}

impl Panel {
    fn eval(
        f: &(dyn Fn(f64) -> f64 + Sync),
        rule: &GaussLegendre,
        a: f64,
        b: f64,
        edge_l: bool,
        edge_r: bool,
        parent_raw: Option<f64>,
    ) -> Panel {
        let m = 0.5 * (a + b);
        let whole = rule.integrate(f, a, b);
        let value = rule.integrate(f, a, m) + rule.integrate(f, m, b);
        let raw = (whole - value).abs();
        let err = if edge_l || edge_r {
            let rho = match parent_raw {
                Some(p) if p > 0.0 => (raw / p).min(RHO_MAX),
                _ => RHO_DEFAULT,
            };
            EDGE_MARGIN * (rho / (1.0 - rho)).max(1.0) * raw
        } else {
            raw
        };
        Panel {
            a,
            b,
            value,
            raw,
            err,
            edge_l,
            edge_r,
        }
    }
}

#[derive(PartialEq)]
struct ByErr(f64, usize);

impl Eq for ByErr {}

impl PartialOrd for ByErr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ByErr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

/// Global adaptive bisection over the panels between consecutive `edges`.
fn adaptive(f: &(dyn Fn(f64) -> f64 + Sync), edges: &[f64], spec: &QuadSpec) -> Result<(f64, f64, usize)> {
    spec.validate()?;
    let rule = gauss_legendre(spec.panel_order);
    let mut panels: Vec<Panel> = edges
        .par_windows(2)
        .map(|w| Panel::eval(f, &rule, w[0], w[1], true, true, None))
        .collect();
    if panels.iter().any(|p| !p.value.is_finite() || !p.err.is_finite()) {
        return Err(Error::domain("quadrature", "integrand is not finite on the integration range"));
    }
    let mut heap: BinaryHeap<ByErr> = panels.iter().enumerate().map(|(i, p)| ByErr(p.err, i)).collect();
    let mut total_err: f64 = panels.iter().map(|p| p.err).sum();
    let mut total: f64 = panels.iter().map(|p| p.value).sum();
    let mut steps = 0usize;
    while total_err > spec.target(total) {
        steps += 1;
        if steps % 64 == 0 {
            total_err = panels.iter().map(|p| p.err).sum();
            total = panels.iter().map(|p| p.value).sum();
            if total_err <= spec.target(total) {
                break;
            }
        }
        let Some(ByErr(_, i)) = heap.pop() else { break };
        let p = panels[i];
        let m = 0.5 * (p.a + p.b);
        if panels.len() >= spec.max_panels || !(m > p.a && m < p.b) {
            let value = pairwise(&sorted_values(&panels));
            return Err(Error::Quadrature {
                value,
                error: panels.iter().map(|p| p.err).sum(),
                target: spec.target(value),
                panels: panels.len(),
            });
        }
        let left = Panel::eval(f, &rule, p.a, m, p.edge_l, false, Some(p.raw));
        let right = Panel::eval(f, &rule, m, p.b, false, p.edge_r, Some(p.raw));
        if !left.value.is_finite() || !right.value.is_finite() {
            return Err(Error::domain("quadrature", "integrand is not finite on the integration range"));
        }
        total += left.value + right.value - p.value;
        total_err += left.err + right.err - p.err;
        panels[i] = left;
        panels.push(right);
        heap.push(ByErr(left.err, i));
        heap.push(ByErr(right.err, panels.len() - 1));
    }
    // rounding in the node sums
    let roundoff = ROUNDOFF * panels.iter().map(|p| p.value.abs()).sum::<f64>();
    let err = panels.iter().map(|p| p.err).sum::<f64>() + roundoff;
    Ok((pairwise(&sorted_values(&panels)), err, panels.len()))
}

fn sorted_values(panels: &[Panel]) -> Vec<f64> {
    let mut ps: Vec<(f64, f64)> = panels.iter().map(|p| (p.a, p.value)).collect();
    ps.sort_by(|x, y| x.0.total_cmp(&y.0));
    ps.into_iter().map(|p| p.1).collect()
}

fn edges_between(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut e = vec![a];
    e.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    e.push(b);
    e.sort_by(f64::total_cmp);
    e.dedup();
    e
}

/// `∫_a^b f` with `breakpoints` as forced panel edges.
pub fn integrate_interval(
    f: impl Fn(f64) -> f64 + Sync,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integrate_interval", format!("bad interval ({a}, {b})")));
    }
    let (value, error, panels) = adaptive(&f, &edges_between(a, b, breakpoints), spec)?;
    Ok(QuadResult {
        value,
        error,
        tail: 0.0,
        panels,
    })
}

const INITIAL_GEOMETRIC: i32 = 8;

/// Panel edges on `(0, r)`: geometric toward 0, unit-spaced beyond 1, and
/// the function's own breakpoints.
fn halfline_edges(r: f64, breakpoints: &[f64]) -> Vec<f64> {
    let g0 = r.min(1.0);
    let mut e: Vec<f64> = (1..=INITIAL_GEOMETRIC).map(|j| g0 * 0.5f64.powi(j)).collect();
    e.push(0.0);
    let mut x = 1.0;
    while x < r {
        e.push(x);
        x += 1.0;
    }
    e.push(r);
    e.extend(breakpoints.iter().copied().filter(|&b| b > 0.0 && b < r));
    e.sort_by(f64::total_cmp);
    e.dedup();
    e
}

/// `∫_0^∞ g`, truncated at the radius implied by `g.decay()`.
pub fn integrate_halfline(g: &Func, spec: &QuadSpec) -> Result<QuadResult> {
    spec.validate()?;
    let r = spec.radius(g.decay());
    let f = |x: f64| g.eval(x);
    let (value, error, panels) = adaptive(&f, &halfline_edges(r, g.breakpoints()), spec)?;
    Ok(QuadResult {
        value,
        error,
        tail: tail_bound(g.decay(), r),
        panels,
    })
}

/// `∫_ℝ g` as two half-line integrals split at 0.
pub fn integrate_line(g: &Func, spec: &QuadSpec) -> Result<QuadResult> {
    Ok(integrate_halfline(g, spec)?.plus(integrate_halfline(&g.reflected(), spec)?))
}

fn basis_factor(k: usize, alpha: f64) -> Result<Func> {
    crate::bases::phi_func(k, alpha)
}

/// `⟨f, φ_n^α⟩_+` on `(0, ∞)^d`. Tensor-product `f` reduces to one-dimensional
/// integrals; otherwise a fixed tensor-product rule is used.
pub fn inner_product_plus(f: &FuncNd, n: &MultiIndex, alpha: &Alpha, spec: &QuadSpec) -> Result<QuadResult> {
    let d = f.dim();
    if n.dim() != d {
        return Err(Error::Dimension { op: "inner_product_plus", expected: d, got: n.dim() });
    }
    if alpha.dim() != d {
        return Err(Error::Dimension { op: "inner_product_plus", expected: d, got: alpha.dim() });
    }
    match f.factors() {
        Some(fs) => {
            let mut parts = Vec::with_capacity(d);
            for ((fi, &k), &a) in fs.iter().zip(n.coords()).zip(alpha.coords()) {
                let integrand = fi.product(&basis_factor(k, a)?);
                parts.push(integrate_halfline(&integrand, spec)?);
            }
            Ok(combine_product(&parts))
        }
        None => tensor_rule(f, n, alpha, spec),
    }
}

/// First-order error propagation for a product of integrals.
fn combine_product(parts: &[QuadResult]) -> QuadResult {
    let value: f64 = parts.iter().map(|p| p.value).product();
    let mut error = 0.0;
    let mut tail = 0.0;
    for (i, p) in parts.iter().enumerate() {
        let others: f64 = parts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.value.abs() + q.error + q.tail)
            .product();
        error += p.error * others;
        tail += p.tail * others;
    }
    QuadResult {
        value,
        error,
        tail,
        panels: parts.iter().map(|p| p.panels).sum(),
    }
}

const TENSOR_DEPTH: i32 = 12;
const TENSOR_ORDERS: (usize, usize) = (12, 16);

fn tensor_rule(f: &FuncNd, n: &MultiIndex, alpha: &Alpha, spec: &QuadSpec) -> Result<QuadResult> {
    spec.validate()?;
    let d = f.dim();
    let r_f = spec.radius(f.decay());
    // per dimension: (node, weight · φ(node)) for the low and the high rule
    let mut axes: Vec<[Vec<(f64, f64)>; 2]> = Vec::with_capacity(d);
    let mut n_panels = 1usize;
    for (&k, &a) in n.coords().iter().zip(alpha.coords()) {
        let r = r_f.min(basis_radius(k, a));
        let g0 = r.min(1.0);
        let mut e: Vec<f64> = (1..=TENSOR_DEPTH).map(|j| g0 * 0.5f64.powi(j)).collect();
        e.push(0.0);
        let mut x = 1.0;
        while x < r {
            e.push(x);
            x += 1.0;
        }
        e.push(r);
        e.extend(f.breakpoints().iter().copied().filter(|&b| b > 0.0 && b < r));
        e.sort_by(f64::total_cmp);
        e.dedup();
        n_panels *= e.len() - 1;
        let rec = PhiRecurrence::new(a, k)?;
        let axis = [TENSOR_ORDERS.0, TENSOR_ORDERS.1].map(|m| {
            let rule = gauss_legendre(m);
            e.windows(2)
                .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
                .map(|(x, w)| (x, w * rec.value(k, x)))
                .collect::<Vec<_>>()
        });
        axes.push(axis);
    }
    let sums: Vec<f64> = (0..2)
        .map(|which| {
            let first = &axes[0][which];
            let parts: Vec<f64> = first
                .par_iter()
                .map(|&(x0, w0)| {
                    let mut point = vec![0.0; d];
                    point[0] = x0;
                    w0 * nested(f, &axes, which, 1, &mut point)
                })
                .collect();
            pairwise(&parts)
        })
        .collect();
    let value = sums[1];
    let error = (sums[1] - sums[0]).abs();
    let target = spec.target(value);
    if !value.is_finite() {
        return Err(Error::domain("inner_product_plus", "integrand is not finite"));
    }
    if error > target {
        return Err(Error::Quadrature {
            value,
            error,
            target,
            panels: n_panels,
        });
    }
    Ok(QuadResult {
        value,
        error,
        tail: 0.0,
        panels: n_panels,
    })
}

fn nested(f: &FuncNd, axes: &[[Vec<(f64, f64)>; 2]], which: usize, dim: usize, point: &mut Vec<f64>) -> f64 {
    if dim == axes.len() {
        return f.eval(point);
    }
    let mut acc = 0.0;
    for &(x, w) in &axes[dim][which] {
        point[dim] = x;
        acc += w * nested(f, axes, which, dim + 1, point);
    }
    acc
}

fn norm_from_square(sq: QuadResult) -> QuadResult {
    let value = sq.value.max(0.0).sqrt();
    let spread = |e: f64| if value > 0.0 { e / (2.0 * value) } else { e.sqrt() };
    QuadResult {
        value,
        error: spread(sq.error),
        tail: spread(sq.tail),
        panels: sq.panels,
    }
}

/// `‖g‖_{L²(0,∞)}`.
pub fn l2_norm_halfline(g: &Func, spec: &QuadSpec) -> Result<QuadResult> {
    Ok(norm_from_square(integrate_halfline(&g.product(g), spec)?))
}

/// `‖g_1 − g_2‖_{L²(0,∞)}`.
pub fn l2_diff_norm(g1: &Func, g2: &Func, spec: &QuadSpec) -> Result<QuadResult> {
    let (a, b) = (g1.clone(), g2.clone());
    let decay = Decay::Support(g1.decay().radius().max(g2.decay().radius()));
    let mut bps = g1.breakpoints().to_vec();
    bps.extend_from_slice(g2.breakpoints());
    let diff = Func::new(
        move |x| {
            let v = a.eval(x) - b.eval(x);
            v * v
        },
        decay,
    )
    .with_breakpoints(bps);
    Ok(norm_from_square(integrate_halfline(&diff, spec)?))
}

/// Inner products with every basis element up to some degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients {
    pub values: Vec<f64>,
    /// Per-coefficient discretization error estimate.
    pub errors: Vec<f64>,
    pub panels: usize,
}

impl Coefficients {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

const PROJECTION_ORDERS: (usize, usize) = (24, 32);
const PROJECTION_CHUNKS: usize = 16;
const MAX_ZERO_DEPTH: usize = 200;
// √ν · panel width: how many radians of oscillation one panel may hold
const PHASE_PER_PANEL: f64 = 24.0;
const REFINEMENTS: usize = 4;

/// Panels on `(0, r)` for the projection engine.
fn projection_panels(r: f64, breakpoints: &[f64], width: f64, depth: usize) -> Vec<(f64, f64)> {
    let g0 = width.min(r);
    let mut e: Vec<f64> = (1..=depth).map(|j| g0 * 0.5f64.powi(j as i32)).collect();
    e.push(0.0);
    let n = (r / width).ceil() as usize;
    e.extend((1..n).map(|i| i as f64 * width));
    e.push(r);
    e.extend(breakpoints.iter().copied().filter(|&b| b > 0.0 && b < r));
    e.sort_by(f64::total_cmp);
    e.dedup();
    e.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Number of halvings from `start` until the mass of `|f|` on `(0, h)` is below `tol`.
fn zero_depth(mass: impl Fn(f64) -> f64, start: f64, tol: f64) -> usize {
    let mut h = start;
    let mut j = 0;
    while j < MAX_ZERO_DEPTH && mass(h) > tol {
        h *= 0.5;
        j += 1;
    }
    j
}

type Fill<'a> = dyn Fn(f64, &mut [f64]) + Sync + 'a;

/// `Σ_panels Σ_nodes w f(x) basis(x)` with two rule orders, in fixed chunks
/// reduced pairwise so the result does not depend on the thread count.
fn project(panels: &[(f64, f64)], f: &(dyn Fn(f64) -> f64 + Sync), n_out: usize, fill: &Fill) -> Result<(Vec<f64>, Vec<f64>)> {
    let lo = gauss_legendre(PROJECTION_ORDERS.0);
    let hi = gauss_legendre(PROJECTION_ORDERS.1);
    let per = panels.len().div_ceil(PROJECTION_CHUNKS).max(1);
    let parts: Vec<Result<(Vec<f64>, Vec<f64>)>> = panels
        .par_chunks(per)
        .map(|chunk| {
            let mut val = vec![0.0; n_out];
            let mut err = vec![0.0; n_out];
            let mut q_hi = vec![0.0; n_out];
            let mut q_lo = vec![0.0; n_out];
            let mut buf = vec![0.0; n_out];
            for &(a, b) in chunk {
                for (rule, q) in [(&hi, &mut q_hi), (&lo, &mut q_lo)] {
                    q.iter_mut().for_each(|v| *v = 0.0);
                    for (x, w) in rule.mapped(a, b) {
                        let fx = f(x);
                        if fx == 0.0 {
                            continue;
                        }
                        if !fx.is_finite() {
                            return Err(Error::domain("coefficients", format!("integrand not finite at {x}")));
                        }
                        fill(x, &mut buf);
                        let c = w * fx;
                        for (qk, bk) in q.iter_mut().zip(&buf) {
                            *qk += c * bk;
                        }
                    }
                }
                for k in 0..n_out {
                    val[k] += q_hi[k];
                    err[k] += (q_hi[k] - q_lo[k]).abs();
                }
            }
            Ok((val, err))
        })
        .collect();
    let mut vals = Vec::with_capacity(parts.len());
    let mut errs = Vec::with_capacity(parts.len());
    for p in parts {
        let (v, e) = p?;
        vals.push(v);
        errs.push(e);
    }
    Ok((pairwise_vectors(vals), pairwise_vectors(errs)))
}

/// Runs `project` on progressively finer panel sets until every error
/// estimate meets the tolerance.
fn refine_projection(
    spec: &QuadSpec,
    mut width: f64,
    mut depth: usize,
    panels_for: impl Fn(f64, usize) -> Vec<(f64, f64)>,
    f: &(dyn Fn(f64) -> f64 + Sync),
    n_out: usize,
    fill: &Fill,
) -> Result<Coefficients> {
    spec.validate()?;
    let mut last = None;
    for _ in 0..REFINEMENTS {
        let panels = panels_for(width, depth);
        let (values, errors) = project(&panels, f, n_out, fill)?;
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = spec.target(scale);
        let (arg, worst) = errors
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
        if worst <= target {
            return Ok(Coefficients {
                values,
                errors,
                panels: panels.len(),
            });
        }
        last = Some(Error::Quadrature {
            value: values[arg],
            error: worst,
            target,
            panels: panels.len(),
        });
        width *= 0.5;
        depth += 10;
    }
    Err(last.expect("at least one refinement"))
}

fn abs_mass(f: &Func, a: f64, b: f64) -> f64 {
    gauss_legendre(PROJECTION_ORDERS.1).integrate(|x| f.eval(x).abs(), a, b)
}

/// `⟨f, φ_k^α⟩_+` for every `k ≤ k_max` in one pass.
pub fn laguerre_coefficients(f: &Func, alpha: f64, k_max: usize, spec: &QuadSpec) -> Result<Coefficients> {
    let rec = PhiRecurrence::new(alpha, k_max)?;
    let r = spec.radius(f.decay()).min(basis_radius(k_max, alpha));
    let width = f64::min(1.0, PHASE_PER_PANEL / turning_scale(k_max, alpha).sqrt());
    let depth = zero_depth(|h| abs_mass(f, 0.0, h), width.min(r), 0.05 * spec.abs_tol);
    let bps = f.breakpoints().to_vec();
    let eval = |x: f64| f.eval(x);
    let fill = |x: f64, out: &mut [f64]| rec.fill(x, out);
    refine_projection(spec, width, depth, |w, dp| projection_panels(r, &bps, w, dp), &eval, k_max + 1, &fill)
}

/// `⟨f, h_n^λ⟩` over ℝ for every `n ≤ n_max`, integrating directly on the
/// line rather than through parity components.
pub fn hermite_coefficients(f: &Func, lambda: f64, n_max: usize, spec: &QuadSpec) -> Result<Coefficients> {
    let table = HermiteTable::new(lambda, n_max)?;
    let r = spec.radius(f.decay()).min(basis_radius(n_max / 2, lambda + 0.5));
    let width = f64::min(1.0, PHASE_PER_PANEL / turning_scale(n_max / 2, lambda + 0.5).sqrt());
    let depth = zero_depth(|h| abs_mass(f, -h, h), width.min(r), 0.05 * spec.abs_tol);
    let bps: Vec<f64> = f.breakpoints().iter().map(|b| b.abs()).collect();
    let eval = |x: f64| f.eval(x);
    let fill = |x: f64, out: &mut [f64]| table.fill(x, out);
    let both_sides = |w: f64, dp: usize| {
        let right = projection_panels(r, &bps, w, dp);
        let mut all: Vec<(f64, f64)> = right.iter().rev().map(|&(a, b)| (-b, -a)).collect();
        all.extend(right);
        all
    };
    refine_projection(spec, width, depth, both_sides, &eval, n_max + 1, &fill)
}

/// Gram matrix of `φ_0^α … φ_{k_max}^α` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramReport {
    pub alpha: f64,
    pub k_max: usize,
    /// `max_{j,k} |⟨φ_j, φ_k⟩_+ − δ_{jk}|`
    pub max_defect: f64,
    pub arg_max: (usize, usize),
    /// Largest quadrature error estimate over all entries.
    pub max_error: f64,
    pub panels: usize,
}

pub fn gram_matrix(alpha: f64, k_max: usize, spec: &QuadSpec) -> Result<GramReport> {
    let rec = PhiRecurrence::new(alpha, k_max)?;
    let r = basis_radius(k_max, alpha);
    let width = f64::min(1.0, PHASE_PER_PANEL / turning_scale(k_max, alpha).sqrt());
    // near 0 every φ_j φ_k is O(u^{2α+1}); the panel (0, h) carries O(h^{2α+2})
    let depth = zero_depth(|h| h.powf(2.0 * alpha + 2.0), width, 0.05 * spec.abs_tol);
    let m = k_max + 1;
    let n_out = m * (m + 1) / 2;
    let fill = |x: f64, out: &mut [f64]| {
        let mut row = vec![0.0; m];
        rec.fill(x, &mut row);
        let mut idx = 0;
        for j in 0..m {
            for k in j..m {
                out[idx] = row[j] * row[k];
                idx += 1;
            }
        }
    };
    let one = |_: f64| 1.0;
    let c = refine_projection(spec, width, depth, |w, dp| projection_panels(r, &[], w, dp), &one, n_out, &fill)?;
    let mut max_defect = 0.0;
    let mut arg_max = (0, 0);
    let mut idx = 0;
    for j in 0..m {
        for k in j..m {
            let target = if j == k { 1.0 } else { 0.0 };
            let dft = (c.values[idx] - target).abs();
            if dft > max_defect {
                max_defect = dft;
                arg_max = (j, k);
            }
            idx += 1;
        }
    }
    Ok(GramReport {
        alpha,
        k_max,
        max_defect,
        arg_max,
        max_error: c.max_error(),
        panels: c.panels,
    })
}
