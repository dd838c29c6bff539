//! Hardy-type sums `Σ |⟨f, ψ_n⟩| / (|n|+1)^E`, the counterexample atoms used
//! to show the exponent `3d/4` cannot be lowered, and the parity reduction
//! between generalized Hermite and Laguerre expansions.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::bases::{
    parity_component_1d, phi_derivative, sign_vectors, Alpha, MultiIndex, ParityVector, PhiRecurrence, SignVector,
};
use crate::error::{Error, Result};
use crate::func::{Decay, Func, FuncNd};
use crate::quadrature::{hermite_coefficients, inner_product_plus, laguerre_coefficients, Coefficients, QuadSpec};
use crate::stats::{fit_loglog, SlopeFit};
use crate::sum::Compensated;

/// Coefficients smaller than this are reported and summed as zero.
pub const ZERO_COEFFICIENT: f64 = 1e-14;

// ---------------------------------------------------------------------------
// two-sided bounds near the origin

/// `A k^{α/2} u^{α+1/2} ≤ φ_k^α(u) ≤ B k^{α/2} u^{α+1/2}` for `0 < u ≤ c/√k`,
/// verified for `k_min ≤ k ≤ k_max`.
///
/// For `α = −1/2` the bracketed quantity is `−(d/du)φ_k(u) / (k^{3/4} u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub alpha: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub c: f64,
    pub k_min: usize,
    pub k_max: usize,
}

const C_START: f64 = 2.0;
const C_STEP: f64 = 0.95;
const C_FLOOR: f64 = 1e-3;
const T_SMALL: f64 = 1e-3;
const T_POINTS: usize = 400;

fn sample_degrees(k_max: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (1..=k_max.min(32)).collect();
    let mut x = 32.0f64;
    while (x as usize) < k_max {
        x *= 2f64.powf(0.125);
        ks.push((x.round() as usize).min(k_max));
    }
    ks.push(k_max);
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn bound_ratio(k: usize, alpha: f64, rec: &PhiRecurrence, u: f64) -> f64 {
    let kf = k as f64;
    if alpha == -0.5 {
        -phi_derivative(k, alpha, u).expect("u > 0") / (kf.powf(0.75) * u)
    } else {
        rec.value(k, u) / (kf.powf(0.5 * alpha) * u.powf(alpha + 0.5))
    }
}

/// Fits `A, B, c` by scanning `u = t/√k`. A candidate `c` (from `2·0.95^j`)
/// is accepted when, for every sampled `k`, the ratio on `t ≤ c` stays
/// positive and at least half its value at `t = 10^{−3}`.
pub fn fit_bound_constants(alpha: f64, k_max: usize) -> Result<BoundConstants> {
    if !(alpha >= -0.5) || !alpha.is_finite() {
        return Err(Error::domain("fit_bound_constants", format!("alpha {alpha} must be >= -1/2")));
    }
    if k_max == 0 {
        return Err(Error::domain("fit_bound_constants", "k_max must be at least 1"));
    }
    let ts: Vec<f64> = std::iter::once(T_SMALL)
        .chain((1..=T_POINTS).map(|i| C_START * i as f64 / T_POINTS as f64))
        .collect();
    let table: Vec<Vec<f64>> = sample_degrees(k_max)
        .par_iter()
        .map(|&k| {
            let rec = PhiRecurrence::new(alpha, k).expect("alpha validated");
            let sk = (k as f64).sqrt();
            ts.iter().map(|&t| bound_ratio(k, alpha, &rec, t / sk)).collect()
        })
        .collect();
    let mut c = C_START;
    while c >= C_FLOOR {
        let n = ts.iter().take_while(|&&t| t <= c).count();
        let ok = table.iter().all(|row| {
            let floor = 0.5 * row[0];
            row[0] > 0.0 && row[..n].iter().all(|&v| v >= floor)
        });
        if ok {
            let (mut a, mut b) = (f64::INFINITY, 0.0f64);
            for row in &table {
                for &v in &row[..n] {
                    a = a.min(v);
                    b = b.max(v);
                }
            }
            return Ok(BoundConstants {
                alpha,
                a,
                b,
                c,
                k_min: 1,
                k_max,
            });
        }
        c *= C_STEP;
    }
    Err(Error::fit("fit_bound_constants", format!("no c above {C_FLOOR} for alpha {alpha}")))
}

fn constants_cache() -> &'static Mutex<HashMap<(u64, usize), BoundConstants>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), BoundConstants>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// [`fit_bound_constants`], memoized.
pub fn bound_constants(alpha: f64, k_max: usize) -> Result<BoundConstants> {
    let key = (alpha.to_bits(), k_max);
    if let Some(bc) = constants_cache().lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(*bc);
    }
    let bc = fit_bound_constants(alpha, k_max)?;
    constants_cache().lock().unwrap_or_else(|e| e.into_inner()).insert(key, bc);
    Ok(bc)
}

/// δ used on the `α = −1/2` branch, where the positivity expression gives no guidance.
pub const HALFINTEGER_DELTA: f64 = 0.25;

/// Largest δ in `0.4, 0.3, 0.2, 0.1, 0.05, 0.025, …` with
/// `1 − δ^{α+1/2}(1 + B/A) > 1/2`.
pub fn default_delta(bc: &BoundConstants) -> Result<f64> {
    if bc.alpha == -0.5 {
        return Ok(HALFINTEGER_DELTA);
    }
    let q = 1.0 + bc.b / bc.a;
    let mut candidates = vec![0.4, 0.3, 0.2, 0.1];
    let mut d = 0.05;
    while d > 1e-12 {
        candidates.push(d);
        d *= 0.5;
    }
    candidates
        .into_iter()
        .find(|&d: &f64| 1.0 - d.powf(bc.alpha + 0.5) * q > 0.5)
        .ok_or_else(|| Error::fit("default_delta", format!("no delta found for B/A = {}", bc.b / bc.a)))
}

// ---------------------------------------------------------------------------
// atoms

/// Parameters of the counterexample atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomParams {
    #[serde(rename = "K")]
    pub k_big: usize,
    pub delta: f64,
    pub c: f64,
    pub alpha: Alpha,
}

impl AtomParams {
    pub fn new(k_big: usize, delta: f64, c: f64, alpha: Alpha) -> Result<Self> {
        if k_big == 0 {
            return Err(Error::domain("AtomParams", "K must be positive"));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::domain("AtomParams", format!("delta {delta} must lie in (0, 1/2)")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain("AtomParams", format!("c {c} must be positive")));
        }
        Ok(AtomParams { k_big, delta, c, alpha })
    }

    /// Side of the supporting interval, `c K^{−1/2}`.
    pub fn side(&self) -> f64 {
        self.c / (self.k_big as f64).sqrt()
    }
}

/// Constant `value` on the open box `∏ (lower_i, upper_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub value: f64,
}

impl Piece {
    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.lower.iter().zip(&self.upper).zip(x).all(|((a, b), v)| a < v && v < b)
    }

    fn overlaps(&self, other: &Piece) -> bool {
        (0..self.lower.len()).all(|i| self.lower[i] < other.upper[i] && other.lower[i] < self.upper[i])
    }

    fn reflected(&self, eps: &SignVector, sign: f64) -> Piece {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        for (i, &e) in eps.coords().iter().enumerate() {
            if e < 0 {
                lower[i] = -self.upper[i];
                upper[i] = -self.lower[i];
            }
        }
        Piece {
            lower,
            upper,
            value: sign * self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AtomKind {
    /// Supported in the closed positive orthant.
    HalfSpace,
    /// `x ↦ ε^η a(εx)` on all of ℝ^d.
    Extension { eta: ParityVector },
}

/// Piecewise-constant function with the metadata of an H¹ atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub dim: usize,
    pub pieces: Vec<Piece>,
    pub support_ball_measure: f64,
    pub kind: AtomKind,
    /// Product atoms are divided by this, `ω_d (√d/2)^d`, so that the size
    /// condition holds against the ball circumscribing the support box.
    pub normalization: f64,
    #[serde(skip)]
    factors: Option<Vec<Vec<Piece>>>,
}

/// Volume of the unit ball in ℝ^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

impl Atom {
    /// An arbitrary piecewise-constant function. Validity as an atom is
    /// checked separately by [`validate_atom`].
    pub fn new(pieces: Vec<Piece>, support_ball_measure: f64) -> Result<Atom> {
        let dim = pieces.first().map(|p| p.lower.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::domain("Atom::new", "need at least one piece of dimension >= 1"));
        }
        for p in &pieces {
            if p.lower.len() != dim || p.upper.len() != dim {
                return Err(Error::Dimension {
                    op: "Atom::new",
                    expected: dim,
                    got: p.lower.len().max(p.upper.len()),
                });
            }
            if p.lower.iter().zip(&p.upper).any(|(a, b)| !(a < b)) || !p.value.is_finite() {
                return Err(Error::domain("Atom::new", "each box needs lower < upper and a finite value"));
            }
        }
        for (i, p) in pieces.iter().enumerate() {
            if pieces[i + 1..].iter().any(|q| p.overlaps(q)) {
                return Err(Error::domain("Atom::new", "boxes must be disjoint"));
            }
        }
        if !(support_ball_measure > 0.0) {
            return Err(Error::domain("Atom::new", "ball measure must be positive"));
        }
        Ok(Atom {
            dim,
            pieces,
            support_ball_measure,
            kind: AtomKind::HalfSpace,
            normalization: 1.0,
            factors: None,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces.iter().find(|p| p.contains(x)).map_or(0.0, |p| p.value)
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().fold(0.0, |m, p| m.max(p.value.abs()))
    }

    pub fn integral(&self) -> f64 {
        let mut s = Compensated::new();
        for p in &self.pieces {
            s.add(p.value * p.volume());
        }
        s.value()
    }

    /// `s · a`, keeping the support metadata.
    pub fn scaled(&self, s: f64) -> Atom {
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.value *= s;
        }
        if let Some(fs) = &mut out.factors {
            for p in &mut fs[0] {
                p.value *= s;
            }
        }
        out
    }

    /// The `η`-symmetric extension `ε^η a(εx)` of a half-space atom.
    pub fn extension(&self, eta: &ParityVector) -> Result<Atom> {
        if self.kind != AtomKind::HalfSpace {
            return Err(Error::domain("Atom::extension", "only half-space atoms can be extended"));
        }
        if eta.dim() != self.dim {
            return Err(Error::Dimension { op: "Atom::extension", expected: self.dim, got: eta.dim() });
        }
        let mut pieces = Vec::with_capacity(self.pieces.len() << self.dim);
        for eps in sign_vectors(self.dim) {
            let s = eps.pow(eta);
            pieces.extend(self.pieces.iter().map(|p| p.reflected(&eps, s)));
        }
        let factors = self.factors.as_ref().map(|fs| {
            fs.iter()
                .zip(eta.coords())
                .map(|(f, &h)| {
                    let minus = SignVector::new(vec![-1]).expect("valid sign");
                    let s = if h == 1 { -1.0 } else { 1.0 };
                    let mut out: Vec<Piece> = f.iter().map(|p| p.reflected(&minus, s)).collect();
                    out.extend(f.iter().cloned());
                    out
                })
                .collect()
        });
        Ok(Atom {
            dim: self.dim,
            pieces,
            // the box doubles in every direction
            support_ball_measure: self.support_ball_measure * 2f64.powi(self.dim as i32),
            kind: AtomKind::Extension { eta: eta.clone() },
            normalization: self.normalization,
            factors,
        })
    }

    /// The atom as a quadrature-ready function; product atoms stay separable.
    pub fn to_func_nd(&self) -> FuncNd {
        if let Some(fs) = &self.factors {
            let mut funcs: Vec<Func> = fs.iter().map(|f| pieces_func(f)).collect();
            funcs[0] = funcs[0].scaled(1.0 / self.normalization);
            return FuncNd::separable(funcs);
        }
        let pieces = self.pieces.clone();
        let radius = support_radius(&pieces);
        let mut bps: Vec<f64> = pieces.iter().flat_map(|p| p.lower.iter().chain(&p.upper).copied().collect::<Vec<_>>()).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        FuncNd::new(
            self.dim,
            move |x| pieces.iter().find(|p| p.contains(x)).map_or(0.0, |p| p.value),
            Decay::Support(radius),
            bps,
        )
    }

    /// One-dimensional atoms as a [`Func`].
    pub fn to_func(&self) -> Result<Func> {
        if self.dim != 1 {
            return Err(Error::Dimension { op: "Atom::to_func", expected: 1, got: self.dim });
        }
        Ok(pieces_func(&self.pieces).scaled(if self.factors.is_some() { 1.0 / self.normalization } else { 1.0 }))
    }
}

fn support_radius(pieces: &[Piece]) -> f64 {
    pieces
        .iter()
        .flat_map(|p| p.lower.iter().chain(&p.upper))
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

fn pieces_func(pieces: &[Piece]) -> Func {
    let ps: Vec<(f64, f64, f64)> = pieces.iter().map(|p| (p.lower[0], p.upper[0], p.value)).collect();
    let bps: Vec<f64> = ps.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    let radius = support_radius(pieces);
    Func::new(
        move |x| ps.iter().find(|&&(a, b, _)| a < x && x < b).map_or(0.0, |p| p.2),
        Decay::Support(radius),
    )
    .with_breakpoints(bps)
}

fn atom_pieces_1d(p: &AtomParams) -> Vec<Piece> {
    let s = p.side();
    let split = p.delta * s;
    let h = 1.0 / s;
    vec![
        Piece {
            lower: vec![0.0],
            upper: vec![split],
            value: -h,
        },
        Piece {
            lower: vec![split],
            upper: vec![s],
            value: p.delta / (1.0 - p.delta) * h,
        },
    ]
}

/// `a(u) = δc^{−1}(1−δ)^{−1}K^{1/2}` on `(cδK^{−1/2}, cK^{−1/2})`,
/// `−c^{−1}K^{1/2}` on `(0, cδK^{−1/2})`.
pub fn make_counterexample_atom(p: &AtomParams) -> Result<Atom> {
    if p.alpha.dim() != 1 {
        return Err(Error::Dimension { op: "make_counterexample_atom", expected: 1, got: p.alpha.dim() });
    }
    tensor_atom(p)
}

/// `𝐚(x) = Π a(x_i) / (ω_d (√d/2)^d)` on the cube `(0, cK^{−1/2})^d`,
/// with `d` taken from `p.alpha`.
pub fn tensor_atom(p: &AtomParams) -> Result<Atom> {
    let d = p.alpha.dim();
    let one = atom_pieces_1d(p);
    let norm = unit_ball_volume(d) * (0.5 * (d as f64).sqrt()).powi(d as i32);
    let mut pieces = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        let mut lower = Vec::with_capacity(d);
        let mut upper = Vec::with_capacity(d);
        let mut value = 1.0 / norm;
        for i in 0..d {
            let q = &one[(mask >> i) & 1];
            lower.push(q.lower[0]);
            upper.push(q.upper[0]);
            value *= q.value;
        }
        pieces.push(Piece { lower, upper, value });
    }
    let side = p.side();
    Ok(Atom {
        dim: d,
        pieces,
        support_ball_measure: norm * side.powi(d as i32),
        kind: AtomKind::HalfSpace,
        normalization: norm,
        factors: Some(vec![one; d]),
    })
}

/// Cancellation and size of one part of an atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomCheck {
    pub integral: f64,
    pub cancellation: bool,
    pub sup_norm: f64,
    pub size_limit: f64,
    pub size: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomReport {
    pub whole: AtomCheck,
    /// For extensions: the restriction to each orthant, checked as an atom
    /// on the reflected original ball.
    pub orthants: Vec<(Vec<i8>, AtomCheck)>,
}

impl AtomReport {
    pub fn passed(&self) -> bool {
        let ok = |c: &AtomCheck| c.cancellation && c.size;
        ok(&self.whole) && self.orthants.iter().all(|(_, c)| ok(c))
    }
}

const CANCELLATION_ULPS: f64 = 8.0;
const SIZE_SLACK: f64 = 1e-12;

fn check_pieces<'a>(pieces: impl Iterator<Item = &'a Piece>, ball_measure: f64) -> AtomCheck {
    let mut s = Compensated::new();
    let mut scale = 0.0;
    let mut sup = 0.0f64;
    for p in pieces {
        let m = p.value * p.volume();
        s.add(m);
        scale += m.abs();
        sup = sup.max(p.value.abs());
    }
    let integral = s.value();
    let limit = 1.0 / ball_measure;
    AtomCheck {
        integral,
        cancellation: integral.abs() <= CANCELLATION_ULPS * f64::EPSILON * scale,
        sup_norm: sup,
        size_limit: limit,
        size: sup <= limit * (1.0 + SIZE_SLACK),
    }
}

/// Checks `∫a = 0` and `‖a‖_∞ ≤ |B|^{−1}`. For an extension the whole
/// function is held to `2^d |B|^{−1}`, and each orthant restriction must be
/// an atom for the reflected half-size ball.
pub fn validate_atom(a: &Atom) -> AtomReport {
    match &a.kind {
        AtomKind::HalfSpace => AtomReport {
            whole: check_pieces(a.pieces.iter(), a.support_ball_measure),
            orthants: Vec::new(),
        },
        AtomKind::Extension { .. } => {
            let part_measure = a.support_ball_measure / 2f64.powi(a.dim as i32);
            let whole = check_pieces(a.pieces.iter(), part_measure);
            let orthants = sign_vectors(a.dim)
                .into_iter()
                .map(|eps| {
                    let inside = a.pieces.iter().filter(|p| {
                        eps.coords().iter().enumerate().all(|(i, &e)| if e > 0 { p.lower[i] >= 0.0 } else { p.upper[i] <= 0.0 })
                    });
                    (eps.coords().to_vec(), check_pieces(inside, part_measure))
                })
                .collect();
            AtomReport { whole, orthants }
        }
    }
}

// ---------------------------------------------------------------------------
// Hardy sums

/// Expansion system: `φ_n^α` on `(0,∞)^d` or `h_n^λ` on ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", content = "order", rename_all = "snake_case")]
pub enum Basis {
    Laguerre(Alpha),
    Hermite(Vec<f64>),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Laguerre(a) => a.dim(),
            Basis::Hermite(l) => l.len(),
        }
    }

    fn coefficients_1d(&self, axis: usize, f: &Func, n_max: usize, spec: &QuadSpec) -> Result<Coefficients> {
        match self {
            Basis::Laguerre(a) => laguerre_coefficients(f, a.coords()[axis], n_max, spec),
            Basis::Hermite(l) => hermite_coefficients(f, l[axis], n_max, spec),
        }
    }
}

/// A coefficient whose magnitude the quadrature did not resolve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unresolved {
    /// Coordinate of the one-dimensional factor, for separable inputs.
    pub axis: Option<usize>,
    pub index: Vec<usize>,
    pub value: f64,
    pub error: f64,
}

/// `Σ_{|n|=m} |⟨f, ψ_n⟩|` for `m ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSums {
    pub levels: Vec<f64>,
    pub unresolved: Vec<Unresolved>,
}

fn clean(v: f64) -> f64 {
    if v.abs() < ZERO_COEFFICIENT {
        0.0
    } else {
        v.abs()
    }
}

fn unresolved_1d(axis: usize, c: &Coefficients) -> Vec<Unresolved> {
    c.values
        .iter()
        .zip(&c.errors)
        .enumerate()
        .filter(|(_, (v, e))| v.abs() >= ZERO_COEFFICIENT && **e >= 0.5 * v.abs())
        .map(|(k, (&v, &e))| Unresolved {
            axis: Some(axis),
            index: vec![k],
            value: v,
            error: e,
        })
        .collect()
}

/// Level sums of a tensor product from the factors' absolute coefficients.
pub fn convolve_levels(factors: &[Vec<f64>], n_max: usize) -> Vec<f64> {
    let mut cur: Vec<f64> = (0..=n_max).map(|m| factors[0].get(m).copied().unwrap_or(0.0)).collect();
    for f in &factors[1..] {
        let mut next = vec![0.0; n_max + 1];
        for (m, out) in next.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..=m.min(f.len().saturating_sub(1)) {
                let p = f[j] * cur[m - j];
                if p >= ZERO_COEFFICIENT {
                    s += p;
                }
            }
            *out = s;
        }
        cur = next;
    }
    cur
}

/// Level sums of `|⟨f, ψ_n⟩|`. Tensor products use one-dimensional
/// projections; other inputs go through one d-dimensional integral per `n`.
pub fn level_sums(f: &FuncNd, basis: &Basis, n_max: usize, spec: &QuadSpec) -> Result<LevelSums> {
    let d = f.dim();
    if basis.dim() != d {
        return Err(Error::Dimension { op: "level_sums", expected: d, got: basis.dim() });
    }
    if let Some(fs) = f.factors() {
        let mut abs = Vec::with_capacity(d);
        let mut unresolved = Vec::new();
        for (axis, fi) in fs.iter().enumerate() {
            let c = basis.coefficients_1d(axis, fi, n_max, spec)?;
            unresolved.extend(unresolved_1d(axis, &c));
            abs.push(c.values.iter().map(|&v| clean(v)).collect::<Vec<_>>());
        }
        return Ok(LevelSums {
            levels: convolve_levels(&abs, n_max),
            unresolved,
        });
    }
    let alpha = match basis {
        Basis::Laguerre(a) => a,
        Basis::Hermite(_) => {
            return Err(Error::domain("level_sums", "Hermite sums need a separable input"));
        }
    };
    let idx = MultiIndex::up_to_length(d, n_max);
    let vals: Vec<Result<(f64, Option<Unresolved>)>> = idx
        .par_iter()
        .map(|n| match inner_product_plus(f, n, alpha, spec) {
            Ok(q) => Ok((q.value, None)),
            Err(Error::Quadrature { value, error, .. }) => Ok((
                value,
                Some(Unresolved {
                    axis: None,
                    index: n.coords().to_vec(),
                    value,
                    error,
                }),
            )),
            Err(e) => Err(e),
        })
        .collect();
    let mut levels = vec![0.0; n_max + 1];
    let mut unresolved = Vec::new();
    for (n, v) in idx.iter().zip(vals) {
        let (value, bad) = v?;
        levels[n.length()] += clean(value);
        unresolved.extend(bad);
    }
    Ok(LevelSums { levels, unresolved })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStatus {
    /// Every coefficient in the last octave is zero.
    Zero,
    Converges,
    /// Fitted decay too slow for the exponent: the estimate is infinite.
    Divergent,
    /// Too few levels or nonzero blocks to fit.
    Insufficient,
}

/// Bound on `Σ_{m>N} S_m (m+1)^{−E}` from a power-law fit `S_m ≤ C(m+1)^{−p}`
/// to block maxima of the level sums on `(N/2, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub status: TailStatus,
    pub decay: Option<f64>,
    pub constant: f64,
    pub value: Option<f64>,
}

const TAIL_BLOCKS: usize = 8;

pub fn tail_estimate(levels: &[f64], exponent: f64) -> TailEstimate {
    let insufficient = TailEstimate {
        status: TailStatus::Insufficient,
        decay: None,
        constant: f64::NAN,
        value: None,
    };
    let n = levels.len().saturating_sub(1);
    if n < 2 * TAIL_BLOCKS {
        return insufficient;
    }
    let lo = n / 2 + 1;
    let width = (n + 1 - lo).div_ceil(TAIL_BLOCKS);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for start in (lo..=n).step_by(width) {
        let end = (start + width).min(n + 1);
        let (m, v) = (start..end).map(|m| (m, levels[m])).fold((start, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if v > 0.0 {
            xs.push((m + 1) as f64);
            ys.push(v);
        }
    }
    if xs.is_empty() {
        return TailEstimate {
            status: TailStatus::Zero,
            decay: None,
            constant: 0.0,
            value: Some(0.0),
        };
    }
    let Ok(fit) = fit_loglog(&xs, &ys) else {
        return insufficient;
    };
    let p = -fit.slope;
    let constant = (lo..=n).map(|m| levels[m] * ((m + 1) as f64).powf(p)).fold(0.0, f64::max);
    let s = p + exponent;
    let (status, value) = if s > 1.0 {
        (TailStatus::Converges, Some(constant * ((n + 1) as f64).powf(1.0 - s) / (s - 1.0)))
    } else {
        (TailStatus::Divergent, None)
    };
    TailEstimate {
        status,
        decay: Some(p),
        constant,
        value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialSum {
    #[serde(rename = "N")]
    pub n: usize,
    pub sum: f64,
}

/// One atom size of a sharpness sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub k_big: usize,
    pub sum: f64,
    pub tail: TailEstimate,
    pub control_sum: f64,
    pub control_tail: TailEstimate,
    /// `min_{1≤k≤K} ⟨a, φ_k^α⟩ / (k^{α/2} K^{−α/2−1/4})`, over all coordinates.
    pub min_lower_ratio: f64,
    /// Whether `⟨a, φ_k^α⟩ > 0` for every `1 ≤ k ≤ K`.
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlSummary {
    pub exponent: f64,
    /// max / min of the control sums over the upper half of the K grid.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    pub basis: Basis,
    pub dim: usize,
    pub exponent: f64,
    #[serde(rename = "N_max")]
    pub n_max: usize,
    pub sum: f64,
    /// Partial sums at `N = 0, 1, 2, 3, 4, 6, 8, 12, …` and at `N_max`.
    pub partial_sums: Vec<PartialSum>,
    pub tail_estimate: TailEstimate,
    pub unresolved: Vec<Unresolved>,
    #[serde(rename = "K_sweep")]
    pub k_sweep: Vec<SweepRow>,
    pub fitted_slope: Option<SlopeFit>,
    pub control: Option<ControlSummary>,
    pub constants: Option<BoundConstants>,
    pub delta: Option<f64>,
    #[serde(skip)]
    all_partial_sums: Vec<f64>,
}

impl HardyReport {
    /// `Σ_{|n|≤N}`, for any `N ≤ N_max`.
    pub fn partial_sum(&self, n: usize) -> Option<f64> {
        self.all_partial_sums.get(n).copied()
    }

    pub fn all_partial_sums(&self) -> &[f64] {
        &self.all_partial_sums
    }
}

fn checkpoints(n_max: usize) -> Vec<usize> {
    let mut out = vec![0, 1];
    let mut p = 2usize;
    while p <= n_max {
        out.push(p);
        if p + p / 2 <= n_max {
            out.push(p + p / 2);
        }
        p *= 2;
    }
    out.retain(|&n| n <= n_max);
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

fn partial_sums(levels: &[f64], exponent: f64) -> Vec<f64> {
    let mut acc = 0.0;
    levels
        .iter()
        .enumerate()
        .map(|(m, &s)| {
            acc += s / ((m + 1) as f64).powf(exponent);
            acc
        })
        .collect()
}

fn check_exponent(op: &'static str, e: f64) -> Result<()> {
    if e > 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("exponent {e} must be positive")))
    }
}

fn report_from_levels(basis: Basis, exponent: f64, ls: LevelSums) -> HardyReport {
    let n_max = ls.levels.len() - 1;
    let all = partial_sums(&ls.levels, exponent);
    HardyReport {
        dim: basis.dim(),
        basis,
        exponent,
        n_max,
        sum: all[n_max],
        partial_sums: checkpoints(n_max).into_iter().map(|n| PartialSum { n, sum: all[n] }).collect(),
        tail_estimate: tail_estimate(&ls.levels, exponent),
        unresolved: ls.unresolved,
        k_sweep: Vec::new(),
        fitted_slope: None,
        control: None,
        constants: None,
        delta: None,
        all_partial_sums: all,
    }
}

/// `Σ_{|n|≤N_max} |⟨f, ψ_n⟩| / (|n|+1)^E`, enumerated by `|n|`, with a
/// reported (never added) tail estimate.
pub fn hardy_sum(f: &FuncNd, basis: &Basis, exponent: f64, n_max: usize, spec: &QuadSpec) -> Result<HardyReport> {
    check_exponent("hardy_sum", exponent)?;
    let ls = level_sums(f, basis, n_max, spec)?;
    Ok(report_from_levels(basis.clone(), exponent, ls))
}

/// [`hardy_sum`] for an atom, in the Laguerre system of its parameters.
pub fn hardy_sum_atom(a: &Atom, alpha: &Alpha, exponent: f64, n_max: usize, spec: &QuadSpec) -> Result<HardyReport> {
    hardy_sum(&a.to_func_nd(), &Basis::Laguerre(alpha.clone()), exponent, n_max, spec)
}

// ---------------------------------------------------------------------------
// sharpness

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessOptions {
    pub alpha: Alpha,
    pub epsilon: f64,
    #[serde(rename = "K_grid")]
    pub k_grid: Vec<usize>,
    /// Fixed δ; the default is [`default_delta`] of the fitted constants.
    pub delta: Option<f64>,
    /// Multiplies the atom; the sums scale by `|scale|`.
    pub scale: f64,
    pub spec: QuadSpec,
}

impl SharpnessOptions {
    pub fn new(alpha: Alpha, epsilon: f64, k_grid: Vec<usize>) -> Self {
        SharpnessOptions {
            alpha,
            epsilon,
            k_grid,
            delta: None,
            scale: 1.0,
            spec: QuadSpec::default(),
        }
    }
}

/// `2^lo, 2^{lo+1}, …, 2^hi`.
pub fn geometric_grid(start: usize, stop: usize, factor: usize) -> Result<Vec<usize>> {
    if start == 0 || factor < 2 || stop < start {
        return Err(Error::domain("geometric_grid", format!("bad grid {start}:{stop}:x{factor}")));
    }
    let mut out = Vec::new();
    let mut k = start;
    while k <= stop {
        out.push(k);
        k = match k.checked_mul(factor) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(out)
}

const MIN_SLOPE_POINTS: usize = 4;

/// For each K, builds the counterexample atom and sums its coefficients up
/// to `N = K` with `E = 3d/4 − ε` and with the control `E = 3d/4`; fits the
/// growth of the first against K.
pub fn sharpness_sweep(opts: &SharpnessOptions) -> Result<HardyReport> {
    let alpha = &opts.alpha;
    let d = alpha.dim();
    if alpha.coords().iter().any(|&a| !(a > -0.5)) {
        return Err(Error::domain("sharpness", "every alpha coordinate must be > -1/2"));
    }
    if !(opts.epsilon > 0.0 && opts.epsilon <= 0.25) {
        return Err(Error::domain("sharpness", format!("epsilon {} must lie in (0, 1/4]", opts.epsilon)));
    }
    if opts.k_grid.is_empty() || opts.k_grid.contains(&0) {
        return Err(Error::domain("sharpness", "K grid must be non-empty and positive"));
    }
    if (2..MIN_SLOPE_POINTS).contains(&opts.k_grid.len()) {
        return Err(Error::fit("sharpness", format!("slope fit needs at least {MIN_SLOPE_POINTS} K values")));
    }
    if !opts.scale.is_finite() || opts.scale == 0.0 {
        return Err(Error::domain("sharpness", "scale must be finite and nonzero"));
    }
    let mut grid = opts.k_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let k_top = *grid.last().expect("non-empty");
    let e_main = 0.75 * d as f64 - opts.epsilon;
    let e_control = 0.75 * d as f64;

    // constants and δ are fitted for the first coordinate's order; c is the
    // smallest over all coordinates
    let mut bcs = Vec::with_capacity(d);
    for &a in alpha.coords() {
        bcs.push(bound_constants(a, k_top)?);
    }
    let c = bcs.iter().map(|b| b.c).fold(f64::INFINITY, f64::min);
    let delta = match opts.delta {
        Some(dl) => dl,
        None => bcs.iter().map(default_delta).collect::<Result<Vec<_>>>()?.into_iter().fold(0.5, f64::min),
    };

    let rows: Vec<Result<(SweepRow, Vec<f64>)>> = grid
        .par_iter()
        .map(|&k_big| {
            let p = AtomParams::new(k_big, delta, c, alpha.clone())?;
            let atom = tensor_atom(&p)?;
            let one = pieces_func(&atom.factors.as_ref().expect("tensor atom")[0]);
            let mut abs = Vec::with_capacity(d);
            let mut min_ratio = f64::INFINITY;
            let mut positive = true;
            for (i, &a) in alpha.coords().iter().enumerate() {
                let co = laguerre_coefficients(&one, a, k_big, &opts.spec)?;
                let kb = k_big as f64;
                for k in 1..=k_big {
                    let v = co.values[k];
                    positive &= v > 0.0;
                    min_ratio = min_ratio.min(v / ((k as f64).powf(0.5 * a) * kb.powf(-0.5 * a - 0.25)));
                }
                let s = if i == 0 { opts.scale.abs() / atom.normalization } else { 1.0 };
                abs.push(co.values.iter().map(|&v| clean(s * v)).collect::<Vec<_>>());
            }
            let levels = convolve_levels(&abs, k_big);
            let main = partial_sums(&levels, e_main);
            let control = partial_sums(&levels, e_control);
            Ok((
                SweepRow {
                    k_big,
                    sum: main[k_big],
                    tail: tail_estimate(&levels, e_main),
                    control_sum: control[k_big],
                    control_tail: tail_estimate(&levels, e_control),
                    min_lower_ratio: min_ratio,
                    positive,
                },
                levels,
            ))
        })
        .collect();
    let mut sweep = Vec::with_capacity(rows.len());
    let mut last_levels = Vec::new();
    for r in rows {
        let (row, levels) = r?;
        sweep.push(row);
        last_levels = levels;
    }

    let fitted_slope = if sweep.len() >= MIN_SLOPE_POINTS {
        let ks: Vec<f64> = sweep.iter().map(|r| r.k_big as f64).collect();
        let ss: Vec<f64> = sweep.iter().map(|r| r.sum).collect();
        Some(fit_loglog(&ks, &ss)?)
    } else {
        None
    };
    let upper = &sweep[sweep.len() / 2..];
    let (lo, hi) = upper
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.control_sum), hi.max(r.control_sum)));
    let mut report = report_from_levels(
        Basis::Laguerre(alpha.clone()),
        e_main,
        LevelSums {
            levels: last_levels,
            unresolved: Vec::new(),
        },
    );
    report.k_sweep = sweep;
    report.fitted_slope = fitted_slope;
    report.control = Some(ControlSummary {
        exponent: e_control,
        spread: hi / lo,
    });
    report.constants = Some(bcs[0]);
    report.delta = Some(delta);
    Ok(report)
}

/// [`sharpness_sweep`] with the default δ (when `delta` is `None`) and tolerances.
pub fn sharpness_experiment(alpha: &Alpha, epsilon: f64, k_grid: &[usize], delta: Option<f64>) -> Result<HardyReport> {
    let mut opts = SharpnessOptions::new(alpha.clone(), epsilon, k_grid.to_vec());
    opts.delta = delta;
    sharpness_sweep(&opts)
}

// ---------------------------------------------------------------------------
// α = −1/2

/// `−⟨a, φ_k^{−1/2}⟩ / (K^{−1} k^{3/4})` for `1 ≤ k ≤ K`.
///
/// For α = −1/2 the atom's coefficients are negative (φ_k decreases near
/// the origin and `a` is negative first), so the magnitude is measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfIntegerReport {
    #[serde(rename = "K")]
    pub k_big: usize,
    pub delta: f64,
    pub c: f64,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub argmin: usize,
    /// Whether every coefficient `1 ≤ k ≤ K` is strictly negative.
    pub sign_definite: bool,
}

pub fn halfinteger_ratios(k_big: usize, delta: Option<f64>, spec: &QuadSpec) -> Result<HalfIntegerReport> {
    if k_big == 0 {
        return Err(Error::domain("halfinteger", "K must be positive"));
    }
    let bc = bound_constants(-0.5, k_big)?;
    let delta = match delta {
        Some(d) => d,
        None => default_delta(&bc)?,
    };
    let p = AtomParams::new(k_big, delta, bc.c, Alpha::scalar(-0.5)?)?;
    let a = make_counterexample_atom(&p)?.to_func()?;
    let co = laguerre_coefficients(&a, -0.5, k_big, spec)?;
    let kb = k_big as f64;
    let ratios: Vec<f64> = (1..=k_big).map(|k| -co.values[k] / ((k as f64).powf(0.75) / kb)).collect();
    let (argmin, min_ratio) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &r)| if r < acc.1 { (i + 1, r) } else { acc });
    Ok(HalfIntegerReport {
        k_big,
        delta,
        c: bc.c,
        sign_definite: co.values[1..].iter().all(|&v| v < 0.0),
        ratios,
        min_ratio,
        argmin,
    })
}

/// One ratio of [`halfinteger_ratios`]; `k = 0` and `k > K` are rejected.
pub fn halfinteger_coefficient_check(k_big: usize, delta: f64, k: usize) -> Result<f64> {
    if k == 0 || k > k_big {
        return Err(Error::domain("halfinteger_coefficient_check", format!("need 1 <= k <= K, got k = {k}, K = {k_big}")));
    }
    Ok(halfinteger_ratios(k_big, Some(delta), &QuadSpec::default())?.ratios[k - 1])
}

// ---------------------------------------------------------------------------
// parity reduction

/// `⟨f, h_n^λ⟩` computed on the line against `(−1)^k √2 ⟨f_η^+, φ_k^{λ_η}⟩_+`
/// with `n = 2k + η`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityCheckReport {
    pub lambda: f64,
    pub n_max: usize,
    pub max_defect: f64,
    pub arg_max: usize,
    /// Sum of the two quadrature error estimates at the worst index.
    pub error_estimate: f64,
    pub hermite: Vec<f64>,
    pub reduced: Vec<f64>,
}

pub fn parity_coefficient_check(f: &Func, lambda: f64, n_max: usize, spec: &QuadSpec) -> Result<ParityCheckReport> {
    let direct = hermite_coefficients(f, lambda, n_max, spec)?;
    let even = laguerre_coefficients(&parity_component_1d(f, false), lambda - 0.5, n_max / 2, spec)?;
    let odd = if n_max >= 1 {
        Some(laguerre_coefficients(&parity_component_1d(f, true), lambda + 0.5, (n_max - 1) / 2, spec)?)
    } else {
        None
    };
    let mut reduced = Vec::with_capacity(n_max + 1);
    let mut errs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let k = n / 2;
        let sign = if k % 2 == 0 { SQRT_2 } else { -SQRT_2 };
        let c = if n % 2 == 0 { &even } else { odd.as_ref().expect("n_max >= 1") };
        reduced.push(sign * c.values[k]);
        errs.push(direct.errors[n] + SQRT_2 * c.errors[k]);
    }
    let (arg_max, max_defect) = direct
        .values
        .iter()
        .zip(&reduced)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(ParityCheckReport {
        lambda,
        n_max,
        max_defect,
        arg_max,
        error_estimate: errs[arg_max],
        hermite: direct.values,
        reduced,
    })
}

/// Sum over even `n` of the Hermite expansion of the even extension of `g`,
/// against `√2` times the Laguerre sum with order `λ − 1/2`.
///
/// Reindexing `n = 2k` replaces `(k+1)^E` by `(2k+1)^E`, so
/// `ratio = hermite_even_sum / (√2 · laguerre_sum)` must lie in `[2^{−E}, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionReport {
    pub lambda: f64,
    pub exponent: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub hermite_even_sum: f64,
    pub laguerre_sum: f64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub consistent: bool,
}

const REDUCTION_SLACK: f64 = 1e-8;

pub fn parity_reduction_check(g: &Func, lambda: f64, exponent: f64, k_max: usize, spec: &QuadSpec) -> Result<ReductionReport> {
    check_exponent("parity_reduction_check", exponent)?;
    let f = g.even_extension();
    let h = hermite_coefficients(&f, lambda, 2 * k_max, spec)?;
    let l = laguerre_coefficients(g, lambda - 0.5, k_max, spec)?;
    let mut hs = 0.0;
    let mut ls = 0.0;
    for k in 0..=k_max {
        hs += clean(h.values[2 * k]) / ((2 * k + 1) as f64).powf(exponent);
        ls += clean(l.values[k]) / ((k + 1) as f64).powf(exponent);
    }
    let ratio = hs / (SQRT_2 * ls);
    let lower = 2f64.powf(-exponent);
    Ok(ReductionReport {
        lambda,
        exponent,
        k_max,
        hermite_even_sum: hs,
        laguerre_sum: ls,
        ratio,
        lower,
        upper: 1.0,
        consistent: ratio >= lower * (1.0 - REDUCTION_SLACK) && ratio <= 1.0 + REDUCTION_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::phi_func;

    fn params(k: usize, delta: f64) -> AtomParams {
        AtomParams::new(k, delta, 0.7, Alpha::scalar(0.0).unwrap()).unwrap()
    }

    #[test]
    fn counterexample_atom_is_an_atom() {
        let a = make_counterexample_atom(&params(64, 0.2)).unwrap();
        let rep = validate_atom(&a);
        assert!(rep.passed(), "{rep:?}");
        assert!((a.sup_norm() * a.support_ball_measure - 1.0).abs() < 1e-14);
        assert!(AtomParams::new(4, 0.5, 1.0, Alpha::scalar(0.0).unwrap()).is_err());
        assert!(AtomParams::new(0, 0.1, 1.0, Alpha::scalar(0.0).unwrap()).is_err());
    }

    #[test]
    fn broken_atoms_fail() {
        let bump = Atom::new(
            vec![Piece {
                lower: vec![0.0],
                upper: vec![1.0],
                value: 1.0,
            }],
            1.0,
        )
        .unwrap();
        let r = validate_atom(&bump);
        assert!(!r.whole.cancellation && r.whole.size);
        let tall = make_counterexample_atom(&params(16, 0.3)).unwrap().scaled(2.0);
        let r = validate_atom(&tall);
        assert!(r.whole.cancellation && !r.whole.size);
    }

    #[test]
    fn tensor_atom_and_extensions() {
        let p = AtomParams::new(32, 0.25, 0.6, Alpha::uniform(0.3, 2).unwrap()).unwrap();
        let a = tensor_atom(&p).unwrap();
        assert_eq!(a.pieces.len(), 4);
        assert!(validate_atom(&a).passed());
        for eta in ParityVector::all(2) {
            let e = a.extension(&eta).unwrap();
            assert_eq!(e.pieces.len(), 16);
            let rep = validate_atom(&e);
            assert!(rep.passed(), "{eta:?}: {rep:?}");
            assert_eq!(rep.orthants.len(), 4);
            let f = e.to_func_nd();
            for x in [[0.01, 0.02], [-0.05, 0.001], [-0.003, -0.08]] {
                assert!((f.eval(&x) - e.eval(&x)).abs() < 1e-12 * e.sup_norm());
            }
        }
    }

    #[test]
    fn basis_element_gives_single_term() {
        let f: FuncNd = phi_func(3, 0.5).unwrap().into();
        let r = hardy_sum(&f, &Basis::Laguerre(Alpha::scalar(0.5).unwrap()), 0.75, 40, &QuadSpec::default()).unwrap();
        assert!((r.sum - 4f64.powf(-0.75)).abs() < 1e-9, "{}", r.sum);
        assert_eq!(r.partial_sum(2), Some(0.0));
        assert_eq!(r.tail_estimate.status, TailStatus::Zero);
    }

    #[test]
    fn level_convolution_matches_enumeration() {
        let a = vec![1.0, 0.5, 0.25, 0.0, 0.1];
        let b = vec![0.3, 0.2, 0.7];
        let lv = convolve_levels(&[a.clone(), b.clone()], 5);
        for (m, &v) in lv.iter().enumerate() {
            let brute: f64 = MultiIndex::with_length(2, m)
                .iter()
                .map(|n| a.get(n.coords()[0]).unwrap_or(&0.0) * b.get(n.coords()[1]).unwrap_or(&0.0))
                .sum();
            assert!((v - brute).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_of_power_law() {
        let levels: Vec<f64> = (0..=256).map(|m| 2.0 * ((m + 1) as f64).powf(-1.5)).collect();
        let t = tail_estimate(&levels, 0.75);
        assert_eq!(t.status, TailStatus::Converges);
        assert!((t.decay.unwrap() - 1.5).abs() < 1e-9);
        let exact: f64 = (257..2_000_000).map(|m| 2.0 * ((m + 1) as f64).powf(-2.25)).sum();
        let est = t.value.unwrap();
        assert!(est >= exact && est < 1.2 * exact, "{est} vs {exact}");
        let flat = vec![1.0; 300];
        assert_eq!(tail_estimate(&flat, 0.5).status, TailStatus::Divergent);
        assert_eq!(tail_estimate(&flat[..5], 0.5).status, TailStatus::Insufficient);
    }

    #[test]
    fn grid_and_contracts() {
        assert_eq!(geometric_grid(16, 128, 2).unwrap(), vec![16, 32, 64, 128]);
        assert!(geometric_grid(0, 8, 2).is_err());
        assert!(halfinteger_coefficient_check(64, 0.25, 0).is_err());
        assert!(halfinteger_coefficient_check(64, 0.25, 65).is_err());
        let a = Alpha::scalar(0.0).unwrap();
        assert!(sharpness_experiment(&a, 0.25, &[16, 32], None).is_err());
        assert!(sharpness_experiment(&a, 0.3, &[16], None).is_err());
        let one = sharpness_experiment(&a, 0.25, &[16], None).unwrap();
        assert!(one.fitted_slope.is_none());
        assert_eq!(one.k_sweep.len(), 1);
    }

    #[test]
    fn bound_constants_small_u_limit() {
        let bc = fit_bound_constants(0.0, 64).unwrap();
        assert!(bc.a > 0.0 && bc.a <= bc.b);
        // φ_k^0(u)/u^{1/2} → √2 as u → 0 for every k
        assert!(bc.b >= SQRT_2 * 0.999 && bc.b < SQRT_2 * 1.01, "{bc:?}");
    }
}
