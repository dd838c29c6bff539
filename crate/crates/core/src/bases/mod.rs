//! Laguerre functions of Hermite type on `(0, ∞)^d`, generalized Hermite
//! functions on ℝ^d, and the parity bookkeeping that links them.
//!
//! In one dimension
//!
//! ```text
//! φ_k^α(u) = (2 Γ(k+1) / Γ(k+α+1))^{1/2} L_k^α(u²) u^{α+1/2} e^{−u²/2},   u > 0,
//! ```
//!
//! an orthonormal basis of `L²(0, ∞)`. Values are produced by the normalized
//! three-term recurrence in φ itself, seeded in log space, so degrees in the
//! tens of thousands neither overflow Γ nor underflow the Gaussian factor.

mod envelope;
mod hermite;
mod parity;

pub use envelope::{envelope, sup_norm_bounds, sup_norm_sweep, EnvelopeFit, EnvelopeParams, SupNorms};
pub use hermite::{gen_hermite, gen_hermite_1d, HermiteTable};
pub use parity::{
    parity_component, parity_component_1d, parity_index, shifted_order, sign_vectors, ParityVector,
    SignVector,
};

use crate::error::{Error, Result};
use serde::Serialize;

use crate::func::{Decay, Func};
use crate::specfun::{laguerre_unchecked, ln_gamma_unchecked, Order};

/// Degree vector `n ∈ ℕ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("MultiIndex::new", "dimension must be at least 1"));
        }
        Ok(MultiIndex(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|n| = n_1 + … + n_d`.
    pub fn length(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// All `n ∈ ℕ^d` with `|n| = m`, in lexicographic order.
    pub fn with_length(dim: usize, m: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; dim];
        fill_level(&mut cur, 0, m, &mut out);
        out
    }

    /// All `n` with `|n| ≤ max_length`, level by level.
    pub fn up_to_length(dim: usize, max_length: usize) -> Vec<MultiIndex> {
        (0..=max_length).flat_map(|m| MultiIndex::with_length(dim, m)).collect()
    }
}

fn fill_level(cur: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill_level(cur, pos + 1, remaining - v, out);
    }
}

impl From<usize> for MultiIndex {
    fn from(k: usize) -> Self {
        MultiIndex(vec![k])
    }
}

/// Laguerre type multi-index `α ∈ (−1, ∞)^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alpha(Vec<f64>);

impl Alpha {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("Alpha::new", "dimension must be at least 1"));
        }
        for &a in &coords {
            Order::new(a)?;
        }
        Ok(Alpha(coords))
    }

    pub fn scalar(a: f64) -> Result<Self> {
        Alpha::new(vec![a])
    }

    /// The same type parameter in every coordinate.
    pub fn uniform(a: f64, dim: usize) -> Result<Self> {
        Alpha::new(vec![a; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Every coordinate ≥ −1/2, the range where the Hardy-type results apply.
    pub fn in_hardy_range(&self) -> bool {
        self.0.iter().all(|&a| a >= -0.5)
    }
}

/// Coefficients of the normalized recurrence for a fixed α, shared between
/// many evaluation points.
#[derive(Debug, Clone)]
pub struct PhiRecurrence {
    alpha: f64,
    ln_norm: f64,
    // φ_{k+1} = [(2k+α+1−u²) φ_k − back[k] φ_{k−1}] · fwd[k]
    fwd: Vec<f64>,
    back: Vec<f64>,
}

const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;

impl PhiRecurrence {
    pub fn new(alpha: f64, k_max: usize) -> Result<Self> {
        Order::new(alpha)?;
        let mut fwd = Vec::with_capacity(k_max);
        let mut back = Vec::with_capacity(k_max);
        for k in 0..k_max {
            let kf = k as f64;
            fwd.push(1.0 / ((kf + 1.0) * (kf + alpha + 1.0)).sqrt());
            back.push((kf * (kf + alpha)).sqrt());
        }
        Ok(PhiRecurrence {
            alpha,
            ln_norm: 0.5 * (std::f64::consts::LN_2 - ln_gamma_unchecked(alpha + 1.0)),
            fwd,
            back,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_max(&self) -> usize {
        self.fwd.len()
    }

    /// `ln φ_0^α(u)`; at u = 0 the power factor is read as its limit.
    fn ln_seed(&self, u: f64) -> f64 {
        let p = self.alpha + 0.5;
        let power = if u == 0.0 {
            if p > 0.0 {
                f64::NEG_INFINITY
            } else if p == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            p * u.ln()
        };
        self.ln_norm + power - 0.5 * u * u
    }

    /// Calls `sink(k, φ_k^α(u))` for `k = 0..=k_max` in order.
    #[inline]
    pub fn for_each(&self, u: f64, mut sink: impl FnMut(usize, f64)) {
        self.run(u, self.k_max(), &mut sink);
    }

    /// Fills `out[k] = φ_k^α(u)` for `k < out.len()` (at most `k_max + 1`).
    pub fn fill(&self, u: f64, out: &mut [f64]) {
        let n = out.len();
        assert!(n <= self.k_max() + 1, "buffer longer than recurrence table");
        if n > 0 {
            self.run(u, n - 1, &mut |k, v| out[k] = v);
        }
    }

    /// Single value `φ_k^α(u)`, `k ≤ k_max`.
    pub fn value(&self, k: usize, u: f64) -> f64 {
        let mut out = 0.0;
        self.run(u, k, &mut |j, v| {
            if j == k {
                out = v
            }
        });
        out
    }

    fn run(&self, u: f64, k_last: usize, sink: &mut impl FnMut(usize, f64)) {
        let x = u * u;
        let mut scale = self.ln_seed(u);
        if scale == f64::NEG_INFINITY {
            for k in 0..=k_last {
                sink(k, 0.0);
            }
            return;
        }
        // the recurrence runs on values divided by e^{scale}
        let mut factor = scale.exp();
        let mut prev = 0.0;
        let mut cur = 1.0;
        sink(0, factor);
        let a1 = self.alpha + 1.0;
        for k in 0..k_last {
            let kf = k as f64;
            let next = ((2.0 * kf + a1 - x) * cur - self.back[k] * prev) * self.fwd[k];
            prev = cur;
            cur = next;
            let mag = cur.abs();
            if mag > RESCALE_HI || (mag < RESCALE_LO && mag > 0.0) {
                cur /= mag;
                prev /= mag;
                scale += mag.ln();
                factor = scale.exp();
            }
            sink(k + 1, cur * factor);
        }
    }
}

fn check_alpha(op: &'static str, alpha: f64) -> Result<()> {
    Order::new(alpha).map(|_| ()).map_err(|_| Error::domain(op, format!("alpha {alpha} must be > -1")))
}

/// `φ_k^α(u)` for u > 0.
pub fn phi(k: usize, alpha: f64, u: f64) -> Result<f64> {
    check_alpha("phi", alpha)?;
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::domain("phi", format!("argument {u} must be positive")));
    }
    Ok(phi_unchecked(k, alpha, u))
}

pub(crate) fn phi_unchecked(k: usize, alpha: f64, u: f64) -> f64 {
    PhiRecurrence::new(alpha, k).expect("alpha validated").value(k, u)
}

/// `φ_k^α` continued to u = 0 by its limit: zero when α > −1/2, finite when
/// α = −1/2. Orders below −1/2 blow up there and are rejected.
pub fn phi_extended(k: usize, alpha: f64, u: f64) -> Result<f64> {
    check_alpha("phi_extended", alpha)?;
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::domain("phi_extended", format!("argument {u} must be non-negative")));
    }
    if u == 0.0 && alpha < -0.5 {
        return Err(Error::domain("phi_extended", "phi is unbounded at 0 for alpha < -1/2"));
    }
    Ok(phi_unchecked(k, alpha, u))
}

/// The definitional formula with explicit Γ factors and `L_k^α(u²)`.
///
/// Overflows for large k; kept as an independent second evaluation path.
pub fn phi_definitional(k: usize, alpha: f64, u: f64) -> Result<f64> {
    check_alpha("phi_definitional", alpha)?;
    if !(u > 0.0) {
        return Err(Error::domain("phi_definitional", format!("argument {u} must be positive")));
    }
    let kf = k as f64;
    let ln_c = 0.5 * (std::f64::consts::LN_2 + ln_gamma_unchecked(kf + 1.0) - ln_gamma_unchecked(kf + alpha + 1.0));
    let ln_w = (alpha + 0.5) * u.ln() - 0.5 * u * u;
    Ok(laguerre_unchecked(k, alpha, u * u) * (ln_c + ln_w).exp())
}

/// `φ_n^α(x) = Π_i φ_{n_i}^{α_i}(x_i)`.
pub fn phi_tensor(n: &MultiIndex, alpha: &Alpha, x: &[f64]) -> Result<f64> {
    let d = n.dim();
    if alpha.dim() != d {
        return Err(Error::Dimension { op: "phi_tensor", expected: d, got: alpha.dim() });
    }
    if x.len() != d {
        return Err(Error::Dimension { op: "phi_tensor", expected: d, got: x.len() });
    }
    let mut prod = 1.0;
    for ((&k, &a), &xi) in n.coords().iter().zip(alpha.coords()).zip(x) {
        prod *= phi(k, a, xi)?;
    }
    Ok(prod)
}

/// `d/du φ_k^α(u) = −2√k φ_{k−1}^{α+1}(u) + ((2α+1)/(2u) − u) φ_k^α(u)`.
pub fn phi_derivative(k: usize, alpha: f64, u: f64) -> Result<f64> {
    let own = phi(k, alpha, u)?;
    let lowered = if k == 0 { 0.0 } else { phi_unchecked(k - 1, alpha + 1.0, u) };
    Ok(-2.0 * (k as f64).sqrt() * lowered + ((2.0 * alpha + 1.0) / (2.0 * u) - u) * own)
}

/// `ν(α, k) = max(4k + 2α + 2, 2)`, the turning-point scale of `φ_k^α`.
pub fn turning_scale(k: usize, alpha: f64) -> f64 {
    f64::max(4.0 * k as f64 + 2.0 * alpha + 2.0, 2.0)
}

/// Radius past which `φ_k^α` for every `k ≤ k_max` is negligible: `√(2ν) + 8`.
pub fn basis_radius(k_max: usize, alpha: f64) -> f64 {
    (2.0 * turning_scale(k_max, alpha)).sqrt() + 8.0
}

/// `φ_k^α` as a [`Func`] on `(0, ∞)`, supported out to [`basis_radius`].
pub fn phi_func(k: usize, alpha: f64) -> Result<Func> {
    let rec = PhiRecurrence::new(alpha, k)?;
    Ok(Func::new(move |u| if u > 0.0 { rec.value(k, u) } else { 0.0 }, Decay::Support(basis_radius(k, alpha))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn multi_index_enumeration() {
        let level = MultiIndex::with_length(2, 2);
        let coords: Vec<_> = level.iter().map(|n| n.coords().to_vec()).collect();
        assert_eq!(coords, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        let all = MultiIndex::up_to_length(3, 4);
        // C(4+3, 3)
        assert_eq!(all.len(), 35);
        assert!(all.windows(2).all(|w| w[0].length() <= w[1].length()));
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn alpha_range_flag() {
        assert!(Alpha::new(vec![-0.5, 0.3]).unwrap().in_hardy_range());
        assert!(!Alpha::new(vec![-0.7, 0.3]).unwrap().in_hardy_range());
        assert!(Alpha::new(vec![-1.0]).is_err());
    }

    #[test]
    fn phi_seed_value() {
        // (2/√π)^{1/2} e^{−1/2}
        assert_relative_eq!(phi(0, -0.5, 1.0).unwrap(), 0.644_288_365_113_475_2, max_relative = 1e-14);
        assert!(phi(0, 0.0, 0.0).is_err());
        assert!(phi(0, 0.0, -1.0).is_err());
    }

    #[test]
    fn phi_reference_values() {
        // 50-digit mpmath evaluation of the definitional formula
        let cases = [
            (5, 0.3, 0.8, -0.419_587_236_299_885_729_522_475_248_999_1),
            (20, 1.5, 2.2, -0.105_408_260_657_776_861_210_143_709_666_8),
            (100, 0.0, 3.7, -0.191_439_789_592_892_829_213_048_338_960_2),
            (30, -0.3, 0.05, 0.320_648_154_545_972_173_286_374_971_483_9),
            (2, 0.5, 1.7, -0.516_160_642_906_069_719_761_861_716_624_6),
        ];
        for (k, a, u, want) in cases {
            assert_relative_eq!(phi(k, a, u).unwrap(), want, max_relative = 1e-11);
        }
    }

    #[test]
    fn phi_tensor_products() {
        let n = MultiIndex::new(vec![1, 2]).unwrap();
        let a = Alpha::new(vec![0.0, 0.5]).unwrap();
        let got = phi_tensor(&n, &a, &[0.3, 1.7]).unwrap();
        assert_relative_eq!(got, -0.347_823_285_021_645_681_414_138_937_264, max_relative = 1e-12);
        let z = MultiIndex::new(vec![0, 0]).unwrap();
        let h = Alpha::uniform(-0.5, 2).unwrap();
        let p = phi(0, -0.5, 1.0).unwrap();
        assert_relative_eq!(phi_tensor(&z, &h, &[1.0, 1.0]).unwrap(), p * p, max_relative = 1e-15);
        assert_eq!(
            phi_tensor(&MultiIndex::from(3), &Alpha::scalar(0.2).unwrap(), &[0.9]).unwrap(),
            phi(3, 0.2, 0.9).unwrap()
        );
        assert!(matches!(phi_tensor(&n, &h, &[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn recurrence_matches_definition() {
        for &a in &[-0.5, -0.3, 0.0, 0.7, 2.0, 5.5] {
            for k in 0..=30 {
                for &u in &[0.05, 0.3, 1.0, 2.5, 4.0, 7.0] {
                    let r = phi(k, a, u).unwrap();
                    let d = phi_definitional(k, a, u).unwrap();
                    // relative to the local magnitude of the orthonormal family
                    let scale = d.abs().max(1e-3 * (k as f64 + 1.0).powf(-0.25));
                    assert!((r - d).abs() <= 1e-9 * scale, "k={k} a={a} u={u}: {r} vs {d}");
                }
            }
        }
    }

    #[test]
    fn large_degree_is_finite_and_bounded() {
        let rec = PhiRecurrence::new(0.0, 20_000).unwrap();
        for &u in &[1e-3, 0.5, 10.0, 100.0, 200.0, 283.0, 300.0] {
            let mut out = vec![0.0; 20_001];
            rec.fill(u, &mut out);
            assert!(out.iter().all(|v| v.is_finite() && v.abs() < 2.0), "u={u}");
        }
        // beyond the turning point of every degree the values are tiny but not garbage
        let v = rec.value(20_000, 300.0);
        assert!(v.abs() < 1e-100);
    }

    #[test]
    fn extension_at_zero() {
        assert_eq!(phi_extended(3, 0.2, 0.0).unwrap(), 0.0);
        let at0 = phi_extended(0, -0.5, 0.0).unwrap();
        assert_relative_eq!(at0, (2.0 / std::f64::consts::PI.sqrt()).sqrt(), max_relative = 1e-15);
        assert!(phi_extended(0, -0.7, 0.0).is_err());
    }

    #[test]
    fn derivative_k0_half() {
        for &u in &[0.1, 0.7, 2.0] {
            let want = -u * phi(0, -0.5, u).unwrap();
            assert_relative_eq!(phi_derivative(0, -0.5, u).unwrap(), want, max_relative = 1e-14);
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let h = 1e-5;
        for &(k, a, u) in &[(5usize, 0.3, 0.8), (1, 0.0, 1.0), (12, -0.5, 2.3), (40, 1.5, 4.1)] {
            let fd = (phi(k, a, u + h).unwrap() - phi(k, a, u - h).unwrap()) / (2.0 * h);
            let got = phi_derivative(k, a, u).unwrap();
            assert!((got - fd).abs() <= 1e-5 * got.abs().max(1e-2), "k={k}: {got} vs {fd}");
        }
    }
}
