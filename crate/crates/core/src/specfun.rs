//! Scalar special functions: log-gamma, generalized Laguerre polynomials and
//! the modified Bessel function of the first kind `I_ν` for real order ν > −1.
//!
//! Everything here is pure double precision. The Bessel routines work in log
//! space internally so that `e^{−x} I_ν(x)` stays representable for any
//! argument; the unscaled [`bessel_i`] overflows to `+∞` past x ≈ 709 as
//! expected.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sum::Compensated;

/// Bessel order / Laguerre type parameter, restricted to `(−1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > -1.0 {
            Ok(Order(value))
        } else {
            Err(Error::domain("Order::new", format!("order {value} must be > -1")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Order::new(value)
    }
}

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

// B_{2j} / (2j (2j-1)) for j = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", format!("argument {x} must be positive and finite")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// [`ln_gamma`] without the domain check.
pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    const SHIFT_TO: f64 = 10.0;
    if x >= SHIFT_TO {
        return stirling(x);
    }
    // Γ(x) = Γ(x + n) / (x (x+1) ... (x+n-1))
    let mut prod = 1.0;
    let mut y = x;
    while y < SHIFT_TO {
        prod *= y;
        y += 1.0;
    }
    stirling(y) - prod.ln()
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + corr
}

/// Generalized Laguerre polynomial `L_k^α(x)` by upward three-term recurrence.
pub fn laguerre_poly(k: usize, alpha: f64, x: f64) -> Result<f64> {
    Order::new(alpha)?;
    if !(x >= 0.0) {
        return Err(Error::domain("laguerre_poly", format!("argument {x} must be non-negative")));
    }
    Ok(laguerre_unchecked(k, alpha, x))
}

pub(crate) fn laguerre_unchecked(k: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + alpha + 1.0 - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Argument above which the large-argument expansion replaces the power series.
pub fn bessel_switch_point(nu: f64) -> f64 {
    f64::max(17.0, 0.5 * nu * nu)
}

/// `I_ν(x)`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    let ln = ln_bessel_i_scaled(nu, x)?;
    if x == 0.0 {
        return Ok(ln.exp());
    }
    Ok((ln + x).exp())
}

/// `e^{−x} I_ν(x)`.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_i_scaled(nu, x)?.exp())
}

/// `ln(e^{−x} I_ν(x))`, finite for every x > 0 and ν > −1.
///
/// At x = 0 this is `−∞` for ν > 0, `0` for ν = 0 and `+∞` for ν < 0.
pub fn ln_bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    Order::new(nu)?;
    if !(x >= 0.0) {
        return Err(Error::domain("bessel_i", format!("argument {x} must be non-negative")));
    }
    Ok(ln_bessel_i_scaled_unchecked(nu, x))
}

pub(crate) fn ln_bessel_i_scaled_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return match nu.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => f64::NEG_INFINITY,
            Some(std::cmp::Ordering::Equal) => 0.0,
            _ => f64::INFINITY,
        };
    }
    if x < bessel_switch_point(nu) {
        ln_series_scaled(nu, x)
    } else {
        asymptotic_scaled(nu, x).ln()
    }
}

/// Power series `Σ (x/2)^{2k+ν} / (k! Γ(k+ν+1))`, summed outward from its
/// largest term so that no intermediate over- or underflows.
pub(crate) fn ln_series_scaled(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let disc = (nu * nu + 4.0 * q).sqrt();
    let peak = ((disc - nu - 2.0) / 2.0).max(0.0).round() as usize;
    let kf = peak as f64;
    let ln_peak = (2.0 * kf + nu) * (0.5 * x).ln()
        - ln_gamma_unchecked(kf + 1.0)
        - ln_gamma_unchecked(kf + nu + 1.0);

    let mut acc = Compensated::new();
    acc.add(1.0);
    // forward: t_{k+1}/t_k = q / ((k+1)(k+ν+1))
    let mut t = 1.0;
    let mut k = kf;
    loop {
        t *= q / ((k + 1.0) * (k + nu + 1.0));
        k += 1.0;
        acc.add(t);
        if t < 1e-18 * acc.value() {
            break;
        }
    }
    // backward: t_{k-1}/t_k = k (k+ν) / q
    let mut t = 1.0;
    let mut k = kf;
    while k > 0.0 {
        t *= k * (k + nu) / q;
        k -= 1.0;
        acc.add(t);
        if t < 1e-18 * acc.value() {
            break;
        }
    }
    ln_peak + acc.value().ln() - x
}

/// Large-argument expansion of `e^{−x} I_ν(x)`:
/// `(2πx)^{−1/2} Σ (−1)^k a_k(ν) / x^k`, truncated at its smallest term.
pub(crate) fn asymptotic_scaled(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut acc = Compensated::new();
    let mut term = 1.0;
    acc.add(term);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * kf * x);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        acc.add(term);
        last = term.abs();
        if last < 1e-17 * acc.value().abs() {
            break;
        }
    }
    acc.value() / (2.0 * PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // 50-digit reference values (mpmath loggamma / besseli).
    const LN_GAMMA_REF: [(f64, f64); 7] = [
        (0.5, 0.572_364_942_924_700_087_071_713_675_676_5),
        (0.7, 0.260_867_246_531_666_514_385_732_417_016_8),
        (3.3, 0.987_098_577_894_734_587_878_679_288_615_1),
        (10.3, 13.482_036_786_138_356_970_615_073_432_570),
        (25.5, 56.389_167_643_719_946_744_452_438_703_589),
        (1234.5, 7550.550_901_077_894_895_729_835_567_737_7),
        (1e6, 12_815_504.569_147_611_659_976_971_785_017),
    ];

    const BESSEL_SCALED_REF: [(f64, f64, f64); 12] = [
        (0.0, 0.1, 0.907_100_925_782_301_096_435_726_349_406_2),
        (0.0, 1.0, 0.465_759_607_593_640_436_501_901_529_563_2),
        (0.0, 12.0, 0.116_426_221_213_440_442_978_519_834_836_0),
        (0.0, 20.0, 0.089_780_311_884_826_021_595_944_653_669_71),
        (1.0, 5.0, 0.163_972_266_944_542_356_926_122_903_857_5),
        (2.5, 30.0, 0.065_795_694_375_656_317_359_390_560_690_20),
        (-0.5, 2.0, 0.287_261_538_112_401_156_938_306_961_107_0),
        (-0.3, 0.7, 0.619_266_642_184_730_954_748_646_794_214_5),
        (0.3, 17.0, 0.097_228_471_709_978_264_943_163_305_742_94),
        (5.0, 60.0, 0.041_836_552_458_975_642_320_438_733_455_20),
        (0.7, 200.0, 0.028_192_516_073_306_760_492_760_231_928_50),
        (10.0, 45.0, 0.019_479_268_494_118_107_497_483_594_303_11),
    ];

    #[test]
    fn ln_gamma_reference_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-14);
        for (x, want) in LN_GAMMA_REF {
            assert_relative_eq!(ln_gamma(x).unwrap(), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-2.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn laguerre_seeds_and_quadratic() {
        assert_eq!(laguerre_poly(0, 0.3, 2.0).unwrap(), 1.0);
        assert_relative_eq!(laguerre_poly(1, 0.3, 2.0).unwrap(), 1.0 + 0.3 - 2.0);
        // (α+1)(α+2)/2 − (α+2)x + x²/2 at α = 0.7, x = 1.5
        assert_relative_eq!(laguerre_poly(2, 0.7, 1.5).unwrap(), -0.63, max_relative = 1e-14);
        assert!(laguerre_poly(2, -1.0, 1.0).is_err());
        assert!(laguerre_poly(2, 0.0, -1.0).is_err());
    }

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.5, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(-0.5, 0.0).unwrap(), f64::INFINITY);
        assert!(bessel_i(0.0, -1.0).is_err());
        assert!(bessel_i(-1.0, 1.0).is_err());
    }

    #[test]
    fn bessel_half_integer_closed_form() {
        let want = (2.0 / PI).sqrt() * 1f64.sinh();
        assert_relative_eq!(bessel_i(0.5, 1.0).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 0.937_674_888_245_487_6, max_relative = 1e-15);
        for x in [0.01, 0.3, 2.0, 7.5, 16.0, 40.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.cosh();
            assert_relative_eq!(bessel_i(-0.5, x).unwrap(), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn bessel_scaled_large_argument() {
        // mpmath: e^{-1000} I_0(1000)
        let got = bessel_i_scaled(0.0, 1000.0).unwrap();
        assert_relative_eq!(got, 0.012_617_240_455_891_256_585_716, max_relative = 1e-14);
        let x = 1000.0;
        let series = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / (2.0 * PI * x).sqrt();
        assert_relative_eq!(got, series, max_relative = 1e-9);
    }

    #[test]
    fn bessel_scaled_reference_values() {
        for (nu, x, want) in BESSEL_SCALED_REF {
            let got = bessel_i_scaled(nu, x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn bessel_branches_agree_in_overlap() {
        for nu in [-0.5, -0.3, 0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 3.5, 5.0, 7.0] {
            let s = bessel_switch_point(nu);
            for i in 0..=20 {
                let x = s + 0.25 * i as f64;
                let a = ln_series_scaled(nu, x).exp();
                let b = asymptotic_scaled(nu, x);
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn bessel_recurrence_grid() {
        for i in 0..=45 {
            let nu = 0.5 + 0.1 * i as f64;
            for j in 0..=60 {
                let x = 0.1 * (500.0f64).powf(j as f64 / 60.0);
                let lo = bessel_i_scaled(nu - 1.0, x).unwrap();
                let hi = bessel_i_scaled(nu + 1.0, x).unwrap();
                let mid = bessel_i_scaled(nu, x).unwrap();
                let lhs = lo - hi;
                let rhs = 2.0 * nu / x * mid;
                assert!(((lhs - rhs) / rhs).abs() < 1e-10, "nu={nu} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    /// Explicit sum Σ_j (−1)^j C(k+α, k−j) x^j / j! and the sum of |terms|.
    fn laguerre_explicit(k: usize, a: f64, x: f64) -> (f64, f64) {
        let mut total = 0.0;
        let mut magnitude = 0.0;
        for j in 0..=k {
            let mut binom = 1.0;
            for i in 0..(k - j) {
                binom *= (a + (j + 1 + i) as f64) / (i + 1) as f64;
            }
            let mut pow = 1.0;
            let mut fact = 1.0;
            for i in 0..j {
                pow *= x;
                fact *= (i + 1) as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * binom * pow / fact;
            magnitude += (binom * pow / fact).abs();
        }
        (total, magnitude)
    }

    proptest! {
        #[test]
        fn ln_gamma_functional_equation(x in 0.5f64..1e5) {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
        }

        #[test]
        fn laguerre_matches_explicit_expansion(k in 0usize..=6, a in -0.9f64..5.0, x in 0.0f64..8.0) {
            let got = laguerre_poly(k, a, x).unwrap();
            let (want, magnitude) = laguerre_explicit(k, a, x);
            // relative to the size of the expansion terms, which bounds cancellation
            prop_assert!((got - want).abs() <= 1e-12 * magnitude.max(1.0), "k={} a={} x={} got={} want={}", k, a, x, got, want);
        }
    }
}
