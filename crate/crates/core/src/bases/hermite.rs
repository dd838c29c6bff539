//! Generalized Hermite functions `h_n^λ`, λ ≥ 0, built from `φ_k^{λ∓1/2}`.

use super::{phi_extended, MultiIndex, PhiRecurrence};
use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn sign_of_half(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("lambda {lambda} must be >= 0")))
    }
}

/// One-dimensional `h_n^λ(u)`:
/// `h_{2k} = (−1)^k 2^{−1/2} φ_k^{λ−1/2}(|u|)`,
/// `h_{2k+1} = (−1)^k 2^{−1/2} sgn(u) φ_k^{λ+1/2}(|u|)`.
pub fn gen_hermite_1d(n: usize, lambda: f64, u: f64) -> Result<f64> {
    check_lambda("gen_hermite", lambda)?;
    if !u.is_finite() {
        return Err(Error::domain("gen_hermite", "argument must be finite"));
    }
    let k = n / 2;
    let s = sign_of_half(k) * FRAC_1_SQRT_2;
    if n % 2 == 0 {
        Ok(s * phi_extended(k, lambda - 0.5, u.abs())?)
    } else if u == 0.0 {
        Ok(0.0)
    } else {
        Ok(s * u.signum() * phi_extended(k, lambda + 0.5, u.abs())?)
    }
}

/// Tensor product `h_n^λ(x) = Π_i h_{n_i}^{λ_i}(x_i)`.
pub fn gen_hermite(n: &MultiIndex, lambda: &[f64], x: &[f64]) -> Result<f64> {
    let d = n.dim();
    if lambda.len() != d {
        return Err(Error::Dimension { op: "gen_hermite", expected: d, got: lambda.len() });
    }
    if x.len() != d {
        return Err(Error::Dimension { op: "gen_hermite", expected: d, got: x.len() });
    }
    let mut prod = 1.0;
    for ((&ni, &li), &xi) in n.coords().iter().zip(lambda).zip(x) {
        prod *= gen_hermite_1d(ni, li, xi)?;
    }
    Ok(prod)
}

/// All `h_n^λ(u)`, `n ≤ n_max`, at one point, via two φ recurrences.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    lambda: f64,
    n_max: usize,
    even: PhiRecurrence,
    odd: PhiRecurrence,
}

impl HermiteTable {
    pub fn new(lambda: f64, n_max: usize) -> Result<Self> {
        check_lambda("HermiteTable::new", lambda)?;
        let k_max = n_max / 2;
        Ok(HermiteTable {
            lambda,
            n_max,
            even: PhiRecurrence::new(lambda - 0.5, k_max)?,
            odd: PhiRecurrence::new(lambda + 0.5, k_max)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `out[n] = h_n^λ(u)` for `n ≤ n_max`; `out.len()` must be `n_max + 1`.
    pub fn fill(&self, u: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.n_max + 1, "buffer length must be n_max + 1");
        let a = u.abs();
        let n_max = self.n_max;
        self.even.for_each(a, |k, v| {
            let n = 2 * k;
            if n <= n_max {
                out[n] = sign_of_half(k) * FRAC_1_SQRT_2 * v;
            }
        });
        let sgn = if u > 0.0 {
            1.0
        } else if u < 0.0 {
            -1.0
        } else {
            0.0
        };
        self.odd.for_each(a, |k, v| {
            let n = 2 * k + 1;
            if n <= n_max {
                out[n] = sign_of_half(k) * FRAC_1_SQRT_2 * sgn * v;
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn classical_low_orders() {
        for &u in &[-2.0f64, -0.4, 0.0, 0.3, 1.7] {
            let e = (-u * u / 2.0).exp();
            assert_relative_eq!(gen_hermite_1d(0, 0.0, u).unwrap(), PI.powf(-0.25) * e, max_relative = 1e-14);
            let h1 = 2f64.sqrt() * PI.powf(-0.25) * u * e;
            assert!((gen_hermite_1d(1, 0.0, u).unwrap() - h1).abs() < 1e-15);
        }
    }

    #[test]
    fn parity_of_generalized_hermite() {
        for &lambda in &[0.0, 0.4, 1.5] {
            for n in 0..12 {
                for &u in &[0.2, 1.1, 3.0] {
                    let p = gen_hermite_1d(n, lambda, u).unwrap();
                    let m = gen_hermite_1d(n, lambda, -u).unwrap();
                    if n % 2 == 0 {
                        assert_eq!(p, m);
                    } else {
                        assert_eq!(p, -m);
                    }
                }
            }
        }
        assert!(gen_hermite_1d(2, -0.1, 1.0).is_err());
    }

    #[test]
    fn table_matches_pointwise() {
        let t = HermiteTable::new(0.7, 25).unwrap();
        let mut out = vec![0.0; 26];
        for &u in &[-1.3, 0.0, 0.6, 2.2] {
            t.fill(u, &mut out);
            for (n, &v) in out.iter().enumerate() {
                let want = gen_hermite_1d(n, 0.7, u).unwrap();
                assert!((v - want).abs() <= 1e-13 * want.abs().max(1e-3), "n={n} u={u}");
            }
        }
    }

    #[test]
    fn tensor_product() {
        let n = MultiIndex::new(vec![2, 1]).unwrap();
        let got = gen_hermite(&n, &[0.0, 0.5], &[0.4, -0.9]).unwrap();
        let want = gen_hermite_1d(2, 0.0, 0.4).unwrap() * gen_hermite_1d(1, 0.5, -0.9).unwrap();
        assert_eq!(got, want);
        assert!(gen_hermite(&n, &[0.0], &[0.4, 0.1]).is_err());
    }
}
