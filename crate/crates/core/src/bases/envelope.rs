//! Four-regime pointwise majorant of `|φ_k^α|` and empirical sup norms.

use rayon::prelude::*;
use serde::Serialize;

use super::{basis_radius, turning_scale, PhiRecurrence};
use crate::error::{Error, Result};

/// Parameters of the majorant for one degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeParams {
    /// `ν = max(4k + 2α + 2, 2)`
    pub nu: f64,
    /// Gaussian rate γ of the outermost regime.
    pub gamma_decay: f64,
}

impl EnvelopeParams {
    pub fn new(k: usize, alpha: f64, gamma_decay: f64) -> Self {
        EnvelopeParams {
            nu: turning_scale(k, alpha),
            gamma_decay,
        }
    }

    /// Regime boundaries `1/√ν`, `√(ν/2)`, `√(3ν/2)`.
    pub fn breakpoints(&self) -> [f64; 3] {
        let nu = self.nu;
        [1.0 / nu.sqrt(), (nu / 2.0).sqrt(), (1.5 * nu).sqrt()]
    }
}

/// The majorant
///
/// ```text
/// u^{α+1/2} ν^{α/2}                     0 < u ≤ 1/√ν
/// ν^{−1/4}                              1/√ν < u ≤ √(ν/2)
/// u^{1/2} (ν(ν^{1/3} + |u²−ν|))^{−1/4}  √(ν/2) < u ≤ √(3ν/2)
/// u^{1/2} exp(−γ u²)                    √(3ν/2) < u
/// ```
pub fn envelope(params: &EnvelopeParams, alpha: f64, u: f64) -> f64 {
    let nu = params.nu;
    let [b1, b2, b3] = params.breakpoints();
    if u <= b1 {
        u.powf(alpha + 0.5) * nu.powf(alpha / 2.0)
    } else if u <= b2 {
        nu.powf(-0.25)
    } else if u <= b3 {
        u.sqrt() * (nu * (nu.cbrt() + (u * u - nu).abs())).powf(-0.25)
    } else {
        u.sqrt() * (-params.gamma_decay * u * u).exp()
    }
}

fn regime(params: &EnvelopeParams, u: f64) -> usize {
    let [b1, b2, b3] = params.breakpoints();
    if u <= b1 {
        0
    } else if u <= b2 {
        1
    } else if u <= b3 {
        2
    } else {
        3
    }
}

/// Fitted γ and implied constant `C_α` with `|φ_k^α(u)| ≤ C_α · envelope(k, α, u)`
/// over every `k ≤ k_max` on the fitting grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub alpha: f64,
    pub k_max: usize,
    pub gamma_decay: f64,
    /// Max ratio over the first three regimes.
    pub main_ratio: f64,
    /// Max ratio over the Gaussian regime at the chosen γ.
    pub decay_ratio: f64,
    /// Frozen constant: 1.1 × the larger of the two ratios.
    pub constant: f64,
}

const GAMMA_START: f64 = 0.5;
const GAMMA_STEP: f64 = 0.9;
const GAMMA_CANDIDATES: usize = 61;
const FIT_MARGIN: f64 = 1.1;

fn gamma_candidate(j: usize) -> f64 {
    GAMMA_START * GAMMA_STEP.powi(j as i32)
}

/// Log-spaced points near zero followed by a uniform grid out to the basis radius.
pub(crate) fn scan_grid(k_max: usize, alpha: f64, step: f64, u_min: f64) -> Vec<f64> {
    let radius = basis_radius(k_max, alpha);
    let mut grid = Vec::new();
    let n_log = 200;
    let (lo, hi) = (u_min.ln(), step.ln());
    for i in 0..n_log {
        grid.push((lo + (hi - lo) * i as f64 / n_log as f64).exp());
    }
    let n_lin = (radius / step).ceil() as usize;
    for i in 1..=n_lin {
        grid.push(step * i as f64);
    }
    grid
}

impl EnvelopeFit {
    /// γ is the largest value in `0.5 · 0.9^j` for which the Gaussian regime
    /// does not raise the constant set by the other three regimes.
    pub fn fit(alpha: f64, k_max: usize) -> Result<Self> {
        let rec = PhiRecurrence::new(alpha, k_max)?;
        let step = f64::min(0.01, 0.25 / turning_scale(k_max, alpha).sqrt());
        let grid = scan_grid(k_max, alpha, step, 1e-4);

        // per-point: (max main ratio, per-γ max decay ratio in log form)
        let partials: Vec<(f64, Vec<f64>)> = grid
            .par_chunks(256)
            .map(|chunk| {
                let mut main: f64 = 0.0;
                let mut decay = vec![f64::NEG_INFINITY; GAMMA_CANDIDATES];
                for &u in chunk {
                    let half_ln_u = 0.5 * u.ln();
                    let u2 = u * u;
                    rec.for_each(u, |k, v| {
                        let p = EnvelopeParams::new(k, alpha, 0.0);
                        let a = v.abs();
                        if regime(&p, u) < 3 {
                            main = main.max(a / envelope(&p, alpha, u));
                        } else if a > 0.0 {
                            let base = a.ln() - half_ln_u;
                            for (j, d) in decay.iter_mut().enumerate() {
                                *d = d.max(base + gamma_candidate(j) * u2);
                            }
                        }
                    });
                }
                (main, decay)
            })
            .collect();

        let main_ratio = partials.iter().map(|p| p.0).fold(0.0, f64::max);
        let mut decay = vec![f64::NEG_INFINITY; GAMMA_CANDIDATES];
        for (_, d) in &partials {
            for (acc, v) in decay.iter_mut().zip(d) {
                *acc = acc.max(*v);
            }
        }
        if !(main_ratio > 0.0) || !main_ratio.is_finite() {
            return Err(Error::fit("EnvelopeFit::fit", format!("degenerate main ratio {main_ratio}")));
        }
        let chosen = (0..GAMMA_CANDIDATES)
            .find(|&j| decay[j].exp() <= main_ratio)
            .unwrap_or(GAMMA_CANDIDATES - 1);
        let gamma_decay = gamma_candidate(chosen);
        let decay_ratio = decay[chosen].exp();
        Ok(EnvelopeFit {
            alpha,
            k_max,
            gamma_decay,
            main_ratio,
            decay_ratio,
            constant: FIT_MARGIN * main_ratio.max(decay_ratio),
        })
    }

    pub fn params(&self, k: usize) -> EnvelopeParams {
        EnvelopeParams::new(k, self.alpha, self.gamma_decay)
    }

    pub fn envelope(&self, k: usize, u: f64) -> f64 {
        envelope(&self.params(k), self.alpha, u)
    }

    /// `C_α · envelope(k, α, u)`.
    pub fn bound(&self, k: usize, u: f64) -> f64 {
        self.constant * self.envelope(k, u)
    }
}

/// Empirical sup norms of `φ_k^α` over `(0, ∞)` and `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorms {
    pub k: usize,
    pub sup_halfline: f64,
    pub sup_unit: f64,
    /// `sup_halfline / (k+1)^{−1/12}`
    pub ratio_halfline: f64,
    /// `sup_unit / (k+1)^{−1/4}`
    pub ratio_unit: f64,
}

/// Sup norms for every `k ≤ k_max`, by a dense grid scan shared across degrees.
pub fn sup_norm_sweep(k_max: usize, alpha: f64) -> Result<Vec<SupNorms>> {
    if alpha < -0.5 {
        return Err(Error::domain("sup_norm_bounds", format!("alpha {alpha} must be >= -1/2")));
    }
    let rec = PhiRecurrence::new(alpha, k_max)?;
    let step = f64::min(0.002, 0.05 / turning_scale(k_max, alpha).sqrt());
    let grid = scan_grid(k_max, alpha, step, 1e-8);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = grid
        .par_chunks(512)
        .map(|chunk| {
            let mut all = vec![0.0f64; k_max + 1];
            let mut unit = vec![0.0f64; k_max + 1];
            for &u in chunk {
                rec.for_each(u, |k, v| {
                    let a = v.abs();
                    all[k] = all[k].max(a);
                    if u < 1.0 {
                        unit[k] = unit[k].max(a);
                    }
                });
            }
            (all, unit)
        })
        .collect();
    let mut all = vec![0.0f64; k_max + 1];
    let mut unit = vec![0.0f64; k_max + 1];
    for (a, u) in &partials {
        for k in 0..=k_max {
            all[k] = all[k].max(a[k]);
            unit[k] = unit[k].max(u[k]);
        }
    }
    Ok((0..=k_max)
        .map(|k| {
            let kp = (k + 1) as f64;
            SupNorms {
                k,
                sup_halfline: all[k],
                sup_unit: unit[k],
                ratio_halfline: all[k] * kp.powf(1.0 / 12.0),
                ratio_unit: unit[k] * kp.powf(0.25),
            }
        })
        .collect())
}

/// Sup norms for a single degree.
pub fn sup_norm_bounds(k: usize, alpha: f64) -> Result<SupNorms> {
    Ok(sup_norm_sweep(k, alpha)?[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::phi;

    #[test]
    fn middle_regime_is_flat() {
        let p = EnvelopeParams::new(10, -0.5, 0.1);
        let [b1, b2, _] = p.breakpoints();
        for i in 1..20 {
            let u = b1 + (b2 - b1) * i as f64 / 20.0;
            assert_eq!(envelope(&p, -0.5, u), p.nu.powf(-0.25));
        }
    }

    #[test]
    fn breakpoint_jumps_bounded() {
        // jump factor right/left at each breakpoint; the first two are two-sided,
        // the Gaussian regime may only drop
        for &alpha in &[-0.5, 0.0, 0.7, 2.0] {
            for k in 0..=200 {
                let p = EnvelopeParams::new(k, alpha, 0.06);
                for (i, b) in p.breakpoints().into_iter().enumerate() {
                    let left = envelope(&p, alpha, b);
                    let right = envelope(&p, alpha, b * (1.0 + 1e-12));
                    let jump = right / left;
                    if i < 2 {
                        assert!((0.1..=10.0).contains(&jump), "alpha={alpha} k={k} i={i} jump={jump}");
                    } else {
                        assert!(jump <= 10.0, "alpha={alpha} k={k} jump={jump}");
                    }
                }
            }
        }
    }

    #[test]
    fn fitted_envelope_dominates_on_independent_grid() {
        for &alpha in &[-0.5, 0.0, 0.7] {
            let fit = EnvelopeFit::fit(alpha, 200).unwrap();
            assert!(fit.gamma_decay > 0.0 && fit.gamma_decay <= 0.5);
            // a grid offset from the fitting grid
            for k in (0..=200).step_by(7) {
                for i in 0..3000 {
                    let u = 1.3e-4 + 0.016_37 * i as f64;
                    let v = phi(k, alpha, u).unwrap().abs();
                    assert!(v <= fit.bound(k, u), "alpha={alpha} k={k} u={u}: {v} > {}", fit.bound(k, u));
                }
            }
        }
    }

    #[test]
    fn sup_norm_degree_zero() {
        let s = sup_norm_bounds(0, 0.0).unwrap();
        assert!(s.sup_halfline > 0.0 && s.sup_halfline.is_finite());
        assert!(s.sup_unit > 0.0 && s.sup_unit <= s.sup_halfline);
        assert!(sup_norm_bounds(3, -0.7).is_err());
    }
}
