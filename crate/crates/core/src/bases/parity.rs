//! Parity decomposition `f = Σ_η f_η` and the index map `n ↦ n mod 2`.

use serde::Serialize;

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::func::{Func, FuncNd};

/// A sign vector `ε ∈ {−1, +1}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignVector(Vec<i8>);

/// A parity vector `η ∈ {0, 1}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ParityVector(Vec<u8>);

impl SignVector {
    pub fn new(coords: Vec<i8>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|&c| c != 1 && c != -1) {
            return Err(Error::domain("SignVector::new", format!("{coords:?} is not in {{-1,1}}^d")));
        }
        Ok(SignVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i8] {
        &self.0
    }

    /// `ε^η = Π ε_i^{η_i}`.
    pub fn pow(&self, eta: &ParityVector) -> f64 {
        let neg = self.0.iter().zip(&eta.0).filter(|(&e, &h)| e < 0 && h == 1).count();
        if neg % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `εx`, coordinatewise.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for ((o, &xi), &e) in out.iter_mut().zip(x).zip(&self.0) {
            *o = if e < 0 { -xi } else { xi };
        }
    }
}

impl ParityVector {
    pub fn new(coords: Vec<u8>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|&c| c > 1) {
            return Err(Error::domain("ParityVector::new", format!("{coords:?} is not in {{0,1}}^d")));
        }
        Ok(ParityVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u8] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// All `2^d` parity vectors, `η = 0` first.
    pub fn all(d: usize) -> Vec<ParityVector> {
        (0..1usize << d)
            .map(|m| ParityVector((0..d).map(|i| ((m >> i) & 1) as u8).collect()))
            .collect()
    }
}

/// All `2^d` sign vectors.
pub fn sign_vectors(d: usize) -> Vec<SignVector> {
    (0..1usize << d)
        .map(|m| SignVector((0..d).map(|i| if (m >> i) & 1 == 1 { -1 } else { 1 }).collect()))
        .collect()
}

/// `𝔪(n)_i = n_i mod 2`.
pub fn parity_index(n: &MultiIndex) -> ParityVector {
    ParityVector(n.coords().iter().map(|&c| (c % 2) as u8).collect())
}

/// `λ_η`: `λ_i − 1/2` where `η_i = 0`, `λ_i + 1/2` where `η_i = 1`.
pub fn shifted_order(lambda: &[f64], eta: &ParityVector) -> Result<Vec<f64>> {
    if lambda.len() != eta.dim() {
        return Err(Error::Dimension { op: "shifted_order", expected: eta.dim(), got: lambda.len() });
    }
    if let Some(l) = lambda.iter().find(|&&l| !(l >= 0.0)) {
        return Err(Error::domain("shifted_order", format!("lambda {l} must be >= 0")));
    }
    Ok(lambda
        .iter()
        .zip(&eta.0)
        .map(|(&l, &h)| if h == 0 { l - 0.5 } else { l + 0.5 })
        .collect())
}

/// Even (`odd = false`) or odd part `(f(x) ± f(−x))/2` of a one-variable function.
pub fn parity_component_1d(f: &Func, odd: bool) -> Func {
    let g = f.clone();
    let mut bps: Vec<f64> = f.breakpoints().iter().flat_map(|&b| [b, -b]).collect();
    bps.push(0.0);
    let s = if odd { -1.0 } else { 1.0 };
    Func::new(move |x| 0.5 * (g.eval(x) + s * g.eval(-x)), f.decay()).with_breakpoints(bps)
}

/// `f_η(x) = 2^{−d} Σ_ε ε^η f(εx)`. Tensor products are split factor by factor.
pub fn parity_component(f: &FuncNd, eta: &ParityVector) -> Result<FuncNd> {
    let d = f.dim();
    if eta.dim() != d {
        return Err(Error::Dimension { op: "parity_component", expected: d, got: eta.dim() });
    }
    if let Some(fs) = f.factors() {
        let parts = fs.iter().zip(&eta.0).map(|(fi, &h)| parity_component_1d(fi, h == 1)).collect();
        return Ok(FuncNd::separable(parts));
    }
    let g = f.clone();
    let signs: Vec<(SignVector, f64)> = sign_vectors(d).into_iter().map(|e| {
        let w = e.pow(eta);
        (e, w)
    }).collect();
    let scale = (-(d as f64)).exp2();
    let mut bps: Vec<f64> = f.breakpoints().iter().flat_map(|&b| [b, -b]).collect();
    bps.push(0.0);
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    Ok(FuncNd::new(
        d,
        move |x: &[f64]| {
            let mut y = x.to_vec();
            let mut acc = 0.0;
            for (e, w) in &signs {
                e.apply(x, &mut y);
                acc += w * g.eval(&y);
            }
            scale * acc
        },
        f.decay(),
        bps,
    ))
}
