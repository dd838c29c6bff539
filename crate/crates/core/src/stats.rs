//! Least-squares line fits in log-log coordinates.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// `log y ≈ intercept + slope · log x`, with a two-sided 95% confidence
/// half-width on the slope (infinite with fewer than three points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub half_width: f64,
    pub points: usize,
}

/// Ordinary least squares on `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::Dimension { op: "fit_line", expected: n, got: y.len() });
    }
    if n < 2 {
        return Err(Error::fit("fit_line", format!("need at least 2 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::fit("fit_line", "non-finite data"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::fit("fit_line", "abscissae are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let half_width = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0)
            .map_err(|e| Error::fit("fit_line", e.to_string()))?
            .inverse_cdf(0.975);
        t * se
    } else {
        f64::INFINITY
    };
    Ok(SlopeFit {
        slope,
        intercept,
        half_width,
        points: n,
    })
}

/// Fit of `ln y` against `ln x`; all values must be positive.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::fit("fit_loglog", "log-log fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..=8).map(|i| 2f64.powi(i)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.25)).collect();
        let f = fit_loglog(&x, &y).unwrap();
        assert!((f.slope - 0.25).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.half_width < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0], &[1.0]).is_err());
        assert!(fit_line(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(fit_line(&[1.0, 2.0], &[1.0, 2.0]).unwrap().half_width.is_infinite());
    }
}
