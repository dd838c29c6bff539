//! Adaptive Gauss–Legendre on the half line with an endpoint singularity,
//! and the one-pass projection onto φ_0..φ_K.
//!
//! ```bash
//! cargo run --release --example quadrature
//! ```

use hardylab::func::{Decay, Func};
use hardylab::quadrature::{integrate_halfline, laguerre_coefficients, QuadSpec};

fn main() -> hardylab::error::Result<()> {
    let spec = QuadSpec::default();

    // ∫_0^∞ u^{-3/4} e^{-u} du = Γ(1/4)
    let g = Func::new(|u: f64| u.powf(-0.75) * (-u).exp(), Decay::Exponential(1.0));
    let q = integrate_halfline(&g, &spec)?;
    let exact = 3.625_609_908_221_908_3;
    println!("value {:.16}  error est {:.2e}  true error {:.2e}  panels {}", q.value, q.error, (q.value - exact).abs(), q.panels);

    let f = Func::new(|u: f64| if u < 2.0 { u } else { 0.0 }, Decay::Support(2.0)).with_breakpoints(vec![2.0]);
    let c = laguerre_coefficients(&f, 0.0, 64, &spec)?;
    println!("\n<f, phi_k^0> for f = u on (0, 2), max error estimate {:.1e}", c.max_error());
    for k in [0, 1, 2, 8, 32, 64] {
        println!("k {k:>3}: {:+.12e}", c.values[k]);
    }
    Ok(())
}
