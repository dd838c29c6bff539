//! Split a function on ℝ^d into η-symmetric parts and check the coefficient
//! identity ⟨f, h_{2k+η}^λ⟩ = (−1)^k √2 ⟨f_η^+, φ_k^{λ_η}⟩_+.
//!
//! ```bash
//! cargo run --release --example parity_decomposition
//! ```

use hardylab::bases::{parity_component, ParityVector};
use hardylab::func::{Decay, Func, FuncNd};
use hardylab::hardy::parity_coefficient_check;
use hardylab::quadrature::QuadSpec;

fn main() -> hardylab::error::Result<()> {
    let f = FuncNd::new(2, |x: &[f64]| (x[0] - 0.3 * x[1]).exp() * (-x[0] * x[0] - x[1] * x[1]).exp(), Decay::Gaussian(0.5), vec![]);
    let x = [0.4, -1.1];
    let mut total = 0.0;
    for eta in ParityVector::all(2) {
        let v = parity_component(&f, &eta)?.eval(&x);
        println!("f_{:?}(x) = {v:+.15e}", eta.coords());
        total += v;
    }
    println!("sum       = {total:+.15e}\nf(x)      = {:+.15e}", f.eval(&x));

    let g = Func::new(|u: f64| (1.0 + u) * (-u.abs()).exp(), Decay::Exponential(1.0)).with_breakpoints(vec![0.0]);
    let r = parity_coefficient_check(&g, 0.0, 60, &QuadSpec::default())?;
    println!("\nmax |<g,h_n> - reduced| over n <= 60: {:.2e}", r.max_defect);
    Ok(())
}
