//! Fit the four-regime envelope constant and look at sup-norm decay.
//!
//! ```bash
//! cargo run --release --example envelope_bounds
//! ```

use hardylab::bases::{sup_norm_sweep, EnvelopeFit};

fn main() -> hardylab::error::Result<()> {
    for alpha in [-0.5, 0.0, 1.0] {
        let fit = EnvelopeFit::fit(alpha, 200)?;
        println!(
            "alpha {alpha:>5}: gamma {:.4}  C {:.4}  (main {:.3}, decay {:.3})",
            fit.gamma_decay, fit.constant, fit.main_ratio, fit.decay_ratio
        );
    }

    println!("\nsup |phi_k^0| against (k+1)^(-1/12) and, on (0,1), (k+1)^(-1/4)");
    let sweep = sup_norm_sweep(512, 0.0)?;
    for s in sweep.iter().filter(|s| s.k.is_power_of_two()) {
        println!("k {:>4}: halfline {:.4} (ratio {:.3})  unit {:.4} (ratio {:.3})", s.k, s.sup_halfline, s.ratio_halfline, s.sup_unit, s.ratio_unit);
    }
    Ok(())
}
