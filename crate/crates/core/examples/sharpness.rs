//! Atom sums at exponent 3/4 − ε grow like K^ε; at 3/4 they stay bounded.
//!
//! ```bash
//! cargo run --release --example sharpness
//! ```

use hardylab::bases::Alpha;
use hardylab::hardy::{geometric_grid, sharpness_experiment};

fn main() -> hardylab::error::Result<()> {
    let grid = geometric_grid(16, 4096, 2)?;
    let r = sharpness_experiment(&Alpha::scalar(0.0)?, 0.25, &grid, None)?;
    println!("delta {:?}, constants {:?}", r.delta, r.constants);
    println!("{:>6} {:>10} {:>10} {:>10}", "K", "E=1/2", "E=3/4", "min ratio");
    for row in &r.k_sweep {
        println!("{:>6} {:>10.5} {:>10.5} {:>10.5}", row.k_big, row.sum, row.control_sum, row.min_lower_ratio);
    }
    if let Some(s) = r.fitted_slope {
        println!("slope {:.4} ± {:.4} (epsilon 0.25)", s.slope, s.half_width);
    }
    if let Some(c) = r.control {
        println!("control spread over the upper half: {:.3}", c.spread);
    }
    Ok(())
}
