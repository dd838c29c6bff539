//! Boundedness sweeps for the kernel smoothness estimate, the pointwise
//! difference estimate for φ_k, and the weighted kernel norm.
//!
//! ```bash
//! cargo run --release --example kernel_bounds
//! ```

use hardylab::kernels::{kernel_quad_spec, lemma33_sweep, lemma34_sweep, prop32_sweep, Lemma33Grid, Lemma34Grid, Prop32Grid};

fn main() -> hardylab::error::Result<()> {
    let spec = kernel_quad_spec();
    for alpha in [-0.3, 0.0, 0.3] {
        let reports = [
            prop32_sweep(alpha, &Prop32Grid::v1(), &spec)?,
            lemma33_sweep(alpha, &Lemma33Grid::v1())?,
            lemma34_sweep(alpha, &Lemma34Grid::v1(), &spec)?,
        ];
        for r in reports {
            println!(
                "{:?} alpha {alpha:>4}: max ratio {:.3}, slope vs {} {:+.4} (full range {:+.4}), bounded: {}",
                r.check,
                r.max_ratio,
                r.driver,
                r.slope.slope,
                r.slope_full.slope,
                r.bounded()
            );
        }
    }
    Ok(())
}
