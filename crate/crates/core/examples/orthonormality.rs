//! Gram matrix of φ_0^α..φ_128^α.
//!
//! ```bash
//! cargo run --release --example orthonormality
//! ```

use hardylab::quadrature::{gram_matrix, QuadSpec};

fn main() -> hardylab::error::Result<()> {
    let spec = QuadSpec::with_tol(1e-13, 1e-12);
    for alpha in [-0.5, -0.3, 0.0, 0.7, 2.0] {
        let g = gram_matrix(alpha, 128, &spec)?;
        println!("alpha {alpha:>5}: max |G - I| = {:.2e} at {:?} ({} panels)", g.max_defect, g.arg_max, g.panels);
    }
    Ok(())
}
