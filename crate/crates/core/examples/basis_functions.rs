//! Evaluate φ_k^α by the normalized recurrence, compare with the explicit
//! Laguerre formula, and build generalized Hermite functions from them.
//!
//! ```bash
//! cargo run --release --example basis_functions
//! ```

use hardylab::bases::{gen_hermite_1d, phi, phi_definitional, phi_derivative, PhiRecurrence};

fn main() -> hardylab::error::Result<()> {
    let alpha = 0.3;
    println!("{:>4} {:>8} {:>22} {:>22}", "k", "u", "recurrence", "explicit");
    for k in [0, 1, 5, 20] {
        for u in [0.2, 1.0, 3.0] {
            println!("{k:>4} {u:>8} {:>22.15e} {:>22.15e}", phi(k, alpha, u)?, phi_definitional(k, alpha, u)?);
        }
    }

    // large degrees stay finite where the Γ factors overflow
    let rec = PhiRecurrence::new(alpha, 10_000)?;
    println!("\nphi_10000(50)  = {:.6e}", rec.value(10_000, 50.0));
    println!("phi'_20(1.5)   = {:.6e}", phi_derivative(20, alpha, 1.5)?);

    println!("\ngeneralized Hermite, lambda = 0.7");
    for n in 0..6 {
        println!("h_{n}(-0.8) = {:+.12e}   h_{n}(0.8) = {:+.12e}", gen_hermite_1d(n, 0.7, -0.8)?, gen_hermite_1d(n, 0.7, 0.8)?);
    }
    Ok(())
}
