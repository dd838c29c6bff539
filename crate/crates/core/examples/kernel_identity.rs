//! The Bessel closed form of R_r against its truncated series, and the
//! reproducing property ∫ R_r(u, v) φ_k(v) dv = r^k φ_k(u).
//!
//! ```bash
//! cargo run --release --example kernel_identity
//! ```

use hardylab::bases::phi;
use hardylab::kernels::{kernel_closed, kernel_quad_spec, kernel_series, mehler_check, reproduce, series_order_for, KernelParams};

fn main() -> hardylab::error::Result<()> {
    let p = KernelParams::scalar(0.0, 0.6)?;
    let (u, v) = (0.8, 1.3);
    let n = series_order_for(&p, u, v, 1e-12)?;
    let s = kernel_series(&p, u, v, n)?;
    println!("closed {:.15e}\nseries {:.15e} ({} terms, tail bound {:.1e})", kernel_closed(&p, u, v)?, s.value, s.terms, s.tail_bound);

    for alpha in [-0.5, 0.0, 1.0] {
        for r in [0.3, 0.6, 0.9] {
            let m = mehler_check(alpha, r, 20, 1e-10)?;
            println!("alpha {alpha:>4} r {r}: max diff {:.2e} (up to {} terms)", m.max_abs_diff, m.max_terms);
        }
    }

    let spec = kernel_quad_spec();
    let p = KernelParams::scalar(0.5, 0.7)?;
    for k in [0, 3, 10, 20] {
        let q = reproduce(&p, 1.1, k, &spec)?;
        let want = 0.7f64.powi(k as i32) * phi(k, 0.5, 1.1)?;
        println!("k {k:>2}: integral {:+.12e}  r^k phi_k {:+.12e}", q.value, want);
    }
    Ok(())
}
