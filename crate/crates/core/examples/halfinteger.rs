//! α = −1/2: the atom coefficients scale like K^{−1} k^{3/4}.
//!
//! ```bash
//! cargo run --release --example halfinteger
//! ```

use hardylab::hardy::halfinteger_ratios;
use hardylab::quadrature::QuadSpec;

fn main() -> hardylab::error::Result<()> {
    for k in [64, 256, 1024] {
        let r = halfinteger_ratios(k, None, &QuadSpec::default())?;
        println!("K {k:>5}: min ratio {:.5} at k = {}, all negative: {}", r.min_ratio, r.argmin, r.sign_definite);
    }
    Ok(())
}
