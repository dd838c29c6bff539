//! Hardy sums for rough L¹ functions in the classical Hermite system at
//! exponent 3/4 + 0.1, with the fitted tail.
//!
//! ```bash
//! cargo run --release --example hardy_sums
//! ```

use hardylab::cli::Sample;
use hardylab::func::FuncNd;
use hardylab::hardy::{hardy_sum, Basis};
use hardylab::quadrature::QuadSpec;

fn main() -> hardylab::error::Result<()> {
    for s in [Sample::Step, Sample::OddCusp, Sample::InvSqrt] {
        let f: FuncNd = s.func().into();
        let r = hardy_sum(&f, &Basis::Hermite(vec![0.0]), 0.85, 1 << 14, &QuadSpec::default())?;
        let tail = r.tail_estimate.value.unwrap_or(f64::INFINITY);
        println!(
            "{s:?}: sum {:.6}  tail {:.2e} ({:.2}%)  coefficient decay {:.3}",
            r.sum,
            tail,
            100.0 * tail / r.sum,
            r.tail_estimate.decay.unwrap_or(f64::NAN)
        );
        for p in r.partial_sums.iter().filter(|p| p.n >= 1024 && p.n.is_power_of_two()) {
            println!("   N {:>6}: {:.6}", p.n, p.sum);
        }
    }
    Ok(())
}
