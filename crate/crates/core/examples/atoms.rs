//! The counterexample atom, its tensor product and η-symmetric extensions,
//! with the cancellation and size checks.
//!
//! ```bash
//! cargo run --release --example atoms
//! ```

use hardylab::bases::{Alpha, ParityVector};
use hardylab::hardy::{bound_constants, default_delta, make_counterexample_atom, tensor_atom, validate_atom, AtomParams};

fn main() -> hardylab::error::Result<()> {
    let bc = bound_constants(0.0, 1024)?;
    let delta = default_delta(&bc)?;
    println!("A {:.4}  B {:.4}  c {:.4}  default delta {delta}", bc.a, bc.b, bc.c);

    let a = make_counterexample_atom(&AtomParams::new(1024, delta, bc.c, Alpha::scalar(0.0)?)?)?;
    for p in &a.pieces {
        println!("({:.5}, {:.5}) -> {:+.4}", p.lower[0], p.upper[0], p.value);
    }
    println!("valid: {}", validate_atom(&a).passed());
    println!("doubled: {}", validate_atom(&a.scaled(2.0)).passed());

    let t = tensor_atom(&AtomParams::new(64, 0.2, 0.6, Alpha::uniform(0.0, 2)?)?)?;
    println!("\n2-d atom: {} boxes, normalization {:.4}, valid {}", t.pieces.len(), t.normalization, validate_atom(&t).passed());
    for eta in ParityVector::all(2) {
        let e = t.extension(&eta)?;
        let r = validate_atom(&e);
        println!("extension eta {:?}: {} boxes, whole ok {}, orthants ok {}", eta.coords(), e.pieces.len(), r.whole.cancellation && r.whole.size, r.passed());
    }
    Ok(())
}
