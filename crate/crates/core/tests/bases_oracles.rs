use std::f64::consts::PI;

use approx::assert_relative_eq;
use hardylab::bases::{gen_hermite_1d, phi, phi_derivative, EnvelopeFit, HermiteTable, PhiRecurrence};
use proptest::prelude::*;

// 40-digit values of the explicit Laguerre formula (mpmath)
const PHI_REFERENCE: [(usize, f64, f64, f64); 6] = [
    (0, 0.0, 1.0, 0.85776388496070679648),
    (7, 0.3, 1.2, 0.27662207907999430941),
    (50, -0.5, 2.0, -0.30115975472753798521),
    (200, 1.5, 10.0, -0.062861963707352158766),
    (1000, 0.0, 0.05, -0.098113815484417500502),
    (3000, 2.0, 60.0, 0.015271494141699428022),
];

#[test]
fn phi_matches_high_precision_reference() {
    for &(k, a, u, want) in &PHI_REFERENCE {
        assert_relative_eq!(phi(k, a, u).unwrap(), want, max_relative = 1e-11);
    }
}

fn classical_hermite(n_max: usize, x: f64) -> Vec<f64> {
    let mut h = vec![0.0; n_max + 1];
    h[0] = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n_max >= 1 {
        h[1] = 2f64.sqrt() * x * h[0];
    }
    for n in 1..n_max {
        let nf = n as f64;
        h[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
    }
    h
}

#[test]
fn lambda_zero_is_classical_hermite() {
    let table = HermiteTable::new(0.0, 40).unwrap();
    let mut out = vec![0.0; 41];
    for i in 0..=120 {
        let x = -9.0 + 0.15 * i as f64;
        let want = classical_hermite(40, x);
        table.fill(x, &mut out);
        for n in 0..=40 {
            assert!((out[n] - want[n]).abs() <= 1e-10, "n={n} x={x}: {} vs {}", out[n], want[n]);
            assert!((gen_hermite_1d(n, 0.0, x).unwrap() - want[n]).abs() <= 1e-10);
        }
    }
}

#[test]
fn derivative_recurrence_against_finite_differences() {
    for &a in &[-0.5, 0.3, 1.5] {
        let rec = PhiRecurrence::new(a, 50).unwrap();
        for k in 0..=50 {
            for i in 0..=59 {
                let u = 0.1 + 0.1 * i as f64;
                let h = 1e-5 * u.max(0.1);
                let fd = (rec.value(k, u + h) - rec.value(k, u - h)) / (2.0 * h);
                let d = phi_derivative(k, a, u).unwrap();
                let scale = d.abs().max(1e-3);
                assert!((d - fd).abs() <= 1e-5 * scale, "alpha {a} k {k} u {u}: {d} vs {fd}");
            }
        }
    }
}

// fitted on k ≤ 200; regression values
const ENVELOPE_FITS: [(f64, f64, f64); 6] = [
    (-0.5, 0.06754258588364967, 1.6129433235928434),
    (-0.3, 0.06754258588364967, 1.6094561106844467),
    (0.0, 0.06754258588364967, 1.6074868725915823),
    (0.5, 0.06754258588364967, 1.5931753138849516),
    (1.0, 0.06754258588364967, 1.5882291295392772),
    (2.0, 0.06754258588364967, 1.7037817344308586),
];

#[test]
fn envelope_constants_are_frozen() {
    for &(a, gamma, c) in &ENVELOPE_FITS {
        let f = EnvelopeFit::fit(a, 200).unwrap();
        assert_relative_eq!(f.gamma_decay, gamma, max_relative = 1e-12);
        assert_relative_eq!(f.constant, c, max_relative = 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelope_dominates_off_grid(k in 0usize..200, u in 0.001f64..40.0) {
        let f = EnvelopeFit::fit(0.0, 200).unwrap();
        prop_assert!(phi(k, 0.0, u).unwrap().abs() <= f.bound(k, u));
    }

    #[test]
    fn hermite_parity(n in 0usize..60, lambda in 0.0f64..3.0, u in 0.01f64..8.0) {
        let p = gen_hermite_1d(n, lambda, u).unwrap();
        let m = gen_hermite_1d(n, lambda, -u).unwrap();
        prop_assert_eq!(p, if n % 2 == 0 { m } else { -m });
    }
}
