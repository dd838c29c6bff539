use hardylab::bases::{phi, phi_func, Alpha};
use hardylab::func::{Decay, Func, FuncNd};
use hardylab::hardy::*;
use hardylab::quadrature::{laguerre_coefficients, QuadSpec};
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

fn bump(shift: f64) -> Func {
    Func::new(move |u: f64| u * (-(u - shift).powi(2)).exp(), Decay::Gaussian(0.5))
}

#[test]
fn basis_function_gives_single_term() {
    for (m, a) in [(0, 0.0), (7, 0.3), (30, 1.5)] {
        let f = FuncNd::from(phi_func(m, a).unwrap());
        let r = hardy_sum(&f, &Basis::Laguerre(Alpha::scalar(a).unwrap()), 0.75, m + 20, &QuadSpec::default()).unwrap();
        let want = ((m + 1) as f64).powf(-0.75);
        assert!((r.sum - want).abs() <= 1e-9 * want, "m {m}: {} vs {want}", r.sum);
    }
}

#[test]
fn tensor_sum_matches_double_loop() {
    let (f1, f2) = (bump(0.5), bump(1.5));
    let alpha = Alpha::new(vec![0.0, 0.5]).unwrap();
    let spec = QuadSpec::default();
    let n = 50;
    let r = hardy_sum(&FuncNd::separable(vec![f1.clone(), f2.clone()]), &Basis::Laguerre(alpha), 1.6, n, &spec).unwrap();
    let c1 = laguerre_coefficients(&f1, 0.0, n, &spec).unwrap().values;
    let c2 = laguerre_coefficients(&f2, 0.5, n, &spec).unwrap().values;
    let mut brute = 0.0;
    for i in 0..=n {
        for j in 0..=n - i {
            let p = (c1[i] * c2[j]).abs();
            if p >= ZERO_COEFFICIENT {
                brute += p / ((i + j + 1) as f64).powf(1.6);
            }
        }
    }
    assert!((r.sum - brute).abs() <= 1e-12 * brute, "{} vs {brute}", r.sum);
}

#[test]
fn non_separable_path_agrees_with_separable() {
    let (f1, f2) = (bump(0.7), bump(1.1));
    let alpha = Alpha::uniform(0.0, 2).unwrap();
    let spec = QuadSpec::default();
    let sep = hardy_sum(&FuncNd::separable(vec![f1.clone(), f2.clone()]), &Basis::Laguerre(alpha.clone()), 1.5, 12, &spec).unwrap();
    let g = FuncNd::new(2, move |x: &[f64]| f1.eval(x[0]) * f2.eval(x[1]), Decay::Gaussian(0.5), vec![]);
    let gen = hardy_sum(&g, &Basis::Laguerre(alpha), 1.5, 12, &spec).unwrap();
    assert!((sep.sum - gen.sum).abs() <= 1e-8 * sep.sum, "{} vs {}", sep.sum, gen.sum);
}

#[test]
fn gaussian_at_critical_exponent_converges() {
    let g = Func::new(|u: f64| (-(u - 0.5).powi(2)).exp(), Decay::Gaussian(0.5));
    let r = hardy_sum(&FuncNd::from(g), &Basis::Hermite(vec![0.0]), 0.75, 256, &QuadSpec::default()).unwrap();
    assert!(matches!(r.tail_estimate.status, TailStatus::Zero | TailStatus::Converges), "{:?}", r.tail_estimate);
    assert!(r.tail_estimate.value.unwrap_or(0.0) < 1e-6 * r.sum);
    assert!(r.unresolved.is_empty());
}

#[test]
fn bound_constants_small_argument_limit() {
    for &a in &[0.0, 0.3, 1.5] {
        for &k in &[1usize, 5, 40] {
            let kf = k as f64;
            let u = 1e-5 / kf.sqrt();
            let ratio = phi(k, a, u).unwrap() / (kf.powf(0.5 * a) * u.powf(a + 0.5));
            let want = 2f64.sqrt() * (0.5 * (ln_gamma(kf + a + 1.0) - ln_gamma(kf + 1.0) - a * kf.ln())).exp()
                / ln_gamma(a + 1.0).exp();
            assert!((ratio - want).abs() <= 1e-8 * want, "a {a} k {k}: {ratio} vs {want}");
        }
    }
    let bc = fit_bound_constants(0.0, 256).unwrap();
    assert!((bc.b / 2f64.sqrt() - 1.0).abs() < 1e-3, "{bc:?}");
    assert!(bc.a > 0.0 && bc.a < bc.b);
}

#[test]
fn bound_constant_c_is_stable_under_doubling() {
    for &a in &[-0.5, 0.0, 0.3, 1.0] {
        let c1 = fit_bound_constants(a, 256).unwrap().c;
        let c2 = fit_bound_constants(a, 512).unwrap().c;
        assert!((c2 / c1 - 1.0).abs() <= 0.2, "alpha {a}: {c1} vs {c2}");
    }
}

#[test]
fn counterexample_coefficients_are_positive() {
    for &k in &[16usize, 64, 256] {
        let r = sharpness_experiment(&Alpha::scalar(0.0).unwrap(), 0.25, &[k], None).unwrap();
        let row = &r.k_sweep[0];
        assert!(row.positive && row.min_lower_ratio > 0.0, "K {k}: {row:?}");
        assert!(r.fitted_slope.is_none());
    }
}

#[test]
fn sharpness_contracts() {
    let a = Alpha::scalar(0.0).unwrap();
    assert!(sharpness_experiment(&a, 0.25, &[16, 32], None).is_err());
    assert!(sharpness_experiment(&a, 0.3, &[16], None).is_err());
    assert!(sharpness_experiment(&a, 0.0, &[16], None).is_err());
    assert!(sharpness_experiment(&Alpha::scalar(-0.5).unwrap(), 0.25, &[16], None).is_err());
    assert_eq!(geometric_grid(16, 4096, 2).unwrap().len(), 9);
}

#[test]
fn halfinteger_branch() {
    assert!(halfinteger_coefficient_check(64, 0.25, 0).is_err());
    assert!(halfinteger_coefficient_check(64, 0.25, 65).is_err());
    let r = halfinteger_ratios(64, None, &QuadSpec::default()).unwrap();
    assert_eq!(r.delta, HALFINTEGER_DELTA);
    assert!(r.sign_definite && r.min_ratio > 0.0);
    let one = halfinteger_coefficient_check(64, r.delta, r.argmin).unwrap();
    assert!((one - r.min_ratio).abs() <= 1e-12 * r.min_ratio);
}

#[test]
fn halfinteger_reduction_is_consistent() {
    let bc = bound_constants(-0.5, 256).unwrap();
    let p = AtomParams::new(256, HALFINTEGER_DELTA, bc.c, Alpha::scalar(-0.5).unwrap()).unwrap();
    let g = make_counterexample_atom(&p).unwrap().to_func().unwrap();
    let r = parity_reduction_check(&g, 0.0, 0.5, 256, &QuadSpec::default()).unwrap();
    assert!(r.consistent, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn partial_sums_monotone_and_scale_invariant(shift in 0.0f64..2.0, j in -3i32..=3, a in 0.0f64..1.5) {
        let basis = Basis::Laguerre(Alpha::scalar(a).unwrap());
        let f = FuncNd::from(bump(shift));
        let s = 2f64.powi(j);
        let spec = QuadSpec::default();
        let r = hardy_sum(&f, &basis, 0.75, 40, &spec).unwrap();
        let rs = hardy_sum(&f.scaled(s), &basis, 0.75, 40, &spec).unwrap();
        prop_assert!(r.all_partial_sums().windows(2).all(|w| w[1] >= w[0]));
        prop_assert!((rs.sum - s * r.sum).abs() <= 1e-9 * s * r.sum, "{} vs {}", rs.sum, s * r.sum);
    }

    #[test]
    fn atoms_and_extensions_are_valid(k in 1usize..5000, delta in 0.01f64..0.49, c in 0.05f64..2.0, d in 1usize..=3) {
        let p = AtomParams::new(k, delta, c, Alpha::uniform(0.0, d).unwrap()).unwrap();
        let atom = tensor_atom(&p).unwrap();
        prop_assert!(validate_atom(&atom).passed());
        prop_assert!(atom.integral().abs() <= 1e-12 * atom.sup_norm() * atom.support_ball_measure);
        for eta in hardylab::bases::ParityVector::all(d) {
            let e = atom.extension(&eta).unwrap();
            prop_assert!(validate_atom(&e).passed());
        }
    }
}
