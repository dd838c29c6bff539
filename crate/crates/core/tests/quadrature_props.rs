use hardylab::func::{Decay, Func};
use hardylab::quadrature::{gauss_legendre, integrate_halfline, integrate_interval, QuadSpec};
use hardylab::specfun::ln_gamma;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // ∫_0^∞ u^s e^{−bu} du = Γ(s+1) / b^{s+1}
    #[test]
    fn gamma_integrals_within_estimate(s in -0.9f64..6.0, b in 0.2f64..5.0) {
        let g = Func::new(move |u: f64| u.powf(s) * (-b * u).exp(), Decay::Exponential(b / 2.0));
        let q = integrate_halfline(&g, &QuadSpec::default()).unwrap();
        let exact = (ln_gamma(s + 1.0).unwrap() - (s + 1.0) * b.ln()).exp();
        prop_assert!((q.value - exact).abs() <= q.error + q.tail + 1e-15 * exact, "{} vs {exact}, est {}", q.value, q.error);
    }

    #[test]
    fn polynomials_exact_for_rule(n in 2usize..40, c in prop::collection::vec(-1.0f64..1.0, 80)) {
        let rule = gauss_legendre(n);
        let deg = 2 * n - 1;
        let p = |x: f64| c[..=deg].iter().rev().fold(0.0, |acc, &a| acc * x + a);
        let exact: f64 = c[..=deg].iter().enumerate().map(|(j, &a)| if j % 2 == 0 { 2.0 * a / (j as f64 + 1.0) } else { 0.0 }).sum();
        prop_assert!((rule.integrate(p, -1.0, 1.0) - exact).abs() <= 1e-12);
    }

    #[test]
    fn breakpoints_handle_jumps(j in 0.05f64..2.0) {
        let f = move |x: f64| if x < j { 1.0 } else { -2.0 };
        let q = integrate_interval(&f, 0.0, 2.0, &[j], &QuadSpec::default()).unwrap();
        prop_assert!((q.value - (j - 2.0 * (2.0 - j))).abs() <= 1e-12);
    }
}
