//! Property tests for the library-wide invariants.

use ilsmooth::*;
use proptest::prelude::*;

fn plane_strategy(w: usize, h: usize) -> impl Strategy<Value = ImagePlane> {
    proptest::collection::vec(0.0f64..1.0, w * h)
        .prop_map(move |data| ImagePlane::new(w, h, data).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_planes_sum_to_zero(p in plane_strategy(11, 7)) {
        let g = p.forward_gradients().unwrap();
        let tol = 1e-6 * p.len() as f64;
        prop_assert!(g.gx.data().iter().sum::<f64>().abs() < tol);
        prop_assert!(g.gy.data().iter().sum::<f64>().abs() < tol);
    }

    #[test]
    fn gradients_are_linear(
        p in plane_strategy(8, 6),
        q in plane_strategy(8, 6),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let combo = p.zip_map(&q, |pv, qv| a * pv + b * qv).unwrap();
        let gc = combo.forward_gradients().unwrap();
        let gp = p.forward_gradients().unwrap();
        let gq = q.forward_gradients().unwrap();
        for i in 0..combo.len() {
            let expect = a * gp.gx.data()[i] + b * gq.gx.data()[i];
            prop_assert!((gc.gx.data()[i] - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn luminance_is_idempotent_on_gray(p in plane_strategy(6, 6)) {
        let img = MultiChannelImage::gray(p.clone(), RangeTag::Unit).unwrap();
        let lum = img.luminance();
        prop_assert_eq!(lum.data(), p.data());
        let again = MultiChannelImage::gray(lum, RangeTag::Unit).unwrap();
        let lum_again = again.luminance();
        prop_assert_eq!(lum_again.data(), p.data());
    }

    #[test]
    fn scores_and_weights_in_range(signal in proptest::collection::vec(0.0f64..1.0, 4..40)) {
        let params = IntervalGradientParams::new(2.0);
        let (ig, fg) = interval_gradient_1d(&signal, &params).unwrap();
        let gamma = gamma_1d(&ig, &fg, params.eps_s).unwrap();
        let omega = omega_from_gamma(&gamma, params.sigma_s).unwrap();
        for (&g, &w) in gamma.iter().zip(&omega) {
            prop_assert!(g > 0.0 && g <= 1.0);
            prop_assert!(w > 0.0 && w <= 1.0);
        }
    }

    #[test]
    fn guidance_values_bounded(p in plane_strategy(9, 9)) {
        let field = build_weight_field(&p, &IntervalGradientParams::new(2.0)).unwrap();
        let grads = p.forward_gradients().unwrap();
        for i in 0..p.len() {
            prop_assert!((field.wx().data()[i] * grads.gx.data()[i]).abs() <= 1.0);
            prop_assert!((field.wy().data()[i] * grads.gy.data()[i]).abs() <= 1.0);
        }
    }

    #[test]
    fn penalty_even_mu_odd(g in -1.0f64..1.0) {
        let (p, eps): (f64, f64) = (0.8, 1e-4);
        let c = p * eps.powf(p / 2.0 - 1.0);
        prop_assert_eq!(penalty(g, p, eps), penalty(-g, p, eps));
        prop_assert_eq!(mu_update(g, p, eps, c), -mu_update(-g, p, eps, c));
        prop_assert!(penalty(g, p, eps) > 0.0);
    }

    #[test]
    fn solver_preserves_mean(p in plane_strategy(10, 8)) {
        let cache = FreqCache::new(10, 8, 0.5, 200.95).unwrap();
        let mu = MuField::zeros(10, 8);
        let u = cache.solve_iteration(&p, &mu).unwrap();
        prop_assert!((u.mean() - p.mean()).abs() < 1e-10);
    }
}
