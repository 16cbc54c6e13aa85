// Every runnable example, compiled in as a module and executed.

mod shift_divergences {
    include!("../examples/shift_divergences.rs");

    #[test]
    fn closed_forms_match_quadrature() {
        assert!(run_example().unwrap() < 1e-6);
    }
}

mod wasserstein_sensitivity {
    include!("../examples/wasserstein_sensitivity.rs");

    #[test]
    fn counting_and_salary_frameworks() {
        let s = run_example().unwrap();
        assert_eq!(s.counting_delta_g, 2.0);
        for (rho, w2) in s.counting_w2 {
            assert!((w2 - (1.0 + 3.0 * rho).sqrt()).abs() < 1e-9);
        }
        assert_eq!(s.salary_delta_g, 99.0);
        assert_eq!(s.salary_delta_g_thresholded, 99.0);
    }
}

mod calibration {
    include!("../examples/calibration.rs");

    #[test]
    fn release_is_reproducible() {
        assert_eq!(run_example().unwrap(), run_example().unwrap());
    }
}

mod cauchy_dagwm {
    include!("../examples/cauchy_dagwm.rs");

    #[test]
    fn distribution_aware_never_worse() {
        for (rho, aware, worst) in run_example().unwrap() {
            assert!(aware <= worst + 1e-12);
            assert!((aware - (2.0 + 3.0 * rho).ln()).abs() < 1e-12);
        }
    }
}

mod pabi_curves {
    include!("../examples/pabi_curves.rs");

    #[test]
    fn final_losses() {
        let finals = run_example().unwrap();
        assert!((finals[0].1 - 100.0).abs() < 1e-9);
        let s: f64 = (1..=100).map(|t| 1.0 / (t as f64 * t as f64)).sum();
        assert!((finals[2].1 - s * s / 100.0).abs() < 1e-12);
    }
}

mod gaussian_priors {
    include!("../examples/gaussian_priors.rs");

    #[test]
    fn bound_grows_with_correlation() {
        let rows = run_example().unwrap();
        assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!((rows[3].1 - 1.8).abs() < 1e-12);
    }
}

mod csv_analysis {
    include!("../examples/csv_analysis.rs");

    #[test]
    fn fixture_report() {
        let r = run_example().unwrap();
        assert_eq!(r.sensitivities.delta, 20.0);
        assert!(!r.sensitivities.delta_open);
        assert_eq!(r.sensitivities.delta_g, 6.0);
        assert_eq!(r.pairs.len(), 1);
    }
}
