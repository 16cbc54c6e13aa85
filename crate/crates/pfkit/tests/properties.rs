mod common;

use common::*;
use pfkit::joint::{sum_query, JointPrior};
use pfkit::mechanisms::{gawm_gaussian, gwm_gaussian, gwm_laplace, LaplaceTarget};
use pfkit::pabi::{improved_uniform_bound, pabi_bound, Allocation, PabiSchedule};
use pfkit::renyi::r_alpha;
use pfkit::transport::{
    dagwm_log_cost, framework_sensitivity, near_threshold, w_inf, w_p, SensitivityConfig,
};
use pfkit::{Alpha, DiscreteDistribution, Framework, NoiseFamily, NoiseSpec, Norm};
use proptest::prelude::*;

fn dist_1d() -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec((-6i32..=6, 0.05f64..1.0), 1..7).prop_map(|atoms| {
        let (p, w): (Vec<_>, Vec<_>) = atoms.into_iter().map(|(x, w)| (vec![x as f64 * 0.5], w)).unzip();
        DiscreteDistribution::new(p, Some(w)).unwrap()
    })
}

fn dist_2d() -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec(((-4.0f64..4.0, -4.0f64..4.0), 0.05f64..1.0), 1..6).prop_map(|atoms| {
        let (p, w): (Vec<_>, Vec<_>) = atoms.into_iter().map(|((x, y), w)| (vec![x, y], w)).unzip();
        DiscreteDistribution::new(p, Some(w)).unwrap()
    })
}

fn marginal() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::btree_map(0i32..6, 0.05f64..1.0, 2..4).prop_map(|m| {
        let total: f64 = m.values().sum();
        m.into_iter().map(|(v, w)| (v as f64, w / total)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_axioms(a in dist_2d(), b in dist_2d(), c in dist_2d()) {
        let ab = w_inf(&a, &b, Norm::L2).unwrap();
        prop_assert_eq!(ab, w_inf(&b, &a, Norm::L2).unwrap());
        prop_assert_eq!(w_inf(&a, &a, Norm::L2).unwrap(), 0.0);
        let (bc, ac) = (w_inf(&b, &c, Norm::L2).unwrap(), w_inf(&a, &c, Norm::L2).unwrap());
        prop_assert!(ac <= ab + bc + 1e-9);
        for p in [1.0, 2.0] {
            let f = |x: &DiscreteDistribution, y: &DiscreteDistribution| w_p(x, y, p, Norm::L2).unwrap();
            prop_assert!(f(&a, &c) <= f(&a, &b) + f(&b, &c) + 1e-9);
            prop_assert!((f(&a, &b) - f(&b, &a)).abs() < 1e-9);
        }
    }

    #[test]
    fn threshold_monotone_in_delta(a in dist_1d(), b in dist_1d()) {
        let full = w_inf(&a, &b, Norm::L1).unwrap();
        prop_assert_eq!(near_threshold(&a, &b, 0.0, Norm::L1).unwrap(), full);
        let mut last = full;
        for delta in [0.001, 0.01, 0.05, 0.2, 0.5, 0.9] {
            let v = near_threshold(&a, &b, delta, Norm::L1).unwrap();
            prop_assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn w_p_nondecreasing_in_p(a in dist_2d(), b in dist_2d()) {
        let mut last = 0.0;
        for p in [1.0, 1.5, 2.0, 4.0] {
            let v = w_p(&a, &b, p, Norm::L2).unwrap();
            prop_assert!(v >= last - 1e-9);
            last = v;
        }
        prop_assert!(last <= w_inf(&a, &b, Norm::L2).unwrap() + 1e-9);
    }

    #[test]
    fn distribution_canonical_form(atoms in prop::collection::vec((-3i32..3, 0.01f64..1.0), 1..8), seed in any::<u64>()) {
        let (p, w): (Vec<Vec<f64>>, Vec<f64>) = atoms.iter().map(|&(x, w)| (vec![x as f64], w)).unzip();
        let d = DiscreteDistribution::new(p.clone(), Some(w.clone())).unwrap();
        let mut idx: Vec<usize> = (0..p.len()).collect();
        let mut r = rng(seed);
        rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), &mut r);
        let shuffled = DiscreteDistribution::new(
            idx.iter().map(|&i| p[i].clone()).collect(),
            Some(idx.iter().map(|&i| w[i]).collect()),
        ).unwrap();
        prop_assert_eq!(&d, &shuffled);
        let back: DiscreteDistribution = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        for (x, y) in d.weights().iter().zip(back.weights()) {
            prop_assert!((x - y).abs() <= 1e-15 * x.abs());
        }
        prop_assert_eq!(d.points(), back.points());
    }

    #[test]
    fn thresholded_sensitivity_below_worst_case(pairs in prop::collection::vec((dist_1d(), dist_1d()), 1..4), delta in 0.0f64..0.5) {
        let fw = Framework::new(pairs.into_iter().enumerate()
            .map(|(i, (a, b))| pfkit::SecretPairInstance::new(a, b, format!("s{i}")).unwrap()).collect()).unwrap();
        let mut cfg = SensitivityConfig::new(Norm::L1);
        cfg.delta = Some(delta);
        let rep = framework_sensitivity(&fw, &cfg).unwrap();
        prop_assert!(rep.delta_g_delta.unwrap().value <= rep.delta_g);
    }

    #[test]
    fn distribution_aware_below_worst_case(a in dist_2d(), b in dist_2d(), alpha in 1.1f64..6.0, family in 0usize..2) {
        let noise = match family {
            0 => NoiseSpec::gaussian(1.3, 2).unwrap(),
            _ => NoiseSpec::laplace(0.8, 2).unwrap(),
        };
        let dg = w_inf(&a, &b, noise.norm()).unwrap();
        let lhs = dagwm_log_cost(&a, &b, &noise, 1.0, alpha).unwrap() / (alpha - 1.0);
        let rhs = r_alpha(&noise, dg, Alpha::Finite(alpha)).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0), "{} > {}", lhs, rhs);
    }

    #[test]
    fn distribution_aware_below_worst_case_cauchy(a in dist_1d(), b in dist_1d(), n in 1usize..6, lambda in 0.3f64..3.0) {
        // Integer Legendre index n = α - 1 for k = 2.
        let alpha = 1.0 + n as f64;
        let noise = NoiseSpec::generalized_cauchy(2.0, lambda, 1).unwrap();
        let dg = w_inf(&a, &b, Norm::L2).unwrap();
        let lhs = dagwm_log_cost(&a, &b, &noise, 1.0, alpha).unwrap() / (alpha - 1.0);
        let rhs = r_alpha(&noise, dg, Alpha::Finite(alpha)).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn product_priors_beat_group_privacy(ms in prop::collection::vec(marginal(), 2..4)) {
        let prior = JointPrior::product(&ms).unwrap();
        let fw = Framework::new(prior.same_individual_pairs(&sum_query).unwrap()).unwrap();
        let dg = framework_sensitivity(&fw, &SensitivityConfig::new(Norm::L1)).unwrap().delta_g;
        prop_assert!(dg <= prior.neighbor_sensitivity(&sum_query, Norm::L1) + 1e-12);
    }

    #[test]
    fn weakly_dependent_priors(probs in prop::collection::vec(0.0f64..1.0, 9), tilt in 0.0f64..1.0) {
        // Two records on {0,1,2}: a product prior tilted toward a dependent one.
        let grid: Vec<Vec<f64>> = (0..9).map(|k| vec![(k / 3) as f64, (k % 3) as f64]).collect();
        let base: Vec<f64> = probs.iter().map(|p| 0.2 + p).collect();
        let dep: Vec<f64> = (0..9).map(|k| if k / 3 == k % 3 { 1.0 } else { 0.0 }).collect();
        let w: Vec<f64> = base.iter().zip(&dep).map(|(b, d)| (1.0 - tilt) * b + tilt * d).collect();
        let prior = JointPrior::new(grid, w).unwrap();
        let product = prior.product_of_marginals().unwrap();
        let mut lambda: f64 = 0.0;
        for s in prior.secrets() {
            let c = prior.conditional(|x| s.holds(x), sum_query).unwrap();
            let c0 = product.conditional(|x| s.holds(x), sum_query).unwrap();
            lambda = lambda.max(w_inf(&c, &c0, Norm::L1).unwrap());
        }
        let fw = Framework::new(prior.same_individual_pairs(&sum_query).unwrap()).unwrap();
        let dg = framework_sensitivity(&fw, &SensitivityConfig::new(Norm::L1)).unwrap().delta_g;
        let delta = product.neighbor_sensitivity(&sum_query, Norm::L1);
        prop_assert!(dg <= pfkit::priors::weak_dependence_bound(lambda, delta) + 1e-12);
    }

    #[test]
    fn improved_never_above_naive(raw in prop::collection::vec(0.0f64..3.0, 1..40), sigma in 0.3f64..3.0, alpha in 1.1f64..8.0) {
        let mut shifts = raw;
        shifts.sort_by(|a, b| b.total_cmp(a));
        let noise = NoiseSpec::gaussian(sigma, 1).unwrap();
        let improved = improved_uniform_bound(&shifts, &noise, alpha).unwrap();
        let naive = pabi_bound(&PabiSchedule::new(shifts, Allocation::Naive, vec![noise], alpha).unwrap()).unwrap();
        prop_assert!(improved <= naive.loss * (1.0 + 1e-12) + 1e-15);
        prop_assert_eq!(naive.residual_shift, 0.0);
    }

    #[test]
    fn calibrations_invert(delta_g in 0.01f64..50.0, alpha in 1.01f64..40.0, eps in 0.01f64..10.0) {
        let g = gwm_gaussian(delta_g, alpha, eps, 1).unwrap();
        let back = r_alpha(&g.noise, delta_g, Alpha::Finite(alpha)).unwrap();
        prop_assert!((back - eps).abs() <= 1e-12 * eps.max(1.0));
        let l = gwm_laplace(delta_g, LaplaceTarget::Pure { epsilon: eps }, 1).unwrap();
        let back = r_alpha(&l.noise, delta_g, Alpha::Infinite).unwrap();
        prop_assert!((back - eps).abs() <= 1e-12 * eps.max(1.0));
        let near = gawm_gaussian(delta_g, alpha, eps, 1e-12, 1).unwrap();
        let (NoiseFamily::Gaussian { sigma: s1 }, NoiseFamily::Gaussian { sigma: s2 }) = (g.noise.family(), near.noise.family()) else { unreachable!() };
        prop_assert!((s1 * s1 - s2 * s2).abs() <= 1e-9 * (s1 * s1).max(1.0));
    }
}

#[test]
fn infeasible_allocation_is_reported() {
    let noise = NoiseSpec::gaussian(1.0, 1).unwrap();
    let s = PabiSchedule::new(vec![0.0, 1.0], Allocation::Custom(vec![1.0, 0.0]), vec![noise], 2.0).unwrap();
    assert!(matches!(pabi_bound(&s), Err(pfkit::Error::InfeasibleAllocation { step: 1, .. })));
}
