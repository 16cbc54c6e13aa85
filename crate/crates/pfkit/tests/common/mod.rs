// Independent oracles and random instances shared by the integration and
// acceptance tests.
#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use pfkit::renyi::shift_divergence_vec;
use pfkit::{DiscreteDistribution, NoiseSpec, Norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_atoms` atoms in `dim` dimensions with random positive weights;
/// coordinates on a coarse grid when `grid` so that distance ties occur.
pub fn random_distribution(
    r: &mut ChaCha8Rng,
    dim: usize,
    max_atoms: usize,
    grid: bool,
) -> DiscreteDistribution {
    let n = r.gen_range(1..=max_atoms);
    let points = (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| if grid { r.gen_range(-4i32..=4) as f64 } else { r.gen_range(-5.0..5.0) })
                .collect()
        })
        .collect();
    let weights = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
    DiscreteDistribution::new(points, Some(weights)).unwrap()
}

/// Minimum of Σ c_ij π_ij over couplings of `a` and `b`, by linear
/// programming over the full coupling polytope.
pub fn lp_transport(a: &[f64], b: &[f64], cost: impl Fn(usize, usize) -> f64) -> f64 {
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..a.len())
        .map(|i| (0..b.len()).map(|j| pb.add_var(cost(i, j), (0.0, f64::INFINITY))).collect())
        .collect();
    for (i, &ai) in a.iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        pb.add_constraint(&row, ComparisonOp::Eq, ai);
    }
    for (j, &bj) in b.iter().enumerate() {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        pb.add_constraint(&col, ComparisonOp::Eq, bj);
    }
    pb.solve().expect("transport LP is feasible").objective()
}

/// Largest mass a coupling can place on pairs within distance `z`.
pub fn lp_coverable(mu: &DiscreteDistribution, nu: &DiscreteDistribution, z: f64, norm: Norm) -> f64 {
    let mut pb = Problem::new(OptimizationDirection::Maximize);
    let (x, y) = (mu.points(), nu.points());
    let mut rows = vec![Vec::new(); mu.len()];
    let mut cols = vec![Vec::new(); nu.len()];
    for i in 0..mu.len() {
        for j in 0..nu.len() {
            if norm.distance(&x[i], &y[j]) <= z {
                let v = pb.add_var(1.0, (0.0, f64::INFINITY));
                rows[i].push((v, 1.0));
                cols[j].push((v, 1.0));
            }
        }
    }
    for (r, &w) in rows.iter().zip(mu.weights()) {
        if !r.is_empty() {
            pb.add_constraint(r, ComparisonOp::Le, w);
        }
    }
    for (c, &w) in cols.iter().zip(nu.weights()) {
        if !c.is_empty() {
            pb.add_constraint(c, ComparisonOp::Le, w);
        }
    }
    pb.solve().map(|s| s.objective()).unwrap_or(0.0)
}

/// Smallest pairwise distance at which the LP covers mass `1 - delta`,
/// bisecting over every candidate distance (coverage is monotone in z).
pub fn threshold_oracle(mu: &DiscreteDistribution, nu: &DiscreteDistribution, delta: f64, norm: Norm) -> f64 {
    let mut cands: Vec<f64> =
        mu.points().iter().flat_map(|x| nu.points().iter().map(move |y| norm.distance(x, y))).collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if lp_coverable(mu, nu, cands[mid], norm) >= 1.0 - delta - 1e-9 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

pub fn wp_oracle(mu: &DiscreteDistribution, nu: &DiscreteDistribution, p: f64, norm: Norm) -> f64 {
    let (x, y) = (mu.points(), nu.points());
    lp_transport(mu.weights(), nu.weights(), |i, j| norm.distance(&x[i], &y[j]).powf(p)).powf(1.0 / p)
}

pub fn dagwm_oracle(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    noise: &NoiseSpec,
    q: f64,
    alpha: f64,
) -> f64 {
    let order = q * (alpha - 1.0) + 1.0;
    let (x, y) = (mu.points(), nu.points());
    lp_transport(mu.weights(), nu.weights(), |i, j| {
        let shift: Vec<f64> = x[i].iter().zip(&y[j]).map(|(a, b)| a - b).collect();
        ((order - 1.0) * shift_divergence_vec(noise, &shift, order).unwrap()).exp()
    })
}

/// Relative agreement, with an absolute floor of 1e-12 for values near 0.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-12
}
