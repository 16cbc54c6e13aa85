// Sensitivities of two small correlated-data frameworks, built by
// conditioning joint priors on each secret.
//
// `cargo run --example wasserstein_sensitivity`

use pfkit::joint::{sum_query, JointPrior};
use pfkit::transport::{framework_sensitivity, w_p, SensitivityConfig};
use pfkit::{Framework, Norm};

/// Two binary records with P(X_i = 1) = 1/2 and correlation `rho`.
pub fn correlated_bits(rho: f64) -> pfkit::Result<JointPrior> {
    let same = (1.0 + rho) / 4.0;
    let diff = (1.0 - rho) / 4.0;
    JointPrior::new(
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
        vec![same, diff, diff, same],
    )
}

/// Two independent salaries taking 1, 2 or 100.
pub fn salaries() -> pfkit::Result<JointPrior> {
    let m = vec![(1.0, 0.5), (2.0, 0.499), (100.0, 0.001)];
    JointPrior::product(&[m.clone(), m])
}

pub struct Summary {
    pub counting_delta_g: f64,
    pub counting_w2: Vec<(f64, f64)>,
    pub salary_delta_g: f64,
    pub salary_delta_g_thresholded: f64,
}

pub fn run_example() -> pfkit::Result<Summary> {
    // Counting query over a set of correlations.
    let mut pairs = Vec::new();
    let mut counting_w2 = Vec::new();
    for rho in [0.0, 0.25, 0.5, 1.0] {
        let prior = correlated_bits(rho)?;
        let rho_pairs = prior.same_individual_pairs(&sum_query)?;
        let first = &rho_pairs[0];
        let w2 = w_p(&first.left, &first.right, 2.0, Norm::L2)?;
        println!(
            "rho={rho:<5} W2 between conditionals = {w2:.6}   sqrt(1+3 rho) = {:.6}",
            (1.0 + 3.0 * rho).sqrt()
        );
        counting_w2.push((rho, w2));
        pairs.extend(rho_pairs);
    }
    let counting = framework_sensitivity(&Framework::new(pairs)?, &SensitivityConfig::new(Norm::L1))?;
    println!("counting query: Delta_G = {}", counting.delta_g);

    // Rare large salary: the thresholded sensitivity ignores it.
    let prior = salaries()?;
    let mut cfg = SensitivityConfig::new(Norm::L1);
    cfg.delta = Some(3e-3);
    let fw = Framework::new(prior.same_individual_pairs(&sum_query)?)?;
    let rep = framework_sensitivity(&fw, &cfg)?;
    for p in &rep.pairs {
        println!(
            "  {:<16} w_inf={:<4} near(3e-3)={}",
            p.label,
            p.w_inf,
            p.near_threshold.unwrap_or(f64::NAN)
        );
    }
    let thresholded = rep.delta_g_delta.map(|d| d.value).unwrap_or(f64::NAN);
    println!("salary sum: Delta_G = {}, Delta_G,delta = {thresholded}", rep.delta_g);

    Ok(Summary {
        counting_delta_g: counting.delta_g,
        counting_w2,
        salary_delta_g: rep.delta_g,
        salary_delta_g_thresholded: thresholded,
    })
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    run_example().map(|_| ())
}
