// Privacy loss of noisy SGD as a function of the number of steps, for
// several decay profiles of the correlation with the secret.
//
// `cargo run --example pabi_curves`

use pfkit::pabi::{dp_special_case_bound, privacy_loss_curve, CurveMode, SgdParams};

pub fn run_example() -> pfkit::Result<Vec<(&'static str, f64)>> {
    let params =
        SgdParams { lipschitz: 1.0, eta: 1.0, sigma: 1.0, beta_smooth: 1.0, c_sup: 1.0, diff_ab: vec![1.0] };
    let steps = 100;
    type Profile = (&'static str, fn(f64) -> f64);
    let profiles: [Profile; 3] = [("const", |_| 1.0), ("1/t", |t| 1.0 / t), ("1/t^2", |t| 1.0 / (t * t))];
    let mut finals = Vec::new();
    for (name, f) in profiles {
        let rho: Vec<f64> = (1..=steps).map(|t| f(t as f64)).collect();
        let improved = privacy_loss_curve(&rho, &params, 2.0, CurveMode::Improved)?;
        let naive = privacy_loss_curve(&rho, &params, 2.0, CurveMode::PerStep)?;
        let at = |c: &[(usize, f64)], t: usize| c[t - 1].1;
        println!(
            "{name:<6} T=10: {:>9.5} (per-step {:>9.5})   T=100: {:>9.5} (per-step {:>9.5})",
            at(&improved, 10),
            at(&naive, 10),
            at(&improved, 100),
            at(&naive, 100)
        );
        finals.push((name, at(&improved, 100)));
    }
    // Independent records: only the step touching the secret matters.
    for i in [1, 50, 100] {
        println!(
            "independent data, secret at step {i}: {:.5}",
            dp_special_case_bound(1.0, 1.0, 2.0, 100, i, 1.0)?
        );
    }
    Ok(finals)
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    run_example().map(|_| ())
}
