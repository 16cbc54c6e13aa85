// Closed-form sensitivity bounds when the adversary's prior is Gaussian,
// plus the Langevin-diffusion and weak-dependence bounds.
//
// `cargo run --example gaussian_priors`

use nalgebra::{DMatrix, DVector};
use pfkit::priors::{
    diffusion_sensitivity, gaussian_attribute_sensitivity, weak_dependence_bound, GaussianPrior,
};

pub fn run_example() -> pfkit::Result<Vec<(f64, f64)>> {
    // Release attribute 0, protect attribute 1, for several correlations.
    let release = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
    let secret = DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 0.0]);
    let mut rows = Vec::new();
    for rho in [0.0, 0.2, 0.5, 0.9] {
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, rho, 0.1, rho, 1.0, 0.0, 0.1, 0.0, 2.0]);
        let prior = GaussianPrior::new(DVector::zeros(3), cov, 1)?;
        let s = gaussian_attribute_sensitivity(&prior, &release, &secret, 2.0)?;
        println!("rho={rho:<4} Delta_G bound over secrets of diameter 2: {s:.4}");
        rows.push((rho, s));
    }
    let times = [0.5, 1.0, 2.0];
    println!("diffusion released at {times:?}: {:.5}", diffusion_sensitivity(1.0, 1.0, 0.5, &times)?);
    println!("weakly dependent prior (lambda=0.1, Delta=1): {}", weak_dependence_bound(0.1, 1.0));
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    run_example().map(|_| ())
}
