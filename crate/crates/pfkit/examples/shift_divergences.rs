// Closed-form shifted divergences next to a quadrature check, and the
// Legendre bound for generalized Cauchy noise.
//
// `cargo run --example shift_divergences`

use pfkit::renyi::{
    gaussian_shift_divergence, gen_cauchy_density, gen_cauchy_shift_bound, laplace_density,
    laplace_shift_divergence, normal_density, numeric_renyi_divergence, r_alpha, Interval,
};
use pfkit::{Alpha, NoiseSpec};

/// Returns the largest closed-form vs quadrature gap seen.
pub fn run_example() -> pfkit::Result<f64> {
    let mut worst: f64 = 0.0;
    println!("{:>8} {:>6} {:>6} {:>14} {:>14}", "family", "z", "alpha", "closed", "quadrature");
    for &(z, alpha) in &[(0.5, 2.0), (1.0, 3.5), (2.0, 1.5)] {
        let closed = gaussian_shift_divergence(1.0, z, alpha);
        let numeric = numeric_renyi_divergence(
            normal_density(z, 1.0),
            normal_density(0.0, 1.0),
            alpha,
            Interval::real_line(),
        )?;
        worst = worst.max((closed - numeric).abs());
        println!("{:>8} {z:>6} {alpha:>6} {closed:>14.10} {numeric:>14.10}", "gauss");

        let closed = laplace_shift_divergence(1.0, z, Alpha::Finite(alpha));
        let numeric = numeric_renyi_divergence(
            laplace_density(z, 1.0),
            laplace_density(0.0, 1.0),
            alpha,
            Interval::real_line(),
        )?;
        worst = worst.max((closed - numeric).abs());
        println!("{:>8} {z:>6} {alpha:>6} {closed:>14.10} {numeric:>14.10}", "laplace");
    }

    // Cauchy noise only has an upper bound.
    for &z in &[0.05, 0.5, 2.0] {
        let bound = gen_cauchy_shift_bound(2.0, 1.0, z, 2.0)?;
        let numeric = numeric_renyi_divergence(
            gen_cauchy_density(2.0, 1.0, z)?,
            gen_cauchy_density(2.0, 1.0, 0.0)?,
            2.0,
            Interval::real_line(),
        )?;
        println!("cauchy k=2 z={z}: divergence {numeric:.6} <= bound {bound:.6}");
    }

    let noise = NoiseSpec::laplace(0.5, 3)?;
    println!("pure-DP envelope of Lap(0.5)^3 at shift 1: {}", r_alpha(&noise, 1.0, Alpha::Infinite)?);
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    let worst = run_example()?;
    println!("largest gap: {worst:.2e}");
    Ok(())
}
