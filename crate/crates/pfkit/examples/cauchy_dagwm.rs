// Distribution-aware calibration with Cauchy noise on the correlated
// counting query: W_2 between conditionals replaces the worst-case shift.
//
// `cargo run --example cauchy_dagwm`

use pfkit::mechanisms::{cauchy_mechanism, cauchy_mechanism_epsilon};

/// (rho, distribution-aware epsilon, worst-case epsilon) rows.
pub fn run_example() -> pfkit::Result<Vec<(f64, f64, f64)>> {
    let (lambda, alpha) = (1.0, 2.0);
    let worst_case = cauchy_mechanism_epsilon(2.0, 1, 2.0, lambda, 1.0, alpha)?;
    let mut rows = Vec::new();
    println!("{:>6} {:>10} {:>10}", "rho", "DAGWM", "GWM");
    for rho in [0.0, 0.25, 0.5, 1.0] {
        let w2 = (1.0f64 + 3.0 * rho).sqrt();
        let mech = cauchy_mechanism(w2, 1, 2.0, lambda, 1.0, alpha)?;
        println!("{rho:>6} {:>10.6} {worst_case:>10.6}", mech.guarantee.epsilon);
        rows.push((rho, mech.guarantee.epsilon, worst_case));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    run_example().map(|_| ())
}
