// Calibrating Gaussian and Laplace mechanisms, then releasing a value.
//
// `cargo run --example calibration`

use pfkit::mechanisms::{apply, gawm_gaussian, gawm_laplace, gwm_gaussian, gwm_laplace, LaplaceTarget};
use pfkit::renyi::{approx_rpp_to_pp, r_alpha};
use pfkit::{Alpha, NoiseFamily};

pub fn run_example() -> pfkit::Result<Vec<f64>> {
    let gauss = gwm_gaussian(2.0, 2.0, 1.0, 1)?;
    let NoiseFamily::Gaussian { sigma } = gauss.noise.family() else { unreachable!() };
    println!("GWM gaussian, Delta_G=2, (2, 1)-RPP: sigma^2 = {}", sigma * sigma);
    println!("  envelope at Delta_G: {}", r_alpha(&gauss.noise, 2.0, Alpha::Finite(2.0))?);

    let lap = gwm_laplace(1.0, LaplaceTarget::Pure { epsilon: 0.5 }, 1)?;
    println!("GWM laplace, Delta_G=1, 0.5-PP: {:?}", lap.noise.family());

    // A heavy tail costs little once a small mass may be ignored.
    let wide = gwm_gaussian(98.0, 2.0, 1.0, 1)?;
    let narrow = gawm_gaussian(1.0, 2.0, 1.0, 3e-3, 1)?;
    let var = |m: &pfkit::mechanisms::CalibratedMechanism| match m.noise.family() {
        NoiseFamily::Gaussian { sigma } => sigma * sigma,
        _ => f64::NAN,
    };
    println!("variance ratio GWM(98) / GAWM(1, 3e-3): {:.1}", var(&wide) / var(&narrow));
    let pp = approx_rpp_to_pp(2.0, 1.0, 3e-3)?;
    println!("  as (eps, delta)-PP: ({:.4}, {:?})", pp.epsilon, pp.delta);
    println!("GAWM laplace scale: {:?}", gawm_laplace(1.0, 1.0, 0.01, 1)?.noise.family());

    let released = apply(&gauss, &[10.0], 42)?;
    println!("release of 10 under seed 42: {released:?}");
    Ok(released)
}

#[allow(dead_code)]
fn main() -> pfkit::Result<()> {
    run_example().map(|_| ())
}
