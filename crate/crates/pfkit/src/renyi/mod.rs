//! Rényi divergences between a noise law and its translates, the shift
//! envelope `R_alpha(noise, z)`, guarantee conversions and a numeric
//! divergence oracle.
//!
//! The envelope is the worst divergence between the noise and the noise
//! translated by any vector of norm below `z` (in the family's paired norm).
//! For Gaussian and Laplace product noise it has the closed forms below;
//! for the generalized Cauchy family only an upper bound built from
//! Legendre polynomials is available.

pub mod legendre;
pub mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::types::{Alpha, NoiseFamily, NoiseSpec, RppGuarantee};

pub use legendre::{clipped_legendre, legendre_poly};
pub use quadrature::{Interval, Quadrature};

/// How far a real may sit from an integer and still count as one.
const INTEGER_TOLERANCE: f64 = 1e-9;

fn finite_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must be a finite real above 1, got {alpha}")))
    }
}

/// α z² / (2σ²).
pub fn gaussian_shift_divergence(sigma: f64, z: f64, alpha: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    alpha * z * z / (2.0 * sigma * sigma)
}

/// Divergence of order `alpha` between Lap(z, b) and Lap(0, b); `z / b` at
/// infinite order.
pub fn laplace_shift_divergence(scale: f64, z: f64, alpha: Alpha) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    match alpha {
        Alpha::Infinite => z / scale,
        Alpha::Finite(a) => {
            // log(a/(2a-1) e^u + (a-1)/(2a-1) e^-v) with u = z(a-1)/b, v = za/b,
            // rewritten as u + log1p(-(a-1)/(2a-1) (1 - e^{-(u+v)})).
            let u = z * (a - 1.0) / scale;
            let c = z * (2.0 * a - 1.0) / scale;
            let w = (a - 1.0) / (2.0 * a - 1.0);
            (u + (-w * -(-c).exp_m1()).ln_1p()) / (a - 1.0)
        }
    }
}

/// β such that β (1 + (λx)²)^{-k/2} integrates to one.
pub fn gen_cauchy_normalizer(k: f64, lambda: f64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(invalid(format!("generalized cauchy density needs k > 1, got {k}")));
    }
    Ok(lambda * (ln_gamma(k / 2.0) - ln_gamma((k - 1.0) / 2.0)).exp() / PI.sqrt())
}

/// Density of one generalized Cauchy coordinate centred at `center`.
pub fn gen_cauchy_density(k: f64, lambda: f64, center: f64) -> Result<impl Fn(f64) -> f64> {
    let beta = gen_cauchy_normalizer(k, lambda)?;
    Ok(move |x: f64| {
        let t = lambda * (x - center);
        beta * (1.0 + t * t).powf(-k / 2.0)
    })
}

/// Index `k (order - 1) / 2` of the Legendre polynomial in the Cauchy
/// bound, rejected unless it is a nonnegative integer.
pub fn legendre_index(k: f64, order: f64) -> Result<usize> {
    let n = k * (order - 1.0) / 2.0;
    let r = n.round();
    if n < 0.0 || (n - r).abs() > INTEGER_TOLERANCE || !n.is_finite() {
        return Err(invalid(format!(
            "k (alpha - 1) / 2 = {n} is not a nonnegative integer (k = {k}, alpha = {order})"
        )));
    }
    Ok(r as usize)
}

/// log of the Cauchy bound on exp((α-1) D_α) for a scalar shift: the
/// quantity (α-1) times [`gen_cauchy_shift_bound`].
fn cauchy_log_moment(k: f64, lambda: f64, z: f64, alpha: f64) -> Result<f64> {
    let n = legendre_index(k, alpha)?;
    let ratio = gen_cauchy_normalizer(k, lambda)? * PI / lambda;
    let w = lambda * z;
    Ok(ratio.ln() + legendre_poly(n, 1.0 + w * w).ln())
}

/// Upper bound on the order-`alpha` divergence between a generalized Cauchy
/// coordinate and its translate by `z`.
pub fn gen_cauchy_shift_bound(k: f64, lambda: f64, z: f64, alpha: f64) -> Result<f64> {
    finite_alpha(alpha)?;
    // Divergences are nonnegative; this only absorbs rounding at z = 0, k = 2.
    Ok((cauchy_log_moment(k, lambda, z, alpha)? / (alpha - 1.0)).max(0.0))
}

/// Shift envelope R_alpha(noise, z) in the family's paired norm.
pub fn r_alpha(noise: &NoiseSpec, z: f64, alpha: Alpha) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(invalid(format!("shift must be >= 0, got {z}")));
    }
    match (noise.family(), alpha) {
        (NoiseFamily::Gaussian { sigma }, Alpha::Finite(a)) => Ok(gaussian_shift_divergence(sigma, z, a)),
        (NoiseFamily::Laplace { scale }, _) => Ok(laplace_shift_divergence(scale, z, alpha)),
        (NoiseFamily::GeneralizedCauchy { k, lambda }, Alpha::Finite(a)) => {
            let d = noise.dim() as f64;
            Ok(d * gen_cauchy_shift_bound(k, lambda, z / d, a)?)
        }
        (family, Alpha::Infinite) => {
            Err(Error::Unsupported(format!("{} noise has no finite infinite-order envelope", family.name())))
        }
    }
}

/// Exact divergence of order `order` between product noise and its
/// translate by the vector `shift` (bound for the Cauchy family), as a sum
/// over coordinates.
pub fn shift_divergence_vec(noise: &NoiseSpec, shift: &[f64], order: f64) -> Result<f64> {
    finite_alpha(order)?;
    match noise.family() {
        NoiseFamily::Gaussian { sigma } => {
            let sq: f64 = shift.iter().map(|v| v * v).sum();
            Ok(gaussian_shift_divergence(sigma, sq.sqrt(), order))
        }
        NoiseFamily::Laplace { scale } => {
            Ok(shift.iter().map(|v| laplace_shift_divergence(scale, v.abs(), Alpha::Finite(order))).sum())
        }
        NoiseFamily::GeneralizedCauchy { k, lambda } => {
            shift.iter().map(|v| gen_cauchy_shift_bound(k, lambda, v.abs(), order)).sum()
        }
    }
}

/// (α, ε)-RPP ⇒ (ε + log(1/δ)/(α-1), δ)-PP.
pub fn rpp_to_pp(alpha: f64, epsilon: f64, delta: f64) -> Result<RppGuarantee> {
    finite_alpha(alpha)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    RppGuarantee::new(Alpha::Infinite, epsilon + (1.0 / delta).ln() / (alpha - 1.0), Some(delta))
}

/// (α, ε, δ)-approximate RPP ⇒ (ε + log(1/δ)/(α-1), 2δ)-PP.
pub fn approx_rpp_to_pp(alpha: f64, epsilon: f64, delta: f64) -> Result<RppGuarantee> {
    if !(2.0 * delta < 1.0) {
        return Err(invalid(format!("2 delta must be below 1, got delta = {delta}")));
    }
    let g = rpp_to_pp(alpha, epsilon, delta)?;
    RppGuarantee::new(Alpha::Infinite, g.epsilon, Some(2.0 * delta))
}

/// Hölder exponents and divergences for an adversary whose prior lies
/// near (but outside) the protected prior set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloseAdversaryParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Divergence of order p between the adversary's prior and the closest protected one.
    pub delta1p: f64,
    /// Divergence of order r in the reverse direction.
    pub delta2r: f64,
}

fn check_holder(p: f64, q: f64, r: f64) -> Result<()> {
    if !(p > 0.0 && q > 0.0 && r > 0.0) || (1.0 / p + 1.0 / q + 1.0 / r - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("1/p + 1/q + 1/r must equal 1 (p={p}, q={q}, r={r})")));
    }
    Ok(())
}

/// Privacy level against the close adversary, for a mechanism that is
/// (q(α - 1/p), ε)-RPP on the protected priors.
pub fn close_adversary_penalty(params: &CloseAdversaryParams) -> Result<f64> {
    let CloseAdversaryParams { p, q, r, alpha, epsilon, delta1p, delta2r } = *params;
    check_holder(p, q, r)?;
    finite_alpha(alpha)?;
    let am1 = alpha - 1.0;
    Ok((1.0 + 1.0 / (r * am1)) * epsilon + (1.0 + (1.0 / r + 1.0 / q) / am1) * delta1p + delta2r)
}

/// Additive-noise version of [`close_adversary_penalty`], where the prior
/// gap is measured by the W∞ distance `delta_wass` between conditionals.
pub fn close_adversary_additive_penalty(
    noise: &NoiseSpec,
    delta_wass: f64,
    p: f64,
    q: f64,
    r: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_holder(p, q, r)?;
    finite_alpha(alpha)?;
    let am1 = alpha - 1.0;
    let k = (1.0 + (1.0 / r + 1.0 / q) / am1) * r_alpha(noise, delta_wass, Alpha::finite(alpha * p)?)?
        + r_alpha(noise, delta_wass, Alpha::finite(am1 * r + 1.0)?)?;
    Ok((1.0 + 1.0 / (r * am1)) * epsilon + k)
}

/// Guarantee for queries answered on independent datasets: the worst ε.
pub fn parallel_compose(epsilons: &[f64]) -> Result<f64> {
    if epsilons.is_empty() {
        return Err(invalid("parallel composition of an empty list"));
    }
    Ok(epsilons.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Densities below this are treated as tail underflow.
const NEGLIGIBLE_DENSITY: f64 = 1e-200;

/// (1/(α-1)) log ∫ a^α b^{1-α} by adaptive quadrature (absolute tolerance
/// 1e-8 on the result).
pub fn numeric_renyi_divergence(
    density_a: impl Fn(f64) -> f64,
    density_b: impl Fn(f64) -> f64,
    alpha: f64,
    support: Interval,
) -> Result<f64> {
    finite_alpha(alpha)?;
    let mut unbounded = false;
    let integrand = |x: f64| {
        let (a, b) = (density_a(x), density_b(x));
        if a <= 0.0 {
            0.0
        } else if b <= 0.0 {
            // Both densities underflow together far in the tails.
            if a > NEGLIGIBLE_DENSITY {
                unbounded = true;
            }
            0.0
        } else {
            (alpha * a.ln() + (1.0 - alpha) * b.ln()).exp()
        }
    };
    let quad = Quadrature { abs_tol: 1e-8 * (alpha - 1.0).min(1.0) * 1e-2, ..Default::default() };
    let (value, _) = quad.integrate(integrand, support)?;
    if unbounded {
        return Err(Error::Numerical("second density vanishes where the first does not".into()));
    }
    if !(value > 0.0) {
        return Err(Error::Numerical(format!("Rényi integral evaluated to {value}")));
    }
    Ok(value.ln() / (alpha - 1.0))
}

/// Normal density with mean `mu` and standard deviation `sigma`.
pub fn normal_density(mu: f64, sigma: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let t = (x - mu) / sigma;
        (-0.5 * t * t).exp() / (sigma * (2.0 * PI).sqrt())
    }
}

/// Laplace density with location `mu` and scale `b`.
pub fn laplace_density(mu: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (-(x - mu).abs() / b).exp() / (2.0 * b)
}
