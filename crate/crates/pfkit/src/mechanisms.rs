//! Noise calibration for the Wasserstein mechanisms, sampling and
//! application.
//!
//! Randomness is counter based: draw `j` under seed `s` comes from a
//! ChaCha20 generator seeded with `s` on stream `j`, so any draw can be
//! reproduced on its own and concurrent samplers never share state.

use rand::distributions::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Normal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::renyi::{clipped_legendre, gen_cauchy_normalizer, laplace_shift_divergence, legendre_index};
use crate::types::{Alpha, NoiseFamily, NoiseSpec, RppGuarantee};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MechanismKind {
    Gwm,
    Gawm,
    Dagwm,
}

/// `M(X) = f(X) + N` with `N` drawn from `noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedMechanism {
    pub noise: NoiseSpec,
    pub guarantee: RppGuarantee,
    pub sensitivity_used: f64,
    pub kind: MechanismKind,
    /// Zero sensitivity: the mechanism adds no noise.
    #[serde(default)]
    pub degenerate: bool,
}

fn check_sensitivity(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("sensitivity must be finite and >= 0, got {s}")))
    }
}

fn check_epsilon(e: f64) -> Result<()> {
    if e.is_finite() && e > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("epsilon must be positive, got {e}")))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    Ok(())
}

fn gaussian_mechanism(
    sensitivity: f64,
    variance: f64,
    d: usize,
    guarantee: RppGuarantee,
    kind: MechanismKind,
) -> Result<CalibratedMechanism> {
    let degenerate = sensitivity == 0.0;
    let noise = if degenerate {
        NoiseSpec::degenerate(NoiseFamily::Gaussian { sigma: 0.0 }, d)
    } else {
        NoiseSpec::gaussian(variance.sqrt(), d)?
    };
    Ok(CalibratedMechanism { noise, guarantee, sensitivity_used: sensitivity, kind, degenerate })
}

fn laplace_mechanism(
    sensitivity: f64,
    scale: f64,
    d: usize,
    guarantee: RppGuarantee,
    kind: MechanismKind,
) -> Result<CalibratedMechanism> {
    let degenerate = scale == 0.0;
    let noise = if degenerate {
        NoiseSpec::degenerate(NoiseFamily::Laplace { scale: 0.0 }, d)
    } else {
        NoiseSpec::laplace(scale, d)?
    };
    Ok(CalibratedMechanism { noise, guarantee, sensitivity_used: sensitivity, kind, degenerate })
}

/// Gaussian GWM: variance α Δ_G² / (2ε) for (α, ε)-RPP, with Δ_G under L2.
pub fn gwm_gaussian(delta_g: f64, alpha: f64, epsilon: f64, d: usize) -> Result<CalibratedMechanism> {
    check_sensitivity(delta_g)?;
    check_epsilon(epsilon)?;
    check_dim(d)?;
    let a = Alpha::finite(alpha)?;
    if a.is_infinite() {
        return Err(Error::Unsupported("gaussian noise cannot reach infinite order".into()));
    }
    let variance = alpha * delta_g * delta_g / (2.0 * epsilon);
    gaussian_mechanism(delta_g, variance, d, RppGuarantee::new(a, epsilon, None)?, MechanismKind::Gwm)
}

/// Target for the Laplace GWM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum LaplaceTarget {
    /// Plain ε-Pufferfish privacy; the scale is derived.
    Pure { epsilon: f64 },
    /// Finite order with a fixed scale; ε is derived.
    Renyi { alpha: f64, scale: f64 },
}

/// Laplace GWM, with Δ_G under L1.
pub fn gwm_laplace(delta_g: f64, target: LaplaceTarget, d: usize) -> Result<CalibratedMechanism> {
    check_sensitivity(delta_g)?;
    check_dim(d)?;
    match target {
        LaplaceTarget::Pure { epsilon } => {
            check_epsilon(epsilon)?;
            let g = RppGuarantee::new(Alpha::Infinite, epsilon, None)?;
            laplace_mechanism(delta_g, delta_g / epsilon, d, g, MechanismKind::Gwm)
        }
        LaplaceTarget::Renyi { alpha, scale } => {
            let a = Alpha::finite(alpha)?;
            if !(scale.is_finite() && scale > 0.0) {
                return Err(invalid(format!("laplace scale must be positive, got {scale}")));
            }
            let eps = laplace_shift_divergence(scale, delta_g, a);
            let g = RppGuarantee::new(a, eps, None)?;
            laplace_mechanism(delta_g, scale, d, g, MechanismKind::Gwm)
        }
    }
}

/// Gaussian GAWM: variance α Δ² / (2(ε + α/(α-1) log(1-δ))) for
/// (α, ε, δ)-approximate RPP.
pub fn gawm_gaussian(
    delta_g_delta: f64,
    alpha: f64,
    epsilon: f64,
    delta: f64,
    d: usize,
) -> Result<CalibratedMechanism> {
    check_sensitivity(delta_g_delta)?;
    check_epsilon(epsilon)?;
    check_dim(d)?;
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid(format!("alpha must be a finite real above 1, got {alpha}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let denom = epsilon + alpha / (alpha - 1.0) * (-delta).ln_1p();
    if !(denom > 0.0) {
        return Err(Error::Infeasible(format!(
            "epsilon {epsilon} cannot absorb delta {delta} at alpha {alpha}"
        )));
    }
    let variance = alpha * delta_g_delta * delta_g_delta / (2.0 * denom);
    let g = RppGuarantee::new(Alpha::Finite(alpha), epsilon, Some(delta))?;
    gaussian_mechanism(delta_g_delta, variance, d, g, MechanismKind::Gawm)
}

/// Laplace GAWM: scale Δ / (ε + log(1-δ)) for (ε, δ)-PP.
pub fn gawm_laplace(delta_g_delta: f64, epsilon: f64, delta: f64, d: usize) -> Result<CalibratedMechanism> {
    check_sensitivity(delta_g_delta)?;
    check_epsilon(epsilon)?;
    check_dim(d)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let denom = epsilon + (-delta).ln_1p();
    if !(denom > 0.0) {
        return Err(Error::Infeasible(format!("epsilon {epsilon} cannot absorb delta {delta}")));
    }
    let g = RppGuarantee::new(Alpha::Infinite, epsilon, Some(delta))?;
    laplace_mechanism(delta_g_delta, delta_g_delta / denom, d, g, MechanismKind::Gawm)
}

/// RPP level of i.i.d. generalized Cauchy noise under the distribution-aware
/// mechanism, where `delta_wp` is the W_{dkq(α-1)} sensitivity under L2.
pub fn cauchy_mechanism_epsilon(
    delta_wp: f64,
    d: usize,
    k: f64,
    lambda: f64,
    q: f64,
    alpha: f64,
) -> Result<f64> {
    check_sensitivity(delta_wp)?;
    check_dim(d)?;
    NoiseSpec::generalized_cauchy(k, lambda, d)?;
    if !(q >= 1.0) || !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid(format!("need q >= 1 and finite alpha > 1 (q={q}, alpha={alpha})")));
    }
    let m = q * (alpha - 1.0);
    let n = legendre_index(k, m + 1.0)?;
    if n == 0 {
        return Err(invalid("k q (alpha - 1) / 2 must be a positive integer"));
    }
    let ratio = gen_cauchy_normalizer(k, lambda)? * std::f64::consts::PI / lambda;
    let w = lambda * delta_wp / d as f64;
    Ok((d as f64 * (ratio * clipped_legendre(n, 1.0 + w * w)).ln() / m).max(0.0))
}

/// Distribution-aware mechanism with generalized Cauchy noise.
pub fn cauchy_mechanism(
    delta_wp: f64,
    d: usize,
    k: f64,
    lambda: f64,
    q: f64,
    alpha: f64,
) -> Result<CalibratedMechanism> {
    let eps = cauchy_mechanism_epsilon(delta_wp, d, k, lambda, q, alpha)?;
    Ok(CalibratedMechanism {
        noise: NoiseSpec::generalized_cauchy(k, lambda, d)?,
        guarantee: RppGuarantee::new(Alpha::Finite(alpha), eps, None)?,
        sensitivity_used: delta_wp,
        kind: MechanismKind::Dagwm,
        degenerate: false,
    })
}

/// Draw number `index` under `seed`.
pub fn sample_one(noise: &NoiseSpec, seed: u64, index: u64) -> Vec<f64> {
    let d = noise.dim();
    if noise.is_degenerate() {
        return vec![0.0; d];
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    match noise.family() {
        NoiseFamily::Gaussian { sigma } => {
            let n = Normal::new(0.0, sigma).expect("sigma validated positive");
            (0..d).map(|_| n.sample(&mut rng)).collect()
        }
        NoiseFamily::Laplace { scale } => (0..d)
            .map(|_| {
                let u: f64 = Open01.sample(&mut rng);
                let u = u - 0.5;
                -scale * u.signum() * (-2.0 * u.abs()).ln_1p()
            })
            .collect(),
        NoiseFamily::GeneralizedCauchy { k, lambda } => {
            let nu = k - 1.0;
            let t = StudentT::new(nu).expect("k validated >= 2");
            (0..d).map(|_| t.sample(&mut rng) / (lambda * nu.sqrt())).collect()
        }
    }
}

/// `n` independent draws, deterministic in `seed`.
pub fn sample(noise: &NoiseSpec, seed: u64, n: usize) -> Vec<Vec<f64>> {
    (0..n as u64).map(|j| sample_one(noise, seed, j)).collect()
}

/// Query value plus one noise draw.
pub fn apply(mech: &CalibratedMechanism, query_value: &[f64], seed: u64) -> Result<Vec<f64>> {
    if query_value.len() != mech.noise.dim() {
        return Err(Error::DimensionMismatch { expected: mech.noise.dim(), got: query_value.len() });
    }
    let noise = sample_one(&mech.noise, seed, 0);
    Ok(query_value.iter().zip(noise).map(|(v, n)| v + n).collect())
}
