//! Closed-form sensitivity bounds for structured priors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pabi::MAX_CONDITION;

/// Records drawn i.i.d. from N(mean, cov), each with `n_attributes` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPrior {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub n_records: usize,
    pub n_attributes: usize,
}

impl GaussianPrior {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, n_records: usize) -> Result<Self> {
        let m = mean.len();
        if cov.nrows() != m || cov.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, got: cov.nrows() });
        }
        if (&cov - cov.transpose()).abs().max() > 1e-10 {
            return Err(invalid("covariance is not symmetric"));
        }
        if cov.clone().symmetric_eigen().eigenvalues.iter().any(|&v| v < -1e-10) {
            return Err(invalid("covariance is not positive semidefinite"));
        }
        Ok(GaussianPrior { mean, cov, n_records, n_attributes: m })
    }
}

/// ‖M Σ Nᵀ (N Σ Nᵀ)⁻¹‖_op · diam: bound on Δ_G when releasing `M X` and
/// protecting `N X` over a secret set of diameter `secret_diam`.
pub fn gaussian_attribute_sensitivity(
    prior: &GaussianPrior,
    release_map: &DMatrix<f64>,
    secret_map: &DMatrix<f64>,
    secret_diam: f64,
) -> Result<f64> {
    let m = prior.n_attributes;
    if release_map.ncols() != m || secret_map.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: release_map.ncols().max(secret_map.ncols()),
        });
    }
    if !(secret_diam >= 0.0) {
        return Err(invalid("secret diameter must be >= 0"));
    }
    let sigma = &prior.cov;
    let cross = release_map * sigma * secret_map.transpose();
    let secret_cov = secret_map * sigma * secret_map.transpose();
    let eig = secret_cov.clone().symmetric_eigen();
    let (lo, hi) =
        eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::Numerical("secret covariance is singular".into()));
    }
    let chol = secret_cov
        .cholesky()
        .ok_or_else(|| Error::Numerical("secret covariance is not positive definite".into()))?;
    // A = cross · S⁻¹, computed as (S⁻¹ crossᵀ)ᵀ since S is symmetric.
    let a = chol.solve(&cross.transpose()).transpose();
    let op = a.singular_values().iter().copied().fold(0.0, f64::max);
    Ok(op * secret_diam)
}

/// L · diam · Σ exp(-2C t_i) for a Langevin diffusion released at the
/// given times.
pub fn diffusion_sensitivity(
    lipschitz: f64,
    diam_k: f64,
    convexity_c: f64,
    timestamps: &[f64],
) -> Result<f64> {
    if timestamps.is_empty() {
        return Err(invalid("no release times"));
    }
    if timestamps.iter().any(|t| !(*t >= 0.0)) {
        return Err(invalid("release times must be >= 0"));
    }
    Ok(lipschitz * diam_k * timestamps.iter().map(|t| (-2.0 * convexity_c * t).exp()).sum::<f64>())
}

/// 2λ + Δ for priors whose conditionals sit within W∞ distance λ of those
/// of the product of their marginals.
pub fn weak_dependence_bound(lambda_dep: f64, delta_classical: f64) -> f64 {
    2.0 * lambda_dep + delta_classical
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prior(cov: DMatrix<f64>) -> GaussianPrior {
        let m = cov.nrows();
        GaussianPrior::new(DVector::zeros(m), cov, 1).unwrap()
    }

    #[test]
    fn uncorrelated_attributes() {
        let p = prior(DMatrix::identity(3, 3));
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let n = DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 0.0]);
        assert_eq!(gaussian_attribute_sensitivity(&p, &m, &n, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn scalar_case() {
        let rho = -0.35;
        let p = prior(DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]));
        let m = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let n = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let v = gaussian_attribute_sensitivity(&p, &m, &n, 1.0).unwrap();
        assert!((v - rho.abs()).abs() < 1e-14);
        let v2 = gaussian_attribute_sensitivity(&p, &m, &n, 3.0).unwrap();
        assert!((v2 - 3.0 * v).abs() < 1e-14);
        // Var(secret) = 4 scales the ratio down.
        let p = prior(DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.6, 4.0]));
        let v = gaussian_attribute_sensitivity(&p, &m, &n, 1.0).unwrap();
        assert!((v - 0.15).abs() < 1e-14);
    }

    #[test]
    fn rotation_invariant() {
        let cov = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.4, 0.3, 1.0, 0.2, -0.4, 0.2, 1.5]);
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.5]);
        let n = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 0.0, 0.3, 0.0, 1.0]);
        let base = gaussian_attribute_sensitivity(&prior(cov.clone()), &m, &n, 1.0).unwrap();
        let (c, s) = (0.6f64.cos(), 0.6f64.sin());
        let r = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let rotated = prior(&r * cov * r.transpose());
        let v = gaussian_attribute_sensitivity(&rotated, &(&m * r.transpose()), &(&n * r.transpose()), 1.0)
            .unwrap();
        assert!((v - base).abs() < 1e-12);
    }

    #[test]
    fn singular_secret_rejected() {
        let p = prior(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let m = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let n = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        assert!(gaussian_attribute_sensitivity(&p, &m, &n, 1.0).is_err());
    }

    #[test]
    fn diffusion_values() {
        let v = diffusion_sensitivity(1.0, 1.0, 0.5, &[1.0]).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(diffusion_sensitivity(2.0, 3.0, 0.5, &[0.0]).unwrap(), 6.0);
        assert!(diffusion_sensitivity(1.0, 1.0, 1.0, &[400.0, 500.0]).unwrap() < 1e-300);
        let a = diffusion_sensitivity(1.0, 2.0, 0.3, &[0.5, 1.0]).unwrap();
        let b = diffusion_sensitivity(1.0, 2.0, 0.3, &[0.5]).unwrap()
            + diffusion_sensitivity(1.0, 2.0, 0.3, &[1.0]).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(
            diffusion_sensitivity(1.0, 2.0, 0.4, &[1.0]).unwrap()
                < diffusion_sensitivity(1.0, 2.0, 0.3, &[1.0]).unwrap()
        );
    }

    #[test]
    fn weak_dependence_values() {
        assert_eq!(weak_dependence_bound(0.0, 1.0), 1.0);
        assert_eq!(weak_dependence_bound(0.5, 1.0), 2.0);
    }
}
