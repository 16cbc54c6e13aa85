//! Privacy amplification by iteration for contractive noisy iterations
//! `W_{t+1} = psi(W_t, X_{t+1}) + N_{t+1}`, with shifts driven by the prior.
//!
//! Step `t` contributes the envelope of its noise at the allocated shift
//! `a_t`. Allocations must keep every residual `z_t = sum(s) - sum(a)` over
//! the prefix nonnegative; the final residual is returned with the bound
//! since the bound is on the divergence shifted by it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::renyi::r_alpha;
use crate::types::{Alpha, NoiseSpec};

/// How the shift budget is spent across steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Allocation {
    /// `a_t = s_t`.
    Naive,
    /// The total shift spread evenly over steps `from..T` (0-based).
    TailUniform {
        from: usize,
    },
    /// The mean shift at every step.
    GlobalUniform,
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PabiSchedule {
    pub shifts: Vec<f64>,
    pub allocations: Vec<f64>,
    /// One spec shared by all steps, or one per step.
    pub noises: Vec<NoiseSpec>,
    pub alpha: f64,
}

/// Divergence bound at residual shift `residual_shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PabiBound {
    pub loss: f64,
    pub residual_shift: f64,
}

impl PabiSchedule {
    pub fn new(shifts: Vec<f64>, allocation: Allocation, noises: Vec<NoiseSpec>, alpha: f64) -> Result<Self> {
        let t = shifts.len();
        if t == 0 {
            return Err(invalid("schedule needs at least one step"));
        }
        if shifts.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(invalid("shifts must be finite and >= 0"));
        }
        if noises.len() != 1 && noises.len() != t {
            return Err(invalid(format!("{} noise specs for {t} steps", noises.len())));
        }
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(invalid(format!("alpha must be a finite real above 1, got {alpha}")));
        }
        let total: f64 = shifts.iter().sum();
        let allocations = match allocation {
            Allocation::Naive => shifts.clone(),
            Allocation::TailUniform { from } => {
                if from >= t {
                    return Err(invalid(format!("tail start {from} beyond {t} steps")));
                }
                let share = total / (t - from) as f64;
                (0..t).map(|i| if i >= from { share } else { 0.0 }).collect()
            }
            Allocation::GlobalUniform => vec![total / t as f64; t],
            Allocation::Custom(a) => {
                if a.len() != t {
                    return Err(invalid(format!("{} allocations for {t} steps", a.len())));
                }
                if a.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(invalid("allocations must be finite and >= 0"));
                }
                a
            }
        };
        Ok(PabiSchedule { shifts, allocations, noises, alpha })
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    fn noise(&self, t: usize) -> &NoiseSpec {
        if self.noises.len() == 1 {
            &self.noises[0]
        } else {
            &self.noises[t]
        }
    }

    /// Final residual, or the first step (1-based) whose residual is negative.
    pub fn residual(&self) -> Result<f64> {
        let scale = self.shifts.iter().sum::<f64>().max(1.0);
        let mut z = 0.0;
        for (t, (s, a)) in self.shifts.iter().zip(&self.allocations).enumerate() {
            z += s - a;
            if z < -1e-12 * scale {
                return Err(Error::InfeasibleAllocation { step: t + 1, residual: z });
            }
        }
        Ok(z.max(0.0))
    }
}

/// Sum over steps of the noise envelope at the allocated shift.
pub fn pabi_bound(schedule: &PabiSchedule) -> Result<PabiBound> {
    let residual_shift = schedule.residual()?;
    let alpha = Alpha::finite(schedule.alpha)?;
    let mut loss = 0.0;
    for (t, &a) in schedule.allocations.iter().enumerate() {
        loss += r_alpha(schedule.noise(t), a, alpha)?;
    }
    Ok(PabiBound { loss, residual_shift })
}

/// Bound for one record released at step `i` (1-based) of `T` under
/// Gaussian noise of standard deviation ησ; equals 2αL²/(σ²(T-i+1)).
pub fn dp_special_case_bound(
    lipschitz: f64,
    sigma: f64,
    alpha: f64,
    steps: usize,
    i: usize,
    eta: f64,
) -> Result<f64> {
    if !(1..=steps).contains(&i) {
        return Err(invalid(format!("step {i} outside 1..={steps}")));
    }
    let s = 2.0 * lipschitz * eta;
    let shifts = (1..=steps).map(|t| if t == i { s } else { 0.0 }).collect();
    let noise = NoiseSpec::gaussian(eta * sigma, 1)?;
    let schedule = PabiSchedule::new(shifts, Allocation::TailUniform { from: i - 1 }, vec![noise], alpha)?;
    let bound = pabi_bound(&schedule)?.loss;
    let closed = 2.0 * alpha * lipschitz * lipschitz / (sigma * sigma * (steps - i + 1) as f64);
    if (bound - closed).abs() > 1e-12 * closed.max(1.0) {
        return Err(Error::Numerical(format!("accountant gave {bound}, closed form {closed}")));
    }
    Ok(bound)
}

/// T · R_α(ζ, mean shift) for nonincreasing shifts.
pub fn improved_uniform_bound(shifts: &[f64], noise: &NoiseSpec, alpha: f64) -> Result<f64> {
    if shifts.is_empty() {
        return Err(invalid("no shifts"));
    }
    if let Some(w) = shifts.windows(2).position(|w| w[1] > w[0]) {
        return Err(invalid(format!("shifts increase at step {}", w + 2)));
    }
    let schedule = PabiSchedule::new(shifts.to_vec(), Allocation::GlobalUniform, vec![*noise], alpha)?;
    Ok(pabi_bound(&schedule)?.loss)
}

/// Noisy projected SGD on an L-Lipschitz, β-smooth convex loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdParams {
    pub lipschitz: f64,
    pub eta: f64,
    /// Standard deviation of the per-step Gaussian noise.
    pub sigma: f64,
    pub beta_smooth: f64,
    /// Supremum over the parameter set of the gradient's Lipschitz
    /// constant in the data.
    pub c_sup: f64,
    /// Difference `a - b` between the two secret values.
    pub diff_ab: Vec<f64>,
}

impl SgdParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !(pos(self.lipschitz)
            && pos(self.eta)
            && pos(self.sigma)
            && pos(self.beta_smooth)
            && pos(self.c_sup))
        {
            return Err(invalid("SGD constants must be finite and positive"));
        }
        if self.eta >= 2.0 / self.beta_smooth {
            return Err(invalid(format!(
                "step size {} breaks contractivity (needs eta < 2/beta = {})",
                self.eta,
                2.0 / self.beta_smooth
            )));
        }
        Ok(())
    }

    pub fn diff_norm(&self) -> f64 {
        self.diff_ab.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Gradient-space shift for a data-space distance `w`.
    fn clamp(&self, w: f64) -> f64 {
        (2.0 * self.lipschitz).min(self.c_sup * w)
    }
}

/// s_t = η min(2L, c_sup W∞_t).
pub fn sgd_shift_sequence(params: &SgdParams, w_inf_per_step: &[f64]) -> Vec<f64> {
    w_inf_per_step.iter().map(|&w| params.eta * params.clamp(w)).collect()
}

/// Largest ratio of extreme eigenvalues accepted for a covariance solve.
pub const MAX_CONDITION: f64 = 1e12;

/// min(2L, c_sup ‖Cov(X_t, X_i) Cov(X_i)⁻¹ (a-b)‖) for each step under a
/// Gaussian prior; step `secret_index` (0-based) uses ‖a-b‖.
pub fn gaussian_prior_shifts(
    cov_blocks: &[DMatrix<f64>],
    cov_ii: &DMatrix<f64>,
    diff_ab: &[f64],
    secret_index: usize,
    params: &SgdParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    let d = diff_ab.len();
    if cov_ii.nrows() != d || cov_ii.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: cov_ii.nrows() });
    }
    let solved = spd_solve(cov_ii, &DVector::from_column_slice(diff_ab))?;
    let direct = DVector::from_column_slice(diff_ab).norm();
    cov_blocks
        .iter()
        .enumerate()
        .map(|(t, block)| {
            if block.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: block.ncols() });
            }
            let w = if t == secret_index { direct } else { (block * &solved).norm() };
            Ok(params.clamp(w))
        })
        .collect()
}

/// Solve `a x = b` for symmetric positive definite `a`, rejecting
/// ill-conditioned matrices.
pub(crate) fn spd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if (a - a.transpose()).abs().max() > 1e-10 * a.abs().max().max(1.0) {
        return Err(invalid("covariance is not symmetric"));
    }
    let eig = a.clone().symmetric_eigen();
    let (lo, hi) =
        eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::Numerical(format!(
            "covariance is singular or ill-conditioned (eigenvalues in [{lo}, {hi}])"
        )));
    }
    let chol =
        a.clone().cholesky().ok_or_else(|| Error::Numerical("covariance is not positive definite".into()))?;
    Ok(chol.solve(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    /// Naive allocation: per-step losses add up.
    PerStep,
    /// Uniform allocation of the total shift.
    Improved,
}

/// Loss after each prefix length `T` for correlations `rho_t` between step
/// `t`'s data and the secret, with N(0, σ²) noise per step.
pub fn privacy_loss_curve(
    rho_schedule: &[f64],
    params: &SgdParams,
    alpha: f64,
    mode: CurveMode,
) -> Result<Vec<(usize, f64)>> {
    params.validate()?;
    if rho_schedule.iter().any(|r| !(-1.0..=1.0).contains(r)) {
        return Err(invalid("correlations must lie in [-1, 1]"));
    }
    let norm = params.diff_norm();
    let w: Vec<f64> = rho_schedule.iter().map(|r| r.abs() * norm).collect();
    let shifts = sgd_shift_sequence(params, &w);
    if mode == CurveMode::Improved {
        if let Some(i) = rho_schedule.windows(2).position(|p| p[1].abs() > p[0].abs()) {
            return Err(invalid(format!("|rho| increases at step {}", i + 2)));
        }
    }
    let noise = NoiseSpec::gaussian(params.sigma, 1)?;
    (1..=shifts.len())
        .map(|t| {
            let prefix = &shifts[..t];
            let loss = match mode {
                CurveMode::Improved => improved_uniform_bound(prefix, &noise, alpha)?,
                CurveMode::PerStep => {
                    let s = PabiSchedule::new(prefix.to_vec(), Allocation::Naive, vec![noise], alpha)?;
                    pabi_bound(&s)?.loss
                }
            };
            Ok((t, loss))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(sigma: f64) -> NoiseSpec {
        NoiseSpec::gaussian(sigma, 1).unwrap()
    }

    fn unit() -> SgdParams {
        SgdParams { lipschitz: 1.0, eta: 1.0, sigma: 1.0, beta_smooth: 1.0, c_sup: 1.0, diff_ab: vec![1.0] }
    }

    #[test]
    fn bound_examples() {
        let third = 1.0 / 3.0;
        let s = PabiSchedule::new(vec![1.0, 0.0, 0.0], Allocation::Custom(vec![third; 3]), vec![g(1.0)], 2.0)
            .unwrap();
        let b = pabi_bound(&s).unwrap();
        assert!((b.loss - 1.0 / 3.0).abs() < 1e-15);
        assert!(b.residual_shift.abs() < 1e-15);
        let s = PabiSchedule::new(vec![0.0; 4], Allocation::Naive, vec![g(1.0)], 2.0).unwrap();
        assert_eq!(pabi_bound(&s).unwrap().loss, 0.0);
        let s = PabiSchedule::new(
            vec![1.0, 0.0, 1.0],
            Allocation::Custom(vec![1.0, 1.0, 0.0]),
            vec![g(1.0)],
            2.0,
        )
        .unwrap();
        match pabi_bound(&s) {
            Err(Error::InfeasibleAllocation { step, residual }) => {
                assert_eq!(step, 2);
                assert_eq!(residual, -1.0);
            }
            other => panic!("{other:?}"),
        }
        let s =
            PabiSchedule::new(vec![1.0, 1.0], Allocation::Custom(vec![1.0, 0.5]), vec![g(1.0)], 2.0).unwrap();
        assert_eq!(pabi_bound(&s).unwrap().residual_shift, 0.5);
    }

    #[test]
    fn dp_special_case() {
        assert!((dp_special_case_bound(1.0, 1.0, 2.0, 4, 1, 0.1).unwrap() - 1.0).abs() < 1e-15);
        let v = dp_special_case_bound(0.7, 1.3, 3.0, 9, 9, 0.2).unwrap();
        assert!((v - 2.0 * 3.0 * 0.49 / 1.69).abs() < 1e-12);
        let a = dp_special_case_bound(1.0, 2.0, 2.0, 10, 3, 0.01).unwrap();
        let b = dp_special_case_bound(1.0, 2.0, 2.0, 10, 3, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(dp_special_case_bound(1.0, 1.0, 2.0, 4, 5, 0.1).is_err());
    }

    #[test]
    fn improved_examples() {
        assert!((improved_uniform_bound(&[1.0, 1.0], &g(1.0), 2.0).unwrap() - 2.0).abs() < 1e-15);
        let v = improved_uniform_bound(&[1.0, 0.0, 0.0, 0.0], &g(1.0), 2.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let naive =
            PabiSchedule::new(vec![1.0, 0.0, 0.0, 0.0], Allocation::Naive, vec![g(1.0)], 2.0).unwrap();
        assert_eq!(pabi_bound(&naive).unwrap().loss, 1.0);
        assert_eq!(improved_uniform_bound(&[0.0; 3], &g(1.0), 2.0).unwrap(), 0.0);
        assert!(improved_uniform_bound(&[0.0, 1.0], &g(1.0), 2.0).is_err());
    }

    #[test]
    fn shift_sequence() {
        let p = SgdParams { eta: 0.1, lipschitz: 2.0, ..unit() };
        let s = sgd_shift_sequence(&p, &[1e9, 0.0, 1.0]);
        assert_eq!(s, vec![0.4, 0.0, 0.1]);
    }

    #[test]
    fn independent_prior_is_flat_in_t() {
        let p = SgdParams { eta: 0.3, sigma: 0.8, c_sup: 1.7, diff_ab: vec![0.6], ..unit() };
        let alpha = 3.0;
        let flat = alpha * p.eta.powi(2) * (2.0f64).min(1.7 * 0.6).powi(2) / (2.0 * 0.64);
        for t in 1..12 {
            let mut w = vec![0.0; t];
            w[0] = 0.6;
            let s = sgd_shift_sequence(&p, &w);
            let naive = PabiSchedule::new(s.clone(), Allocation::Naive, vec![g(0.8)], alpha).unwrap();
            let v = pabi_bound(&naive).unwrap().loss;
            assert!((v - flat).abs() < 1e-14);
            let tail =
                PabiSchedule::new(s, Allocation::TailUniform { from: 0 }, vec![g(0.8)], alpha).unwrap();
            assert!(pabi_bound(&tail).unwrap().loss <= v + 1e-15);
        }
    }

    #[test]
    fn gaussian_shifts_identity() {
        let p = SgdParams { lipschitz: 3.0, c_sup: 2.0, ..unit() };
        let diff = [0.3, -0.4];
        let rhos = [0.9, -0.5, 0.0, 0.2];
        let blocks: Vec<_> = rhos.iter().map(|r| DMatrix::identity(2, 2) * *r).collect();
        let s = gaussian_prior_shifts(&blocks, &DMatrix::identity(2, 2), &diff, 0, &p).unwrap();
        for (t, r) in rhos.iter().enumerate() {
            let want = if t == 0 { 2.0 * 0.5 } else { (6.0f64).min(2.0 * r.abs() * 0.5) };
            assert!((s[t] - want).abs() < 1e-15);
        }
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(gaussian_prior_shifts(&blocks, &singular, &diff, 0, &p).is_err());
    }

    #[test]
    fn perfect_correlation_is_group_shift() {
        let p = SgdParams { lipschitz: 10.0, ..unit() };
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let blocks = vec![cov.clone(); 5];
        let s = gaussian_prior_shifts(&blocks, &cov, &[1.0, 2.0], 2, &p).unwrap();
        for v in s {
            assert!((v - 5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn curves() {
        let p = unit();
        let c = privacy_loss_curve(&[1.0; 20], &p, 2.0, CurveMode::Improved).unwrap();
        for (t, loss) in c {
            assert!((loss - t as f64).abs() < 1e-12);
        }
        let mut rho = vec![0.0; 10];
        rho[0] = 1.0;
        let c = privacy_loss_curve(&rho, &p, 2.0, CurveMode::Improved).unwrap();
        for (t, loss) in &c {
            assert!((loss - 1.0 / *t as f64).abs() < 1e-15);
        }
        let c = privacy_loss_curve(&rho, &p, 2.0, CurveMode::PerStep).unwrap();
        assert!(c.iter().all(|(_, l)| (*l - 1.0).abs() < 1e-15));
        assert!(privacy_loss_curve(&[0.1, 0.5], &p, 2.0, CurveMode::Improved).is_err());
        assert!(privacy_loss_curve(&[0.1, 0.5], &p, 2.0, CurveMode::PerStep).is_ok());
        let bad = SgdParams { eta: 3.0, ..unit() };
        assert!(privacy_loss_curve(&[1.0], &bad, 2.0, CurveMode::PerStep).is_err());
    }
}
