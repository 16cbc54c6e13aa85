//! Wasserstein-type distances between discrete distributions and the
//! framework-level sensitivities built from them.
//!
//! W∞ and the (z, δ)-proximity threshold are decided by maximum flow on
//! integer-scaled masses over the finite grid of pairwise distances, so both
//! are exact grid values. W_p uses the quantile formula in one dimension and
//! minimum-cost transport otherwise.

mod flow;
mod mincost;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::renyi::shift_divergence_vec;
use crate::types::{DiscreteDistribution, Framework, NoiseSpec, Norm};

pub use mincost::{min_cost_transport, CostMatrix};

/// Default per-side atom cap for minimum-cost transport.
pub const DEFAULT_ATOM_CAP: usize = 400;

/// Environment variable that overrides [`DEFAULT_ATOM_CAP`].
pub const ATOM_CAP_ENV: &str = "PFKIT_ATOM_CAP";

/// Integer mass units per unit of probability in the flow computations.
const FLOW_SCALE: f64 = 1e12;

pub fn atom_cap() -> usize {
    std::env::var(ATOM_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ATOM_CAP)
}

fn check_dims(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    Ok(())
}

fn check_cap(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<()> {
    let cap = atom_cap();
    let atoms = mu.len().max(nu.len());
    if atoms > cap {
        return Err(Error::CapExceeded { atoms, cap });
    }
    Ok(())
}

/// Largest-remainder rounding of probabilities to integers summing to
/// exactly `FLOW_SCALE`.
fn scale_masses(w: &[f64]) -> Vec<i64> {
    let total = FLOW_SCALE as i64;
    let raw: Vec<f64> = w.iter().map(|x| x * FLOW_SCALE).collect();
    let mut units: Vec<i64> = raw.iter().map(|x| x.floor() as i64).collect();
    let mut short = total - units.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())));
    let mut k = 0;
    while short > 0 {
        units[order[k % order.len()]] += 1;
        short -= 1;
        k += 1;
    }
    while short < 0 {
        let i = order[order.len() - 1 - (k % order.len())];
        if units[i] > 1 {
            units[i] -= 1;
            short += 1;
        }
        k += 1;
    }
    units
}

/// Pairwise distances plus the flow network data shared by the threshold
/// searches.
struct ThresholdProblem {
    n: usize,
    m: usize,
    dist: Vec<f64>,
    a: Vec<i64>,
    b: Vec<i64>,
    grid: Vec<f64>,
}

impl ThresholdProblem {
    fn new(mu: &DiscreteDistribution, nu: &DiscreteDistribution, norm: Norm) -> Self {
        let (n, m) = (mu.len(), nu.len());
        let mut dist = Vec::with_capacity(n * m);
        for x in mu.points() {
            for y in nu.points() {
                dist.push(norm.distance(x, y));
            }
        }
        let mut grid = dist.clone();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        ThresholdProblem { n, m, dist, a: scale_masses(mu.weights()), b: scale_masses(nu.weights()), grid }
    }

    /// Mass (in units) a coupling can place on pairs within distance `z`.
    fn coverable(&self, z: f64) -> i64 {
        let (n, m) = (self.n, self.m);
        let (s, t) = (n + m, n + m + 1);
        let mut g = flow::MaxFlow::new(n + m + 2);
        for i in 0..n {
            g.add_edge(s, i, self.a[i]);
        }
        for j in 0..m {
            g.add_edge(n + j, t, self.b[j]);
        }
        for i in 0..n {
            for j in 0..m {
                if self.dist[i * m + j] <= z {
                    g.add_edge(i, n + j, FLOW_SCALE as i64);
                }
            }
        }
        g.run(s, t)
    }

    /// Smallest grid value whose coverable mass reaches `required` units,
    /// up to a slack of one unit per atom.
    fn smallest_feasible(&self, required: f64) -> f64 {
        let slack = (self.n + self.m) as f64;
        let ok = |z: f64| self.coverable(z) as f64 + slack >= required;
        let (mut lo, mut hi) = (0usize, self.grid.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if ok(self.grid[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        self.grid[lo]
    }
}

/// Comonotone matching for 1D uniform distributions with equal atom counts.
fn w_inf_comonotone(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Option<f64> {
    if mu.dim() != 1 || mu.len() != nu.len() || !mu.is_uniform() || !nu.is_uniform() {
        return None;
    }
    // Canonical atoms are already sorted.
    Some(mu.points().iter().zip(nu.points()).map(|(x, y)| (x[0] - y[0]).abs()).fold(0.0, f64::max))
}

/// W∞ by threshold search and maximum flow, for any dimension.
pub fn w_inf_flow(mu: &DiscreteDistribution, nu: &DiscreteDistribution, norm: Norm) -> Result<f64> {
    check_dims(mu, nu)?;
    Ok(ThresholdProblem::new(mu, nu, norm).smallest_feasible(FLOW_SCALE))
}

/// Exact ∞-Wasserstein distance.
pub fn w_inf(mu: &DiscreteDistribution, nu: &DiscreteDistribution, norm: Norm) -> Result<f64> {
    check_dims(mu, nu)?;
    if let Some(v) = w_inf_comonotone(mu, nu) {
        return Ok(v);
    }
    w_inf_flow(mu, nu, norm)
}

/// Smallest pairwise distance `z` such that some coupling puts mass at least
/// `1 - delta` on pairs within `z`.
pub fn near_threshold(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    delta: f64,
    norm: Norm,
) -> Result<f64> {
    check_dims(mu, nu)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    Ok(ThresholdProblem::new(mu, nu, norm).smallest_feasible((1.0 - delta) * FLOW_SCALE))
}

/// W_p for one-dimensional distributions via quantile functions.
pub fn w_p_1d(mu: &DiscreteDistribution, nu: &DiscreteDistribution, p: f64) -> Result<f64> {
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(invalid("w_p_1d needs one-dimensional distributions"));
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be >= 1, got {p}")));
    }
    let cumulative = |w: &[f64]| {
        let mut acc = 0.0;
        let mut c: Vec<f64> = w
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect();
        *c.last_mut().unwrap() = 1.0;
        c
    };
    let (ca, cb) = (cumulative(mu.weights()), cumulative(nu.weights()));
    let (xa, xb) = (mu.points(), nu.points());
    let (mut i, mut j, mut prev, mut total) = (0, 0, 0.0, 0.0);
    while i < ca.len() && j < cb.len() {
        let next = ca[i].min(cb[j]);
        total += (next - prev) * (xa[i][0] - xb[j][0]).abs().powf(p);
        prev = next;
        if ca[i] == next {
            i += 1;
        }
        if cb[j] == next {
            j += 1;
        }
    }
    Ok(total.powf(1.0 / p))
}

/// Exact W_p in any dimension by minimum-cost transport with cost ‖x-y‖^p.
pub fn w_p_discrete(mu: &DiscreteDistribution, nu: &DiscreteDistribution, p: f64, norm: Norm) -> Result<f64> {
    check_dims(mu, nu)?;
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be >= 1, got {p}")));
    }
    check_cap(mu, nu)?;
    let (x, y) = (mu.points(), nu.points());
    let cost = CostMatrix::from_fn(mu.len(), nu.len(), |i, j| norm.distance(&x[i], &y[j]).powf(p));
    Ok(min_cost_transport(mu.weights(), nu.weights(), &cost).powf(1.0 / p))
}

/// W_p by the cheapest exact route for the dimension.
pub fn w_p(mu: &DiscreteDistribution, nu: &DiscreteDistribution, p: f64, norm: Norm) -> Result<f64> {
    if mu.dim() == 1 && nu.dim() == 1 {
        w_p_1d(mu, nu, p)
    } else {
        w_p_discrete(mu, nu, p, norm)
    }
}

/// Minimum over couplings of E[exp(q(α-1) D_{q(α-1)+1}(ζ, ζ shifted by X-Y))]
/// for product noise ζ. At least 1; 1 exactly when `mu == nu`. Saturates
/// to infinity beyond the float range; see [`dagwm_log_cost`].
pub fn dagwm_cost(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    noise: &NoiseSpec,
    q: f64,
    alpha: f64,
) -> Result<f64> {
    dagwm_log_cost(mu, nu, noise, q, alpha).map(f64::exp)
}

/// Natural log of [`dagwm_cost`], finite for any shifts.
pub fn dagwm_log_cost(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    noise: &NoiseSpec,
    q: f64,
    alpha: f64,
) -> Result<f64> {
    check_dims(mu, nu)?;
    if noise.dim() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: noise.dim() });
    }
    if !(q >= 1.0) || !(alpha > 1.0) || !alpha.is_finite() {
        return Err(invalid(format!("need q >= 1 and finite alpha > 1 (q={q}, alpha={alpha})")));
    }
    check_cap(mu, nu)?;
    let order = q * (alpha - 1.0) + 1.0;
    let (x, y) = (mu.points(), nu.points());
    let mut exps = Vec::with_capacity(mu.len() * nu.len());
    let mut shift = vec![0.0; mu.dim()];
    for xi in x {
        for yj in y {
            for (s, (a, b)) in shift.iter_mut().zip(xi.iter().zip(yj)) {
                *s = a - b;
            }
            exps.push((order - 1.0) * shift_divergence_vec(noise, &shift, order)?);
        }
    }
    // Every entry must stay finite: an infinite cost would read as a
    // forbidden edge. Exponents more than EXP_SPREAD below the base are
    // raised to it, which can only overstate the cost.
    let lo = exps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let base = lo.max(hi - EXP_SPREAD);
    let cost = CostMatrix {
        rows: mu.len(),
        cols: nu.len(),
        data: exps.iter().map(|e| (e - base).max(-EXP_SPREAD).exp()).collect(),
    };
    Ok(base + min_cost_transport(mu.weights(), nu.weights(), &cost).ln())
}

/// Largest exponent spread kept exactly in the distribution-aware cost.
const EXP_SPREAD: f64 = 700.0;

/// Distribution-aware transport settings: noise, Hölder exponent q, order α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DagwmConfig {
    pub noise: NoiseSpec,
    pub q: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityConfig {
    pub norm: Norm,
    pub delta: Option<f64>,
    pub p_list: Vec<f64>,
    pub dagwm: Option<DagwmConfig>,
    /// Classical (group) sensitivity, echoed into the report when known.
    pub delta_group: Option<f64>,
}

impl SensitivityConfig {
    pub fn new(norm: Norm) -> Self {
        SensitivityConfig { norm, delta: None, p_list: Vec::new(), dagwm: None, delta_group: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaValue {
    pub delta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub q: f64,
    pub alpha: f64,
    pub value: f64,
    /// `ln(value)`, kept separately since `value` can overflow.
    pub log_value: f64,
}

/// Per-pair quantities behind a [`SensitivityReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSensitivity {
    pub label: String,
    pub w_inf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w_p: Vec<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dagwm_log_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub delta_group: Option<f64>,
    pub delta_g: f64,
    pub delta_g_delta: Option<DeltaValue>,
    pub delta_g_zeta: Option<ZetaValue>,
    pub w_p: Option<Vec<PValue>>,
    pub pairs: Vec<PairSensitivity>,
}

fn pair_sensitivity(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    label: &str,
    cfg: &SensitivityConfig,
) -> Result<PairSensitivity> {
    Ok(PairSensitivity {
        label: label.to_string(),
        w_inf: w_inf(mu, nu, cfg.norm)?,
        near_threshold: cfg.delta.map(|d| near_threshold(mu, nu, d, cfg.norm)).transpose()?,
        w_p: cfg
            .p_list
            .iter()
            .map(|&p| Ok(PValue { p, value: w_p(mu, nu, p, cfg.norm)? }))
            .collect::<Result<_>>()?,
        dagwm_log_cost: cfg.dagwm.map(|c| dagwm_log_cost(mu, nu, &c.noise, c.q, c.alpha)).transpose()?,
    })
}

/// Maxima over all secret pairs of the requested per-pair quantities.
/// Pairs are evaluated in parallel; the result does not depend on order.
pub fn framework_sensitivity(fw: &Framework, cfg: &SensitivityConfig) -> Result<SensitivityReport> {
    if let Some(d) = cfg.delta {
        if !(0.0..1.0).contains(&d) {
            return Err(invalid(format!("delta must lie in [0, 1), got {d}")));
        }
    }
    if let Some(p) = cfg.p_list.iter().find(|p| !(**p >= 1.0)) {
        return Err(invalid(format!("p must be >= 1, got {p}")));
    }
    let pairs: Vec<PairSensitivity> = fw
        .pairs()
        .par_iter()
        .map(|pair| pair_sensitivity(&pair.left, &pair.right, &pair.label, cfg))
        .collect::<Result<_>>()?;

    let max_of = |f: &dyn Fn(&PairSensitivity) -> f64| pairs.iter().map(f).fold(0.0, f64::max);
    let delta_g = max_of(&|p| p.w_inf);
    let delta_g_delta =
        cfg.delta.map(|delta| DeltaValue { delta, value: max_of(&|p| p.near_threshold.unwrap_or(0.0)) });
    let delta_g_zeta = cfg.dagwm.map(|c| {
        let log_value = pairs.iter().map(|p| p.dagwm_log_cost.unwrap_or(0.0)).fold(0.0, f64::max);
        ZetaValue { q: c.q, alpha: c.alpha, value: log_value.exp(), log_value }
    });
    let w_p = (!cfg.p_list.is_empty()).then(|| {
        cfg.p_list
            .iter()
            .enumerate()
            .map(|(k, &p)| PValue { p, value: max_of(&|s| s.w_p[k].value) })
            .collect()
    });
    Ok(SensitivityReport { delta_group: cfg.delta_group, delta_g, delta_g_delta, delta_g_zeta, w_p, pairs })
}
