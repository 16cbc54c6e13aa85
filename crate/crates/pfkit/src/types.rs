//! Shared vocabulary: discrete distributions, noise descriptors, guarantees
//! and the finite family of secret pairs a mechanism must protect.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Tolerance on the total mass of already-normalized probability vectors.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(invalid(format!("unknown norm '{other}' (expected l1 or l2)"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
        })
    }
}

/// Rényi order. `Infinite` is kept distinct from large floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Infinite,
}

impl Alpha {
    pub fn finite(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 1.0 {
            Ok(Alpha::Finite(alpha))
        } else if alpha == f64::INFINITY {
            Ok(Alpha::Infinite)
        } else {
            Err(invalid(format!("alpha must lie in (1, inf], got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Alpha::Finite(a) => a,
            Alpha::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Alpha::Infinite)
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Alpha::Finite(a) => s.serialize_f64(*a),
            Alpha::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let a = match Raw::deserialize(d)? {
            Raw::Num(a) => a,
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "+inf") => f64::INFINITY,
            Raw::Text(t) => return Err(serde::de::Error::custom(format!("bad alpha '{t}'"))),
        };
        Alpha::finite(a).map_err(serde::de::Error::custom)
    }
}

/// Weighted atoms in `dim`-dimensional space, in canonical form: atoms
/// sorted lexicographically, identical points merged, masses summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct DiscreteDistribution {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    dim: usize,
    atoms: Vec<RawAtom>,
}

#[derive(Serialize, Deserialize)]
struct RawAtom {
    point: Vec<f64>,
    weight: f64,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let (points, weights): (Vec<_>, Vec<_>) = raw.atoms.into_iter().map(|a| (a.point, a.weight)).unzip();
        let d = DiscreteDistribution::from_probabilities(points, weights)?;
        if d.dim != raw.dim {
            return Err(Error::DimensionMismatch { expected: raw.dim, got: d.dim });
        }
        Ok(d)
    }
}

impl From<DiscreteDistribution> for RawDistribution {
    fn from(d: DiscreteDistribution) -> Self {
        RawDistribution {
            dim: d.dim,
            atoms: d
                .points
                .into_iter()
                .zip(d.weights)
                .map(|(point, weight)| RawAtom { point, weight })
                .collect(),
        }
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

impl DiscreteDistribution {
    /// Builds a distribution from unnormalized positive masses (uniform when
    /// `weights` is `None`).
    pub fn new(points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        let weights = weights.unwrap_or_else(|| vec![1.0; n]);
        Self::build(points, weights, None)
    }

    /// Builds a distribution from masses that should already sum to one;
    /// totals off by at most [`MASS_TOLERANCE`] are renormalized, anything
    /// further is rejected.
    pub fn from_probabilities(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        Self::build(points, weights, Some(MASS_TOLERANCE))
    }

    /// Point mass at `point`.
    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point], None)
    }

    /// 1D convenience constructor from `(value, mass)` pairs.
    pub fn from_pairs_1d(pairs: &[(f64, f64)]) -> Result<Self> {
        let (p, w): (Vec<_>, Vec<_>) = pairs.iter().map(|&(x, w)| (vec![x], w)).unzip();
        Self::new(p, Some(w))
    }

    fn build(points: Vec<Vec<f64>>, weights: Vec<f64>, tol: Option<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("distribution needs at least one atom"));
        }
        if weights.len() != points.len() {
            return Err(invalid(format!("{} weights for {} points", weights.len(), points.len())));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(invalid("points must have positive dimension"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(invalid("points must be finite"));
            }
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("weights must be finite and strictly positive"));
        }
        let mut atoms: Vec<(Vec<f64>, f64)> = points
            .into_iter()
            .map(|p| p.into_iter().map(|x| if x == 0.0 { 0.0 } else { x }).collect())
            .zip(weights)
            .collect();
        // Ties broken by mass so that sums below do not depend on input order.
        atoms.sort_by(|a, b| lex_cmp(&a.0, &b.0).then(a.1.total_cmp(&b.1)));

        let mut points: Vec<Vec<f64>> = Vec::with_capacity(atoms.len());
        let mut merged: Vec<f64> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match points.last() {
                Some(last) if lex_cmp(last, &p).is_eq() => *merged.last_mut().unwrap() += w,
                _ => {
                    points.push(p);
                    merged.push(w);
                }
            }
        }
        let total: f64 = merged.iter().sum();
        if let Some(tol) = tol {
            if (total - 1.0).abs() > tol {
                return Err(invalid(format!("weights sum to {total}, not 1")));
            }
        }
        let weights = merged.into_iter().map(|w| w / total).collect();
        Ok(DiscreteDistribution { dim, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// True when every atom carries the same mass (bitwise, after merging).
    pub fn is_uniform(&self) -> bool {
        let n = self.len() as f64;
        self.weights.iter().all(|&w| (w * n - 1.0).abs() < 1e-12)
    }

    /// Pushes the distribution through `f`, merging atoms that collide.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let points = self.points.iter().map(|p| f(p)).collect();
        Self::new(points, Some(self.weights.clone()))
    }
}

/// Parameters of one coordinate of product noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseFamily {
    Gaussian {
        sigma: f64,
    },
    Laplace {
        scale: f64,
    },
    /// Density proportional to `(1 + (lambda x)^2)^(-k/2)`; `lambda` is an
    /// inverse scale and `k = 2` is the Cauchy law.
    GeneralizedCauchy {
        k: f64,
        lambda: f64,
    },
}

impl NoiseFamily {
    /// The norm under which the family's shift envelope is computed.
    pub fn paired_norm(&self) -> Norm {
        match self {
            NoiseFamily::Laplace { .. } => Norm::L1,
            _ => Norm::L2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseFamily::Gaussian { .. } => "gaussian",
            NoiseFamily::Laplace { .. } => "laplace",
            NoiseFamily::GeneralizedCauchy { .. } => "generalized_cauchy",
        }
    }

    /// Scale parameter that is zero for the degenerate no-noise mechanism.
    fn spread(&self) -> f64 {
        match *self {
            NoiseFamily::Gaussian { sigma } => sigma,
            NoiseFamily::Laplace { scale } => scale,
            NoiseFamily::GeneralizedCauchy { lambda, .. } => 1.0 / lambda,
        }
    }

    fn check(&self, allow_zero: bool) -> Result<()> {
        let ok = |x: f64| x.is_finite() && (x > 0.0 || (allow_zero && x == 0.0));
        match *self {
            NoiseFamily::Gaussian { sigma } if !ok(sigma) => {
                Err(invalid(format!("gaussian sigma must be positive, got {sigma}")))
            }
            NoiseFamily::Laplace { scale } if !ok(scale) => {
                Err(invalid(format!("laplace scale must be positive, got {scale}")))
            }
            NoiseFamily::GeneralizedCauchy { k, lambda } => {
                if !(k.is_finite() && k >= 2.0) {
                    return Err(invalid(format!("generalized cauchy needs k >= 2, got {k}")));
                }
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(invalid(format!("lambda must be positive, got {lambda}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Product noise `zeta^{⊗dim}` together with its paired norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise", into = "RawNoise")]
pub struct NoiseSpec {
    family: NoiseFamily,
    dim: usize,
    norm: Norm,
}

#[derive(Serialize, Deserialize)]
struct RawNoise {
    #[serde(flatten)]
    family: NoiseFamily,
    dim: usize,
    norm: Norm,
}

impl TryFrom<RawNoise> for NoiseSpec {
    type Error = Error;

    fn try_from(raw: RawNoise) -> Result<Self> {
        raw.family.check(true)?;
        if raw.norm != raw.family.paired_norm() {
            return Err(invalid(format!(
                "{} noise pairs with {}, not {}",
                raw.family.name(),
                raw.family.paired_norm(),
                raw.norm
            )));
        }
        if raw.dim == 0 {
            return Err(invalid("noise dimension must be positive"));
        }
        Ok(NoiseSpec { family: raw.family, dim: raw.dim, norm: raw.norm })
    }
}

impl From<NoiseSpec> for RawNoise {
    fn from(n: NoiseSpec) -> Self {
        RawNoise { family: n.family, dim: n.dim, norm: n.norm }
    }
}

impl NoiseSpec {
    pub fn new(family: NoiseFamily, dim: usize) -> Result<Self> {
        family.check(false)?;
        if dim == 0 {
            return Err(invalid("noise dimension must be positive"));
        }
        Ok(NoiseSpec { family, dim, norm: family.paired_norm() })
    }

    pub fn gaussian(sigma: f64, dim: usize) -> Result<Self> {
        Self::new(NoiseFamily::Gaussian { sigma }, dim)
    }

    pub fn laplace(scale: f64, dim: usize) -> Result<Self> {
        Self::new(NoiseFamily::Laplace { scale }, dim)
    }

    pub fn generalized_cauchy(k: f64, lambda: f64, dim: usize) -> Result<Self> {
        Self::new(NoiseFamily::GeneralizedCauchy { k, lambda }, dim)
    }

    /// Zero-noise Gaussian or Laplace spec, used when the sensitivity is
    /// zero.
    pub(crate) fn degenerate(family: NoiseFamily, dim: usize) -> Self {
        let family = match family {
            NoiseFamily::Laplace { .. } => NoiseFamily::Laplace { scale: 0.0 },
            _ => NoiseFamily::Gaussian { sigma: 0.0 },
        };
        NoiseSpec { family, dim, norm: family.paired_norm() }
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn is_degenerate(&self) -> bool {
        self.family.spread() == 0.0
    }
}

/// An `(alpha, epsilon)` or `(alpha, epsilon, delta)` privacy statement;
/// `alpha = inf` without delta is plain epsilon-Pufferfish privacy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RppGuarantee {
    pub alpha: Alpha,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl RppGuarantee {
    pub fn new(alpha: Alpha, epsilon: f64, delta: Option<f64>) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(invalid(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if let Some(d) = delta {
            if !(0.0..1.0).contains(&d) {
                return Err(invalid(format!("delta must lie in [0, 1), got {d}")));
            }
        }
        Ok(RppGuarantee { alpha, epsilon, delta })
    }
}

/// Conditional query laws under two secrets of one pair, for one prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecretPairInstance {
    pub left: DiscreteDistribution,
    pub right: DiscreteDistribution,
    pub label: String,
}

impl SecretPairInstance {
    pub fn new(
        left: DiscreteDistribution,
        right: DiscreteDistribution,
        label: impl Into<String>,
    ) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::DimensionMismatch { expected: left.dim(), got: right.dim() });
        }
        Ok(SecretPairInstance { left, right, label: label.into() })
    }
}

/// The finite family of pairs over which sensitivities are maximized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Framework {
    pairs: Vec<SecretPairInstance>,
    dim: usize,
}

impl Framework {
    pub fn new(pairs: Vec<SecretPairInstance>) -> Result<Self> {
        let first = pairs.first().ok_or_else(|| invalid("framework needs at least one pair"))?;
        let dim = first.left.dim();
        for p in &pairs {
            if p.left.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.left.dim() });
            }
        }
        Ok(Framework { pairs, dim })
    }

    pub fn pairs(&self) -> &[SecretPairInstance] {
        &self.pairs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}
