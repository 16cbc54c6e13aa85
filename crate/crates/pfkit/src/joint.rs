//! Finite joint priors over small datasets, enumerated outcome by outcome.
//!
//! A dataset is a vector `x = (x_1, ..., x_n)` with one scalar per
//! individual. Secrets are events `x_i = a`; conditioning the prior on a
//! secret and pushing it through the query gives the discrete laws that the
//! transport module compares.

use crate::error::{invalid, Result};
use crate::types::{DiscreteDistribution, Norm, SecretPairInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct JointPrior {
    outcomes: Vec<Vec<f64>>,
    probs: Vec<f64>,
}

/// The event `x[individual] == value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Secret {
    pub individual: usize,
    pub value: f64,
}

impl Secret {
    pub fn holds(&self, x: &[f64]) -> bool {
        x[self.individual] == self.value
    }

    pub fn label(&self) -> String {
        format!("X{}={}", self.individual + 1, self.value)
    }
}

impl JointPrior {
    /// Outcomes with zero probability are dropped; the rest are normalized.
    pub fn new(outcomes: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != probs.len() {
            return Err(invalid("joint prior needs one probability per outcome"));
        }
        let n = outcomes[0].len();
        if n == 0 || outcomes.iter().any(|o| o.len() != n) {
            return Err(invalid("all outcomes must have the same positive length"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("joint prior has no mass"));
        }
        let (outcomes, probs) =
            outcomes.into_iter().zip(probs).filter(|(_, p)| *p > 0.0).map(|(o, p)| (o, p / total)).unzip();
        Ok(JointPrior { outcomes, probs })
    }

    /// Independent individuals with the given `(value, probability)` marginals.
    pub fn product(marginals: &[Vec<(f64, f64)>]) -> Result<Self> {
        let mut outcomes = vec![Vec::new()];
        let mut probs = vec![1.0];
        for m in marginals {
            let mut next_o = Vec::with_capacity(outcomes.len() * m.len());
            let mut next_p = Vec::with_capacity(outcomes.len() * m.len());
            for (o, p) in outcomes.iter().zip(&probs) {
                for &(v, q) in m {
                    let mut o = o.clone();
                    o.push(v);
                    next_o.push(o);
                    next_p.push(p * q);
                }
            }
            outcomes = next_o;
            probs = next_p;
        }
        Self::new(outcomes, probs)
    }

    pub fn individuals(&self) -> usize {
        self.outcomes[0].len()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.outcomes.iter().map(Vec::as_slice).zip(self.probs.iter().copied())
    }

    pub fn probability(&self, event: impl Fn(&[f64]) -> bool) -> f64 {
        self.outcomes().filter(|(x, _)| event(x)).map(|(_, p)| p).sum()
    }

    /// Marginal law of individual `i` as sorted `(value, probability)` pairs.
    pub fn marginal(&self, i: usize) -> Vec<(f64, f64)> {
        let mut m: Vec<(f64, f64)> = Vec::new();
        for (x, p) in self.outcomes() {
            match m.iter_mut().find(|(v, _)| *v == x[i]) {
                Some(entry) => entry.1 += p,
                None => m.push((x[i], p)),
            }
        }
        m.sort_by(|a, b| a.0.total_cmp(&b.0));
        m
    }

    /// Product of this prior's marginals.
    pub fn product_of_marginals(&self) -> Result<Self> {
        let marginals: Vec<_> = (0..self.individuals()).map(|i| self.marginal(i)).collect();
        Self::product(&marginals)
    }

    /// Law of `query(X)` given `event`.
    pub fn conditional(
        &self,
        event: impl Fn(&[f64]) -> bool,
        query: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<DiscreteDistribution> {
        let (points, weights): (Vec<_>, Vec<_>) =
            self.outcomes().filter(|(x, _)| event(x)).map(|(x, p)| (query(x), p)).unzip();
        if points.is_empty() {
            return Err(invalid("conditioning event has zero probability"));
        }
        DiscreteDistribution::new(points, Some(weights))
    }

    /// All secrets `x_i = a` with positive probability.
    pub fn secrets(&self) -> Vec<Secret> {
        (0..self.individuals())
            .flat_map(|i| self.marginal(i).into_iter().map(move |(value, _)| Secret { individual: i, value }))
            .collect()
    }

    /// Conditional query laws for each pair of distinct values of the same
    /// individual.
    pub fn same_individual_pairs(
        &self,
        query: &dyn Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Vec<SecretPairInstance>> {
        let secrets = self.secrets();
        let mut out = Vec::new();
        for (k, a) in secrets.iter().enumerate() {
            for b in secrets[k + 1..].iter().filter(|b| b.individual == a.individual) {
                out.push(self.pair(a, b, query)?);
            }
        }
        Ok(out)
    }

    /// Conditional query laws for every unordered pair of distinct secrets.
    pub fn all_secret_pairs(&self, query: &dyn Fn(&[f64]) -> Vec<f64>) -> Result<Vec<SecretPairInstance>> {
        let secrets = self.secrets();
        let mut out = Vec::new();
        for (k, a) in secrets.iter().enumerate() {
            for b in &secrets[k + 1..] {
                out.push(self.pair(a, b, query)?);
            }
        }
        Ok(out)
    }

    pub fn pair(
        &self,
        a: &Secret,
        b: &Secret,
        query: &dyn Fn(&[f64]) -> Vec<f64>,
    ) -> Result<SecretPairInstance> {
        SecretPairInstance::new(
            self.conditional(|x| a.holds(x), query)?,
            self.conditional(|x| b.holds(x), query)?,
            format!("{} vs {}", a.label(), b.label()),
        )
    }

    /// Largest query change between two supported datasets that agree
    /// outside `group`.
    pub fn group_sensitivity(&self, query: &dyn Fn(&[f64]) -> Vec<f64>, norm: Norm, group: &[usize]) -> f64 {
        let outside =
            |x: &[f64], y: &[f64]| (0..x.len()).filter(|i| !group.contains(i)).all(|i| x[i] == y[i]);
        let mut best: f64 = 0.0;
        for x in &self.outcomes {
            let fx = query(x);
            for y in &self.outcomes {
                if outside(x, y) {
                    best = best.max(norm.distance(&fx, &query(y)));
                }
            }
        }
        best
    }

    /// Classical sensitivity: worst change of one individual's value within
    /// the supported datasets.
    pub fn neighbor_sensitivity(&self, query: &dyn Fn(&[f64]) -> Vec<f64>, norm: Norm) -> f64 {
        (0..self.individuals()).map(|i| self.group_sensitivity(query, norm, &[i])).fold(0.0, f64::max)
    }
}

/// Sum of all individuals' values.
pub fn sum_query(x: &[f64]) -> Vec<f64> {
    vec![x.iter().sum()]
}
