//! Minimum-cost transport between two mass vectors by successive shortest
//! paths with Dijkstra potentials. Masses stay real-valued; residuals below
//! [`MASS_EPS`] are treated as exhausted.

const MASS_EPS: f64 = 1e-14;

/// Dense cost matrix, row-major `supply.len() x demand.len()`; infinite
/// entries are forbidden edges.
pub struct CostMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CostMatrix { rows, cols, data }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Optimal objective of the transportation problem, or infinity when the
/// allowed edges cannot carry all mass.
pub fn min_cost_transport(supply: &[f64], demand: &[f64], cost: &CostMatrix) -> f64 {
    let (n, m) = (supply.len(), demand.len());
    debug_assert_eq!((cost.rows, cost.cols), (n, m));
    let mut sup = supply.to_vec();
    let mut dem = demand.to_vec();
    let mut flow = vec![0.0; n * m];

    // Potentials keep reduced costs nonnegative: sinks start at their
    // cheapest incoming edge.
    let mut pot = vec![0.0; n + m];
    for j in 0..m {
        let cheapest = (0..n).map(|i| cost.at(i, j)).fold(f64::INFINITY, f64::min);
        pot[n + j] = if cheapest.is_finite() { cheapest } else { 0.0 };
    }

    let mut dist = vec![f64::INFINITY; n + m];
    let mut prev = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];
    loop {
        if sup.iter().all(|&s| s <= MASS_EPS) || dem.iter().all(|&d| d <= MASS_EPS) {
            break;
        }
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        prev.iter_mut().for_each(|p| *p = usize::MAX);
        done.iter_mut().for_each(|d| *d = false);
        for i in 0..n {
            if sup[i] > MASS_EPS {
                dist[i] = 0.0;
            }
        }
        let mut target = None;
        loop {
            let mut v = usize::MAX;
            let mut best = f64::INFINITY;
            for (u, &d) in dist.iter().enumerate() {
                if !done[u] && d < best {
                    best = d;
                    v = u;
                }
            }
            if v == usize::MAX {
                break;
            }
            done[v] = true;
            if v >= n && dem[v - n] > MASS_EPS {
                target = Some(v);
                break;
            }
            if v < n {
                for j in 0..m {
                    let c = cost.at(v, j);
                    if !c.is_finite() || done[n + j] {
                        continue;
                    }
                    let nd = dist[v] + (c + pot[v] - pot[n + j]).max(0.0);
                    if nd < dist[n + j] {
                        dist[n + j] = nd;
                        prev[n + j] = v;
                    }
                }
            } else {
                let j = v - n;
                for i in 0..n {
                    if flow[i * m + j] <= MASS_EPS || done[i] {
                        continue;
                    }
                    let nd = dist[v] + (-cost.at(i, j) + pot[v] - pot[i]).max(0.0);
                    if nd < dist[i] {
                        dist[i] = nd;
                        prev[i] = v;
                    }
                }
            }
        }
        let Some(t) = target else {
            return f64::INFINITY;
        };

        // Walk back to the source, collecting the bottleneck.
        let mut amount = dem[t - n];
        let mut v = t;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= n {
                amount = amount.min(flow[v * m + (u - n)]);
            }
            v = u;
        }
        amount = amount.min(sup[v]);
        let source = v;

        let mut v = t;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < n {
                flow[u * m + (v - n)] += amount;
            } else {
                let cell = &mut flow[v * m + (u - n)];
                *cell -= amount;
                if *cell <= MASS_EPS {
                    *cell = 0.0;
                }
            }
            v = u;
        }
        sup[source] -= amount;
        dem[t - n] -= amount;

        let dt = dist[t];
        for (p, &d) in pot.iter_mut().zip(&dist) {
            *p += d.min(dt);
        }
    }

    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            let f = flow[i * m + j];
            if f > 0.0 {
                total += f * cost.at(i, j);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let c = CostMatrix::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &c), 0.0);
        assert!((min_cost_transport(&[0.5, 0.5], &[0.9, 0.1], &c) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn needs_rerouting() {
        // Greedy assignment of the first source to its cheapest sink is suboptimal.
        let costs = [[1.0, 2.0], [1.0, 10.0]];
        let c = CostMatrix::from_fn(2, 2, |i, j| costs[i][j]);
        let v = min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &c);
        assert!((v - 1.5).abs() < 1e-15, "{v}");
    }

    #[test]
    fn forbidden_edges() {
        let c = CostMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { f64::INFINITY });
        assert_eq!(min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &c), 1.0);
        assert!(min_cost_transport(&[0.7, 0.3], &[0.5, 0.5], &c).is_infinite());
    }
}
