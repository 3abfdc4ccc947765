//! Exact discrete optimal transport via successive shortest paths.

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// An optimal coupling between two discrete distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan<T = f64> {
    rows: usize,
    cols: usize,
    flows: Vec<T>,
    cost: T,
}

impl<T: Scalar> TransportPlan<T> {
    pub fn flow(&self, i: usize, j: usize) -> T {
        self.flows[i * self.cols + j]
    }

    pub fn cost(&self) -> T {
        self.cost
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| ordered_sum((0..self.cols).map(|j| self.flow(i, j))))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| ordered_sum((0..self.rows).map(|i| self.flow(i, j))))
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Pred {
    None,
    /// reached sink `j` from source `i` along a forward edge
    Forward(usize),
    /// reached source `i` from sink `j` along a reverse edge
    Backward(usize),
}

/// Minimum-cost transport of `supply` onto `demand` with row-major `cost`
/// (`supply.len() x demand.len()`). Both distributions should carry the
/// same total mass; the solver stops when either side is exhausted.
pub fn solve_transport<T: Scalar>(supply: &[T], demand: &[T], cost: &[T]) -> Result<TransportPlan<T>> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::invalid("transport needs non-empty distributions"));
    }
    if cost.len() != m * n {
        return Err(Error::invalid("transport cost matrix has the wrong shape"));
    }
    let all = supply.iter().chain(demand).chain(cost);
    if all.clone().any(|v| !v.is_finite()) || supply.iter().chain(demand).any(|&v| v < T::zero()) {
        return Err(Error::invalid("transport inputs must be finite and masses nonnegative"));
    }

    let tol = T::epsilon() * T::from_count(64);
    // Relaxations must beat the current label by this much, so rounding in
    // near-tied costs cannot create a spurious negative cycle.
    let max_cost = cost.iter().fold(T::one(), |acc, &c| acc.max(c.abs()));
    let slack = tol * max_cost;
    let improves = |nd: T, old: T| old.is_infinite() || nd < old - slack;
    let mut remaining_supply = supply.to_vec();
    let mut remaining_demand = demand.to_vec();
    let mut flows = vec![T::zero(); m * n];

    // Node ids: sources 0..m, sinks m..m+n.
    let mut dist = vec![T::infinity(); m + n];
    let mut pred = vec![Pred::None; m + n];
    loop {
        if remaining_supply.iter().all(|&s| s <= tol) || remaining_demand.iter().all(|&d| d <= tol) {
            break;
        }
        dist.iter_mut().for_each(|d| *d = T::infinity());
        pred.iter_mut().for_each(|p| *p = Pred::None);
        for i in 0..m {
            if remaining_supply[i] > tol {
                dist[i] = T::zero();
            }
        }
        // Bellman-Ford over the residual graph.
        for _ in 0..(m + n) {
            let mut changed = false;
            for i in 0..m {
                if dist[i].is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let nd = dist[i] + cost[i * n + j];
                    if improves(nd, dist[m + j]) {
                        dist[m + j] = nd;
                        pred[m + j] = Pred::Forward(i);
                        changed = true;
                    }
                }
            }
            for j in 0..n {
                if dist[m + j].is_infinite() {
                    continue;
                }
                for i in 0..m {
                    if flows[i * n + j] > tol {
                        let nd = dist[m + j] - cost[i * n + j];
                        if improves(nd, dist[i]) {
                            dist[i] = nd;
                            pred[i] = Pred::Backward(j);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let target = (0..n)
            .filter(|&j| remaining_demand[j] > tol && dist[m + j].is_finite())
            .min_by(|&a, &b| dist[m + a].partial_cmp(&dist[m + b]).expect("finite distances"));
        let Some(target) = target else { break };

        // Walk back to the originating source, collecting the path.
        let mut path = Vec::new();
        let mut node = m + target;
        let mut amount = remaining_demand[target];
        let origin = loop {
            match pred[node] {
                Pred::Forward(i) => {
                    path.push((i, node - m, true));
                    node = i;
                }
                Pred::Backward(j) => {
                    path.push((node, j, false));
                    amount = amount.min(flows[node * n + j]);
                    node = m + j;
                }
                Pred::None => break node,
            }
            if path.len() > 2 * (m + n) {
                return Err(Error::Undefined(
                    "transport solver failed to find an augmenting path".into(),
                ));
            }
        };
        amount = amount.min(remaining_supply[origin]);
        if amount <= T::zero() {
            break;
        }
        for &(i, j, forward) in &path {
            let f = &mut flows[i * n + j];
            if forward {
                *f = *f + amount;
            } else {
                *f = (*f - amount).max(T::zero());
            }
        }
        remaining_supply[origin] = remaining_supply[origin] - amount;
        remaining_demand[target] = remaining_demand[target] - amount;
    }

    let cost_total = ordered_sum(flows.iter().zip(cost).map(|(&f, &c)| f * c));
    Ok(TransportPlan {
        rows: m,
        cols: n,
        flows,
        cost: cost_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_plan() {
        let plan = solve_transport(&[1.0], &[1.0], &[2.5]).unwrap();
        assert_eq!(plan.cost(), 2.5);
        assert_eq!(plan.flow(0, 0), 1.0);
    }

    #[test]
    fn prefers_diagonal() {
        let cost = [0.0, 1.0, 1.0, 0.0];
        let plan = solve_transport(&[0.5, 0.5], &[0.5, 0.5], &cost).unwrap();
        assert_eq!(plan.cost(), 0.0);
        assert_eq!(plan.flow(0, 1), 0.0);
    }

    #[test]
    fn needs_reverse_edge() {
        // Greedy on the cheapest cell (0,0) is suboptimal; optimum uses
        // (0,1) and (1,0).
        let cost = [1.0f64, 2.0, 2.0, 100.0];
        let plan = solve_transport(&[0.5, 0.5], &[0.5, 0.5], &cost).unwrap();
        assert!((plan.cost() - 2.0).abs() < 1e-12, "{}", plan.cost());
        for (s, t) in plan.row_sums().iter().zip([0.5, 0.5]) {
            assert!((s - t).abs() < 1e-12);
        }
        for (s, t) in plan.col_sums().iter().zip([0.5, 0.5]) {
            assert!((s - t).abs() < 1e-12);
        }
    }

    #[test]
    fn uneven_masses() {
        let supply = [0.2f64, 0.3, 0.5];
        let demand = [0.6f64, 0.4];
        let cost = [1.0, 3.0, 2.0, 1.0, 4.0, 2.0];
        let plan = solve_transport(&supply, &demand, &cost).unwrap();
        // column 1 saves most for row 2 (4 - 2), so x21 = 0.4 and the rest
        // goes to column 0: 0.2*1 + 0.3*2 + 0.1*4 + 0.4*2 = 2.0
        assert!((plan.cost() - 2.0).abs() < 1e-12, "{}", plan.cost());
    }

    #[test]
    fn single_precision() {
        let plan = solve_transport(&[0.5f32, 0.5], &[0.5, 0.5], &[1.0, 2.0, 2.0, 100.0]).unwrap();
        assert!((plan.cost() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_transport::<f64>(&[], &[1.0], &[]).is_err());
        assert!(solve_transport(&[1.0], &[1.0], &[f64::NAN]).is_err());
        assert!(solve_transport(&[1.0], &[1.0], &[1.0, 2.0]).is_err());
    }
}
