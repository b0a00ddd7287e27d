//! First-order solvers over the product of class simplices, in unit-power coordinates.
//!
//! Masses are weighted: class `k` holds `w_k` in total, spread over its start slots.

use super::Normalized;
use crate::model::{ChargingWindow, GridCostFunction};

type Masses = Vec<Vec<f64>>;

pub(crate) struct Run {
    pub masses: Vec<Vec<f64>>,
    pub iterations: u64,
    pub gap: f64,
    pub converged: bool,
}

fn slot_values(norm: &Normalized, cost: &GridCostFunction, occ: &[f64]) -> Vec<f64> {
    norm.exo
        .iter()
        .zip(occ)
        .map(|(&e, &x)| cost.eval((e + x).max(0.0)))
        .collect()
}

fn window_sum(values: &[f64], window: &ChargingWindow, start: usize) -> f64 {
    window.charging_slots(start).map(|t| values[t - 1]).sum()
}

/// Class with the widest gap between its dearest played start and its cheapest start.
fn widest_gap(norm: &Normalized, masses: &[Vec<f64>], values: &[f64]) -> (usize, usize, usize, f64) {
    let mut worst = (0, 0, 0, f64::NEG_INFINITY);
    for (k, window) in norm.windows.iter().enumerate() {
        let (mut lo, mut lo_cost) = (0, f64::INFINITY);
        let (mut hi, mut hi_cost) = (0, f64::NEG_INFINITY);
        for s in window.action_set() {
            let c = window_sum(values, window, s);
            if c < lo_cost {
                (lo, lo_cost) = (s, c);
            }
            if masses[k][s - 1] > 0.0 && c > hi_cost {
                (hi, hi_cost) = (s, c);
            }
        }
        let gap = hi_cost - lo_cost;
        if gap > worst.3 {
            worst = (k, hi, lo, gap);
        }
    }
    worst
}

/// Amount of mass to move from start `hi` to start `lo` so that both cost the same,
/// capped by the mass available at `hi`.
fn balance(
    norm: &Normalized,
    cost: &GridCostFunction,
    occ: &[f64],
    window: &ChargingWindow,
    hi: usize,
    lo: usize,
    available: f64,
) -> f64 {
    let hi_slots = window.charging_slots(hi);
    let lo_slots = window.charging_slots(lo);
    let hi_only: Vec<usize> = hi_slots.clone().filter(|t| !lo_slots.contains(t)).collect();
    let lo_only: Vec<usize> = lo_slots.filter(|t| !hi_slots.contains(t)).collect();
    let excess = |delta: f64| {
        let down: f64 = hi_only
            .iter()
            .map(|&t| cost.eval((norm.exo[t - 1] + occ[t - 1] - delta).max(0.0)))
            .sum();
        let up: f64 = lo_only
            .iter()
            .map(|&t| cost.eval(norm.exo[t - 1] + occ[t - 1] + delta))
            .sum();
        down - up
    };
    if excess(available) >= 0.0 {
        return available;
    }
    let (mut a, mut b) = (0.0, available);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if excess(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Pairwise equilibration: repeatedly shift mass from the dearest played start
/// of the worst class to its cheapest start, with an exact line search. Each
/// move raises the potential built on `cost`.
pub(crate) fn equilibrate(
    norm: &Normalized,
    cost: &GridCostFunction,
    mut masses: Vec<Vec<f64>>,
    tolerance: f64,
    max_iterations: u64,
) -> Run {
    let mut iterations = 0;
    loop {
        let occ = norm.occupancy(&masses);
        let values = slot_values(norm, cost, &occ);
        let (k, hi, lo, gap) = widest_gap(norm, &masses, &values);
        if gap <= tolerance || iterations == max_iterations {
            return Run {
                masses,
                iterations,
                gap: gap.max(0.0),
                converged: gap <= tolerance,
            };
        }
        iterations += 1;
        let available = masses[k][hi - 1];
        let delta = balance(norm, cost, &occ, &norm.windows[k], hi, lo, available);
        masses[k][hi - 1] = if delta >= available { 0.0 } else { available - delta };
        masses[k][lo - 1] += delta;
    }
}

/// Euclidean projection of `v` onto `{z >= 0, sum z = total}`.
pub(crate) fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        acc += u;
        let candidate = (acc - total) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|&u| (u - tau).max(0.0)).collect()
}

fn dot(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>())
        .sum()
}

/// Projected gradient descent on `sum_t F(e_t + x_t)` where `gradient = F'`.
/// Steps are scaled by the Barzilai-Borwein rule and shortened by an exact line
/// search on the directional derivative, which stays reliable after the
/// objective itself has stopped resolving progress. Stops once the `F'`
/// Wardrop gap over starts holding more than `support` of their class reaches `tolerance`.
pub(crate) fn projected_gradient(
    norm: &Normalized,
    gradient: &GridCostFunction,
    mut masses: Vec<Vec<f64>>,
    tolerance: f64,
    support: f64,
    max_iterations: u64,
) -> Run {
    // Directions keep each class's mass fixed, so a per-class constant can be
    // dropped from the gradient; removing it keeps the inner products clear of
    // the rounding left in the direction's sum.
    let class_gradient = |occ: &[f64]| -> Vec<Vec<f64>> {
        let values = slot_values(norm, gradient, occ);
        norm.windows
            .iter()
            .map(|w| {
                let mut g = vec![0.0; norm.slots()];
                for s in w.action_set() {
                    g[s - 1] = window_sum(&values, w, s);
                }
                let floor = w.action_set().map(|s| g[s - 1]).fold(f64::INFINITY, f64::min);
                for s in w.action_set() {
                    g[s - 1] -= floor;
                }
                g
            })
            .collect()
    };
    let played = |masses: &[Vec<f64>]| -> Vec<Vec<f64>> {
        masses
            .iter()
            .zip(&norm.weights)
            .map(|(m, &w)| m.iter().map(|&v| if v > support * w { v } else { 0.0 }).collect())
            .collect()
    };

    let mut step = 1.0;
    // masses and gradient of the last iterate
    let mut previous: Option<(Masses, Masses)> = None;
    let mut iterations = 0;
    loop {
        let occ = norm.occupancy(&masses);
        let values = slot_values(norm, gradient, &occ);
        let (_, _, _, gap) = widest_gap(norm, &played(&masses), &values);
        if gap <= tolerance || iterations == max_iterations {
            return Run {
                masses,
                iterations,
                gap: gap.max(0.0),
                converged: gap <= tolerance,
            };
        }
        iterations += 1;
        let grad = class_gradient(&occ);
        if let Some((pm, pg)) = &previous {
            let dm: Vec<Vec<f64>> = masses.iter().zip(pm).map(|(a, b)| a.iter().zip(b).map(|(u, v)| u - v).collect()).collect();
            let dg: Vec<Vec<f64>> = grad.iter().zip(pg).map(|(a, b)| a.iter().zip(b).map(|(u, v)| u - v).collect()).collect();
            let curvature = dot(&dm, &dg);
            if curvature > 0.0 {
                step = (dot(&dm, &dm) / curvature).clamp(1e-12, 1e12);
            }
        }
        let direction: Vec<Vec<f64>> = norm
            .windows
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let range = w.first_start() - 1..w.last_start();
                let moved: Vec<f64> = range.clone().map(|i| masses[k][i] - step * grad[k][i]).collect();
                let mut d = vec![0.0; norm.slots()];
                for (i, p) in range.zip(project_simplex(&moved, norm.weights[k])) {
                    d[i] = p - masses[k][i];
                }
                d
            })
            .collect();
        if dot(&grad, &direction) >= 0.0 {
            // no descent left at this precision
            return Run {
                masses,
                iterations,
                gap,
                converged: false,
            };
        }
        let occ_direction = norm.occupancy(&direction);
        let slope = |alpha: f64| {
            let moved: Vec<f64> = occ.iter().zip(&occ_direction).map(|(x, d)| x + alpha * d).collect();
            dot(&class_gradient(&moved), &direction)
        };
        let alpha = if slope(1.0) <= 0.0 {
            1.0
        } else {
            let (mut a, mut b) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if slope(mid) <= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            a
        };
        let next: Vec<Vec<f64>> = masses
            .iter()
            .zip(&direction)
            .map(|(m, d)| {
                m.iter()
                    .zip(d)
                    .map(|(&v, &dv)| if alpha == 1.0 && v + dv <= 0.0 { 0.0 } else { (v + alpha * dv).max(0.0) })
                    .collect()
            })
            .collect();
        previous = Some((std::mem::replace(&mut masses, next), grad));
    }
}
