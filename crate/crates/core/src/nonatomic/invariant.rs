//! The cost-invariant equilibrium of the symmetric game.
//!
//! When every start slot is played, equal costs between consecutive starts
//! force `L_s = L_{s+C}` for any strictly increasing `f`, i.e.
//!
//! ```text
//! sum_{u=s-C+1}^{s} x̃_u - sum_{u=s+1}^{s+C} x̃_u = L^exo_{s+C} - L^exo_s,   s = 1..N-1
//! ```
//!
//! with `N = T - C + 1` start slots, plus `sum x̃ = 1`. A non-negative solution
//! equalizes every start's cost and is therefore the equilibrium for every
//! grid cost at once.

use serde::Serialize;

use super::{euclidean_split, is_wardrop_equilibrium, EuclideanSplit};
use crate::error::{Error, Result};
use crate::model::{GridCostFunction, MixedProfile, NonatomicInstance};

const SHAPE_TOLERANCE: f64 = 1e-12;
const CERTIFICATE_TOLERANCE: f64 = 1e-10;
/// Wardrop gap required of the solution under each probe cost.
pub const PROBE_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceCheck {
    pub split: EuclideanSplit,
    pub non_decreasing: bool,
    pub convex: bool,
    /// `1 - (q L_{T-1} - sum_{k=1}^{q} L_{T-1-kC})`, reading slot one for indices below one.
    pub margin: f64,
    pub sufficient_condition: bool,
    pub holds: bool,
}

/// Checks that `exogenous` (in unit-power coordinates) is non-decreasing,
/// discretely convex, and satisfies the sufficient condition with margin > 0.
pub fn check_invariance_condition(exogenous: &[f64], duration: usize) -> Result<InvarianceCheck> {
    let slots = exogenous.len();
    let split = euclidean_split(slots, duration)?;
    let l = |t: isize| exogenous[(t.max(1) - 1) as usize];
    let non_decreasing = exogenous
        .windows(2)
        .all(|w| w[1] - w[0] >= -SHAPE_TOLERANCE);
    let convex = exogenous
        .windows(3)
        .all(|w| w[2] - 2.0 * w[1] + w[0] >= -SHAPE_TOLERANCE);
    let last = slots as isize - 1;
    let tail: f64 = (1..=split.q)
        .map(|k| l(last - (k * duration) as isize))
        .sum();
    let margin = 1.0 - (split.q as f64 * l(last) - tail);
    let sufficient_condition = margin > 0.0;
    Ok(InvarianceCheck {
        split,
        non_decreasing,
        convex,
        margin,
        sufficient_condition,
        holds: non_decreasing && convex && sufficient_condition,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricLinearSystem {
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Solution from elimination in natural row order.
    pub solution: Vec<f64>,
    /// Diagonal after elimination.
    pub pivots: Vec<f64>,
    pub transformed_rhs: Vec<f64>,
    /// Per row: positive pivot, non-negative transformed rhs, non-negative solution entry.
    pub certificate: Vec<bool>,
    /// `max |A x - b|`
    pub residual: f64,
    /// Largest difference to a partial-pivoting solve.
    pub pivoted_difference: f64,
}

#[allow(clippy::needless_range_loop)]
fn gauss_partial_pivot(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for j in 0..n {
        let p = (j..n).max_by(|&x, &y| a[x][j].abs().total_cmp(&a[y][j].abs()))?;
        if a[p][j] == 0.0 {
            return None;
        }
        a.swap(j, p);
        b.swap(j, p);
        for i in j + 1..n {
            let r = a[i][j] / a[j][j];
            if r != 0.0 {
                for c in j..n {
                    a[i][c] -= r * a[j][c];
                }
                b[i] -= r * b[j];
            }
        }
    }
    Some(back_substitute(&a, &b))
}

fn back_substitute(u: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| u[i][c] * x[c]).sum();
        x[i] = (b[i] - s) / u[i][i];
    }
    x
}

impl SymmetricLinearSystem {
    /// Banded window-difference rows followed by the normalization row.
    pub fn assemble(exogenous: &[f64], duration: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let slots = exogenous.len();
        euclidean_split(slots, duration)?;
        let n = slots - duration + 1;
        let mut matrix = vec![vec![0.0; n]; n];
        let mut rhs = vec![0.0; n];
        for s in 1..n {
            let row = &mut matrix[s - 1];
            for u in s.saturating_sub(duration - 1).max(1)..=s {
                row[u - 1] = 1.0;
            }
            for u in s + 1..=(s + duration).min(n) {
                row[u - 1] = -1.0;
            }
            rhs[s - 1] = exogenous[s + duration - 1] - exogenous[s - 1];
        }
        matrix[n - 1].iter_mut().for_each(|v| *v = 1.0);
        rhs[n - 1] = 1.0;
        Ok((matrix, rhs))
    }

    /// Eliminates each pivot row from every later row in natural order, records
    /// the positivity certificate, and cross-checks against partial pivoting.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(exogenous: &[f64], duration: usize) -> Result<Self> {
        let (matrix, rhs) = Self::assemble(exogenous, duration)?;
        let n = rhs.len();
        let mut u = matrix.clone();
        let mut b = rhs.clone();
        for j in 0..n {
            let pivot = u[j][j];
            if pivot.abs() <= CERTIFICATE_TOLERANCE {
                return Err(Error::CertificateFailed(format!(
                    "pivot {} vanishes ({pivot:e})",
                    j + 1
                )));
            }
            for i in j + 1..n {
                let r = u[i][j] / pivot;
                if r != 0.0 {
                    for c in j..n {
                        u[i][c] -= r * u[j][c];
                    }
                    b[i] -= r * b[j];
                }
            }
        }
        let solution = back_substitute(&u, &b);
        let pivots: Vec<f64> = (0..n).map(|j| u[j][j]).collect();
        let certificate = (0..n)
            .map(|j| {
                pivots[j] > CERTIFICATE_TOLERANCE
                    && b[j] >= -CERTIFICATE_TOLERANCE
                    && solution[j] >= -CERTIFICATE_TOLERANCE
            })
            .collect();
        let residual = matrix
            .iter()
            .zip(&rhs)
            .map(|(row, &bi)| (row.iter().zip(&solution).map(|(a, x)| a * x).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max);
        let pivoted = gauss_partial_pivot(matrix.clone(), rhs.clone())
            .ok_or_else(|| Error::CertificateFailed("system is singular".into()))?;
        let pivoted_difference = solution
            .iter()
            .zip(&pivoted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            matrix,
            rhs,
            solution,
            pivots,
            transformed_rhs: b,
            certificate,
            residual,
            pivoted_difference,
        })
    }

    pub fn certified(&self) -> bool {
        self.certificate.iter().all(|&c| c)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantEquilibrium {
    pub check: InvarianceCheck,
    pub system: SymmetricLinearSystem,
    pub profile: MixedProfile,
    /// Wardrop gap of the solution under each probe cost.
    pub probe_gaps: Vec<(String, f64)>,
}

/// Solves the symmetric game (window `1..=T`, unit power) through the linear
/// system and verifies the result is an equilibrium under several grid costs.
pub fn solve_symmetric_invariant(exogenous: &[f64], duration: usize) -> Result<InvariantEquilibrium> {
    let check = check_invariance_condition(exogenous, duration)?;
    if !check.holds {
        return Err(Error::ConditionViolated(format!(
            "non-decreasing: {}, convex: {}, margin: {:e}",
            check.non_decreasing, check.convex, check.margin
        )));
    }
    let system = SymmetricLinearSystem::solve(exogenous, duration)?;
    let tolerance = CERTIFICATE_TOLERANCE * system.rhs.len() as f64;
    if system.residual > tolerance || system.pivoted_difference > tolerance {
        return Err(Error::CertificateFailed(format!(
            "residual {:e}, pivoting difference {:e}",
            system.residual, system.pivoted_difference
        )));
    }
    if let Some(row) = system.certificate.iter().position(|&c| !c) {
        return Err(Error::CertificateFailed(format!(
            "row {}: pivot {:e}, transformed rhs {:e}, solution {:e}",
            row + 1,
            system.pivots[row],
            system.transformed_rhs[row],
            system.solution[row]
        )));
    }

    let slots = exogenous.len();
    let instance = NonatomicInstance::symmetric(slots, duration, 1.0, exogenous.to_vec())?;
    let mut x = vec![0.0; slots];
    for (i, &v) in system.solution.iter().enumerate() {
        x[i] = v.max(0.0);
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    let profile = MixedProfile::from_parts(&instance, vec![x]);

    let probes = [
        GridCostFunction::quadratic(),
        GridCostFunction::power(4.0)?,
        GridCostFunction::sqrt(),
    ];
    let mut probe_gaps = Vec::new();
    for f in &probes {
        let (ok, gap) = is_wardrop_equilibrium(&instance, f, &profile, PROBE_TOLERANCE);
        if !ok {
            return Err(Error::CertificateFailed(format!(
                "solution is not an equilibrium under {f}: gap {gap:e}"
            )));
        }
        probe_gaps.push((f.to_string(), gap));
    }
    Ok(InvariantEquilibrium {
        check,
        system,
        profile,
        probe_gaps,
    })
}
