//! Three independent routes to the ergodic distribution: power iteration
//! on the dense kernel, a direct linear solve for the left Perron vector,
//! and a closed form that exploits the kernel's block structure.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{build_kernel_with, RowLaws, StateDistribution, Provenance, TransitionKernel};
use crate::error::{Error, Result};
use crate::model::{validate_params, HalfRule, ModelParams};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// Negative entries down to this size are treated as rounding noise.
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Power,
    Eigen,
    #[default]
    Analytic,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Power => "power",
            Method::Eigen => "eigen",
            Method::Analytic => "analytic",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "power" => Ok(Method::Power),
            "eigen" => Ok(Method::Eigen),
            "analytic" => Ok(Method::Analytic),
            other => Err(format!(
                "unknown method `{other}` (expected power, eigen or analytic)"
            )),
        }
    }
}

/// Iterates `π ← π·P` from the uniform vector until `‖π·P − π‖₁ ≤ tol`.
pub fn stationary_power(
    kernel: &TransitionKernel,
    tol: f64,
    max_iters: usize,
) -> Result<StateDistribution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive (got {tol})")));
    }
    let n = kernel.n_states();
    let mut pi = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let mut next = kernel.apply_left(&pi);
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        if residual <= tol {
            return StateDistribution::new(pi, Provenance::Exact);
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        pi = next;
    }
    Err(Error::NotConverged {
        iters: max_iters,
        residual,
    })
}

/// Left eigenvector for eigenvalue 1 from `(Pᵀ − I) x = 0` with the last
/// equation replaced by `Σ x = 1`.
pub fn stationary_eigen(kernel: &TransitionKernel) -> Result<StateDistribution> {
    let n = kernel.n_states();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            // Row j of the system is column j of P.
            a[j * n + i] = kernel.get(i, j) - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[(n - 1) * n..].iter_mut().for_each(|x| *x = 1.0);
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;

    let mut x = solve_dense(n, a, b)?;
    if let Some(bad) = x.iter().copied().find(|v| *v < -NEGATIVE_SLACK) {
        return Err(Error::Singular(format!(
            "eigenvector has negative entry {bad:e}; kernel is malformed"
        )));
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    StateDistribution::new(x, Provenance::Exact)
}

/// Gaussian elimination with partial pivoting on a row-major `n × n` system.
fn solve_dense(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .expect("non-empty range");
        let pivot = a[pivot_row * n + col];
        if !(pivot.abs() > 1e-300) {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r * n + r];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite solution".into()));
    }
    Ok(x)
}

pub fn stationary_analytic(params: &ModelParams) -> Result<StateDistribution> {
    stationary_analytic_with(params, HalfRule::Half)
}

/// Ergodic distribution without the dense kernel.
///
/// Rows fall into at most three blocks that share a Binomial law (corn
/// short, balanced, sugar short). The stationary law is therefore a mixture
/// of those binomials weighted by the stationary law of the lumped block
/// chain, which is solved with the Markov chain tree formula.
pub fn stationary_analytic_with(
    params: &ModelParams,
    half_rule: HalfRule,
) -> Result<StateDistribution> {
    let params = validate_params(*params)?;
    let laws = RowLaws::new(&params, half_rule);
    let blocks = laws.rows.len();
    let block_of: Vec<usize> = params
        .states()
        .map(|s| laws.index_of(&params, &s, half_rule))
        .collect();

    // lumped[b][c] = P(next state lies in block c | current block b)
    let mut lumped = vec![vec![0.0; blocks]; blocks];
    for (b, row) in laws.rows.iter().enumerate() {
        for (state, p) in row.iter().enumerate() {
            lumped[b][block_of[state]] += p;
        }
    }
    let weights = tree_weights(&lumped)?;

    let mut pi = vec![0.0; params.n_states()];
    for (w, row) in weights.iter().zip(&laws.rows) {
        for (x, p) in pi.iter_mut().zip(row) {
            *x += w * p;
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    StateDistribution::new(pi, Provenance::Exact)
}

/// Normalized stationary law of a chain with at most three states, from
/// sums over spanning trees directed at each state. Only off-diagonal
/// rates enter, so nothing cancels.
fn tree_weights(t: &[Vec<f64>]) -> Result<Vec<f64>> {
    let raw = match t.len() {
        1 => vec![1.0],
        2 => vec![t[1][0], t[0][1]],
        3 => vec![
            t[1][0] * t[2][0] + t[1][2] * t[2][0] + t[2][1] * t[1][0],
            t[0][1] * t[2][1] + t[0][2] * t[2][1] + t[2][0] * t[0][1],
            t[0][2] * t[1][2] + t[0][1] * t[1][2] + t[1][0] * t[0][2],
        ],
        m => unreachable!("kernel has at most three row laws, got {m}"),
    };
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Singular("lumped chain is reducible".into()));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// `‖π·P − π‖₁` computed from the row laws alone, without the dense kernel.
pub fn fixed_point_residual(
    params: &ModelParams,
    half_rule: HalfRule,
    pi: &StateDistribution,
) -> Result<f64> {
    let params = validate_params(*params)?;
    if pi.n_producers() != params.n_producers {
        return Err(Error::InvalidDistribution(format!(
            "distribution covers {} producers, params say {}",
            pi.n_producers(),
            params.n_producers
        )));
    }
    let laws = RowLaws::new(&params, half_rule);
    let mut block_mass = vec![0.0; laws.rows.len()];
    for (state, p) in params.states().zip(pi.probabilities()) {
        block_mass[laws.index_of(&params, &state, half_rule)] += p;
    }
    let mut next = vec![0.0; params.n_states()];
    for (w, row) in block_mass.iter().zip(&laws.rows) {
        for (x, p) in next.iter_mut().zip(row) {
            *x += w * p;
        }
    }
    Ok(next.iter().zip(pi.probabilities()).map(|(a, b)| (a - b).abs()).sum())
}

/// Builds whatever the chosen method needs and solves for the ergodic law.
pub fn solve_stationary(
    params: &ModelParams,
    half_rule: HalfRule,
    method: Method,
    tol: f64,
    max_iters: usize,
) -> Result<StateDistribution> {
    match method {
        Method::Analytic => stationary_analytic_with(params, half_rule),
        Method::Power => stationary_power(&build_kernel_with(params, half_rule)?, tol, max_iters),
        Method::Eigen => stationary_eigen(&build_kernel_with(params, half_rule)?),
    }
}
