//! Binomial transition kernel over corn-producer counts and its ergodic
//! distribution.
//!
//! Every producer re-chooses each period, picking corn with the quantal
//! response probability for the current state, so the next corn count is
//! Binomial(N, f). All corn-short rows share one law, all sugar-short rows
//! share the mirrored law, and an even `N` adds the balanced row.

mod binomial;
mod dist;
mod stationary;

pub use binomial::binomial_pmf;
pub(crate) use binomial::pmf_row;
pub use dist::{stationary_mean, Provenance, StateDistribution};
pub use stationary::{
    fixed_point_residual, solve_stationary, stationary_analytic, stationary_analytic_with, stationary_eigen,
    stationary_power, Method, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};

use crate::choice::{corn_choice_split, ChoiceSplit};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::model::{HalfRule, ModelParams};

/// Largest `N` for which the dense `(N+1)²` matrix is built.
pub const MAX_DENSE_PRODUCERS: u32 = 20_000;

/// Row-stochastic `(N+1) × (N+1)` matrix; row = current corn count,
/// column = next corn count.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionKernel {
    params: ModelParams,
    half_rule: HalfRule,
    n_states: usize,
    data: Vec<f64>,
}

impl TransitionKernel {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn half_rule(&self) -> HalfRule {
        self.half_rule
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.data[from * self.n_states..(from + 1) * self.n_states]
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.n_states + to]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_states)
    }

    /// Row vector times matrix, `π · P`.
    pub fn apply_left(&self, pi: &[f64]) -> Vec<f64> {
        assert_eq!(pi.len(), self.n_states);
        let mut out = vec![0.0; self.n_states];
        for (weight, row) in pi.iter().zip(self.rows()) {
            if *weight == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(row) {
                *o += weight * p;
            }
        }
        out
    }

    /// Fixed-point residual `‖π·P − π‖₁`.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        self.apply_left(pi)
            .iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Largest `|Σ_j P_ij − 1|` over rows.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `from\to,0,1,...,N` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from\\to");
        for j in 0..self.n_states {
            out.push_str(&format!(",{j}"));
        }
        out.push('\n');
        for (i, row) in self.rows().enumerate() {
            out.push_str(&i.to_string());
            for p in row {
                out.push(',');
                out.push_str(&sig17(*p));
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_kernel(params: &ModelParams) -> Result<TransitionKernel> {
    build_kernel_with(params, HalfRule::Half)
}

pub fn build_kernel_with(params: &ModelParams, half_rule: HalfRule) -> Result<TransitionKernel> {
    let params = crate::model::validate_params(*params)?;
    if params.n_producers > MAX_DENSE_PRODUCERS {
        return Err(Error::KernelTooLarge(params.n_producers));
    }
    let n_states = params.n_states();
    let laws = RowLaws::new(&params, half_rule);
    let mut data = Vec::with_capacity(n_states * n_states);
    for state in params.states() {
        data.extend_from_slice(&laws.rows[laws.index_of(&params, &state, half_rule)]);
    }
    Ok(TransitionKernel {
        params,
        half_rule,
        n_states,
        data,
    })
}

/// The distinct row laws of the kernel, each computed once.
pub(crate) struct RowLaws {
    pub splits: Vec<ChoiceSplit>,
    pub rows: Vec<Vec<f64>>,
}

impl RowLaws {
    pub fn new(params: &ModelParams, half_rule: HalfRule) -> RowLaws {
        let mut splits: Vec<ChoiceSplit> = Vec::with_capacity(3);
        for state in params.states() {
            let split = corn_choice_split(params, &state, half_rule);
            if !splits.contains(&split) {
                splits.push(split);
            }
        }
        let n = u64::from(params.n_producers);
        let rows = splits.iter().map(|s| pmf_row(n, *s)).collect();
        RowLaws { splits, rows }
    }

    pub fn index_of(
        &self,
        params: &ModelParams,
        state: &crate::model::MarketState,
        half_rule: HalfRule,
    ) -> usize {
        let split = corn_choice_split(params, state, half_rule);
        self.splits
            .iter()
            .position(|s| *s == split)
            .expect("every state's law is registered")
    }
}
