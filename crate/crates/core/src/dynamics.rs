//! Seeded Monte Carlo simulation of the producer population.
//!
//! All producers re-choose synchronously each period, so the next corn count
//! is one Binomial draw. A producer-by-producer mode flips `N` coins instead
//! and exists to check that the two are the same process.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`): a trajectory is fully
//! determined by its parameters and 64-bit seed on every platform, and
//! [`stream_rng`] hands out independent streams for parallel cells.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::choice::corn_choice_split;
use crate::error::{Error, Result};
use crate::format::round_trip;
use crate::kernel::{Provenance, StateDistribution};
use crate::model::{validate_params, HalfRule, MarketState, ModelParams};

pub const DEFAULT_BURN_IN: usize = 1000;

/// Name of the generator, recorded in trajectory metadata.
pub const GENERATOR: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMode {
    /// One Binomial(N, f) draw per period.
    #[default]
    Binomial,
    /// `N` independent producer-level Bernoulli(f) choices per period.
    Producers,
}

impl std::fmt::Display for StepMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StepMode::Binomial => "binomial",
            StepMode::Producers => "producers",
        })
    }
}

impl std::str::FromStr for StepMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "binomial" => Ok(StepMode::Binomial),
            "producers" => Ok(StepMode::Producers),
            other => Err(format!("unknown step mode `{other}` (expected binomial or producers)")),
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent generator for cell `stream` of a run seeded with `master`.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

pub fn step<R: Rng + ?Sized>(params: &ModelParams, state: &MarketState, rng: &mut R) -> MarketState {
    step_with(params, HalfRule::Half, StepMode::Binomial, state, rng)
}

pub fn step_with<R: Rng + ?Sized>(
    params: &ModelParams,
    half_rule: HalfRule,
    mode: StepMode,
    state: &MarketState,
    rng: &mut R,
) -> MarketState {
    let split = corn_choice_split(params, state, half_rule);
    let n = params.n_producers;
    let next = match mode {
        StepMode::Binomial => Binomial::new(u64::from(n), split.corn)
            .expect("choice probability lies in [0, 1]")
            .sample(rng) as u32,
        StepMode::Producers => {
            let coin = Bernoulli::new(split.corn).expect("choice probability lies in [0, 1]");
            (0..n).filter(|_| coin.sample(rng)).count() as u32
        }
    };
    MarketState::new(next, n).expect("draw is bounded by N")
}

/// Everything that determines a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    pub initial: u32,
    pub periods: usize,
    pub burn_in: usize,
    pub seed: u64,
    #[serde(default)]
    pub half_rule: HalfRule,
    #[serde(default)]
    pub step_mode: StepMode,
}

impl RunConfig {
    pub fn new(params: ModelParams, initial: u32, periods: usize, burn_in: usize, seed: u64) -> Self {
        RunConfig {
            params,
            initial,
            periods,
            burn_in,
            seed,
            half_rule: HalfRule::Half,
            step_mode: StepMode::Binomial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self.params)?;
        self.params.state(self.initial)?;
        if self.periods == 0 {
            return Err(Error::InvalidArgument("periods must be at least 1".into()));
        }
        if self.burn_in >= self.periods {
            return Err(Error::BurnIn {
                burn_in: self.burn_in,
                periods: self.periods,
            });
        }
        Ok(())
    }
}

/// Realized path of corn counts, one entry per period starting with the
/// initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub config: RunConfig,
    pub states: Vec<u32>,
}

impl Trajectory {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn burn_in(&self) -> usize {
        self.config.burn_in
    }

    pub fn params(&self) -> &ModelParams {
        &self.config.params
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// CSV with columns `period,corn_count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * self.states.len() + 20);
        out.push_str("period,corn_count\n");
        for (t, k) in self.states.iter().enumerate() {
            out.push_str(&t.to_string());
            out.push(',');
            out.push_str(&k.to_string());
            out.push('\n');
        }
        out
    }

    /// Sidecar metadata: parameters, seed, burn-in and generator.
    pub fn metadata_json(&self) -> Result<String> {
        let meta = serde_json::json!({
            "params": self.config.params,
            "seed": self.config.seed,
            "burn_in": self.config.burn_in,
            "periods": self.config.periods,
            "initial": self.config.initial,
            "half_rule": self.config.half_rule,
            "step_mode": self.config.step_mode,
            "generator": GENERATOR,
        });
        Ok(serde_json::to_string_pretty(&meta)?)
    }
}

/// Simulates `periods` states (the first is `initial`) with the default
/// balanced-row rule and Binomial steps.
pub fn run(
    params: &ModelParams,
    initial: &MarketState,
    periods: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Trajectory> {
    run_with(&RunConfig::new(*params, initial.corn_count(), periods, burn_in, seed))
}

pub fn run_with(config: &RunConfig) -> Result<Trajectory> {
    run_with_rng(config, &mut rng_from_seed(config.seed))
}

/// Like [`run_with`] but drawing from a caller-supplied generator; the
/// recorded seed is informational only.
pub fn run_with_rng<R: Rng + ?Sized>(config: &RunConfig, rng: &mut R) -> Result<Trajectory> {
    config.validate()?;
    let params = &config.params;
    let mut state = params.state(config.initial)?;
    let mut states = Vec::with_capacity(config.periods);
    states.push(state.corn_count());
    for _ in 1..config.periods {
        state = step_with(params, config.half_rule, config.step_mode, &state, rng);
        states.push(state.corn_count());
    }
    Ok(Trajectory {
        config: *config,
        states,
    })
}

/// Normalized histogram of the post-burn-in states.
pub fn empirical_distribution(traj: &Trajectory) -> Result<StateDistribution> {
    let kept = traj
        .states
        .get(traj.burn_in()..)
        .filter(|s| !s.is_empty())
        .ok_or(Error::BurnIn {
            burn_in: traj.burn_in(),
            periods: traj.len(),
        })?;
    let mut counts = vec![0u64; traj.params().n_states()];
    for k in kept {
        counts[*k as usize] += 1;
    }
    let total = kept.len() as f64;
    let mut probabilities: Vec<f64> = counts.iter().map(|c| *c as f64 / total).collect();
    // Absorb summation rounding so the vector passes the 1e-12 check.
    let sum: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|p| *p /= sum);
    StateDistribution::new(probabilities, Provenance::MonteCarloEmpirical)
}

/// One-line human summary, used by the CLI.
pub fn describe_tv(tv: f64) -> String {
    format!("tv_distance={}", round_trip(tv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::stationary_analytic;

    fn params(n: u32, t: f64) -> ModelParams {
        ModelParams::new(n, t).unwrap()
    }

    #[test]
    fn cold_step_jumps_to_full_corn() {
        let p = params(10, 0.001);
        let mut rng = rng_from_seed(7);
        let s = p.state(2).unwrap();
        let hits = (0..1000).filter(|_| step(&p, &s, &mut rng).corn_count() == 10).count();
        assert!(hits >= 990, "{hits}");
    }

    #[test]
    fn step_is_deterministic_for_a_seed() {
        let p = params(50, 0.7);
        let s = p.state(13).unwrap();
        for mode in [StepMode::Binomial, StepMode::Producers] {
            let a = step_with(&p, HalfRule::Half, mode, &s, &mut rng_from_seed(99));
            let b = step_with(&p, HalfRule::Half, mode, &s, &mut rng_from_seed(99));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn step_mean_matches_binomial_mean() {
        let p = params(100, 1.0);
        let s = p.state(30).unwrap();
        let mut rng = rng_from_seed(2024);
        let reps = 100_000;
        let total: u64 = (0..reps).map(|_| u64::from(step(&p, &s, &mut rng).corn_count())).sum();
        let mean = total as f64 / reps as f64;
        // 100 / (1 + e^{-1})
        assert!((mean - 73.105_857_863).abs() < 0.5, "{mean}");
    }

    #[test]
    fn single_period_run_is_initial() {
        let p = params(10, 1.0);
        let t = run(&p, &p.state(4).unwrap(), 1, 0, 1).unwrap();
        assert_eq!(t.states, vec![4]);
    }

    #[test]
    fn burn_in_must_be_less_than_periods() {
        let p = params(10, 1.0);
        let err = run(&p, &p.state(4).unwrap(), 10, 100, 1).unwrap_err();
        assert!(err.to_string().contains("burn-in must be less than periods"));
        assert!(run(&p, &p.state(4).unwrap(), 10, 10, 1).is_err());
        assert!(run(&p, &p.state(4).unwrap(), 0, 0, 1).is_err());
    }

    #[test]
    fn runs_are_reproducible() {
        let p = params(30, 0.4);
        let a = run(&p, &p.state(0).unwrap(), 5000, 10, 42).unwrap();
        let b = run(&p, &p.state(0).unwrap(), 5000, 10, 42).unwrap();
        let c = run(&p, &p.state(0).unwrap(), 5000, 10, 43).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_ne!(a.states, c.states);
    }

    #[test]
    fn cold_run_sits_at_the_extremes() {
        let p = params(10, 0.05);
        let t = run(&p, &p.state(5).unwrap(), 10_000, DEFAULT_BURN_IN, 5).unwrap();
        let kept = &t.states[t.burn_in()..];
        let extreme = kept.iter().filter(|k| **k == 0 || **k == 10).count();
        assert!(extreme as f64 / kept.len() as f64 >= 0.98);
    }

    #[test]
    fn constant_trajectory_gives_point_mass() {
        let p = params(6, 1.0);
        let traj = Trajectory {
            config: RunConfig::new(p, 3, 20, 5, 0),
            states: vec![3; 20],
        };
        let d = empirical_distribution(&traj).unwrap();
        assert_eq!(d.probabilities(), StateDistribution::point_mass(6, 3).unwrap().probabilities());
        assert_eq!(d.provenance(), Provenance::MonteCarloEmpirical);
    }

    #[test]
    fn streams_differ() {
        let mut a = stream_rng(1, 0);
        let mut b = stream_rng(1, 1);
        let xa: Vec<u64> = (0..4).map(|_| a.random()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.random()).collect();
        assert_ne!(xa, xb);
    }

    #[test]
    fn short_run_tracks_exact_law() {
        let p = params(10, 1.0);
        let t = run(&p, &p.state(5).unwrap(), 200_000, 1000, 11).unwrap();
        let emp = empirical_distribution(&t).unwrap();
        let exact = stationary_analytic(&p).unwrap();
        assert!(emp.tv_distance(&exact) <= 0.02);
    }

    #[test]
    fn metadata_names_generator() {
        let p = params(10, 1.0);
        let t = run(&p, &p.state(5).unwrap(), 3, 0, 8).unwrap();
        let meta: serde_json::Value = serde_json::from_str(&t.metadata_json().unwrap()).unwrap();
        assert_eq!(meta["seed"], 8);
        assert_eq!(meta["params"]["n_producers"], 10);
        assert!(meta["generator"].as_str().unwrap().contains("ChaCha20"));
    }

    #[test]
    fn step_modes_parse() {
        for m in [StepMode::Binomial, StepMode::Producers] {
            assert_eq!(m.to_string().parse::<StepMode>().unwrap(), m);
        }
        assert!("coins".parse::<StepMode>().is_err());
    }
}
