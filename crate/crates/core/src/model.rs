//! Domain types shared by every other module: model configuration, the
//! market state (number of corn producers) and the short-side/long-side
//! outcome of one production period.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_payoff_short() -> f64 {
    1.0
}

fn default_payoff_long() -> f64 {
    0.0
}

/// Full configuration of the two-good economy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Number of producers; states run over corn counts `0..=n_producers`.
    pub n_producers: u32,
    /// Behavior scale. Small values make producers chase payoff
    /// differences, large values make them choose at random.
    pub temperature: f64,
    /// Payoff to a producer on the short side of the market.
    #[serde(default = "default_payoff_short")]
    pub payoff_short: f64,
    /// Payoff to a producer on the long side of the market.
    #[serde(default = "default_payoff_long")]
    pub payoff_long: f64,
}

impl ModelParams {
    /// Validated parameters with the default payoffs (1 short side, 0 long side).
    pub fn new(n_producers: u32, temperature: f64) -> Result<Self> {
        validate_params(ModelParams {
            n_producers,
            temperature,
            payoff_short: default_payoff_short(),
            payoff_long: default_payoff_long(),
        })
    }

    pub fn with_payoffs(self, payoff_short: f64, payoff_long: f64) -> Result<Self> {
        validate_params(ModelParams {
            payoff_short,
            payoff_long,
            ..self
        })
    }

    pub fn with_temperature(self, temperature: f64) -> Result<Self> {
        validate_params(ModelParams {
            temperature,
            ..self
        })
    }

    /// Payoff advantage of the short side over the long side.
    pub fn payoff_gap(&self) -> f64 {
        self.payoff_short - self.payoff_long
    }

    pub fn n_states(&self) -> usize {
        self.n_producers as usize + 1
    }

    pub fn state(&self, corn_count: u32) -> Result<MarketState> {
        MarketState::new(corn_count, self.n_producers)
    }

    pub fn states(&self) -> impl Iterator<Item = MarketState> + '_ {
        (0..=self.n_producers).map(|k| MarketState {
            corn_count: k,
            n_producers: self.n_producers,
        })
    }
}

/// Returns `params` unchanged when every invariant holds.
pub fn validate_params(params: ModelParams) -> Result<ModelParams> {
    if params.n_producers < 2 {
        return Err(Error::TooFewProducers(params.n_producers));
    }
    if !(params.temperature > 0.0 && params.temperature.is_finite()) {
        return Err(Error::NonPositiveTemperature(params.temperature));
    }
    if !(params.payoff_short.is_finite() && params.payoff_long.is_finite()) {
        return Err(Error::NonFinitePayoff);
    }
    if params.payoff_short <= params.payoff_long {
        return Err(Error::PayoffOrdering {
            short: params.payoff_short,
            long: params.payoff_long,
        });
    }
    Ok(params)
}

/// Number of corn producers out of `n_producers`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MarketState {
    corn_count: u32,
    n_producers: u32,
}

impl MarketState {
    pub fn new(corn_count: u32, n_producers: u32) -> Result<Self> {
        if corn_count > n_producers {
            return Err(Error::StateOutOfRange {
                count: corn_count,
                n: n_producers,
            });
        }
        Ok(MarketState {
            corn_count,
            n_producers,
        })
    }

    pub fn corn_count(&self) -> u32 {
        self.corn_count
    }

    pub fn n_producers(&self) -> u32 {
        self.n_producers
    }

    pub fn corn_fraction(&self) -> f64 {
        self.corn_count as f64 / self.n_producers as f64
    }

    /// Which good is scarce. Decided on integers so the balanced state is exact.
    pub fn short_side(&self) -> ShortSide {
        let twice = 2 * u64::from(self.corn_count);
        let n = u64::from(self.n_producers);
        match twice.cmp(&n) {
            std::cmp::Ordering::Less => ShortSide::Corn,
            std::cmp::Ordering::Greater => ShortSide::Sugar,
            std::cmp::Ordering::Equal => ShortSide::Balanced,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShortSide {
    Corn,
    Sugar,
    Balanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Corn,
    Sugar,
}

impl Action {
    pub fn other(self) -> Action {
        match self {
            Action::Corn => Action::Sugar,
            Action::Sugar => Action::Corn,
        }
    }
}

/// Result of exchange at the end of one production period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarketOutcome {
    pub short_side: ShortSide,
    pub winner_payoff: f64,
    pub loser_payoff: f64,
    /// Probability the typical producer ends up on the short side.
    pub winner_probability: f64,
    /// Output of the long-side good that finds no buyer, per producer.
    pub excess_supply_per_producer: f64,
}

/// Choice probability used for the balanced row (`2k = N`) of the chain.
/// The model itself only defines the strict inequalities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfRule {
    /// Equal payoffs, so producers pick corn with probability 1/2.
    #[default]
    Half,
    /// Treat the balanced row like the corn-short rows.
    Low,
    /// Treat the balanced row like the sugar-short rows.
    High,
}

impl fmt::Display for HalfRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfRule::Half => "half",
            HalfRule::Low => "low",
            HalfRule::High => "high",
        })
    }
}

impl FromStr for HalfRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "half" => Ok(HalfRule::Half),
            "low" => Ok(HalfRule::Low),
            "high" => Ok(HalfRule::High),
            other => Err(format!("unknown half rule `{other}` (expected half, low or high)")),
        }
    }
}
