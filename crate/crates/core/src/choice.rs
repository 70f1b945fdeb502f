//! Entropy-constrained choice: Gibbs (softmax) frequencies over actions,
//! the two-action logit special case, and the probability that a producer
//! picks corn given last period's market state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Action, HalfRule, MarketState, ModelParams, ShortSide};
use crate::payoff::payoff_of_action;

/// Mixed strategy of the typical producer over K actions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionDistribution {
    frequencies: Vec<f64>,
}

impl ActionDistribution {
    /// Wraps a frequency vector, checking non-negativity and normalization.
    pub fn new(frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::InvalidDistribution("no actions".into()));
        }
        if frequencies.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "frequencies must be finite and non-negative".into(),
            ));
        }
        let total: f64 = frequencies.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "frequencies sum to {total}"
            )));
        }
        Ok(ActionDistribution { frequencies })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Informational entropy `-Σ f ln f`, with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        entropy(&self.frequencies)
    }

    pub fn expected_payoff(&self, payoffs: &[f64]) -> f64 {
        self.frequencies
            .iter()
            .zip(payoffs)
            .map(|(f, u)| f * u)
            .sum()
    }
}

pub fn entropy(frequencies: &[f64]) -> f64 {
    -frequencies
        .iter()
        .filter(|f| **f > 0.0)
        .map(|f| f * f.ln())
        .sum::<f64>()
}

fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 && temperature.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(temperature))
    }
}

/// Frequencies proportional to `exp(payoff / T)`.
///
/// This is the maximizer of expected payoff over mixed strategies whose
/// entropy is held at a floor set implicitly by `temperature`.
pub fn gibbs(payoffs: &[f64], temperature: f64) -> Result<ActionDistribution> {
    if payoffs.is_empty() {
        return Err(Error::EmptyPayoffs);
    }
    if payoffs.iter().any(|u| !u.is_finite()) {
        return Err(Error::NonFinitePayoff);
    }
    check_temperature(temperature)?;

    if let [a, b] = *payoffs {
        // Keep the smaller frequency at full relative precision and derive
        // the larger one from it, so f_b = 1 - f_a whenever f_a is larger.
        let small = logistic(-(a - b).abs() / temperature);
        let large = 1.0 - small;
        let frequencies = if a >= b { vec![large, small] } else { vec![small, large] };
        return Ok(ActionDistribution { frequencies });
    }

    let max = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = payoffs
        .iter()
        .map(|u| ((u - max) / temperature).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(ActionDistribution {
        frequencies: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// `1 / (1 + e^{-x})` without overflow for large `|x|`.
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Probability of choosing action `a` over action `b`.
pub fn logit_response(payoff_a: f64, payoff_b: f64, temperature: f64) -> Result<f64> {
    if !(payoff_a.is_finite() && payoff_b.is_finite()) {
        return Err(Error::NonFinitePayoff);
    }
    check_temperature(temperature)?;
    Ok(logistic((payoff_a - payoff_b) / temperature))
}

/// `ln(f_b / f_a)` for a two-action distribution.
pub fn log_odds(dist: &ActionDistribution) -> Result<f64> {
    let [a, b] = dist.frequencies[..] else {
        return Err(Error::NotBinary(dist.len()));
    };
    for f in [a, b] {
        if f <= 0.0 {
            return Err(Error::ZeroFrequency(f));
        }
    }
    Ok(b.ln() - a.ln())
}

/// Probability that a producer chooses corn next period, given this
/// period's state and static expectations (next payoff = current payoff).
pub fn corn_choice_probability(params: &ModelParams, state: &MarketState) -> f64 {
    let corn = payoff_of_action(params, state, Action::Corn);
    let sugar = payoff_of_action(params, state, Action::Sugar);
    logistic((corn - sugar) / params.temperature)
}

/// Corn and sugar choice probabilities, each at full relative precision.
///
/// `corn + sugar` equals 1 up to rounding; the kernel and the simulator use
/// both sides so that tiny tail probabilities survive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiceSplit {
    pub corn: f64,
    pub sugar: f64,
}

impl ChoiceSplit {
    pub fn mirrored(self) -> ChoiceSplit {
        ChoiceSplit {
            corn: self.sugar,
            sugar: self.corn,
        }
    }
}

pub fn corn_choice_split(params: &ModelParams, state: &MarketState, rule: HalfRule) -> ChoiceSplit {
    let short_corn = {
        let x = params.payoff_gap() / params.temperature;
        ChoiceSplit {
            corn: logistic(x),
            sugar: logistic(-x),
        }
    };
    match (state.short_side(), rule) {
        (ShortSide::Corn, _) | (ShortSide::Balanced, HalfRule::Low) => short_corn,
        (ShortSide::Sugar, _) | (ShortSide::Balanced, HalfRule::High) => short_corn.mirrored(),
        (ShortSide::Balanced, HalfRule::Half) => ChoiceSplit {
            corn: 0.5,
            sugar: 0.5,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::collection::vec;
    use proptest::prelude::*;

    // 1/(1+e^{-1}), 1/(1+e^{1}), 1/(1+e^{10}) evaluated with 40-digit arithmetic.
    const LOGISTIC_1: f64 = 0.731_058_578_630_004_879_251_159_241_821_836_3;
    const LOGISTIC_M1: f64 = 0.268_941_421_369_995_120_748_840_758_178_163_7;
    const LOGISTIC_M10: f64 = 4.539_786_870_243_439_450_477_623_276_348_945_5e-5;

    #[test]
    fn gibbs_uniform_for_equal_payoffs() {
        let d = gibbs(&[2.5, 2.5, 2.5], 0.3).unwrap();
        for f in d.frequencies() {
            assert!((f - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gibbs_two_actions() {
        let d = gibbs(&[1.0, 0.0], 1.0).unwrap();
        assert!((d.frequencies()[0] - LOGISTIC_1).abs() < 1e-6);
        assert!((d.frequencies()[1] - LOGISTIC_M1).abs() < 1e-6);
        assert!((d.frequencies()[0] - LOGISTIC_1).abs() < 1e-15);
    }

    #[test]
    fn gibbs_hot_limit() {
        let d = gibbs(&[1.0, 0.0], 1e9).unwrap();
        for f in d.frequencies() {
            assert!((f - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn gibbs_rejects_bad_input() {
        assert!(matches!(gibbs(&[], 1.0), Err(Error::EmptyPayoffs)));
        assert!(matches!(gibbs(&[1.0, f64::NAN], 1.0), Err(Error::NonFinitePayoff)));
        assert!(matches!(gibbs(&[1.0], 0.0), Err(Error::NonPositiveTemperature(_))));
        assert!(gibbs(&[1.0], -2.0).is_err());
    }

    #[test]
    fn gibbs_survives_extreme_payoffs() {
        let d = gibbs(&[1e4, -1e4, 0.0], 1e-3).unwrap();
        assert_eq!(d.frequencies()[0], 1.0);
        assert!(d.frequencies().iter().all(|f| f.is_finite()));
    }

    #[test]
    fn logit_values() {
        assert!((logit_response(1.0, 0.0, 1.0).unwrap() - LOGISTIC_1).abs() < 1e-6);
        assert_eq!(logit_response(0.7, 0.7, 3.0).unwrap(), 0.5);
        let small_t = logit_response(0.0, 1.0, 0.1).unwrap();
        assert!((small_t - LOGISTIC_M10).abs() < 1e-9);
        assert!(logit_response(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn log_odds_values() {
        let even = ActionDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(log_odds(&even).unwrap(), 0.0);
        let d = gibbs(&[1.0, 0.0], 1.0).unwrap();
        assert!((log_odds(&d).unwrap() + 1.0).abs() < 1e-10);
        let d = gibbs(&[1.0, 0.0], 0.5).unwrap();
        assert!((log_odds(&d).unwrap() + 2.0).abs() < 1e-10);
    }

    #[test]
    fn log_odds_errors() {
        let zero = ActionDistribution::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(log_odds(&zero), Err(Error::ZeroFrequency(_))));
        let three = gibbs(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(matches!(log_odds(&three), Err(Error::NotBinary(3))));
    }

    #[test]
    fn corn_choice_by_state() {
        let p = ModelParams::new(10, 1.0).unwrap();
        let low = corn_choice_probability(&p, &p.state(3).unwrap());
        let high = corn_choice_probability(&p, &p.state(7).unwrap());
        assert!((low - LOGISTIC_1).abs() < 1e-15);
        assert!((high - LOGISTIC_M1).abs() < 1e-15);
        for t in [0.01, 1.0, 1e3] {
            let p = p.with_temperature(t).unwrap();
            assert_eq!(corn_choice_probability(&p, &p.state(5).unwrap()), 0.5);
        }
    }

    #[test]
    fn split_matches_probability_and_rules() {
        let p = ModelParams::new(10, 0.7).unwrap();
        for s in p.states() {
            let split = corn_choice_split(&p, &s, HalfRule::Half);
            assert!((split.corn - corn_choice_probability(&p, &s)).abs() < 1e-15);
            assert!((split.corn + split.sugar - 1.0).abs() <= f64::EPSILON);
        }
        let mid = p.state(5).unwrap();
        let low = corn_choice_split(&p, &p.state(0).unwrap(), HalfRule::Half);
        assert_eq!(corn_choice_split(&p, &mid, HalfRule::Low), low);
        assert_eq!(corn_choice_split(&p, &mid, HalfRule::High), low.mirrored());
    }

    #[test]
    fn split_keeps_tail_precision() {
        let p = ModelParams::new(10, 0.01).unwrap();
        let split = corn_choice_split(&p, &p.state(0).unwrap(), HalfRule::Half);
        // e^{-100} / (1 + e^{-100})
        assert!((split.sugar / (-100f64).exp() - 1.0).abs() < 1e-12);
    }

    fn payoff_vec() -> impl Strategy<Value = Vec<f64>> {
        vec(-100.0f64..100.0, 1..=64)
    }

    proptest! {
        #[test]
        fn gibbs_normalized(u in payoff_vec(), t in 1e-3f64..1e3) {
            let d = gibbs(&u, t).unwrap();
            let total: f64 = d.frequencies().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(d.frequencies().iter().all(|f| *f >= 0.0));
        }

        #[test]
        fn gibbs_shift_invariant(u in payoff_vec(), t in 1e-3f64..1e3, c in -50.0f64..50.0) {
            let a = gibbs(&u, t).unwrap();
            let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
            let b = gibbs(&shifted, t).unwrap();
            for (x, y) in a.frequencies().iter().zip(b.frequencies()) {
                prop_assert!((x - y).abs() < 1e-12, "{} vs {}", x, y);
            }
        }

        #[test]
        fn gibbs_monotone(u in vec(-5.0f64..5.0, 2..=16), t in 0.1f64..10.0, idx in any::<usize>(), bump in 0.01f64..2.0) {
            let i = idx % u.len();
            let before = gibbs(&u, t).unwrap();
            let mut raised = u.clone();
            raised[i] += bump;
            let after = gibbs(&raised, t).unwrap();
            // A frequency already rounded to 1 cannot rise further in f64.
            let (f0, f1) = (before.frequencies()[i], after.frequencies()[i]);
            prop_assert!(f1 >= f0);
            prop_assert!(f1 > f0 || f0 >= 1.0 - 1e-12, "{} -> {}", f0, f1);
            for j in (0..u.len()).filter(|j| *j != i) {
                prop_assert!(after.frequencies()[j] <= before.frequencies()[j]);
            }
        }

        #[test]
        fn logit_matches_gibbs(a in -100.0f64..100.0, b in -100.0f64..100.0, t in 1e-3f64..1e3) {
            let g = gibbs(&[a, b], t).unwrap();
            let l = logit_response(a, b, t).unwrap();
            prop_assert!((g.frequencies()[0] - l).abs() < 1e-14);
        }

        #[test]
        fn complement_identity(a in -10.0f64..10.0, b in -10.0f64..10.0, t in 1e-2f64..1e2) {
            let g = gibbs(&[a, b], t).unwrap();
            let f = g.frequencies();
            prop_assert!((f[1] - (1.0 - f[0])).abs() <= f64::EPSILON);
        }

        #[test]
        fn log_odds_identity(a in -5.0f64..5.0, b in -5.0f64..5.0, t in 0.05f64..20.0) {
            let g = gibbs(&[a, b], t).unwrap();
            prop_assert!((log_odds(&g).unwrap() - (b - a) / t).abs() < 1e-10);
        }
    }
}
