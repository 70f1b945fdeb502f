//! Income inequality under the ergodic distribution.
//!
//! In state `k` a randomly chosen producer is on the short side with
//! probability `min(k, N-k)/N` (1/2 when balanced). Averaging that over the
//! ergodic law gives a two-point income distribution, whose Lorenz curve
//! has a single kink.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::round_trip;
use crate::kernel::StateDistribution;
use crate::model::{validate_params, ModelParams};

/// Two-point income law: `payoff_short` with probability `p_win`,
/// `payoff_long` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IncomeLaw {
    pub p_win: f64,
    pub payoff_short: f64,
    pub payoff_long: f64,
}

/// Probability of being on the short side in state `k` of `n`.
pub fn win_share(k: u32, n: u32) -> f64 {
    if 2 * u64::from(k) == u64::from(n) {
        0.5
    } else {
        f64::from(k.min(n - k)) / f64::from(n)
    }
}

pub fn income_distribution(params: &ModelParams, dist: &StateDistribution) -> Result<IncomeLaw> {
    let params = validate_params(*params)?;
    if dist.n_producers() != params.n_producers {
        return Err(Error::InvalidDistribution(format!(
            "distribution covers {} producers, params say {}",
            dist.n_producers(),
            params.n_producers
        )));
    }
    let n = params.n_producers;
    let p_win = dist
        .probabilities()
        .iter()
        .enumerate()
        .map(|(k, pi)| pi * win_share(k as u32, n))
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(IncomeLaw {
        p_win,
        payoff_short: params.payoff_short,
        payoff_long: params.payoff_long,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LorenzGini {
    /// `(cumulative_population, cumulative_income)` from (0,0) to (1,1).
    pub lorenz_points: Vec<(f64, f64)>,
    pub gini: f64,
}

impl LorenzGini {
    /// Area under the piecewise-linear curve.
    pub fn area(&self) -> f64 {
        self.lorenz_points
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[1].1 + w[0].1))
            .sum()
    }

    /// The interior vertex, if the curve has one.
    pub fn kink(&self) -> Option<(f64, f64)> {
        (self.lorenz_points.len() == 3).then(|| self.lorenz_points[1])
    }

    /// CSV with columns `cum_population,cum_income`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cum_population,cum_income\n");
        for (x, y) in &self.lorenz_points {
            out.push_str(&format!("{},{}\n", round_trip(*x), round_trip(*y)));
        }
        out
    }

    pub fn summary_json(&self, p_win: f64) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::json!({
            "p_win": p_win,
            "gini": self.gini,
        }))?)
    }
}

/// Lorenz curve and Gini coefficient of the two-point income law.
///
/// Fails with [`Error::UndefinedGini`] when total income is zero.
pub fn lorenz_gini(p_win: f64, payoff_short: f64, payoff_long: f64) -> Result<LorenzGini> {
    if !(0.0..=1.0).contains(&p_win) {
        return Err(Error::InvalidProbability(p_win));
    }
    if !(payoff_short.is_finite() && payoff_long.is_finite()) {
        return Err(Error::NonFinitePayoff);
    }
    if payoff_long < 0.0 {
        return Err(Error::NegativeIncome(payoff_long));
    }
    if payoff_short <= payoff_long {
        return Err(Error::PayoffOrdering {
            short: payoff_short,
            long: payoff_long,
        });
    }
    let losers = 1.0 - p_win;
    let total = losers * payoff_long + p_win * payoff_short;
    if !(total > 0.0) {
        return Err(Error::UndefinedGini);
    }
    let mut lorenz_points = vec![(0.0, 0.0)];
    if losers > 0.0 && p_win > 0.0 {
        lorenz_points.push((losers, losers * payoff_long / total));
    }
    lorenz_points.push((1.0, 1.0));
    let mut curve = LorenzGini {
        lorenz_points,
        gini: 0.0,
    };
    curve.gini = (1.0 - 2.0 * curve.area()).clamp(0.0, 1.0);
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::stationary_analytic;
    use proptest::prelude::*;

    #[test]
    fn balanced_point_mass_splits_evenly() {
        let p = ModelParams::new(10, 1.0).unwrap();
        let d = StateDistribution::point_mass(10, 5).unwrap();
        assert_eq!(income_distribution(&p, &d).unwrap().p_win, 0.5);
    }

    #[test]
    fn all_sugar_state_pays_nobody() {
        let p = ModelParams::new(10, 1.0).unwrap();
        let d = StateDistribution::point_mass(10, 0).unwrap();
        assert_eq!(income_distribution(&p, &d).unwrap().p_win, 0.0);
        // Nobody is on the (empty) short side, so every payoff is the long one.
        let outcome = crate::payoff::market_outcome(&p, &p.state(0).unwrap());
        assert_eq!(outcome.winner_probability, 0.0);
        assert!(matches!(lorenz_gini(0.0, 1.0, 0.0), Err(Error::UndefinedGini)));
    }

    #[test]
    fn ergodic_win_probability_at_unit_temperature() {
        // Numerical integration of win_share against an independent
        // eigen-solve (numpy) of the N=100, T=1 kernel.
        let p = ModelParams::new(100, 1.0).unwrap();
        let law = income_distribution(&p, &stationary_analytic(&p).unwrap()).unwrap();
        assert!((law.p_win - 0.268_941_513_899_851_9).abs() < 1e-9, "{}", law.p_win);
    }

    #[test]
    fn half_winners() {
        let c = lorenz_gini(0.5, 1.0, 0.0).unwrap();
        assert!((c.gini - 0.5).abs() < 1e-12);
        assert_eq!(c.kink(), Some((0.5, 0.0)));
    }

    #[test]
    fn everybody_wins() {
        let c = lorenz_gini(1.0, 1.0, 0.0).unwrap();
        assert_eq!(c.gini, 0.0);
        assert_eq!(c.lorenz_points, vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn quarter_winners() {
        let c = lorenz_gini(0.25, 1.0, 0.0).unwrap();
        assert!((c.gini - 0.75).abs() < 1e-12);
        assert_eq!(c.kink(), Some((0.75, 0.0)));
        // Riemann sum of the curve as an independent area check.
        let steps = 100_000;
        let area: f64 = (0..steps)
            .map(|i| {
                let x = (i as f64 + 0.5) / steps as f64;
                if x < 0.75 { 0.0 } else { (x - 0.75) / 0.25 }
            })
            .sum::<f64>()
            / steps as f64;
        assert!((1.0 - 2.0 * area - 0.75).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_payoffs() {
        assert!(lorenz_gini(0.5, 1.0, -0.5).is_err());
        assert!(lorenz_gini(0.5, 1.0, 1.0).is_err());
        assert!(lorenz_gini(1.2, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn lorenz_curve_is_well_formed(p_win in 0.0f64..=1.0, long in 0.0f64..5.0, gap in 1e-3f64..5.0) {
            prop_assume!(p_win > 0.0 || long > 0.0);
            let c = lorenz_gini(p_win, long + gap, long).unwrap();
            let pts = &c.lorenz_points;
            prop_assert_eq!(pts[0], (0.0, 0.0));
            prop_assert_eq!(*pts.last().unwrap(), (1.0, 1.0));
            for w in pts.windows(2) {
                prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            }
            for (x, y) in pts {
                prop_assert!(*y <= *x + 1e-15);
            }
            let slopes: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
            for s in slopes.windows(2) {
                prop_assert!(s[1] >= s[0] - 1e-12);
            }
            prop_assert!((c.gini - (1.0 - 2.0 * c.area())).abs() < 1e-10);
            prop_assert!((0.0..=1.0).contains(&c.gini));
        }

        #[test]
        fn gini_is_one_minus_win_share_without_long_income(p_win in 1e-9f64..=1.0) {
            let c = lorenz_gini(p_win, 1.0, 0.0).unwrap();
            prop_assert!((c.gini - (1.0 - p_win)).abs() < 1e-10);
        }

        #[test]
        fn gini_is_scale_invariant(p_win in 0.01f64..=1.0, long in 0.0f64..5.0, gap in 0.01f64..5.0, scale in 0.01f64..100.0) {
            let a = lorenz_gini(p_win, long + gap, long).unwrap();
            let b = lorenz_gini(p_win, scale * (long + gap), scale * long).unwrap();
            prop_assert!((a.gini - b.gini).abs() < 1e-12);
            for (x, y) in a.lorenz_points.iter().zip(&b.lorenz_points) {
                prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
            }
        }
    }
}
