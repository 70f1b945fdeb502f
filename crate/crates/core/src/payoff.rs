//! Short-side/long-side payoff schedule.
//!
//! Producers on the short side of the market keep their own output and
//! receive one unit of the other good (Leontief payoff `min[1, ·] = 1`);
//! the long-side good is worthless after the period, so long-side producers
//! get `min[0, 0] = 0`. Both values are configurable through
//! [`ModelParams`].

use crate::model::{Action, MarketOutcome, MarketState, ModelParams, ShortSide};

pub fn market_outcome(params: &ModelParams, state: &MarketState) -> MarketOutcome {
    let share = state.corn_fraction();
    let (short_side, winner_probability) = match state.short_side() {
        ShortSide::Corn => (ShortSide::Corn, share),
        ShortSide::Sugar => (ShortSide::Sugar, 1.0 - share),
        ShortSide::Balanced => (ShortSide::Balanced, 0.5),
    };
    MarketOutcome {
        short_side,
        winner_payoff: params.payoff_short,
        loser_payoff: params.payoff_long,
        winner_probability,
        excess_supply_per_producer: (1.0 - 2.0 * share).abs(),
    }
}

/// Payoff of choosing `action` when the market is in `state`.
///
/// At the balanced state neither good is scarce and both actions pay the
/// midpoint of the two payoffs.
pub fn payoff_of_action(params: &ModelParams, state: &MarketState, action: Action) -> f64 {
    let short = match state.short_side() {
        ShortSide::Corn => Action::Corn,
        ShortSide::Sugar => Action::Sugar,
        ShortSide::Balanced => return 0.5 * (params.payoff_short + params.payoff_long),
    };
    if action == short {
        params.payoff_short
    } else {
        params.payoff_long
    }
}
