use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::round_trip;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    MonteCarloEmpirical,
}

/// Probability vector over corn counts `0..=N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateDistribution {
    probabilities: Vec<f64>,
    provenance: Provenance,
}

impl StateDistribution {
    pub fn new(probabilities: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if probabilities.len() < 2 {
            return Err(Error::InvalidDistribution(
                "need at least two states".into(),
            ));
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(StateDistribution {
            probabilities,
            provenance,
        })
    }

    /// Point mass at `state` over `0..=n_producers`.
    pub fn point_mass(n_producers: u32, state: u32) -> Result<Self> {
        if state > n_producers {
            return Err(Error::StateOutOfRange {
                count: state,
                n: n_producers,
            });
        }
        let mut probabilities = vec![0.0; n_producers as usize + 1];
        probabilities[state as usize] = 1.0;
        Self::new(probabilities, Provenance::Exact)
    }

    /// Binomial(N, p) over corn counts.
    pub fn binomial(n_producers: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let row = super::binomial::pmf_row(
            u64::from(n_producers),
            crate::choice::ChoiceSplit {
                corn: p,
                sugar: 1.0 - p,
            },
        );
        Self::new(row, Provenance::Exact)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn n_producers(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }

    /// Half the L1 distance. Panics if the state spaces differ.
    pub fn tv_distance(&self, other: &StateDistribution) -> f64 {
        assert_eq!(
            self.probabilities.len(),
            other.probabilities.len(),
            "distributions over different state spaces"
        );
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Largest `|π_k - π_{N-k}|`.
    pub fn asymmetry(&self) -> f64 {
        self.probabilities
            .iter()
            .zip(self.probabilities.iter().rev())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn mass_in(&self, states: impl IntoIterator<Item = usize>) -> f64 {
        states
            .into_iter()
            .filter_map(|k| self.probabilities.get(k))
            .sum()
    }

    /// Local maxima of the mass function. A plateau of (relatively) equal
    /// values counts once and is reported by its first state; maxima below
    /// `1e-9` of the global maximum are ignored.
    pub fn modes(&self) -> Vec<usize> {
        let p = &self.probabilities;
        let peak = p.iter().copied().fold(0.0, f64::max);
        let floor = peak * 1e-9;
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.max(b);
        let mut modes = Vec::new();
        let mut k = 0;
        while k < p.len() {
            let mut end = k;
            while end + 1 < p.len() && same(p[end + 1], p[k]) {
                end += 1;
            }
            let left_lower = k == 0 || p[k - 1] < p[k];
            let right_lower = end + 1 == p.len() || p[end + 1] < p[end];
            if left_lower && right_lower && p[k] > floor {
                modes.push(k);
            }
            k = end + 1;
        }
        modes
    }

    /// CSV with columns `state,probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,probability\n");
        for (k, p) in self.probabilities.iter().enumerate() {
            out.push_str(&format!("{k},{}\n", round_trip(*p)));
        }
        out
    }
}

/// Expected corn fraction `Σ_k (k/N) π_k`.
pub fn stationary_mean(dist: &StateDistribution) -> f64 {
    let n = dist.n_producers() as f64;
    dist.probabilities
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 / n * p)
        .sum()
}
