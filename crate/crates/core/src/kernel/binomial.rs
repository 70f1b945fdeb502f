use statrs::function::factorial::ln_binomial;

use crate::choice::ChoiceSplit;
use crate::error::{Error, Result};

/// Above this many trials the PMF is evaluated in log space.
const DIRECT_LIMIT: u64 = 50;

/// `C(n, k) p^k (1 - p)^(n - k)`.
pub fn binomial_pmf(n: u64, k: u64, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidOutcome { k, n });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(pmf_split(n, k, p, 1.0 - p))
}

/// PMF with success and failure probabilities supplied separately, so a
/// failure probability like `1e-40` is not rounded away by `1 - p`.
pub(crate) fn pmf_split(n: u64, k: u64, p: f64, q: f64) -> f64 {
    debug_assert!(k <= n);
    if n <= DIRECT_LIMIT {
        return exact_coefficient(n, k) * p.powi(k as i32) * q.powi((n - k) as i32);
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * q.ln()).exp()
}

fn exact_coefficient(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c as f64
}

/// Binomial(n, p) as a vector over outcomes `0..=n`.
///
/// Built by the ratio recurrence outward from the mode and normalized at the
/// end, which keeps every row stochastic to rounding for any `n`.
pub(crate) fn pmf_row(n: u64, split: ChoiceSplit) -> Vec<f64> {
    let len = n as usize + 1;
    let mut row = vec![0.0; len];
    if split.sugar == 0.0 {
        row[len - 1] = 1.0;
        return row;
    }
    if split.corn == 0.0 {
        row[0] = 1.0;
        return row;
    }
    let odds = split.corn / split.sugar;
    let mode = (((n + 1) as f64 * split.corn).floor() as usize).min(len - 1);
    row[mode] = 1.0;
    for k in mode..len - 1 {
        let kf = k as f64;
        row[k + 1] = row[k] * ((n as f64 - kf) / (kf + 1.0)) * odds;
    }
    for k in (1..=mode).rev() {
        let kf = k as f64;
        row[k - 1] = row[k] * (kf / (n as f64 - kf + 1.0)) / odds;
    }
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|x| *x /= total);
    row
}

#[cfg(test)]
// Oracle values keep every digit of the high-precision reference.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn enumerated_value() {
        // C(4,2) / 2^4 = 6/16
        assert!((binomial_pmf(4, 2, 0.5).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn certain_zero_successes() {
        for n in [0, 1, 7, 50, 51, 1000] {
            assert_eq!(binomial_pmf(n, 0, 0.0).unwrap(), 1.0);
            if n > 0 {
                assert_eq!(binomial_pmf(n, 1, 0.0).unwrap(), 0.0);
            }
            assert_eq!(binomial_pmf(n, n, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn central_term_of_hundred() {
        // C(100,50) / 2^100 with 40-digit arithmetic.
        let expected = 0.079_589_237_387_178_761_498_127_050_242_170_46;
        let got = binomial_pmf(100, 50, 0.5).unwrap();
        assert!((got - expected).abs() < 1e-6);
        assert!((got - expected).abs() < 1e-13);
    }

    #[test]
    fn log_and_direct_paths_agree_at_boundary() {
        for k in 0..=51 {
            let log_path = pmf_split(51, k, 0.3, 0.7);
            let direct = exact_coefficient(51, k) * 0.3f64.powi(k as i32) * 0.7f64.powi(51 - k as i32);
            assert!((log_path - direct).abs() <= 1e-13 * direct.max(1e-300), "k={k}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(binomial_pmf(4, 5, 0.5), Err(Error::InvalidOutcome { .. })));
        assert!(matches!(binomial_pmf(4, 1, 1.5), Err(Error::InvalidProbability(_))));
        assert!(binomial_pmf(4, 1, -0.1).is_err());
        assert!(binomial_pmf(4, 1, f64::NAN).is_err());
    }

    #[test]
    fn recurrence_row_matches_pointwise_pmf() {
        for (n, p) in [(2u64, 0.731_058_578_630_004_9), (30, 0.2), (100, 0.6), (400, 0.01)] {
            let row = pmf_row(n, ChoiceSplit { corn: p, sugar: 1.0 - p });
            for (k, x) in row.iter().enumerate() {
                let direct = binomial_pmf(n, k as u64, p).unwrap();
                assert!((x - direct).abs() <= 1e-12 * direct + 1e-300, "n={n} k={k}: {x} vs {direct}");
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        for n in [1u64, 2, 10, 49, 50, 51, 100, 500, 5000] {
            for p in [0.0, 1e-9, 0.3, 0.5, 0.731, 1.0 - 1e-9, 1.0] {
                let split = ChoiceSplit { corn: p, sugar: 1.0 - p };
                let total: f64 = pmf_row(n, split).iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} p={p} total={total}");
            }
        }
    }
}
