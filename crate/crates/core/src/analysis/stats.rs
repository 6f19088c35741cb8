use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// A rate or mean with its 95% interval.
///
/// `n_accepted` is the number of trials the value averages over and
/// `n_total` the number that were eligible before acceptance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_accepted: u64,
    pub n_total: u64,
}

impl EstimateWithCI {
    /// No trials to estimate from. All three numbers are NaN.
    pub fn undefined(n_total: u64) -> Self {
        EstimateWithCI {
            value: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            n_accepted: 0,
            n_total,
        }
    }

    pub fn is_defined(&self) -> bool {
        !self.value.is_nan()
    }

    /// Mean of values in `[0, 1]` with a Wilson interval (exact for 0/1
    /// data; fractional values enter through their sum).
    pub fn rate(sum: f64, n: u64, n_total: u64) -> Self {
        match wilson(sum, n as f64, Z95) {
            None => Self::undefined(n_total),
            Some((lo, hi)) => EstimateWithCI {
                value: sum / n as f64,
                ci_low: lo,
                ci_high: hi,
                n_accepted: n,
                n_total,
            },
        }
    }

    /// Mean of unbounded values with a normal interval.
    pub fn mean(values: &[f64], n_total: u64) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::undefined(n_total);
        }
        let m = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let h = Z95 * (var / n as f64).sqrt();
        EstimateWithCI {
            value: m,
            ci_low: m - h,
            ci_high: m + h,
            n_accepted: n as u64,
            n_total,
        }
    }

    /// Standard error implied by the interval (half-width over z).
    pub fn std_err(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z95)
    }

    /// True when the intervals overlap.
    pub fn overlaps(&self, o: &EstimateWithCI) -> bool {
        self.ci_low <= o.ci_high && o.ci_low <= self.ci_high
    }
}

fn wilson(successes: f64, n: f64, z: f64) -> Option<(f64, f64)> {
    if n <= 0.0 {
        return None;
    }
    let p = successes / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Some(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Wilson score interval for `successes` out of `total` at the given
/// two-sided confidence. `None` when `total` is 0.
pub fn binomial_ci(successes: u64, total: u64, confidence: f64) -> Option<(f64, f64)> {
    assert!(successes <= total, "{successes} successes out of {total}");
    wilson(successes as f64, total as f64, normal_quantile(0.5 + confidence / 2.0))
}

/// Inverse standard normal CDF.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile of {p}");
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_closed_forms() {
        let (lo, hi) = binomial_ci(0, 100, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        // z²/(n + z²)
        assert!((hi - Z95 * Z95 / (100.0 + Z95 * Z95)).abs() < 1e-6, "{hi}");
        assert!((hi - 0.036).abs() < 1e-3);
        let (lo, hi) = binomial_ci(100, 100, 0.95).unwrap();
        assert!((lo - 0.963).abs() < 1e-3 && hi == 1.0);
        let (lo, hi) = binomial_ci(50, 100, 0.95).unwrap();
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        assert!(binomial_ci(0, 0, 0.95).is_none());
    }

    #[test]
    fn quantiles() {
        assert!((normal_quantile(0.975) - Z95).abs() < 1e-9);
        assert!((normal_quantile(0.5)).abs() < 1e-12);
        assert!((normal_quantile(0.001) + 3.090232306167813).abs() < 1e-8);
    }

    #[test]
    fn undefined_marker() {
        let e = EstimateWithCI::rate(0.0, 0, 5);
        assert!(!e.is_defined() && e.n_total == 5);
    }
}
