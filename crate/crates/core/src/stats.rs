//! Significance of critical-pair counts under the null hypothesis that each
//! critical pair is won by either method with probability 1/2.

use std::fmt;
use std::str::FromStr;

use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SignificanceMethod {
    /// Two-sided normal approximation without continuity correction. This
    /// is the method that reproduces published tables of this experiment.
    #[default]
    Normal,
    /// Exact two-sided binomial tail.
    Exact,
}

impl SignificanceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SignificanceMethod::Normal => "normal",
            SignificanceMethod::Exact => "exact",
        }
    }

    pub fn p_value(self, n: u64, k: u64) -> Option<f64> {
        match self {
            SignificanceMethod::Normal => normal_approx_p(n, k),
            SignificanceMethod::Exact => exact_binomial_p(n, k),
        }
    }
}

impl fmt::Display for SignificanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignificanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(SignificanceMethod::Normal),
            "exact" => Ok(SignificanceMethod::Exact),
            _ => Err(Error::InvalidArgument(format!(
                "unknown significance method {s:?}"
            ))),
        }
    }
}

/// Probability under Binomial(n, 1/2) of a count at least as far from n/2
/// as `k`. `None` when `n == 0`.
///
/// Panics if `k > n`.
pub fn exact_binomial_p(n: u64, k: u64) -> Option<f64> {
    assert!(k <= n, "k = {k} exceeds n = {n}");
    if n == 0 {
        return None;
    }
    let dev = (2 * k).abs_diff(n);
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    if dev == 0 {
        return Some(1.0);
    }
    // Both tails, smallest terms first.
    let mut total = 0.0;
    // j is in the tails iff |2j - n| >= dev, i.e. j <= (n - dev)/2 or j >= (n + dev)/2
    let lower_cut = (n - dev) / 2;
    let upper_cut = (n + dev).div_ceil(2);
    for j in 0..=lower_cut {
        total += (ln_binomial(n, j) - ln_half_n).exp();
    }
    for j in (upper_cut..=n).rev() {
        total += (ln_binomial(n, j) - ln_half_n).exp();
    }
    Some(total.min(1.0))
}

/// Two-sided normal approximation `2·Φ(−|k − n/2| / √(n/4))`. `None` when
/// `n == 0`.
pub fn normal_approx_p(n: u64, k: u64) -> Option<f64> {
    assert!(k <= n, "k = {k} exceeds n = {n}");
    if n == 0 {
        return None;
    }
    let z = (k as f64 - n as f64 / 2.0).abs() / (n as f64 / 4.0).sqrt();
    // 2·Φ(−z) = erfc(z/√2)
    Some(erfc(z / std::f64::consts::SQRT_2).min(1.0))
}

/// Significance of `k` wins out of `n` critical pairs, using the default
/// (normal) method. `None` when there are no critical pairs.
pub fn significance(n: u64, k: u64) -> Option<f64> {
    SignificanceMethod::default().p_value(n, k)
}

/// Win percentage in tenths of a percent, rounded half up, e.g.
/// `231/472 → 489` (48.9%). Exact integer arithmetic.
pub fn win_pct_tenths(n: u64, k: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    Some((2000 * k + n) / (2 * n))
}

/// Win percentage formatted with one decimal, e.g. `"48.9"`.
pub fn format_win_pct(n: u64, k: u64) -> Option<String> {
    win_pct_tenths(n, k).map(|t| format!("{}.{}", t / 10, t % 10))
}

/// Scientific notation with two significant digits, e.g. `6.0e-8`.
pub fn format_p_value(p: f64) -> String {
    format!("{p:.1e}")
}
