//! Decreasing null sequences `t_n` (n ≥ 1) with closed-form inverses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest index handled before a count is reported as saturated.
pub const INDEX_LIMIT: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SequenceRule {
    /// `t_n = n^{-exponent}`.
    Power { exponent: f64 },
    /// `t_n = ratio^n`.
    Geometric { ratio: f64 },
    /// `t_n = 1 / ln(n + 1)`.
    InverseLog,
    /// A finite list, which must be strictly decreasing and positive.
    Explicit { values: Vec<f64> },
}

impl SequenceRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceRule::Power { exponent } if !(*exponent > 0.0 && exponent.is_finite()) => {
                Err(Error::param("exponent", "must be positive and finite"))
            }
            SequenceRule::Geometric { ratio } if !(*ratio > 0.0 && *ratio < 1.0) => {
                Err(Error::param("ratio", "must lie in (0, 1)"))
            }
            SequenceRule::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::EmptySet);
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite() || *v <= 0.0) {
                    return Err(Error::NonFinite(i));
                }
                match values.windows(2).position(|w| w[1] >= w[0]) {
                    Some(i) => Err(Error::NotMonotone { index: i + 1 }),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Number of terms, `None` for infinite sequences.
    pub fn len(&self) -> Option<u64> {
        match self {
            SequenceRule::Explicit { values } => Some(values.len() as u64),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.len().is_none()
    }

    /// `t_n` extended to real `n ≥ 1` for the closed-form rules.
    pub fn at(&self, n: f64) -> f64 {
        match self {
            SequenceRule::Power { exponent } => n.powf(-exponent),
            SequenceRule::Geometric { ratio } => ratio.powf(n),
            SequenceRule::InverseLog => 1.0 / n.ln_1p(),
            SequenceRule::Explicit { values } => {
                let i = (n as usize).clamp(1, values.len());
                values[i - 1]
            }
        }
    }

    pub fn term(&self, n: u64) -> f64 {
        self.at(n as f64)
    }

    /// `t_n − t_{n+1}` without cancellation for large `n`.
    pub fn gap(&self, n: u64) -> f64 {
        match self {
            SequenceRule::Explicit { values } => {
                let i = n as usize;
                if i == 0 || i >= values.len() {
                    0.0
                } else {
                    values[i - 1] - values[i]
                }
            }
            _ => self.gap_at(n as f64),
        }
    }

    /// Continuous extension of [`SequenceRule::gap`] to real `x ≥ 1`.
    pub fn gap_at(&self, x: f64) -> f64 {
        match self {
            SequenceRule::Power { exponent } => {
                // n^{-p}(1 - (1 + 1/n)^{-p})
                x.powf(-exponent) * -(-exponent * (1.0 / x).ln_1p()).exp_m1()
            }
            SequenceRule::Geometric { ratio } => ratio.powf(x) * (1.0 - ratio),
            SequenceRule::InverseLog => {
                let a = x.ln_1p();
                let b = (x + 1.0).ln_1p();
                (1.0 / (x + 1.0)).ln_1p() / (a * b)
            }
            SequenceRule::Explicit { .. } => self.gap(x as u64),
        }
    }

    /// Smallest `n ≥ 1` with `t_n ≤ tau`; `None` when no such index exists
    /// below [`INDEX_LIMIT`] (or in a finite list).
    pub fn first_at_most(&self, tau: f64) -> Option<u64> {
        if tau.is_nan() {
            return None;
        }
        if tau >= self.term(1) {
            return Some(1);
        }
        if tau <= 0.0 {
            return None;
        }
        let guess = match self {
            SequenceRule::Power { exponent } => tau.powf(-1.0 / exponent),
            SequenceRule::Geometric { ratio } => tau.ln() / ratio.ln(),
            SequenceRule::InverseLog => (1.0 / tau).exp_m1(),
            SequenceRule::Explicit { values } => {
                let i = values.partition_point(|v| *v > tau);
                return if i < values.len() { Some(i as u64 + 1) } else { None };
            }
        };
        if !(guess < INDEX_LIMIT as f64) {
            return None;
        }
        let mut n = (guess.floor() as u64).max(1);
        // Correct floating-point slop in the closed-form inverse.
        while n > 1 && self.term(n - 1) <= tau {
            n -= 1;
        }
        while self.term(n) > tau {
            n += 1;
            if n >= INDEX_LIMIT {
                return None;
            }
        }
        Some(n)
    }

    /// `#{n : t_n ≥ delta}`; `None` when the count saturates.
    pub fn count_at_least(&self, delta: f64) -> Option<u64> {
        if delta > self.term(1) {
            return Some(0);
        }
        match self {
            SequenceRule::Explicit { values } => {
                Some(values.iter().filter(|v| **v >= delta).count() as u64)
            }
            _ => {
                // the first index with t_n < delta, minus one
                let n = self.first_at_most(delta)?;
                if self.term(n) < delta {
                    Some(n - 1)
                } else {
                    let mut m = n;
                    while self.term(m + 1) >= delta {
                        m += 1;
                    }
                    Some(m)
                }
            }
        }
    }
}
