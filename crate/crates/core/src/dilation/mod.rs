//! Dilation sets `E ⊂ (0,∞)`, their dyadic blocks `(2^{-j}E) ∩ [1,2]` and
//! the dimension-theoretic quantities built on them.

mod block;
mod estimate;
mod measure;
mod sequence;

pub use block::{BlockSet, Tail};
pub use estimate::{
    default_delta_schedule, dimension_bound_check, distance_integral_exponent, gap_sum, gap_sum_critical_exponent, kappa, lorentz_membership,
    minkowski_dimension, BoundCheck, DimensionEstimate, EstimateMethod, GapSumReport,
    LorentzReport, BOUND_CONSTANT, CONVERGENCE_RATIO,
};
pub use measure::{distance_integral, distance_to_set, entropy_number, DistanceIntegral};
pub use sequence::{SequenceRule, INDEX_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of points materialized per block.
pub const DEFAULT_CAP: usize = 1 << 20;
/// Sequences are materialized until consecutive rescaled points are closer
/// than this; the remainder is kept as an analytic [`Tail`].
pub const GAP_FLOOR: f64 = 1e-9;
/// Points closer than this are identified.
pub const DEDUP_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `{1 + n^{-a} : n ≥ 1}`.
    PowerSequence { a: f64 },
    /// `{offset + t_n : n ≥ 1}` for a decreasing null sequence `t_n`.
    Sequence {
        #[serde(flatten)]
        rule: SequenceRule,
        #[serde(default)]
        offset: f64,
    },
    ExplicitPoints { points: Vec<f64> },
    /// `1 + C`, with `C ⊂ [0,1]` the level-`levels` endpoints of the
    /// self-similar set keeping `digits` in base `base`.
    CantorLike {
        base: u32,
        digits: Vec<u32>,
        levels: u32,
    },
    /// `{2^j : j ∈ ℤ}`.
    LacunaryGrid,
    Union { parts: Vec<Generator> },
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::PowerSequence { a } => {
                if *a > 0.0 && a.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("a", "must be positive"))
                }
            }
            Generator::Sequence { rule, offset } => {
                rule.validate()?;
                if *offset < 0.0 || !offset.is_finite() {
                    return Err(Error::param("offset", "must be finite and nonnegative"));
                }
                Ok(())
            }
            Generator::ExplicitPoints { points } => {
                if points.is_empty() {
                    return Err(Error::EmptySet);
                }
                match points.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
                    Some(i) => Err(Error::param("points", format!("point {i} is not positive"))),
                    None => Ok(()),
                }
            }
            Generator::CantorLike {
                base,
                digits,
                levels,
            } => {
                if *base < 3 {
                    return Err(Error::param("base", "must be at least 3"));
                }
                if digits.is_empty() || digits.iter().any(|d| d >= base) {
                    return Err(Error::param("digits", "must be nonempty and below the base"));
                }
                let count = (digits.len() as f64).powi(*levels as i32);
                if (*base as f64).powi(*levels as i32) > 2f64.powi(52) || count > 1e8 {
                    return Err(Error::param("levels", "too many levels to materialize"));
                }
                Ok(())
            }
            Generator::LacunaryGrid => Ok(()),
            Generator::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::EmptySet);
                }
                parts.iter().try_for_each(Generator::validate)
            }
        }
    }

    /// The sequence `(rule, offset)` behind a sequence generator.
    pub fn as_sequence(&self) -> Option<(SequenceRule, f64)> {
        match self {
            Generator::PowerSequence { a } => Some((SequenceRule::Power { exponent: *a }, 1.0)),
            Generator::Sequence { rule, offset } => Some((rule.clone(), *offset)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationSet {
    pub generator: Generator,
    #[serde(default = "default_cap")]
    pub materialization_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

impl DilationSet {
    pub fn new(generator: Generator) -> Self {
        DilationSet {
            generator,
            materialization_cap: DEFAULT_CAP,
        }
    }

    pub fn power_sequence(a: f64) -> Self {
        Self::new(Generator::PowerSequence { a })
    }

    pub fn sequence(rule: SequenceRule, offset: f64) -> Self {
        Self::new(Generator::Sequence { rule, offset })
    }

    pub fn explicit(points: Vec<f64>) -> Self {
        Self::new(Generator::ExplicitPoints { points })
    }

    pub fn middle_third_cantor(levels: u32) -> Self {
        Self::new(Generator::CantorLike {
            base: 3,
            digits: vec![0, 2],
            levels,
        })
    }

    pub fn lacunary() -> Self {
        Self::new(Generator::LacunaryGrid)
    }

    pub fn union(parts: Vec<DilationSet>) -> Self {
        let cap = parts
            .iter()
            .map(|p| p.materialization_cap)
            .max()
            .unwrap_or(DEFAULT_CAP);
        DilationSet {
            generator: Generator::Union {
                parts: parts.into_iter().map(|p| p.generator).collect(),
            },
            materialization_cap: cap,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.materialization_cap = cap;
        self
    }

    /// `E ∪ {2^j : j ∈ ℤ}`.
    pub fn augmented(&self) -> Self {
        DilationSet {
            generator: Generator::Union {
                parts: vec![self.generator.clone(), Generator::LacunaryGrid],
            },
            materialization_cap: self.materialization_cap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.materialization_cap == 0 {
            return Err(Error::param("materialization_cap", "must be positive"));
        }
        self.generator.validate()
    }

    /// `(2^{-j}E) ∩ [1,2]`.
    pub fn rescaled_block<T: Real>(&self, j: i32) -> Result<BlockSet<T>> {
        self.validate()?;
        Ok(block::materialize(&self.generator, j, self.materialization_cap))
    }
}
