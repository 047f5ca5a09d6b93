//! Value types and algebra for 2-dimensional uncertain linguistic variables.
//!
//! A 2-dimensional uncertain linguistic variable pairs an evaluation interval
//! drawn from an ordered term set of granularity `l` with a reliability
//! interval drawn from a second term set of granularity `z`. Subscripts are
//! stored as full-precision reals because aggregation produces fractional
//! indices. Addition and multiplication act on the evaluation endpoints and
//! propagate the componentwise minimum of the reliability endpoints.
//!
//! Intermediate algebra results are deliberately not clamped to the scale
//! bounds; only values stored into a decision matrix are bounds-checked.

use std::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinguisticError {
    #[error("term set granularity must be at least 2, got {0}")]
    GranularityTooSmall(u32),
    #[error("interval lower bound {lo} exceeds upper bound {hi}")]
    InvertedInterval { lo: f64, hi: f64 },
    #[error("interval endpoint is not finite")]
    NonFiniteEndpoint,
    #[error("values use different scales ({left:?} vs {right:?})")]
    ScaleMismatch { left: Scale, right: Scale },
    #[error("division requires strictly positive divisor endpoints, got [{lo}, {hi}]")]
    NonPositiveDivisor { lo: f64, hi: f64 },
    #[error("scalar multiplier must be nonnegative, got {0}")]
    NegativeScalar(f64),
    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(f64),
    #[error("fractional exponent {exponent} applied to negative endpoint {endpoint}")]
    FractionalPowerOfNegative { endpoint: f64, exponent: f64 },
    #[error("evaluation interval [{lo}, {hi}] outside scale range [0, {max}]")]
    EvalOutOfRange { lo: f64, hi: f64, max: f64 },
    #[error("reliability interval [{lo}, {hi}] outside scale range [0, {max}]")]
    ReliabilityOutOfRange { lo: f64, hi: f64, max: f64 },
}

/// Granularities of the two predefined linguistic term sets.
///
/// `eval_terms` is the cardinality of the evaluation term set (indices
/// `0..=eval_terms-1`), `reliability_terms` the cardinality of the
/// reliability term set. Both must be at least 2 so the normalizing
/// denominators in expectation and distance are nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scale {
    eval_terms: u32,
    reliability_terms: u32,
}

impl Scale {
    pub fn new(eval_terms: u32, reliability_terms: u32) -> Result<Self, LinguisticError> {
        if eval_terms < 2 {
            return Err(LinguisticError::GranularityTooSmall(eval_terms));
        }
        if reliability_terms < 2 {
            return Err(LinguisticError::GranularityTooSmall(reliability_terms));
        }
        Ok(Scale {
            eval_terms,
            reliability_terms,
        })
    }

    pub fn eval_terms(&self) -> u32 {
        self.eval_terms
    }

    pub fn reliability_terms(&self) -> u32 {
        self.reliability_terms
    }

    /// Largest evaluation subscript, `l - 1`.
    pub fn eval_max(&self) -> f64 {
        f64::from(self.eval_terms - 1)
    }

    /// Largest reliability subscript, `z - 1`.
    pub fn reliability_max(&self) -> f64 {
        f64::from(self.reliability_terms - 1)
    }
}

/// Closed interval of real-valued term subscripts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, LinguisticError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(LinguisticError::NonFiniteEndpoint);
        }
        if lo > hi {
            return Err(LinguisticError::InvertedInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }
}

/// One 2-dimensional uncertain linguistic variable: an evaluation interval
/// plus the expert's self-assessed reliability interval, both expressed as
/// term subscripts under a shared [`Scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDimUlv {
    scale: Scale,
    eval: Interval,
    reliability: Interval,
}

impl TwoDimUlv {
    /// Builds a value from raw subscripts `([a, b], [c, d])`.
    ///
    /// Endpoint ordering is enforced here; scale-range membership is not,
    /// because intermediate algebra legitimately leaves the range. Use
    /// [`TwoDimUlv::check_in_range`] where storage bounds matter.
    pub fn new(scale: Scale, a: f64, b: f64, c: f64, d: f64) -> Result<Self, LinguisticError> {
        Ok(TwoDimUlv {
            scale,
            eval: Interval::new(a, b)?,
            reliability: Interval::new(c, d)?,
        })
    }

    /// Identity for ⊕: zero evaluation with maximal reliability, so the
    /// min-propagation rule leaves the partner's reliability untouched.
    pub fn additive_identity(scale: Scale) -> Self {
        let top = scale.reliability_max();
        TwoDimUlv {
            scale,
            eval: Interval { lo: 0.0, hi: 0.0 },
            reliability: Interval { lo: top, hi: top },
        }
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn eval(&self) -> Interval {
        self.eval
    }

    pub fn reliability(&self) -> Interval {
        self.reliability
    }

    pub fn check_in_range(&self) -> Result<(), LinguisticError> {
        let emax = self.scale.eval_max();
        if self.eval.lo < 0.0 || self.eval.hi > emax {
            return Err(LinguisticError::EvalOutOfRange {
                lo: self.eval.lo,
                hi: self.eval.hi,
                max: emax,
            });
        }
        let rmax = self.scale.reliability_max();
        if self.reliability.lo < 0.0 || self.reliability.hi > rmax {
            return Err(LinguisticError::ReliabilityOutOfRange {
                lo: self.reliability.lo,
                hi: self.reliability.hi,
                max: rmax,
            });
        }
        Ok(())
    }

    fn require_same_scale(&self, other: &Self) -> Result<(), LinguisticError> {
        if self.scale != other.scale {
            return Err(LinguisticError::ScaleMismatch {
                left: self.scale,
                right: other.scale,
            });
        }
        Ok(())
    }

    fn min_reliability(&self, other: &Self) -> Interval {
        Interval {
            lo: self.reliability.lo.min(other.reliability.lo),
            hi: self.reliability.hi.min(other.reliability.hi),
        }
    }

    /// ⊕: endpoint sums, reliability minima.
    #[allow(clippy::should_implement_trait)] // fallible, so the std trait does not fit
    pub fn add(self, other: Self) -> Result<Self, LinguisticError> {
        self.require_same_scale(&other)?;
        Ok(TwoDimUlv {
            scale: self.scale,
            eval: Interval {
                lo: self.eval.lo + other.eval.lo,
                hi: self.eval.hi + other.eval.hi,
            },
            reliability: self.min_reliability(&other),
        })
    }

    /// ⊗: endpoint products, reliability minima.
    pub fn multiply(self, other: Self) -> Result<Self, LinguisticError> {
        self.require_same_scale(&other)?;
        Ok(TwoDimUlv {
            scale: self.scale,
            eval: Interval {
                lo: self.eval.lo * other.eval.lo,
                hi: self.eval.hi * other.eval.hi,
            },
            reliability: self.min_reliability(&other),
        })
    }

    /// Interval quotient `[a1/b2, b1/a2]`; requires a strictly positive divisor.
    pub fn divide(self, other: Self) -> Result<Self, LinguisticError> {
        self.require_same_scale(&other)?;
        if other.eval.lo <= 0.0 || other.eval.hi <= 0.0 {
            return Err(LinguisticError::NonPositiveDivisor {
                lo: other.eval.lo,
                hi: other.eval.hi,
            });
        }
        Ok(TwoDimUlv {
            scale: self.scale,
            eval: Interval {
                lo: self.eval.lo / other.eval.hi,
                hi: self.eval.hi / other.eval.lo,
            },
            reliability: self.min_reliability(&other),
        })
    }

    /// Nonnegative scalar multiple of the evaluation endpoints; the
    /// reliability interval is unchanged.
    pub fn scale_by(self, factor: f64) -> Result<Self, LinguisticError> {
        if factor.is_nan() || factor < 0.0 {
            return Err(LinguisticError::NegativeScalar(factor));
        }
        Ok(TwoDimUlv {
            scale: self.scale,
            eval: Interval {
                lo: factor * self.eval.lo,
                hi: factor * self.eval.hi,
            },
            reliability: self.reliability,
        })
    }

    /// Endpoint powers `[a^λ, b^λ]` for nonnegative λ; the reliability
    /// interval is unchanged. Fractional exponents require a nonnegative
    /// lower endpoint.
    pub fn power(self, exponent: f64) -> Result<Self, LinguisticError> {
        if exponent.is_nan() || exponent < 0.0 {
            return Err(LinguisticError::NegativeExponent(exponent));
        }
        if exponent == 1.0 {
            return Ok(self);
        }
        if exponent.fract() != 0.0 && self.eval.lo < 0.0 {
            return Err(LinguisticError::FractionalPowerOfNegative {
                endpoint: self.eval.lo,
                exponent,
            });
        }
        Ok(TwoDimUlv {
            scale: self.scale,
            eval: Interval {
                lo: self.eval.lo.powf(exponent),
                hi: self.eval.hi.powf(exponent),
            },
            reliability: self.reliability,
        })
    }

    /// Scalar score in `[0, 1]` for in-range values:
    /// `(a+b)/(2(l-1)) * (c+d)/(2(z-1))`. Assumes the value lies within its
    /// scale; out-of-range inputs simply extrapolate the formula.
    pub fn expectation(&self) -> f64 {
        let first = (self.eval.lo + self.eval.hi) / (2.0 * self.scale.eval_max());
        let second =
            (self.reliability.lo + self.reliability.hi) / (2.0 * self.scale.reliability_max());
        first * second
    }

    /// Hamming distance: the mean absolute difference of the four
    /// reliability-weighted cross terms `a*c, a*d, b*c, b*d` (each divided by
    /// `z-1`), normalized by `l-1`. Symmetric, zero on identical inputs, and
    /// an L1 metric on the cross-term embedding.
    pub fn hamming_distance(&self, other: &Self) -> Result<f64, LinguisticError> {
        self.require_same_scale(other)?;
        let rmax = self.scale.reliability_max();
        let cross = |v: &Self| {
            [
                v.eval.lo * v.reliability.lo / rmax,
                v.eval.lo * v.reliability.hi / rmax,
                v.eval.hi * v.reliability.lo / rmax,
                v.eval.hi * v.reliability.hi / rmax,
            ]
        };
        let xs = cross(self);
        let ys = cross(other);
        let total: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| (x - y).abs()).sum();
        Ok(total / (4.0 * self.scale.eval_max()))
    }

    /// Expectation order with a deterministic tie-break: equal expectations
    /// are ordered by the evaluation midpoint, and only then declared equal.
    pub fn compare(&self, other: &Self) -> Ordering {
        match self
            .expectation()
            .partial_cmp(&other.expectation())
            .expect("expectation of finite endpoints is finite")
        {
            Ordering::Equal => self
                .eval
                .midpoint()
                .partial_cmp(&other.eval.midpoint())
                .expect("midpoint of finite endpoints is finite"),
            ord => ord,
        }
    }
}
