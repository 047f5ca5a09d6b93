//! Generalized weighted aggregation of 2-dimensional uncertain linguistic
//! values: a power mean of order `alpha` on the evaluation endpoints and the
//! componentwise minimum on the reliability endpoints.

use thiserror::Error;

use crate::linguistic::{Interval, LinguisticError, Scale, TwoDimUlv};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregationError {
    #[error("cannot aggregate an empty collection")]
    EmptyInput,
    #[error("{values} values but {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("weight vector is empty")]
    EmptyWeights,
    #[error("weight {value} at index {index} must be finite and nonnegative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights must have a positive finite sum, got {0}")]
    BadWeightSum(f64),
    #[error("aggregation order alpha must be nonzero")]
    ZeroAlpha,
    #[error("alpha {alpha} requires {requirement} evaluation endpoints, found {endpoint}")]
    EndpointOutOfDomain {
        alpha: f64,
        requirement: &'static str,
        endpoint: f64,
    },
    #[error(transparent)]
    Linguistic(#[from] LinguisticError),
}

/// Nonnegative weights normalized to unit sum at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(raw: Vec<f64>) -> Result<Self, AggregationError> {
        if raw.is_empty() {
            return Err(AggregationError::EmptyWeights);
        }
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(AggregationError::NegativeWeight { index, value });
            }
        }
        // Canonical-order total, so permuting the raw weights yields the
        // same normalized values bit for bit.
        let total = canonical_sum(raw.clone());
        if !total.is_finite() || total <= 0.0 {
            return Err(AggregationError::BadWeightSum(total));
        }
        Ok(Weights(raw.into_iter().map(|w| w / total).collect()))
    }

    pub fn uniform(len: usize) -> Result<Self, AggregationError> {
        Weights::new(vec![1.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Sums terms in a canonical (sorted) order so the result is independent of
/// the order the terms were produced in. Permuting inputs therefore yields a
/// bit-identical aggregate.
fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

fn check_alpha_domain(values: &[TwoDimUlv], alpha: f64) -> Result<(), AggregationError> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(AggregationError::ZeroAlpha);
    }
    if alpha < 0.0 {
        for value in values {
            if value.eval().lo <= 0.0 {
                return Err(AggregationError::EndpointOutOfDomain {
                    alpha,
                    requirement: "strictly positive",
                    endpoint: value.eval().lo,
                });
            }
        }
    } else if alpha.fract() != 0.0 {
        for value in values {
            if value.eval().lo < 0.0 {
                return Err(AggregationError::EndpointOutOfDomain {
                    alpha,
                    requirement: "nonnegative",
                    endpoint: value.eval().lo,
                });
            }
        }
    }
    Ok(())
}

fn common_scale(values: &[TwoDimUlv]) -> Result<Scale, AggregationError> {
    let scale = values[0].scale();
    for value in &values[1..] {
        if value.scale() != scale {
            return Err(LinguisticError::ScaleMismatch {
                left: scale,
                right: value.scale(),
            }
            .into());
        }
    }
    Ok(scale)
}

/// Weighted power mean of order `alpha` over the evaluation endpoints,
/// componentwise minimum over the reliability endpoints:
/// `([ (Σ w_k a_k^α)^{1/α}, (Σ w_k b_k^α)^{1/α} ], [min c_k, min d_k])`.
///
/// Aggregating identical values returns that value exactly, for any weights.
pub fn power_mean(
    values: &[TwoDimUlv],
    weights: &Weights,
    alpha: f64,
) -> Result<TwoDimUlv, AggregationError> {
    if values.is_empty() {
        return Err(AggregationError::EmptyInput);
    }
    if values.len() != weights.len() {
        return Err(AggregationError::LengthMismatch {
            values: values.len(),
            weights: weights.len(),
        });
    }
    let scale = common_scale(values)?;
    check_alpha_domain(values, alpha)?;

    if values[1..].iter().all(|v| v == &values[0]) {
        return Ok(values[0]);
    }

    let mean = |endpoint: fn(&TwoDimUlv) -> f64| -> f64 {
        let terms: Vec<f64> = values
            .iter()
            .zip(weights.as_slice())
            .map(|(v, &w)| {
                if alpha == 1.0 {
                    w * endpoint(v)
                } else {
                    w * endpoint(v).powf(alpha)
                }
            })
            .collect();
        let sum = canonical_sum(terms);
        if alpha == 1.0 {
            sum
        } else {
            sum.powf(1.0 / alpha)
        }
    };

    let lo = mean(|v| v.eval().lo);
    let hi = mean(|v| v.eval().hi);
    let reliability = values.iter().map(TwoDimUlv::reliability).fold(
        Interval {
            lo: f64::INFINITY,
            hi: f64::INFINITY,
        },
        |acc, r| Interval {
            lo: acc.lo.min(r.lo),
            hi: acc.hi.min(r.hi),
        },
    );

    // Power means preserve endpoint order; max() only absorbs last-ulp noise.
    Ok(TwoDimUlv::new(
        scale,
        lo,
        hi.max(lo),
        reliability.lo,
        reliability.hi,
    )?)
}

/// Arithmetic (order-1) weighted aggregation: the convex combination of the
/// evaluation endpoints with reliability minima.
pub fn weighted_mean(
    values: &[TwoDimUlv],
    weights: &Weights,
) -> Result<TwoDimUlv, AggregationError> {
    power_mean(values, weights, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scale_7_5() -> Scale {
        Scale::new(7, 5).unwrap()
    }

    fn v(a: f64, b: f64, c: f64, d: f64) -> TwoDimUlv {
        TwoDimUlv::new(scale_7_5(), a, b, c, d).unwrap()
    }

    #[test]
    fn weights_normalize_on_construction() {
        let w = Weights::new(vec![2.0, 2.0, 4.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.25, 0.5]);
        assert!(matches!(
            Weights::new(vec![0.5, -0.1]),
            Err(AggregationError::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            Weights::new(vec![0.0, 0.0]),
            Err(AggregationError::BadWeightSum(_))
        ));
        assert!(matches!(
            Weights::new(vec![]),
            Err(AggregationError::EmptyWeights)
        ));
    }

    #[test]
    fn order_one_mean_matches_group_reference_cell() {
        // Three expert opinions on one cell; the aggregate evaluation is the
        // plain mean 14/3 and the reliability drops to the panel minimum.
        let values = [
            v(5.0, 5.0, 2.0, 3.0),
            v(4.0, 4.0, 3.0, 4.0),
            v(5.0, 5.0, 2.0, 3.0),
        ];
        let w = Weights::uniform(3).unwrap();
        let got = power_mean(&values, &w, 1.0).unwrap();
        assert_abs_diff_eq!(got.eval().lo, 14.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got.eval().hi, 14.0 / 3.0, epsilon = 1e-12);
        assert_eq!((got.reliability().lo, got.reliability().hi), (2.0, 3.0));
    }

    #[test]
    fn quadratic_mean_matches_direct_evaluation() {
        let values = [v(2.0, 2.0, 3.0, 3.0), v(4.0, 4.0, 3.0, 3.0)];
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        let got = power_mean(&values, &w, 2.0).unwrap();
        assert_abs_diff_eq!(got.eval().lo, 10f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(got.eval().hi, 10f64.sqrt(), epsilon = 1e-12);
        assert_eq!((got.reliability().lo, got.reliability().hi), (3.0, 3.0));
    }

    #[test]
    fn identical_inputs_aggregate_to_themselves_exactly() {
        let x = v(3.7, 4.2, 1.0, 2.0);
        let w = Weights::new(vec![0.61, 0.18, 0.21]).unwrap();
        for alpha in [1.0, 2.0, 0.5, -1.0, 3.0] {
            assert_eq!(power_mean(&[x, x, x], &w, alpha).unwrap(), x);
        }
    }

    #[test]
    fn weighted_mean_equals_order_one_power_mean() {
        let values = [v(1.0, 2.0, 2.0, 3.0), v(3.0, 4.0, 1.0, 2.0)];
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        let got = weighted_mean(&values, &w).unwrap();
        assert_eq!(got, power_mean(&values, &w, 1.0).unwrap());
        assert_eq!(got, v(2.0, 3.0, 1.0, 2.0));
    }

    #[test]
    fn equal_weight_mean_of_three_opinions() {
        let values = [
            v(2.0, 2.0, 3.0, 3.0),
            v(3.0, 4.0, 2.0, 3.0),
            v(3.0, 3.0, 2.0, 2.0),
        ];
        let got = weighted_mean(&values, &Weights::uniform(3).unwrap()).unwrap();
        assert_abs_diff_eq!(got.eval().lo, 8.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got.eval().hi, 3.0, epsilon = 1e-12);
        assert_eq!((got.reliability().lo, got.reliability().hi), (2.0, 2.0));
    }

    #[test]
    fn domain_violations_are_rejected() {
        let w = Weights::uniform(2).unwrap();
        let values = [v(0.0, 1.0, 2.0, 2.0), v(2.0, 3.0, 2.0, 2.0)];
        assert!(matches!(
            power_mean(&values, &w, -1.0),
            Err(AggregationError::EndpointOutOfDomain { .. })
        ));
        assert!(matches!(
            power_mean(&values, &w, 0.0),
            Err(AggregationError::ZeroAlpha)
        ));
        assert!(matches!(
            power_mean(&[], &Weights::uniform(1).unwrap(), 1.0),
            Err(AggregationError::EmptyInput)
        ));
        assert!(matches!(
            power_mean(&values, &Weights::uniform(3).unwrap(), 1.0),
            Err(AggregationError::LengthMismatch { .. })
        ));
        // Fractional alpha tolerates a zero endpoint but not a negative one.
        assert!(power_mean(&values, &w, 0.5).is_ok());
    }

    #[test]
    fn permuting_values_with_weights_is_bit_identical() {
        let values = [
            v(1.0, 2.0, 1.0, 3.0),
            v(4.0, 5.0, 2.0, 2.0),
            v(2.5, 3.5, 0.0, 4.0),
        ];
        let w = Weights::new(vec![0.2, 0.3, 0.5]).unwrap();
        let permuted = [values[2], values[0], values[1]];
        let wp = Weights::new(vec![0.5, 0.2, 0.3]).unwrap();
        for alpha in [1.0, 2.0, 0.5] {
            let a = power_mean(&values, &w, alpha).unwrap();
            let b = power_mean(&permuted, &wp, alpha).unwrap();
            assert_eq!(a, b);
        }
    }
}
