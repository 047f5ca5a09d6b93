//! The dynamic interactive group decision procedure.
//!
//! Each round aggregates the expert matrices into a group matrix, measures
//! every expert's Hamming distance to it, scores each expert's cells by
//! expectation, and forms the per-expert consistency index (sum of
//! distance/expectation ratios). When every index falls below its threshold
//! the interaction terminates; otherwise entropy-based attribute weights
//! drive a convex adjustment of every expert's cells toward the group and
//! the next round begins.
//!
//! Rounds are strictly sequential; within a round every cellwise quantity is
//! computed in a fixed order, so repeated runs are bit-identical.

use thiserror::Error;

use crate::aggregation::{power_mean, weighted_mean, AggregationError, Weights};
use crate::linguistic::{Interval, Scale, TwoDimUlv};
use crate::matrix::{DecisionMatrix, MatrixError};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_MAX_ROUNDS: usize = 50;

fn cell_context(expert: &Option<usize>, round: &Option<usize>) -> String {
    match (expert, round) {
        (Some(k), Some(t)) => format!(" (expert index {k}, round {t})"),
        (Some(k), None) => format!(" (expert index {k})"),
        (None, Some(t)) => format!(" (round {t})"),
        (None, None) => String::new(),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConsensusError {
    #[error("entropy weighting needs at least 2 experts, found {0}")]
    PanelTooSmall(usize),
    #[error("no expert matrices given")]
    EmptyPanel,
    #[error("matrix {index} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("{found} attribute weights for {expected} attributes")]
    WeightCount { expected: usize, found: usize },
    #[error(
        "zero expectation at cell ({row}, {col}){}: consistency ratio undefined",
        cell_context(.expert, .round)
    )]
    DegenerateCell {
        row: usize,
        col: usize,
        expert: Option<usize>,
        round: Option<usize>,
    },
    #[error(
        "expectation {value} at cell ({row}, {col}){} is not a finite nonnegative number",
        cell_context(.expert, .round)
    )]
    InvalidExpectation {
        value: f64,
        row: usize,
        col: usize,
        expert: Option<usize>,
        round: Option<usize>,
    },
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl ConsensusError {
    /// Stamps cell-level errors with the surrounding round/expert indices.
    fn with_context(self, round_no: Option<usize>, expert_no: Option<usize>) -> Self {
        match self {
            ConsensusError::DegenerateCell {
                row,
                col,
                expert,
                round,
            } => ConsensusError::DegenerateCell {
                row,
                col,
                expert: expert_no.or(expert),
                round: round_no.or(round),
            },
            ConsensusError::InvalidExpectation {
                value,
                row,
                col,
                expert,
                round,
            } => ConsensusError::InvalidExpectation {
                value,
                row,
                col,
                expert: expert_no.or(expert),
                round: round_no.or(round),
            },
            other => other,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("problem needs at least one {0}")]
    EmptyAxis(&'static str),
    #[error("duplicate {kind} identifier {label:?}")]
    DuplicateLabel { kind: &'static str, label: String },
    #[error("{found} expert weights for {expected} experts")]
    WeightCount { expected: usize, found: usize },
    #[error("{found} thresholds for {expected} experts")]
    ThresholdCount { expected: usize, found: usize },
    #[error("threshold for expert {expert:?} must be a positive finite number, got {value}")]
    ThresholdNotPositive { expert: String, value: f64 },
    #[error("alpha must be a nonzero finite number, got {0}")]
    InvalidAlpha(f64),
    #[error("maxRounds must be at least 1")]
    ZeroMaxRounds,
    #[error("{found} matrices for {expected} experts")]
    MatrixCount { expected: usize, found: usize },
    #[error(
        "matrix for expert {expert:?} is {rows}x{cols}, expected {expected_rows}x{expected_cols}"
    )]
    MatrixShape {
        expert: String,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("matrix for expert {expert:?} uses a different scale than the problem")]
    MatrixScale { expert: String },
    #[error(transparent)]
    Weights(#[from] AggregationError),
}

/// A fully validated decision problem: the labels, the expert panel with its
/// weights and per-expert consistency thresholds, the aggregation order, and
/// the initial evaluation matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    scale: Scale,
    alternatives: Vec<String>,
    attributes: Vec<String>,
    experts: Vec<String>,
    expert_weights: Weights,
    thresholds: Vec<f64>,
    alpha: f64,
    max_rounds: usize,
    matrices: Vec<DecisionMatrix>,
}

impl ProblemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scale: Scale,
        alternatives: Vec<String>,
        attributes: Vec<String>,
        experts: Vec<String>,
        expert_weights: Vec<f64>,
        thresholds: Vec<f64>,
        alpha: f64,
        max_rounds: usize,
        matrices: Vec<DecisionMatrix>,
    ) -> Result<Self, ProblemError> {
        if alternatives.is_empty() {
            return Err(ProblemError::EmptyAxis("alternative"));
        }
        if attributes.is_empty() {
            return Err(ProblemError::EmptyAxis("attribute"));
        }
        if experts.is_empty() {
            return Err(ProblemError::EmptyAxis("expert"));
        }
        for (kind, labels) in [
            ("alternative", &alternatives),
            ("attribute", &attributes),
            ("expert", &experts),
        ] {
            for (i, label) in labels.iter().enumerate() {
                if labels[..i].contains(label) {
                    return Err(ProblemError::DuplicateLabel {
                        kind,
                        label: label.clone(),
                    });
                }
            }
        }
        if expert_weights.len() != experts.len() {
            return Err(ProblemError::WeightCount {
                expected: experts.len(),
                found: expert_weights.len(),
            });
        }
        let expert_weights = Weights::new(expert_weights)?;
        if thresholds.len() != experts.len() {
            return Err(ProblemError::ThresholdCount {
                expected: experts.len(),
                found: thresholds.len(),
            });
        }
        for (expert, &value) in experts.iter().zip(&thresholds) {
            if !value.is_finite() || value <= 0.0 {
                return Err(ProblemError::ThresholdNotPositive {
                    expert: expert.clone(),
                    value,
                });
            }
        }
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(ProblemError::InvalidAlpha(alpha));
        }
        if max_rounds == 0 {
            return Err(ProblemError::ZeroMaxRounds);
        }
        if matrices.len() != experts.len() {
            return Err(ProblemError::MatrixCount {
                expected: experts.len(),
                found: matrices.len(),
            });
        }
        for (expert, matrix) in experts.iter().zip(&matrices) {
            if matrix.scale() != scale {
                return Err(ProblemError::MatrixScale {
                    expert: expert.clone(),
                });
            }
            if matrix.rows() != alternatives.len() || matrix.cols() != attributes.len() {
                return Err(ProblemError::MatrixShape {
                    expert: expert.clone(),
                    rows: matrix.rows(),
                    cols: matrix.cols(),
                    expected_rows: alternatives.len(),
                    expected_cols: attributes.len(),
                });
            }
        }
        Ok(ProblemSpec {
            scale,
            alternatives,
            attributes,
            experts,
            expert_weights,
            thresholds,
            alpha,
            max_rounds,
            matrices,
        })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn experts(&self) -> &[String] {
        &self.experts
    }

    pub fn expert_weights(&self) -> &Weights {
        &self.expert_weights
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_rounds(&self) -> usize {
        self.max_rounds
    }

    pub fn initial_matrices(&self) -> &[DecisionMatrix] {
        &self.matrices
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, ProblemError> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(ProblemError::InvalidAlpha(alpha));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_max_rounds(mut self, max_rounds: usize) -> Result<Self, ProblemError> {
        if max_rounds == 0 {
            return Err(ProblemError::ZeroMaxRounds);
        }
        self.max_rounds = max_rounds;
        Ok(self)
    }
}

/// Everything computed in one round of the procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    /// 1-based round number.
    pub round: usize,
    pub group: DecisionMatrix,
    /// Per expert: the grid of Hamming distances to the group matrix.
    pub distances: Vec<Vec<Vec<f64>>>,
    /// Per expert: the grid of cell expectations.
    pub expectations: Vec<Vec<Vec<f64>>>,
    pub entropy_cells: Vec<Vec<f64>>,
    pub entropy_by_attribute: Vec<f64>,
    pub attribute_weights: Vec<f64>,
    /// Group consistency index per expert.
    pub eta: Vec<f64>,
    pub terminated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusRun {
    pub rounds: Vec<RoundReport>,
    pub final_matrices: Vec<DecisionMatrix>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyWeights {
    pub cells: Vec<Vec<f64>>,
    pub by_attribute: Vec<f64>,
    pub weights: Vec<f64>,
}

fn require_congruent(matrices: &[DecisionMatrix]) -> Result<(), ConsensusError> {
    let first = match matrices.first() {
        Some(m) => m,
        None => return Err(ConsensusError::EmptyPanel),
    };
    for (index, m) in matrices.iter().enumerate().skip(1) {
        if !m.same_shape(first) {
            return Err(ConsensusError::ShapeMismatch {
                index,
                rows: m.rows(),
                cols: m.cols(),
                expected_rows: first.rows(),
                expected_cols: first.cols(),
            });
        }
    }
    Ok(())
}

/// Cellwise aggregation of the expert matrices into the group matrix. The
/// reliability interval of every group cell is the componentwise minimum
/// over the panel.
pub fn aggregate_group(
    matrices: &[DecisionMatrix],
    expert_weights: &Weights,
    alpha: f64,
) -> Result<DecisionMatrix, ConsensusError> {
    require_congruent(matrices)?;
    let template = &matrices[0];
    let mut rows = Vec::with_capacity(template.rows());
    for i in 0..template.rows() {
        let mut row = Vec::with_capacity(template.cols());
        for j in 0..template.cols() {
            let column: Vec<TwoDimUlv> = matrices.iter().map(|m| *m.cell(i, j)).collect();
            row.push(power_mean(&column, expert_weights, alpha)?);
        }
        rows.push(row);
    }
    Ok(DecisionMatrix::new(template.scale(), rows)?)
}

/// Per expert, the grid of cell distances to the group matrix.
pub fn distance_matrices(
    matrices: &[DecisionMatrix],
    group: &DecisionMatrix,
) -> Result<Vec<Vec<Vec<f64>>>, ConsensusError> {
    require_congruent(matrices)?;
    if !matrices[0].same_shape(group) {
        return Err(ConsensusError::ShapeMismatch {
            index: 0,
            rows: group.rows(),
            cols: group.cols(),
            expected_rows: matrices[0].rows(),
            expected_cols: matrices[0].cols(),
        });
    }
    matrices
        .iter()
        .map(|m| {
            (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| {
                            m.cell(i, j)
                                .hamming_distance(group.cell(i, j))
                                .map_err(|e| {
                                    ConsensusError::Matrix(MatrixError::Cell {
                                        row: i,
                                        col: j,
                                        source: e,
                                    })
                                })
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Per expert, the grid of cell expectations.
pub fn expectation_matrices(matrices: &[DecisionMatrix]) -> Vec<Vec<Vec<f64>>> {
    matrices
        .iter()
        .map(|m| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.cell(i, j).expectation()).collect())
                .collect()
        })
        .collect()
}

/// Group consistency index: the sum over all cells of
/// `distance / expectation`. Every expectation must be strictly positive;
/// a zero-expectation cell makes the ratio undefined and aborts with its
/// cell address rather than being skipped.
pub fn consistency_index(
    distances: &[Vec<f64>],
    expectations: &[Vec<f64>],
) -> Result<f64, ConsensusError> {
    assert_eq!(distances.len(), expectations.len(), "congruent grids");
    let mut total = 0.0;
    for (row, (d_row, e_row)) in distances.iter().zip(expectations).enumerate() {
        assert_eq!(d_row.len(), e_row.len(), "congruent grid rows");
        for (col, (&d, &e)) in d_row.iter().zip(e_row).enumerate() {
            if e.is_nan() || e <= 0.0 {
                return Err(ConsensusError::DegenerateCell {
                    row,
                    col,
                    expert: None,
                    round: None,
                });
            }
            total += d / e;
        }
    }
    Ok(total)
}

/// True iff every expert's consistency index is at or below its threshold.
pub fn check_termination(eta: &[f64], thresholds: &[f64]) -> bool {
    assert_eq!(eta.len(), thresholds.len(), "one threshold per expert");
    eta.iter().zip(thresholds).all(|(e, z)| e <= z)
}

/// Shannon-entropy attribute weights from the experts' expectation grids.
///
/// Per cell, the experts' expectations are normalized into shares and scored
/// by entropy (0·ln 0 taken as 0, log base p); cells where all experts agree
/// score exactly 1. Column means are normalized into attribute weights.
pub fn entropy_weights(expectations: &[Vec<Vec<f64>>]) -> Result<EntropyWeights, ConsensusError> {
    let panel = expectations.len();
    if panel < 2 {
        return Err(ConsensusError::PanelTooSmall(panel));
    }
    let rows = expectations[0].len();
    let cols = expectations[0][0].len();
    for grid in expectations {
        assert_eq!(grid.len(), rows, "congruent grids");
        assert!(grid.iter().all(|r| r.len() == cols), "congruent grid rows");
    }
    let ln_panel = (panel as f64).ln();

    let mut cells = vec![vec![0.0; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            let mut total = 0.0;
            for (k, grid) in expectations.iter().enumerate() {
                let value = grid[i][j];
                if !value.is_finite() || value < 0.0 {
                    return Err(ConsensusError::InvalidExpectation {
                        value,
                        row: i,
                        col: j,
                        expert: Some(k),
                        round: None,
                    });
                }
                total += value;
            }
            if total <= 0.0 {
                return Err(ConsensusError::DegenerateCell {
                    row: i,
                    col: j,
                    expert: None,
                    round: None,
                });
            }
            let first = expectations[0][i][j];
            if expectations[1..].iter().all(|g| g[i][j] == first) {
                cells[i][j] = 1.0; // uniform shares maximize entropy
                continue;
            }
            let mut acc = 0.0;
            for grid in expectations {
                let share = grid[i][j] / total;
                if share > 0.0 {
                    acc -= share * share.ln();
                }
            }
            cells[i][j] = (acc / ln_panel).clamp(0.0, 1.0);
        }
    }

    let by_attribute: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| cells[i][j]).sum::<f64>() / rows as f64)
        .collect();
    let total: f64 = by_attribute.iter().sum();
    let weights = by_attribute.iter().map(|v| v / total).collect();
    Ok(EntropyWeights {
        cells,
        by_attribute,
        weights,
    })
}

/// Moves each expert's cells toward the group: the evaluation interval
/// becomes the convex combination `(1-w_j)·own + w_j·group` under the
/// attribute's weight, and the reliability interval drops to the
/// componentwise minimum of the two. Columns with `w_j = 0` (and cells
/// already equal to the group cell) are left untouched.
pub fn adjust_preferences(
    matrices: &[DecisionMatrix],
    group: &DecisionMatrix,
    attribute_weights: &[f64],
) -> Result<Vec<DecisionMatrix>, ConsensusError> {
    require_congruent(matrices)?;
    if !matrices[0].same_shape(group) {
        return Err(ConsensusError::ShapeMismatch {
            index: 0,
            rows: group.rows(),
            cols: group.cols(),
            expected_rows: matrices[0].rows(),
            expected_cols: matrices[0].cols(),
        });
    }
    if attribute_weights.len() != group.cols() {
        return Err(ConsensusError::WeightCount {
            expected: group.cols(),
            found: attribute_weights.len(),
        });
    }
    let eval_max = group.scale().eval_max();
    matrices
        .iter()
        .map(|m| {
            let rows = (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| {
                            let own = *m.cell(i, j);
                            let grp = *group.cell(i, j);
                            let w = attribute_weights[j];
                            if w == 0.0 || own == grp {
                                return own;
                            }
                            let blend = |a: Interval, b: Interval| Interval {
                                // convex combinations stay in range; min()
                                // strips last-ulp spill past the scale top
                                lo: ((1.0 - w) * a.lo + w * b.lo).min(eval_max),
                                hi: ((1.0 - w) * a.hi + w * b.hi).min(eval_max),
                            };
                            let eval = blend(own.eval(), grp.eval());
                            let rel_lo = own.reliability().lo.min(grp.reliability().lo);
                            let rel_hi = own.reliability().hi.min(grp.reliability().hi);
                            TwoDimUlv::new(m.scale(), eval.lo, eval.hi, rel_lo, rel_hi)
                                .expect("convex combination preserves interval order")
                        })
                        .collect()
                })
                .collect();
            DecisionMatrix::new(m.scale(), rows).map_err(ConsensusError::Matrix)
        })
        .collect()
}

/// Runs rounds of the procedure from the problem's initial matrices until
/// every expert's consistency index meets its threshold or `max_rounds` is
/// exhausted. Every evaluated round is reported, including the terminating
/// one; `converged` is false when the round budget ran out first.
pub fn run_consensus(problem: &ProblemSpec) -> Result<ConsensusRun, ConsensusError> {
    let panel = problem.experts().len();
    if panel < 2 {
        return Err(ConsensusError::PanelTooSmall(panel));
    }

    let mut matrices = problem.initial_matrices().to_vec();
    let mut rounds = Vec::new();
    let mut converged = false;

    for round in 1..=problem.max_rounds() {
        let group = aggregate_group(&matrices, problem.expert_weights(), problem.alpha())?;
        let distances = distance_matrices(&matrices, &group)?;
        let expectations = expectation_matrices(&matrices);

        let mut eta = Vec::with_capacity(panel);
        for (k, (d, e)) in distances.iter().zip(&expectations).enumerate() {
            let value =
                consistency_index(d, e).map_err(|err| err.with_context(Some(round), Some(k)))?;
            eta.push(value);
        }
        let terminated = check_termination(&eta, problem.thresholds());
        let entropy =
            entropy_weights(&expectations).map_err(|err| err.with_context(Some(round), None))?;

        rounds.push(RoundReport {
            round,
            group: group.clone(),
            distances,
            expectations,
            entropy_cells: entropy.cells,
            entropy_by_attribute: entropy.by_attribute,
            attribute_weights: entropy.weights.clone(),
            eta,
            terminated,
        });

        if terminated {
            converged = true;
            break;
        }
        if round == problem.max_rounds() {
            break;
        }
        matrices = adjust_preferences(&matrices, &group, &entropy.weights)?;
    }

    Ok(ConsensusRun {
        rounds,
        final_matrices: matrices,
        converged,
    })
}

/// Scores each alternative by aggregating its row of the group matrix with
/// the attribute weights (order-1 mean) and taking the expectation, then
/// sorts descending under the expectation-then-midpoint order. Ties keep
/// their input order.
pub fn rank_alternatives(
    group: &DecisionMatrix,
    attribute_weights: &[f64],
) -> Result<Vec<(usize, f64)>, ConsensusError> {
    if attribute_weights.len() != group.cols() {
        return Err(ConsensusError::WeightCount {
            expected: group.cols(),
            found: attribute_weights.len(),
        });
    }
    let weights = Weights::new(attribute_weights.to_vec())?;
    let mut scored = Vec::with_capacity(group.rows());
    for i in 0..group.rows() {
        let aggregate = weighted_mean(group.row(i), &weights)?;
        scored.push((i, aggregate));
    }
    scored.sort_by(|a, b| b.1.compare(&a.1));
    Ok(scored
        .into_iter()
        .map(|(i, agg)| (i, agg.expectation()))
        .collect())
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

    fn matrix(cells: Vec<Vec<TwoDimUlv>>) -> DecisionMatrix {
        DecisionMatrix::new(scale_7_5(), cells).unwrap()
    }

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn toy_problem(matrices: Vec<DecisionMatrix>, thresholds: Vec<f64>) -> ProblemSpec {
        let p = matrices.len();
        ProblemSpec::new(
            scale_7_5(),
            labels("A", matrices[0].rows()),
            labels("C", matrices[0].cols()),
            labels("e", p),
            vec![1.0; p],
            thresholds,
            DEFAULT_ALPHA,
            DEFAULT_MAX_ROUNDS,
            matrices,
        )
        .unwrap()
    }

    #[test]
    fn group_reliability_is_panel_minimum() {
        // One cell per expert; reliabilities (1,2), (3,4), (1,1) -> (1,1).
        let mats = vec![
            matrix(vec![vec![v(3.0, 4.0, 1.0, 2.0)]]),
            matrix(vec![vec![v(5.0, 6.0, 3.0, 4.0)]]),
            matrix(vec![vec![v(4.0, 5.0, 1.0, 1.0)]]),
        ];
        let group = aggregate_group(&mats, &Weights::uniform(3).unwrap(), 1.0).unwrap();
        let cell = group.cell(0, 0);
        assert_eq!((cell.reliability().lo, cell.reliability().hi), (1.0, 1.0));
        assert_abs_diff_eq!(cell.eval().lo, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cell.eval().hi, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn identical_panel_aggregates_to_itself() {
        let m = matrix(vec![vec![v(5.0, 5.0, 2.0, 3.0), v(2.0, 3.0, 3.0, 3.0)]]);
        let group = aggregate_group(
            &[m.clone(), m.clone(), m.clone()],
            &Weights::uniform(3).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(group, m);
    }

    #[test]
    fn distances_to_group_match_reference_cell() {
        let e1 = matrix(vec![vec![v(5.0, 5.0, 2.0, 3.0)]]);
        let group = matrix(vec![vec![v(4.68, 4.68, 2.0, 3.0)]]);
        let grids = distance_matrices(std::slice::from_ref(&e1), &group).unwrap();
        assert_abs_diff_eq!(grids[0][0][0], 0.033, epsilon = 5e-4);

        let zero = distance_matrices(std::slice::from_ref(&group), &group).unwrap();
        assert_eq!(zero[0][0][0], 0.0);
    }

    #[test]
    fn expectation_grids_match_reference_cells() {
        let m = matrix(vec![
            vec![v(5.0, 5.0, 3.0, 3.0), v(3.0, 3.0, 1.0, 1.0)],
            vec![v(0.0, 0.0, 2.0, 3.0), v(6.0, 6.0, 4.0, 4.0)],
        ]);
        let grids = expectation_matrices(&[m]);
        assert_abs_diff_eq!(grids[0][0][0], 0.625, epsilon = 1e-12);
        assert_abs_diff_eq!(grids[0][0][1], 0.125, epsilon = 1e-12);
        assert_eq!(grids[0][1][0], 0.0);
        assert_eq!(grids[0][1][1], 1.0);
    }

    #[test]
    fn consistency_index_is_the_ratio_sum() {
        let got = consistency_index(&[vec![0.1, 0.2]], &[vec![0.5, 0.4]]).unwrap();
        assert_abs_diff_eq!(got, 0.7, epsilon = 1e-12);

        let zero = consistency_index(&[vec![0.0, 0.0]], &[vec![0.5, 0.4]]).unwrap();
        assert_eq!(zero, 0.0);

        let err = consistency_index(&[vec![0.1]], &[vec![0.0]]).unwrap_err();
        assert!(matches!(
            err,
            ConsensusError::DegenerateCell { row: 0, col: 0, .. }
        ));
    }

    #[test]
    fn termination_is_inclusive_and_requires_all_experts() {
        let thresholds = [1.5, 2.5, 1.5];
        assert!(!check_termination(&[4.464, 6.776, 4.408], &thresholds));
        assert!(check_termination(&[1.422, 2.304, 1.472], &thresholds));
        assert!(check_termination(&thresholds, &thresholds));
        assert!(!check_termination(&[1.0, 2.6, 1.0], &thresholds));
    }

    #[test]
    fn entropy_cell_matches_reference_value() {
        let grids = vec![vec![vec![0.521]], vec![vec![0.583]], vec![vec![0.521]]];
        let got = entropy_weights(&grids).unwrap();
        assert_abs_diff_eq!(got.cells[0][0], 0.999, epsilon = 5e-4);
        assert_eq!(got.weights, vec![1.0]);
    }

    #[test]
    fn entropy_is_exactly_one_for_agreeing_experts() {
        let grids = vec![vec![vec![0.37]], vec![vec![0.37]], vec![vec![0.37]]];
        assert_eq!(entropy_weights(&grids).unwrap().cells[0][0], 1.0);
    }

    #[test]
    fn entropy_rejects_small_panels_and_dead_cells() {
        assert!(matches!(
            entropy_weights(&[vec![vec![0.5]]]),
            Err(ConsensusError::PanelTooSmall(1))
        ));
        let grids = vec![vec![vec![0.0]], vec![vec![0.0]]];
        assert!(matches!(
            entropy_weights(&grids),
            Err(ConsensusError::DegenerateCell { row: 0, col: 0, .. })
        ));
    }

    #[test]
    fn adjustment_moves_cells_toward_group() {
        // Reference: (1-0.259)*5 + 0.259*4.68 = 4.917.
        let own = matrix(vec![vec![v(5.0, 5.0, 2.0, 3.0)]]);
        let group = matrix(vec![vec![v(4.68, 4.68, 2.0, 3.0)]]);
        let adjusted = adjust_preferences(&[own], &group, &[0.259]).unwrap();
        let cell = adjusted[0].cell(0, 0);
        assert_abs_diff_eq!(cell.eval().lo, 4.917, epsilon = 1e-3);
        assert_eq!((cell.reliability().lo, cell.reliability().hi), (2.0, 3.0));
    }

    #[test]
    fn adjustment_takes_reliability_minimum() {
        let own = matrix(vec![vec![v(5.0, 6.0, 3.0, 4.0)]]);
        let group = matrix(vec![vec![v(3.92, 4.92, 1.0, 1.0)]]);
        let adjusted = adjust_preferences(&[own], &group, &[0.235]).unwrap();
        let cell = adjusted[0].cell(0, 0);
        assert_eq!((cell.reliability().lo, cell.reliability().hi), (1.0, 1.0));
    }

    #[test]
    fn zero_weights_leave_matrices_unchanged() {
        let own = matrix(vec![vec![v(5.0, 5.0, 3.0, 3.0), v(2.0, 3.0, 2.0, 2.0)]]);
        let group = matrix(vec![vec![v(3.0, 3.0, 1.0, 1.0), v(4.0, 4.0, 1.0, 2.0)]]);
        let adjusted = adjust_preferences(std::slice::from_ref(&own), &group, &[0.0, 0.0]).unwrap();
        assert_eq!(adjusted[0], own);
    }

    #[test]
    fn identical_panel_converges_immediately_with_zero_eta() {
        let m = matrix(vec![vec![v(4.0, 5.0, 2.0, 3.0), v(1.0, 2.0, 3.0, 4.0)]]);
        let problem = toy_problem(vec![m.clone(), m.clone(), m.clone()], vec![0.5, 0.5, 0.5]);
        let run = run_consensus(&problem).unwrap();
        assert!(run.converged);
        assert_eq!(run.rounds.len(), 1);
        assert_eq!(run.rounds[0].eta, vec![0.0, 0.0, 0.0]);
        assert_eq!(run.rounds[0].group, m);
        assert_eq!(run.final_matrices, vec![m.clone(), m.clone(), m]);
    }

    #[test]
    fn single_expert_panels_are_rejected_before_round_one() {
        let m = matrix(vec![vec![v(4.0, 5.0, 2.0, 3.0)]]);
        let problem = toy_problem(vec![m], vec![0.5]);
        assert!(matches!(
            run_consensus(&problem),
            Err(ConsensusError::PanelTooSmall(1))
        ));
    }

    #[test]
    fn degenerate_cell_aborts_run_with_location() {
        let good = matrix(vec![vec![v(3.0, 4.0, 2.0, 3.0)]]);
        let dead = matrix(vec![vec![v(0.0, 0.0, 2.0, 3.0)]]);
        let problem = toy_problem(vec![good, dead], vec![0.1, 0.1]);
        let err = run_consensus(&problem).unwrap_err();
        assert_eq!(
            err,
            ConsensusError::DegenerateCell {
                row: 0,
                col: 0,
                expert: Some(1),
                round: Some(1),
            }
        );
        let message = err.to_string();
        assert!(message.contains("cell (0, 0)"), "got: {message}");
        assert!(message.contains("round 1"), "got: {message}");
    }

    #[test]
    fn ranking_is_stable_for_identical_rows() {
        let row = vec![v(3.0, 4.0, 2.0, 3.0), v(2.0, 3.0, 1.0, 2.0)];
        let group = matrix(vec![row.clone(), row]);
        let ranking = rank_alternatives(&group, &[0.5, 0.5]).unwrap();
        assert_eq!(ranking[0].0, 0);
        assert_eq!(ranking[1].0, 1);
        assert_eq!(ranking[0].1, ranking[1].1);
    }

    #[test]
    fn singleton_ranking() {
        let group = matrix(vec![vec![v(3.0, 4.0, 2.0, 3.0)]]);
        let ranking = rank_alternatives(&group, &[1.0]).unwrap();
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].0, 0);
    }

    #[test]
    fn problem_validation_catches_shape_errors() {
        let m = matrix(vec![vec![v(1.0, 2.0, 1.0, 2.0)]]);
        let err = ProblemSpec::new(
            scale_7_5(),
            labels("A", 1),
            labels("C", 1),
            labels("e", 2),
            vec![0.5, 0.5],
            vec![1.0],
            1.0,
            10,
            vec![m.clone(), m.clone()],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ProblemError::ThresholdCount {
                expected: 2,
                found: 1
            }
        ));

        let err = ProblemSpec::new(
            scale_7_5(),
            labels("A", 1),
            labels("C", 1),
            labels("e", 2),
            vec![0.5, 0.5],
            vec![1.0, -1.0],
            1.0,
            10,
            vec![m.clone(), m.clone()],
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::ThresholdNotPositive { .. }));

        let err = ProblemSpec::new(
            scale_7_5(),
            labels("A", 1),
            labels("C", 1),
            labels("e", 2),
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            0.0,
            10,
            vec![m.clone(), m],
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::InvalidAlpha(_)));
    }
}
