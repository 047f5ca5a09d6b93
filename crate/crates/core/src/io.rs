//! Problem-file ingestion and round-trace emission.
//!
//! The interchange format is a JSON document mirroring [`ProblemSpec`]:
//!
//! ```json
//! {
//!   "scale": {"l": 7, "z": 5},
//!   "alternatives": ["A1", "A2"],
//!   "attributes": ["C1", "C2"],
//!   "experts": [{"id": "e1", "weight": 0.5}, {"id": "e2", "weight": 0.5}],
//!   "thresholds": [1.5, 1.5],
//!   "alpha": 1.0,
//!   "maxRounds": 50,
//!   "matrices": {"e1": [[[5, 5, 2, 3], [2, 3, 3, 3]], ...], "e2": ...}
//! }
//! ```
//!
//! Every cell is a `[a, b, c, d]` 4-tuple of term subscripts. `alpha` and
//! `maxRounds` are optional. Validation failures carry the offending cell's
//! expert, alternative, and attribute identifiers.
//!
//! A consensus run is emitted as one `round-<t>.json` document per round
//! (or a set of CSV tables per round) plus a `summary.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consensus::{
    rank_alternatives, ConsensusError, ConsensusRun, ProblemError, ProblemSpec, RoundReport,
    DEFAULT_ALPHA, DEFAULT_MAX_ROUNDS,
};
use crate::linguistic::{LinguisticError, Scale, TwoDimUlv};
use crate::matrix::{DecisionMatrix, MatrixError};

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed problem document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scale: {0}")]
    Scale(LinguisticError),
    #[error("no matrix given for expert {0:?}")]
    MissingMatrix(String),
    #[error("matrices key {0:?} does not match any expert id")]
    UnknownMatrixExpert(String),
    #[error(
        "matrix for expert {expert:?} has {found} rows, expected {expected} (one per alternative)"
    )]
    RowCount {
        expert: String,
        expected: usize,
        found: usize,
    },
    #[error("matrix for expert {expert:?}, alternative {alternative:?}: {found} cells, expected {expected} (one per attribute)")]
    RowWidth {
        expert: String,
        alternative: String,
        expected: usize,
        found: usize,
    },
    #[error(
        "cell (expert {expert:?}, alternative {alternative:?}, attribute {attribute:?}): {source}"
    )]
    Cell {
        expert: String,
        alternative: String,
        attribute: String,
        source: LinguisticError,
    },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Serialize, Deserialize)]
struct ScaleDoc {
    l: u32,
    z: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExpertDoc {
    id: String,
    weight: f64,
}

/// The on-disk problem document. Field names are part of the interchange
/// contract.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    scale: ScaleDoc,
    alternatives: Vec<String>,
    attributes: Vec<String>,
    experts: Vec<ExpertDoc>,
    thresholds: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(rename = "maxRounds", default, skip_serializing_if = "Option::is_none")]
    max_rounds: Option<usize>,
    matrices: BTreeMap<String, Vec<Vec<[f64; 4]>>>,
}

/// Reads and fully validates a problem file. Expert weights are normalized;
/// every cell is checked against the scale with an identifier-addressed
/// diagnostic on failure.
pub fn parse_problem(path: impl AsRef<Path>) -> Result<ProblemSpec, ProblemFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ProblemFileError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem_str(&text)
}

/// [`parse_problem`] over an in-memory document.
pub fn parse_problem_str(text: &str) -> Result<ProblemSpec, ProblemFileError> {
    let doc: ProblemFile = serde_json::from_str(text)?;
    let scale = Scale::new(doc.scale.l, doc.scale.z).map_err(ProblemFileError::Scale)?;
    if doc.alternatives.is_empty() {
        return Err(ProblemError::EmptyAxis("alternative").into());
    }
    if doc.attributes.is_empty() {
        return Err(ProblemError::EmptyAxis("attribute").into());
    }

    for key in doc.matrices.keys() {
        if !doc.experts.iter().any(|e| &e.id == key) {
            return Err(ProblemFileError::UnknownMatrixExpert(key.clone()));
        }
    }

    let mut matrices = Vec::with_capacity(doc.experts.len());
    for expert in &doc.experts {
        let raw = doc
            .matrices
            .get(&expert.id)
            .ok_or_else(|| ProblemFileError::MissingMatrix(expert.id.clone()))?;
        if raw.len() != doc.alternatives.len() {
            return Err(ProblemFileError::RowCount {
                expert: expert.id.clone(),
                expected: doc.alternatives.len(),
                found: raw.len(),
            });
        }
        let mut rows = Vec::with_capacity(raw.len());
        for (i, raw_row) in raw.iter().enumerate() {
            if raw_row.len() != doc.attributes.len() {
                return Err(ProblemFileError::RowWidth {
                    expert: expert.id.clone(),
                    alternative: doc.alternatives[i].clone(),
                    expected: doc.attributes.len(),
                    found: raw_row.len(),
                });
            }
            let mut row = Vec::with_capacity(raw_row.len());
            for (j, &[a, b, c, d]) in raw_row.iter().enumerate() {
                let cell = TwoDimUlv::new(scale, a, b, c, d)
                    .and_then(|cell| cell.check_in_range().map(|()| cell))
                    .map_err(|source| ProblemFileError::Cell {
                        expert: expert.id.clone(),
                        alternative: doc.alternatives[i].clone(),
                        attribute: doc.attributes[j].clone(),
                        source,
                    })?;
                row.push(cell);
            }
            rows.push(row);
        }
        let matrix = DecisionMatrix::new(scale, rows).map_err(|err| match err {
            MatrixError::Cell { row, col, source } => ProblemFileError::Cell {
                expert: expert.id.clone(),
                alternative: doc.alternatives[row].clone(),
                attribute: doc.attributes[col].clone(),
                source,
            },
            other => unreachable!("matrix shape pre-validated: {other}"),
        })?;
        matrices.push(matrix);
    }

    let spec = ProblemSpec::new(
        scale,
        doc.alternatives,
        doc.attributes,
        doc.experts.iter().map(|e| e.id.clone()).collect(),
        doc.experts.iter().map(|e| e.weight).collect(),
        doc.thresholds,
        doc.alpha.unwrap_or(DEFAULT_ALPHA),
        doc.max_rounds.unwrap_or(DEFAULT_MAX_ROUNDS),
        matrices,
    )?;
    Ok(spec)
}

/// Serializes a validated problem back into the interchange document, with
/// the normalized expert weights. `parse(emit(parse(f)))` equals `parse(f)`.
pub fn problem_to_json(problem: &ProblemSpec) -> String {
    let cells = |m: &DecisionMatrix| -> Vec<Vec<[f64; 4]>> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| cell_tuple(m.cell(i, j))).collect())
            .collect()
    };
    let doc = ProblemFile {
        scale: ScaleDoc {
            l: problem.scale().eval_terms(),
            z: problem.scale().reliability_terms(),
        },
        alternatives: problem.alternatives().to_vec(),
        attributes: problem.attributes().to_vec(),
        experts: problem
            .experts()
            .iter()
            .zip(problem.expert_weights().as_slice())
            .map(|(id, &weight)| ExpertDoc {
                id: id.clone(),
                weight,
            })
            .collect(),
        thresholds: problem.thresholds().to_vec(),
        alpha: Some(problem.alpha()),
        max_rounds: Some(problem.max_rounds()),
        matrices: problem
            .experts()
            .iter()
            .zip(problem.initial_matrices())
            .map(|(id, m)| (id.clone(), cells(m)))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("problem documents always serialize")
}

fn cell_tuple(cell: &TwoDimUlv) -> [f64; 4] {
    [
        cell.eval().lo,
        cell.eval().hi,
        cell.reliability().lo,
        cell.reliability().hi,
    ]
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("no round reports to emit")]
    EmptyReports,
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Consensus(#[from] ConsensusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct RoundDoc {
    round: usize,
    group_matrix: Vec<Vec<[f64; 4]>>,
    distance_matrices: Vec<Vec<Vec<f64>>>,
    expectation_matrices: Vec<Vec<Vec<f64>>>,
    entropy_cells: Vec<Vec<f64>>,
    entropy_by_attribute: Vec<f64>,
    attribute_weights: Vec<f64>,
    eta: Vec<f64>,
    terminated: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankingEntry {
    pub alternative: String,
    pub score: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SummaryDoc {
    rounds: usize,
    converged: bool,
    alpha: f64,
    max_rounds: usize,
    alternatives: Vec<String>,
    attributes: Vec<String>,
    experts: Vec<String>,
    thresholds: Vec<f64>,
    eta_by_round: Vec<Vec<f64>>,
    ranking: Vec<RankingEntry>,
}

/// A consensus run prepared for emission: one document per round plus a
/// summary carrying the effective parameters and the final ranking.
#[derive(Debug)]
pub struct TraceBundle {
    alternatives: Vec<String>,
    attributes: Vec<String>,
    experts: Vec<String>,
    thresholds: Vec<f64>,
    rounds: Vec<RoundReport>,
    summary: SummaryDoc,
}

impl TraceBundle {
    pub fn new(problem: &ProblemSpec, run: &ConsensusRun) -> Result<Self, TraceError> {
        if run.rounds.is_empty() {
            return Err(TraceError::EmptyReports);
        }
        let last = run.rounds.last().expect("nonempty");
        let ranking = rank_alternatives(&last.group, &last.attribute_weights)?
            .into_iter()
            .map(|(index, score)| RankingEntry {
                alternative: problem.alternatives()[index].clone(),
                score,
            })
            .collect();
        let summary = SummaryDoc {
            rounds: run.rounds.len(),
            converged: run.converged,
            alpha: problem.alpha(),
            max_rounds: problem.max_rounds(),
            alternatives: problem.alternatives().to_vec(),
            attributes: problem.attributes().to_vec(),
            experts: problem.experts().to_vec(),
            thresholds: problem.thresholds().to_vec(),
            eta_by_round: run.rounds.iter().map(|r| r.eta.clone()).collect(),
            ranking,
        };
        Ok(TraceBundle {
            alternatives: problem.alternatives().to_vec(),
            attributes: problem.attributes().to_vec(),
            experts: problem.experts().to_vec(),
            thresholds: problem.thresholds().to_vec(),
            rounds: run.rounds.clone(),
            summary,
        })
    }

    pub fn converged(&self) -> bool {
        self.summary.converged
    }

    pub fn ranking(&self) -> &[RankingEntry] {
        &self.summary.ranking
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary always serializes")
    }

    /// Writes the round documents and summary into `dir`, creating it if
    /// needed, and returns the paths written. CSV mode replaces each round
    /// document with a set of tables (`group-matrix`, `distances-e<k>`,
    /// `expectations-e<k>`, `entropy`, `attribute-weights`, `eta`); the
    /// summary stays JSON.
    pub fn write(
        &self,
        dir: impl AsRef<Path>,
        format: TraceFormat,
    ) -> Result<Vec<PathBuf>, TraceError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|source| TraceError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut written = Vec::new();
        for report in &self.rounds {
            match format {
                TraceFormat::Json => written.push(self.write_round_json(dir, report)?),
                TraceFormat::Csv => written.extend(self.write_round_csv(dir, report)?),
            }
        }
        let summary_path = dir.join("summary.json");
        write_text(&summary_path, &self.summary_json())?;
        written.push(summary_path);
        Ok(written)
    }

    fn write_round_json(&self, dir: &Path, report: &RoundReport) -> Result<PathBuf, TraceError> {
        let group = &report.group;
        let doc = RoundDoc {
            round: report.round,
            group_matrix: (0..group.rows())
                .map(|i| {
                    (0..group.cols())
                        .map(|j| cell_tuple(group.cell(i, j)))
                        .collect()
                })
                .collect(),
            distance_matrices: report.distances.clone(),
            expectation_matrices: report.expectations.clone(),
            entropy_cells: report.entropy_cells.clone(),
            entropy_by_attribute: report.entropy_by_attribute.clone(),
            attribute_weights: report.attribute_weights.clone(),
            eta: report.eta.clone(),
            terminated: report.terminated,
        };
        let path = dir.join(format!("round-{}.json", report.round));
        write_text(&path, &serde_json::to_string_pretty(&doc)?)?;
        Ok(path)
    }

    fn write_round_csv(
        &self,
        dir: &Path,
        report: &RoundReport,
    ) -> Result<Vec<PathBuf>, TraceError> {
        let mut written = Vec::new();
        let t = report.round;
        let group = &report.group;

        let path = dir.join(format!("round-{t}-group-matrix.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "alternative",
            "attribute",
            "eval_lo",
            "eval_hi",
            "reliability_lo",
            "reliability_hi",
        ])?;
        for i in 0..group.rows() {
            for j in 0..group.cols() {
                let cell = cell_tuple(group.cell(i, j));
                w.write_record([
                    self.alternatives[i].as_str(),
                    self.attributes[j].as_str(),
                    &cell[0].to_string(),
                    &cell[1].to_string(),
                    &cell[2].to_string(),
                    &cell[3].to_string(),
                ])?;
            }
        }
        w.flush().map_err(|source| TraceError::Write {
            path: path.clone(),
            source,
        })?;
        written.push(path);

        for (k, grid) in report.distances.iter().enumerate() {
            written.push(self.write_grid_csv(
                dir,
                &format!("round-{t}-distances-e{}.csv", k + 1),
                "distance",
                grid,
            )?);
        }
        for (k, grid) in report.expectations.iter().enumerate() {
            written.push(self.write_grid_csv(
                dir,
                &format!("round-{t}-expectations-e{}.csv", k + 1),
                "expectation",
                grid,
            )?);
        }
        written.push(self.write_grid_csv(
            dir,
            &format!("round-{t}-entropy.csv"),
            "entropy",
            &report.entropy_cells,
        )?);

        let path = dir.join(format!("round-{t}-attribute-weights.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["attribute", "entropy_mean", "weight"])?;
        for (j, attribute) in self.attributes.iter().enumerate() {
            w.write_record([
                attribute.as_str(),
                &report.entropy_by_attribute[j].to_string(),
                &report.attribute_weights[j].to_string(),
            ])?;
        }
        w.flush().map_err(|source| TraceError::Write {
            path: path.clone(),
            source,
        })?;
        written.push(path);

        let path = dir.join(format!("round-{t}-eta.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["expert", "eta", "threshold", "terminated"])?;
        for (k, expert) in self.experts.iter().enumerate() {
            w.write_record([
                expert.as_str(),
                &report.eta[k].to_string(),
                &self.thresholds[k].to_string(),
                &report.terminated.to_string(),
            ])?;
        }
        w.flush().map_err(|source| TraceError::Write {
            path: path.clone(),
            source,
        })?;
        written.push(path);

        Ok(written)
    }

    fn write_grid_csv(
        &self,
        dir: &Path,
        name: &str,
        value_header: &str,
        grid: &[Vec<f64>],
    ) -> Result<PathBuf, TraceError> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["alternative", "attribute", value_header])?;
        for (i, row) in grid.iter().enumerate() {
            for (j, value) in row.iter().enumerate() {
                w.write_record([
                    self.alternatives[i].as_str(),
                    self.attributes[j].as_str(),
                    &value.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|source| TraceError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), TraceError> {
    fs::write(path, text).map_err(|source| TraceError::Write {
        path: path.to_path_buf(),
        source,
    })
}
