//! Rectangular grids of 2-dimensional uncertain linguistic evaluations.

use thiserror::Error;

use crate::linguistic::{LinguisticError, Scale, TwoDimUlv};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cell ({row}, {col}) uses a different scale than the matrix")]
    CellScaleMismatch { row: usize, col: usize },
    #[error("cell ({row}, {col}): {source}")]
    Cell {
        row: usize,
        col: usize,
        source: LinguisticError,
    },
}

/// An m×n grid of evaluations sharing one scale, with every cell inside the
/// scale's subscript range. Unlike intermediate algebra results, stored
/// evaluations must satisfy the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix {
    scale: Scale,
    cells: Vec<Vec<TwoDimUlv>>,
}

impl DecisionMatrix {
    pub fn new(scale: Scale, cells: Vec<Vec<TwoDimUlv>>) -> Result<Self, MatrixError> {
        if cells.is_empty() || cells[0].is_empty() {
            return Err(MatrixError::Empty);
        }
        let cols = cells[0].len();
        for (row, row_cells) in cells.iter().enumerate() {
            if row_cells.len() != cols {
                return Err(MatrixError::Ragged {
                    row,
                    expected: cols,
                    found: row_cells.len(),
                });
            }
            for (col, cell) in row_cells.iter().enumerate() {
                if cell.scale() != scale {
                    return Err(MatrixError::CellScaleMismatch { row, col });
                }
                cell.check_in_range()
                    .map_err(|source| MatrixError::Cell { row, col, source })?;
            }
        }
        Ok(DecisionMatrix { scale, cells })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn cell(&self, row: usize, col: usize) -> &TwoDimUlv {
        &self.cells[row][col]
    }

    pub fn row(&self, row: usize) -> &[TwoDimUlv] {
        &self.cells[row]
    }

    pub fn same_shape(&self, other: &DecisionMatrix) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols() && self.scale == other.scale
    }
}
