use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// A set of matrix positions `Ω ⊆ [rows] × [cols]`, kept sorted in row-major order.
///
/// Positions are stored as flat offsets `i * cols + j`, so sortedness of the flat list is
/// the same as lexicographic sortedness of the `(i, j)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    rows: usize,
    cols: usize,
    flat: Vec<usize>,
}

impl SupportSet {
    /// Validates and sorts the given positions. Duplicates and out-of-range entries are errors.
    pub fn new(rows: usize, cols: usize, indices: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut flat = Vec::new();
        for (row, col) in indices {
            if row >= rows || col >= cols {
                return Err(Error::IndexOutOfRange { row, col, rows, cols });
            }
            flat.push(row * cols + col);
        }
        flat.sort_unstable();
        if let Some(w) = flat.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex {
                row: w[0] / cols,
                col: w[0] % cols,
            });
        }
        Ok(Self { rows, cols, flat })
    }

    pub(crate) fn from_sorted_flat(rows: usize, cols: usize, flat: Vec<usize>) -> Self {
        debug_assert!(flat.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(flat.last().is_none_or(|&k| k < rows * cols));
        Self { rows, cols, flat }
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            flat: Vec::new(),
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            flat: (0..rows * cols).collect(),
        }
    }

    /// Positions of the nonzero entries of `x`.
    pub fn of_nonzeros(x: &DenseMatrix) -> Self {
        let flat = x
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, _)| k)
            .collect();
        Self {
            rows: x.rows(),
            cols: x.cols(),
            flat,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `m = |Ω|`.
    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// Sampling ratio `p = m / (rows * cols)`.
    pub fn density(&self) -> f64 {
        let total = self.rows * self.cols;
        if total == 0 {
            0.0
        } else {
            self.flat.len() as f64 / total as f64
        }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.rows && col < self.cols && self.flat.binary_search(&(row * self.cols + col)).is_ok()
    }

    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.flat.iter().map(|&k| (k / self.cols, k % self.cols))
    }

    pub(crate) fn flat(&self) -> &[usize] {
        &self.flat
    }

    pub fn complement(&self) -> Self {
        let mut flat = Vec::with_capacity(self.rows * self.cols - self.flat.len());
        let mut it = self.flat.iter().peekable();
        for k in 0..self.rows * self.cols {
            if it.peek() == Some(&&k) {
                it.next();
            } else {
                flat.push(k);
            }
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            flat,
        }
    }

    /// Dense 0/1 indicator of the set.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.rows * self.cols];
        for &k in &self.flat {
            mask[k] = true;
        }
        mask
    }

    pub(crate) fn ensure_matches(&self, x: &DenseMatrix) -> Result<()> {
        x.ensure_shape(self.shape())
    }
}
