//! Node-centred storage on the `(z, xi)` grid.

use crate::params::NumericalParams;

/// A scalar on the `(axial_nodes) x (radial_nodes)` grid, stored row-major
/// with one row per axial station.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn for_grid(n: &NumericalParams) -> Self {
        Self::zeros(n.axial_nodes(), n.radial_nodes())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn copy_from(&mut self, other: &Field) {
        self.data.copy_from_slice(&other.data);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// First entry that is non-finite or larger than `limit` in magnitude.
    pub fn find_overflow(&self, limit: f64) -> Option<(usize, usize, f64)> {
        self.data
            .iter()
            .position(|v| !v.is_finite() || v.abs() > limit)
            .map(|k| (k / self.cols, k % self.cols, self.data[k]))
    }
}

/// The four unknowns at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub u: Field,
    pub v: Field,
    pub w: Field,
    pub theta: Field,
    pub t: f64,
}

impl FlowField {
    pub fn zeros(n: &NumericalParams) -> Self {
        Self {
            u: Field::for_grid(n),
            v: Field::for_grid(n),
            w: Field::for_grid(n),
            theta: Field::for_grid(n),
            t: 0.0,
        }
    }
}
