use crate::error::{Error, Result};

/// Sparse symmetric matrix in compressed-row form.
///
/// Every row stores its diagonal entry explicitly (possibly zero), and column
/// indices within a row are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag_pos: Vec<usize>,
    bandwidth: usize,
    interacting: bool,
}

impl HamiltonianMatrix {
    /// Builds a matrix from per-row `(column, value)` lists. Rows are sorted
    /// internally and a zero diagonal is inserted where missing.
    pub(crate) fn from_rows(rows: Vec<Vec<(usize, f64)>>, interacting: bool) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let nnz: usize = rows.iter().map(|r| r.len() + 1).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        let mut diag_pos = Vec::with_capacity(dim);
        let mut bandwidth = 0;
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            if !row.iter().any(|&(c, _)| c == i) {
                row.push((i, 0.0));
            }
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if c == i {
                    diag_pos.push(cols.len());
                }
                bandwidth = bandwidth.max(c.abs_diff(i));
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            diag_pos,
            bandwidth,
            interacting,
        }
    }

    /// Builds a matrix from a dense row-major array, dropping zero off-diagonal entries.
    ///
    /// The input must be exactly symmetric.
    pub fn from_dense(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: values.len(),
            });
        }
        for i in 0..dim {
            for j in 0..i {
                if values[i * dim + j] != values[j * dim + i] {
                    return Err(crate::error::invalid(
                        "values",
                        format!("entry ({i}, {j}) differs from its transpose"),
                    ));
                }
            }
        }
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .filter(|&j| j == i || values[i * dim + j] != 0.0)
                    .map(|j| (j, values[i * dim + j]))
                    .collect()
            })
            .collect();
        Ok(Self::from_rows(rows, false))
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// True when no entry lies outside the first off-diagonals.
    pub fn is_tridiagonal(&self) -> bool {
        self.bandwidth <= 1
    }

    /// Whether the pair-interaction diagonal was added during assembly.
    pub fn includes_interaction(&self) -> bool {
        self.interacting
    }

    pub(crate) fn set_interacting(&mut self, interacting: bool) {
        self.interacting = interacting;
    }

    /// Stored `(column, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.diag_pos.iter().map(|&p| self.vals[p]).collect()
    }

    /// Adds `values[i]` to the `i`-th diagonal entry.
    pub(crate) fn add_diagonal(&mut self, values: &[f64]) {
        for (&p, &v) in self.diag_pos.iter().zip(values) {
            self.vals[p] += v;
        }
    }

    /// Returns `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for &p in &out.diag_pos {
            out.vals[p] += shift;
        }
        out
    }

    /// `y = H x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim, "input vector length");
        assert_eq!(y.len(), self.dim, "output vector length");
        for (i, yi) in y.iter_mut().enumerate() {
            let span = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `<x, H x>`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                out[i * self.dim + j] = v;
            }
        }
        out
    }

    /// Entry-wise symmetry check, no tolerance.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Maximum absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            let mut radius = 0.0;
            let mut center = 0.0;
            for (j, v) in self.row(i) {
                if j == i {
                    center = v;
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        if self.dim == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// Main and first off-diagonal of a tridiagonal matrix.
    pub(crate) fn tridiagonal_parts(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.is_tridiagonal() {
            return None;
        }
        let diag = self.diagonal();
        let off = (1..self.dim).map(|i| self.get(i, i - 1)).collect();
        Some((diag, off))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_lookup() {
        let a = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        let m = HamiltonianMatrix::from_dense(3, &a).unwrap();
        assert_eq!(m.to_dense(), a.to_vec());
        assert_eq!(m.nnz(), 7);
        assert!(m.is_tridiagonal());
        assert!(m.is_symmetric());
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![1.0, 0.0, 1.0]);
        assert_eq!(m.gershgorin_bounds(), (0.0, 4.0));
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert!(HamiltonianMatrix::from_dense(2, &[1.0, 2.0, 3.0, 1.0]).is_err());
    }

    #[test]
    fn zero_diagonal_is_stored() {
        let m = HamiltonianMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.diagonal(), vec![0.0, 0.0]);
        assert_eq!(m.shifted(1.5).diagonal(), vec![1.5, 1.5]);
    }
}
