//! Dense feature matrices and label vectors.

use alloc::vec::Vec;

use crate::{Error, Result};

/// `n_samples × n_features` row-major matrix of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n_samples: usize,
    n_features: usize,
}

impl DataMatrix {
    pub fn new(values: Vec<f64>, n_samples: usize, n_features: usize) -> Result<Self> {
        if n_samples == 0 || n_features == 0 {
            return Err(Error::invalid_argument(
                "data matrix needs at least one sample and one feature",
            ));
        }
        if values.len() != n_samples * n_features {
            return Err(Error::invalid_argument(alloc::format!(
                "expected {} values for a {n_samples}x{n_features} matrix, got {}",
                n_samples * n_features,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_argument(alloc::format!(
                "non-finite value at sample {}, feature {}",
                pos / n_features,
                pos % n_features
            )));
        }
        Ok(DataMatrix {
            values,
            n_samples,
            n_features,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_features = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != n_features {
                return Err(Error::invalid_argument(alloc::format!(
                    "row {i} has a different length"
                )));
            }
            values.extend_from_slice(row.as_ref());
        }
        DataMatrix::new(values, rows.len(), n_features)
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_features)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Returns a copy with rows reordered so that new row `r` is old row `order[r]`.
    pub fn select_rows(&self, order: &[usize]) -> DataMatrix {
        let mut values = Vec::with_capacity(order.len() * self.n_features);
        for &i in order {
            values.extend_from_slice(self.row(i));
        }
        DataMatrix {
            values,
            n_samples: order.len(),
            n_features: self.n_features,
        }
    }
}

/// Cluster index per sample.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelVector(Vec<usize>);

impl LabelVector {
    pub fn new(labels: Vec<usize>) -> Self {
        LabelVector(labels)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One past the largest label (0 for an empty vector).
    pub fn n_classes(&self) -> usize {
        self.0.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for LabelVector {
    fn from(v: Vec<usize>) -> Self {
        LabelVector(v)
    }
}

impl AsRef<[usize]> for LabelVector {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

/// Maps arbitrary integer labels onto `0..K` in ascending order of the original value.
pub fn reindex_dense<T: Ord + Copy>(raw: &[T]) -> LabelVector {
    let mut uniq: Vec<T> = raw.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    LabelVector(raw.iter().map(|v| uniq.binary_search(v).unwrap()).collect())
}
