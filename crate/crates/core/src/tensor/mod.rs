//! Sparse cubical tensors and their multilinear products.
//!
//! A [`CubicalTensor`] of order `k` and dimension `n` stores only its nonzero
//! entries, keyed by the full index tuple `(i1, ..., ik)` with 0-based
//! components. Iteration is lexicographic in the index tuple, so every product
//! and serialization visits entries in the same order.
//!
//! The central product is `A x^{k-1}`:
//!
//! ```text
//! (A x^{k-1})_i = sum_{i2..ik} A[i, i2, .., ik] * x[i2] * ... * x[ik]
//! ```

mod generators;
mod polynomial;
mod structure;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub use generators::{add_undirected_hyperedge, sunflower_tensor, uniform_tensor};
pub use polynomial::{from_polynomial, Monomial};
pub use structure::{
    gershgorin_bounds, is_diagonally_dominant, is_irreducible, is_metzler, is_nonnegative, is_strongly_connected,
    is_supersymmetric, metzler_split, mode_sum_matrix, Disk, GershgorinBounds, MetzlerSplit, EXACT_IRREDUCIBILITY_CAP,
};

/// Index tuple of a tensor entry; its length equals the tensor order.
pub type IndexTuple = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicalTensor {
    order: usize,
    dim: usize,
    entries: BTreeMap<IndexTuple, f64>,
}

impl CubicalTensor {
    /// Empty (all-zero) tensor.
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        if order < 2 || dim < 1 {
            return Err(Error::InvalidShape { order, dim });
        }
        Ok(Self {
            order,
            dim,
            entries: BTreeMap::new(),
        })
    }

    /// Builds a tensor from `(index, value)` pairs. Duplicate indices are summed
    /// and entries that end up exactly zero are dropped.
    pub fn from_entries<I>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (IndexTuple, f64)>,
    {
        let mut t = Self::zeros(order, dim)?;
        for (idx, val) in entries {
            t.add_to(idx, val)?;
        }
        Ok(t)
    }

    /// The identity tensor: ones on the superdiagonal `(i, i, .., i)`.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        Self::diagonal(order, &vec![1.0; dim])
    }

    /// Diagonal tensor with `diag[i]` at `(i, .., i)`.
    pub fn diagonal(order: usize, diag: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(order, diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            t.set(vec![i; order], d)?;
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Stored entries in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.entries.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.entries.get(index).copied().unwrap_or(0.0)
    }

    /// Diagonal entry `A[i, i, .., i]`.
    pub fn diag(&self, i: usize) -> f64 {
        self.get(&vec![i; self.order])
    }

    fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.order {
            return Err(Error::IndexLength {
                index: index.to_vec(),
                expected: self.order,
                actual: index.len(),
            });
        }
        if index.iter().any(|&c| c >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: index.to_vec(),
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// Overwrites an entry. Setting zero removes it.
    pub fn set(&mut self, index: IndexTuple, value: f64) -> Result<()> {
        self.check_index(&index)?;
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if value == 0.0 {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    /// Adds `value` to an entry, removing it if the sum is exactly zero.
    pub fn add_to(&mut self, index: IndexTuple, value: f64) -> Result<()> {
        self.check_index(&index)?;
        let current = self.get(&index);
        self.set(index, current + value)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::ShapeMismatch {
                left_order: self.order,
                left_dim: self.dim,
                right_order: other.order,
                right_dim: other.dim,
            });
        }
        Ok(())
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (idx, v) in other.entries() {
            out.add_to(idx.to_vec(), v)?;
        }
        Ok(out)
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Scalar multiple. Scaling by zero yields the empty tensor.
    pub fn scale(&self, c: f64) -> Self {
        let entries = if c == 0.0 {
            BTreeMap::new()
        } else {
            self.entries
                .iter()
                .map(|(k, &v)| (k.clone(), v * c))
                .filter(|(_, v)| *v != 0.0)
                .collect()
        };
        Self {
            order: self.order,
            dim: self.dim,
            entries,
        }
    }

    /// `self + c * I`.
    pub fn shift_diagonal(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.add_to(vec![i; self.order], c).expect("diagonal index in range");
        }
        out
    }

    /// Sum of absolute values of all entries.
    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|v| v.abs()).sum()
    }

    /// True for superdiagonal tuples `(i, i, .., i)`.
    pub fn is_diagonal_index(index: &[usize]) -> bool {
        index.windows(2).all(|w| w[0] == w[1])
    }

    /// `A x^{k-1}`: contracts every mode except the first with `x`.
    pub fn tv_product(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for (idx, &v) in &self.entries {
            let prod = idx[1..].iter().fold(v, |acc, &j| acc * x[j]);
            out[idx[0]] += prod;
        }
        Ok(out)
    }
}

/// Componentwise power `x^{[p]}`.
pub fn vec_power(x: &[f64], p: u32) -> Vec<f64> {
    x.iter().map(|v| v.powi(p as i32)).collect()
}

/// `sum |x_i|`.
pub fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// `max |x_i|`.
pub fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Distinct permutations of a multiset of indices, in lexicographic order.
pub fn distinct_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
