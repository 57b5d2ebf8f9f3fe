use serde::{Deserialize, Serialize};

use super::{distinct_permutations, CubicalTensor};
use crate::error::{Error, Result};

/// `coefficient * prod_{j in factors} x_j` contributing to component `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub target: usize,
    /// Variable indices with multiplicity; `[0, 0, 1]` is `x0^2 x1`.
    pub factors: Vec<usize>,
    pub coefficient: f64,
}

impl Monomial {
    pub fn new(target: usize, factors: Vec<usize>, coefficient: f64) -> Self {
        Self {
            target,
            factors,
            coefficient,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.factors.iter().fold(self.coefficient, |acc, &j| acc * x[j])
    }
}

/// Tensor whose `A x^{k-1}` reproduces a homogeneous polynomial field of degree
/// `k - 1`. Without symmetrization each coefficient sits at the sorted tuple;
/// with it, the coefficient is spread evenly over all distinct orderings.
pub fn from_polynomial(monomials: &[Monomial], dim: usize, order: usize, symmetrize: bool) -> Result<CubicalTensor> {
    let mut t = CubicalTensor::zeros(order, dim)?;
    for m in monomials {
        if m.factors.len() != order - 1 {
            return Err(Error::DegreeMismatch {
                expected: order - 1,
                actual: m.factors.len(),
            });
        }
        let placements = if symmetrize {
            distinct_permutations(&m.factors)
        } else {
            let mut f = m.factors.clone();
            f.sort_unstable();
            vec![f]
        };
        let share = m.coefficient / placements.len() as f64;
        for heads in placements {
            let mut idx = Vec::with_capacity(order);
            idx.push(m.target);
            idx.extend(heads);
            t.add_to(idx, share)?;
        }
    }
    Ok(t)
}
