use super::{distinct_permutations, CubicalTensor};
use crate::error::{Error, Result};

/// Every off-diagonal tuple set to `off_diag`, every diagonal tuple to `diag`.
pub fn uniform_tensor(order: usize, dim: usize, off_diag: f64, diag: f64) -> Result<CubicalTensor> {
    let mut t = CubicalTensor::zeros(order, dim)?;
    let total = dim
        .checked_pow(order as u32)
        .ok_or(Error::InvalidShape { order, dim })?;
    let mut idx = vec![0usize; order];
    for _ in 0..total {
        let v = if CubicalTensor::is_diagonal_index(&idx) {
            diag
        } else {
            off_diag
        };
        t.set(idx.clone(), v)?;
        // odometer increment, last component fastest
        for c in idx.iter_mut().rev() {
            *c += 1;
            if *c < dim {
                break;
            }
            *c = 0;
        }
    }
    Ok(t)
}

/// Adds `weight` at every permutation of the node list (undirected hyperedge,
/// raw weight on each permutation).
pub fn add_undirected_hyperedge(t: &mut CubicalTensor, nodes: &[usize], weight: f64) -> Result<()> {
    if nodes.len() != t.order() {
        return Err(Error::IndexLength {
            index: nodes.to_vec(),
            expected: t.order(),
            actual: nodes.len(),
        });
    }
    for p in distinct_permutations(nodes) {
        t.add_to(p, weight)?;
    }
    Ok(())
}

/// k-uniform sunflower with a singleton core (node 0) and `petals` petals.
/// Petal `p` holds the core plus nodes `1 + p(k-1) .. 1 + (p+1)(k-1)`, so
/// `n = 1 + petals * (k - 1)`.
pub fn sunflower_tensor(order: usize, petals: usize, weight: f64) -> Result<CubicalTensor> {
    if order < 2 || petals < 1 {
        return Err(Error::InvalidShape {
            order,
            dim: 1 + petals * order.saturating_sub(1),
        });
    }
    let dim = 1 + petals * (order - 1);
    let mut t = CubicalTensor::zeros(order, dim)?;
    for p in 0..petals {
        let mut nodes = vec![0];
        nodes.extend((0..order - 1).map(|j| 1 + p * (order - 1) + j));
        add_undirected_hyperedge(&mut t, &nodes, weight)?;
    }
    Ok(t)
}
