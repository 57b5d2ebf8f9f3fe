use crate::error::{Error, Result};
use crate::tensor::CubicalTensor;

/// Layered form of `A (x - a)^{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedExpansion {
    /// Orders `k, k-1, .., 2`; lower layers that vanish identically are omitted.
    pub layers: Vec<CubicalTensor>,
    pub constant: Vec<f64>,
}

/// Expands `A (x - a)^{k-1}` into `sum_j B_j x^{j-1} + c`.
///
/// Each stored entry's product `prod_j (x_{h_j} - a_{h_j})` is expanded over
/// subsets of its trailing indices: retained indices keep their positions in
/// a lower-order tuple, and each dropped index contributes a factor `-a_h`.
pub fn expand_shifted(a: &CubicalTensor, shift: &[f64]) -> Result<ShiftedExpansion> {
    let n = a.dim();
    if shift.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: shift.len(),
        });
    }
    let k = a.order();
    let heads = k - 1;
    // layers[r] has order r + 1 for r retained heads, r >= 1
    let mut layers: Vec<CubicalTensor> = (0..=heads)
        .map(|r| CubicalTensor::zeros((r + 1).max(2), n))
        .collect::<Result<_>>()?;
    let mut constant = vec![0.0; n];
    for (idx, v) in a.entries() {
        let i = idx[0];
        let h = &idx[1..];
        for subset in 0u32..(1 << heads) {
            let mut coef = v;
            let mut kept = Vec::with_capacity(k);
            kept.push(i);
            for (pos, &node) in h.iter().enumerate() {
                if subset & (1 << pos) != 0 {
                    kept.push(node);
                } else {
                    coef *= -shift[node];
                }
            }
            let retained = kept.len() - 1;
            if retained == 0 {
                constant[i] += coef;
            } else {
                layers[retained].add_to(kept, coef)?;
            }
        }
    }
    let mut out: Vec<CubicalTensor> = layers
        .into_iter()
        .skip(1)
        .rev()
        .enumerate()
        .filter(|(pos, t)| *pos == 0 || t.nnz() > 0)
        .map(|(_, t)| t)
        .collect();
    if out.is_empty() {
        out.push(a.clone());
    }
    Ok(ShiftedExpansion { layers: out, constant })
}
