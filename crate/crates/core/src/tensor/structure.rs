//! Structural predicates and decompositions of cubical tensors.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{distinct_permutations, CubicalTensor};
use crate::error::{Error, Result};

/// Largest dimension accepted by the exact (subset-enumerating) irreducibility test.
pub const EXACT_IRREDUCIBILITY_CAP: usize = 20;

/// `A = nonneg - shift * I` with `nonneg >= 0` and the smallest such `shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetzlerSplit {
    pub nonneg: CubicalTensor,
    pub shift: f64,
}

impl MetzlerSplit {
    pub fn reconstruct(&self) -> CubicalTensor {
        self.nonneg.shift_diagonal(-self.shift)
    }
}

pub fn is_metzler(a: &CubicalTensor) -> bool {
    first_negative_off_diagonal(a).is_none()
}

pub fn is_nonnegative(a: &CubicalTensor) -> bool {
    a.entries().all(|(_, v)| v >= 0.0)
}

fn first_negative_off_diagonal(a: &CubicalTensor) -> Option<(Vec<usize>, f64)> {
    a.entries()
        .find(|(idx, v)| *v < 0.0 && !CubicalTensor::is_diagonal_index(idx))
        .map(|(idx, v)| (idx.to_vec(), v))
}

pub fn metzler_split(a: &CubicalTensor) -> Result<MetzlerSplit> {
    if let Some((index, value)) = first_negative_off_diagonal(a) {
        return Err(Error::NotMetzler { index, value });
    }
    let min_diag = (0..a.dim()).map(|i| a.diag(i)).fold(f64::INFINITY, f64::min);
    let shift = (-min_diag).max(0.0);
    let nonneg = if shift == 0.0 {
        a.clone()
    } else {
        a.shift_diagonal(shift)
    };
    Ok(MetzlerSplit { nonneg, shift })
}

/// Every entry equals its value under any permutation of the full index tuple.
pub fn is_supersymmetric(a: &CubicalTensor) -> bool {
    a.entries().all(|(idx, v)| {
        distinct_permutations(idx).iter().all(|p| {
            let w = a.get(p);
            (w - v).abs() <= 1e-12 * v.abs().max(1.0)
        })
    })
}

/// Per-slice sum of absolute off-diagonal entries.
fn off_diagonal_radii(a: &CubicalTensor) -> Vec<f64> {
    let mut r = vec![0.0; a.dim()];
    for (idx, v) in a.entries() {
        if !CubicalTensor::is_diagonal_index(idx) {
            r[idx[0]] += v.abs();
        }
    }
    r
}

/// `|A[i..i]|` against the absolute off-diagonal sum of slice `i`, for all `i`.
pub fn is_diagonally_dominant(a: &CubicalTensor, strict: bool) -> bool {
    let radii = off_diagonal_radii(a);
    radii.iter().enumerate().all(|(i, &r)| {
        let d = a.diag(i).abs();
        if strict {
            d > r
        } else {
            d >= r
        }
    })
}

/// `M[i][j] = sum over j3..jk of T[i, j, j3, .., jk]`.
pub fn mode_sum_matrix(t: &CubicalTensor) -> Vec<Vec<f64>> {
    let n = t.dim();
    let mut m = vec![vec![0.0; n]; n];
    for (idx, v) in t.entries() {
        m[idx[0]][idx[1]] += v;
    }
    m
}

/// Strong connectivity of the directed pattern `i -> j` where some entry
/// `T[i, j, ..]` is nonzero. Irreducible tensors always pass; the converse
/// does not hold in general.
pub fn is_strongly_connected(t: &CubicalTensor) -> bool {
    let n = t.dim();
    if n == 1 {
        return true;
    }
    let mut g = DiGraph::<(), ()>::with_capacity(n, t.nnz());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, v) in t.entries() {
        if v != 0.0 && idx[0] != idx[1] && seen.insert((idx[0], idx[1])) {
            g.add_edge(nodes[idx[0]], nodes[idx[1]], ());
        }
    }
    tarjan_scc(&g).len() == 1
}

/// Exact irreducibility: no nonempty proper subset `I` such that every entry
/// with first index in `I` and all remaining indices outside `I` vanishes.
pub fn is_irreducible(t: &CubicalTensor) -> Result<bool> {
    let n = t.dim();
    if n > EXACT_IRREDUCIBILITY_CAP {
        return Err(Error::DimensionTooLarge {
            dim: n,
            cap: EXACT_IRREDUCIBILITY_CAP,
        });
    }
    if n == 1 {
        return Ok(true);
    }
    // per first index: distinct bitmasks of the trailing indices
    let mut heads: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (idx, v) in t.entries() {
        if v == 0.0 {
            continue;
        }
        let mask = idx[1..].iter().fold(0u32, |m, &j| m | (1 << j));
        heads[idx[0]].push(mask);
    }
    for h in &mut heads {
        h.sort_unstable();
        h.dedup();
    }
    let full = (1u32 << n) - 1;
    for subset in 1..full {
        let escapes = (0..n)
            .filter(|&i| subset & (1 << i) != 0)
            .any(|i| heads[i].iter().any(|&m| m & subset == 0));
        if !escapes {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GershgorinBounds {
    pub disks: Vec<Disk>,
    /// Real interval hull of the union of disks.
    pub union: (f64, f64),
}

impl GershgorinBounds {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.union.0 - slack && value <= self.union.1 + slack
    }
}

/// Disks centred at the diagonal entries with radius the absolute off-diagonal
/// slice sum. Only valid for supersymmetric tensors.
pub fn gershgorin_bounds(a: &CubicalTensor) -> Result<GershgorinBounds> {
    if !is_supersymmetric(a) {
        return Err(Error::SupersymmetryRequired);
    }
    let disks: Vec<Disk> = off_diagonal_radii(a)
        .into_iter()
        .enumerate()
        .map(|(i, radius)| Disk {
            center: a.diag(i),
            radius,
        })
        .collect();
    let lo = disks.iter().map(|d| d.center - d.radius).fold(f64::INFINITY, f64::min);
    let hi = disks
        .iter()
        .map(|d| d.center + d.radius)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GershgorinBounds { disks, union: (lo, hi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{sunflower_tensor, uniform_tensor};

    fn stable_quartic() -> CubicalTensor {
        uniform_tensor(4, 4, 1.0, -64.0).unwrap()
    }

    #[test]
    fn metzler_split_stable_quartic() {
        let s = metzler_split(&stable_quartic()).unwrap();
        assert_eq!(s.shift, 64.0);
        assert_eq!(s.nonneg, uniform_tensor(4, 4, 1.0, 0.0).unwrap());
        assert_eq!(s.reconstruct(), stable_quartic());
    }

    #[test]
    fn metzler_split_nonnegative_has_zero_shift() {
        let b = uniform_tensor(3, 3, 0.5, 2.0).unwrap();
        let s = metzler_split(&b).unwrap();
        assert_eq!(s.shift, 0.0);
        assert_eq!(s.nonneg, b);
    }

    #[test]
    fn metzler_split_rejects_negative_off_diagonal() {
        let mut a = stable_quartic();
        a.set(vec![0, 1, 2, 3], -0.1).unwrap();
        assert_eq!(
            metzler_split(&a).unwrap_err(),
            Error::NotMetzler {
                index: vec![0, 1, 2, 3],
                value: -0.1
            }
        );
        assert!(!is_metzler(&a));
    }

    #[test]
    fn implicit_zero_diagonal_limits_shift() {
        // one diagonal entry missing: min diagonal is 0, so no shift is needed
        let a = CubicalTensor::from_entries(2, 2, vec![(vec![0, 0], -3.0), (vec![0, 1], 1.0)]).unwrap();
        assert_eq!(metzler_split(&a).unwrap().shift, 3.0);
        let b = CubicalTensor::from_entries(2, 2, vec![(vec![0, 0], 3.0), (vec![0, 1], 1.0)]).unwrap();
        assert_eq!(metzler_split(&b).unwrap().shift, 0.0);
    }

    #[test]
    fn dominance_counts() {
        // 4^3 - 1 = 63 unit off-diagonal entries per slice
        assert!(is_metzler(&stable_quartic()));
        assert!(is_diagonally_dominant(&stable_quartic(), true));
        let unstable = uniform_tensor(4, 4, 1.0, -62.0).unwrap();
        assert!(!is_diagonally_dominant(&unstable, true));
        assert!(!is_diagonally_dominant(&unstable, false));
        let edge = uniform_tensor(4, 4, 1.0, -63.0).unwrap();
        assert!(!is_diagonally_dominant(&edge, true));
        assert!(is_diagonally_dominant(&edge, false));
    }

    #[test]
    fn supersymmetry() {
        assert!(is_supersymmetric(&CubicalTensor::identity(4, 3).unwrap()));
        assert!(is_supersymmetric(&stable_quartic()));
        let a = CubicalTensor::from_entries(3, 2, vec![(vec![0, 0, 1], 1.0)]).unwrap();
        assert!(!is_supersymmetric(&a));
    }

    #[test]
    fn mode_sum_stable_quartic_nonneg_part() {
        let b = uniform_tensor(4, 4, 1.0, 0.0).unwrap();
        let m = mode_sum_matrix(&b);
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if i == j { 15.0 } else { 16.0 });
            }
        }
    }

    #[test]
    fn mode_sum_identity_and_matrix() {
        let m = mode_sum_matrix(&CubicalTensor::identity(3, 2).unwrap());
        assert_eq!(m, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let a = CubicalTensor::from_entries(2, 2, vec![(vec![0, 1], 2.0), (vec![1, 1], -3.0)]).unwrap();
        assert_eq!(mode_sum_matrix(&a), vec![vec![0.0, 2.0], vec![0.0, -3.0]]);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&stable_quartic()).unwrap());
        // slice 0 supported only on {0}: I = {0} witnesses reducibility
        let a = CubicalTensor::from_entries(
            3,
            2,
            vec![(vec![0, 0, 0], 1.0), (vec![1, 0, 0], 1.0), (vec![1, 1, 1], 1.0)],
        )
        .unwrap();
        assert!(!is_irreducible(&a).unwrap());
        assert!(!is_strongly_connected(&a));
        assert!(!is_irreducible(&CubicalTensor::identity(3, 3).unwrap()).unwrap());
    }

    #[test]
    fn sunflower_is_strongly_connected_but_reducible() {
        let s = sunflower_tensor(4, 5, 1.0).unwrap();
        assert!(is_strongly_connected(&s));
        // the three non-core nodes of a petal form a closed subset
        assert!(!is_irreducible(&s).unwrap());
    }

    #[test]
    fn exact_check_is_capped() {
        let big = CubicalTensor::identity(2, 21).unwrap();
        assert_eq!(
            is_irreducible(&big).unwrap_err(),
            Error::DimensionTooLarge { dim: 21, cap: 20 }
        );
    }

    #[test]
    fn gershgorin_examples() {
        let g = gershgorin_bounds(&stable_quartic()).unwrap();
        assert!(g.disks.iter().all(|d| d.center == -64.0 && d.radius == 63.0));
        assert_eq!(g.union, (-127.0, -1.0));

        let g = gershgorin_bounds(&CubicalTensor::identity(3, 3).unwrap()).unwrap();
        assert!(g.disks.iter().all(|d| d.center == 1.0 && d.radius == 0.0));

        let g = gershgorin_bounds(&uniform_tensor(4, 4, 1.0, -62.0).unwrap()).unwrap();
        assert_eq!(g.union, (-125.0, 1.0));
        assert!(g.contains(1.0, 0.0));

        let a = CubicalTensor::from_entries(3, 2, vec![(vec![0, 0, 1], 1.0)]).unwrap();
        assert_eq!(gershgorin_bounds(&a).unwrap_err(), Error::SupersymmetryRequired);
    }
}
