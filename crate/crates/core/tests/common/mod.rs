#![allow(dead_code)]

use hypermetzler::tensor::{add_undirected_hyperedge, is_strongly_connected, uniform_tensor, CubicalTensor};
use rand::Rng;

pub fn stable_quartic() -> CubicalTensor {
    uniform_tensor(4, 4, 1.0, -64.0).unwrap()
}

pub fn unstable_quartic() -> CubicalTensor {
    uniform_tensor(4, 4, 1.0, -62.0).unwrap()
}

pub fn control_closed_loop() -> CubicalTensor {
    uniform_tensor(4, 4, 0.5, -62.0).unwrap()
}

pub fn stable_matrix() -> CubicalTensor {
    uniform_tensor(2, 4, 1.0, -5.0).unwrap()
}

pub fn sis_triadic() -> CubicalTensor {
    uniform_tensor(3, 4, 0.01, 0.0).unwrap()
}

/// Nondecreasing index tuples of length `k` over `0..n`.
pub fn multisets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        let mut pos = k;
        while pos > 0 && cur[pos - 1] == n - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        let v = cur[pos - 1] + 1;
        for c in &mut cur[pos - 1..] {
            *c = v;
        }
    }
}

/// Random supersymmetric nonnegative off-diagonal pattern with hyperedge
/// probability `p`, weights in `(0, 1]`.
pub fn random_symmetric_offdiag<R: Rng>(rng: &mut R, k: usize, n: usize, p: f64) -> CubicalTensor {
    let mut t = CubicalTensor::zeros(k, n).unwrap();
    for m in multisets(k, n) {
        if CubicalTensor::is_diagonal_index(&m) || rng.gen::<f64>() >= p {
            continue;
        }
        let w = 1.0 - rng.gen::<f64>();
        add_undirected_hyperedge(&mut t, &m, w).unwrap();
    }
    t
}

/// Random nonnegative tensor (not symmetric) with entry density `p`.
pub fn random_nonnegative<R: Rng>(rng: &mut R, k: usize, n: usize, p: f64) -> CubicalTensor {
    let mut t = CubicalTensor::zeros(k, n).unwrap();
    let total = n.pow(k as u32);
    for flat in 0..total {
        if rng.gen::<f64>() >= p {
            continue;
        }
        let mut idx = Vec::with_capacity(k);
        let mut r = flat;
        for _ in 0..k {
            idx.push(r % n);
            r /= n;
        }
        t.set(idx, 1.0 - rng.gen::<f64>()).unwrap();
    }
    t
}

/// Draws until the tensor is strongly connected.
pub fn strongly_connected<R: Rng, F: FnMut(&mut R) -> CubicalTensor>(rng: &mut R, mut draw: F) -> CubicalTensor {
    loop {
        let t = draw(rng);
        if is_strongly_connected(&t) {
            return t;
        }
    }
}

pub fn off_diagonal_radius(t: &CubicalTensor) -> Vec<f64> {
    let mut r = vec![0.0; t.dim()];
    for (idx, v) in t.entries() {
        if !CubicalTensor::is_diagonal_index(idx) {
            r[idx[0]] += v.abs();
        }
    }
    r
}
