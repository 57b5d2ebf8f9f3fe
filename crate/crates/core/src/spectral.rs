//! Perron-H-eigenpairs of nonnegative and Metzler tensors.
//!
//! For a nonnegative tensor `B` the shifted power iteration runs on `B + I`:
//!
//! ```text
//! y = (B + I) x^{k-1},   x <- y^{[1/(k-1)]} / |y^{[1/(k-1)]}|_1
//! ```
//!
//! The ratios `y_i / x_i^{k-1}` bracket `rho(B) + 1` from below and above at
//! every step; iteration stops once the relative bracket width drops under
//! `tol`. The identity shift leaves the eigenvector unchanged and makes the
//! iteration converge for every weakly irreducible tensor.
//!
//! Metzler tensors are split as `A = B - s I` and share `B`'s eigenvector, with
//! Perron value `rho(B) - s`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{is_nonnegative, is_strongly_connected, linf, metzler_split, CubicalTensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Skip the strong-connectivity gate.
    pub assume_irreducible: bool,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            assume_irreducible: false,
        }
    }
}

impl PowerConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    /// Entrywise positive, `|vector|_1 = 1`.
    pub vector: Vec<f64>,
    /// `|A x^{k-1} - value * x^{[k-1]}|_inf` at the stored pair.
    pub residual: f64,
    pub iterations: usize,
    /// Final bracket on `value`.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityResult {
    pub scores: Vec<f64>,
    pub eigenvalue: f64,
    pub order: usize,
}

/// `|A x^{k-1} - lambda x^{[k-1]}|_inf`.
pub fn eigen_residual(a: &CubicalTensor, lambda: f64, x: &[f64]) -> Result<f64> {
    let ax = a.tv_product(x)?;
    let p = (a.order() - 1) as i32;
    Ok(ax
        .iter()
        .zip(x)
        .map(|(v, xi)| (v - lambda * xi.powi(p)).abs())
        .fold(0.0, f64::max))
}

struct RawPerron {
    rho: f64,
    vector: Vec<f64>,
    iterations: usize,
    bracket: (f64, f64),
}

fn power_iterate(b: &CubicalTensor, cfg: &PowerConfig) -> Result<RawPerron> {
    let n = b.dim();
    if n == 1 {
        let v = b.diag(0);
        return Ok(RawPerron {
            rho: v,
            vector: vec![1.0],
            iterations: 0,
            bracket: (v, v),
        });
    }
    let p = (b.order() - 1) as i32;
    let root = 1.0 / (b.order() - 1) as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut bracket = (f64::NEG_INFINITY, f64::INFINITY);
    for iter in 1..=cfg.max_iter {
        let mut y = b.tv_product(&x)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (yi, xi) in y.iter_mut().zip(&x) {
            let xp = xi.powi(p);
            *yi += xp;
            let r = *yi / xp;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        // shift back by the added identity
        bracket = (lo - 1.0, hi - 1.0);
        if !(lo.is_finite() && hi.is_finite()) {
            break;
        }
        if (hi - lo) / hi.abs().max(1.0) < cfg.tol {
            return Ok(RawPerron {
                rho: 0.5 * (bracket.0 + bracket.1),
                vector: x,
                iterations: iter,
                bracket,
            });
        }
        let mut next: Vec<f64> = y.iter().map(|v| v.powf(root)).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        x = next;
    }
    Err(Error::MaxIterExceeded {
        iterations: cfg.max_iter,
        lower: bracket.0,
        upper: bracket.1,
    })
}

fn gate(t: &CubicalTensor, cfg: &PowerConfig) -> Result<()> {
    if !cfg.assume_irreducible && !is_strongly_connected(t) {
        return Err(Error::NotIrreducible);
    }
    Ok(())
}

/// Perron pair `(rho(B), x > 0)` of a nonnegative tensor.
pub fn perron_nonnegative(b: &CubicalTensor, cfg: &PowerConfig) -> Result<EigenPair> {
    if let Some((idx, v)) = b.entries().find(|(_, v)| *v < 0.0) {
        return Err(Error::NotNonnegative {
            index: idx.to_vec(),
            value: v,
        });
    }
    gate(b, cfg)?;
    let raw = power_iterate(b, cfg)?;
    let residual = eigen_residual(b, raw.rho, &raw.vector)?;
    Ok(EigenPair {
        value: raw.rho,
        vector: raw.vector,
        residual,
        iterations: raw.iterations,
        bracket: raw.bracket,
    })
}

/// `A - d I` with `d` the smallest diagonal entry, and `d`. Nonnegative for
/// Metzler `A`, and the same tensor for `A` and `A + c I`.
fn canonical_nonneg(a: &CubicalTensor) -> Result<(CubicalTensor, f64)> {
    metzler_split(a)?;
    let d = (0..a.dim()).map(|i| a.diag(i)).fold(f64::INFINITY, f64::min);
    let mut b = a.shift_diagonal(-d);
    for i in 0..a.dim() {
        // rounding in the subtraction must not leave a tiny negative diagonal
        if b.diag(i) < 0.0 {
            b.set(vec![i; a.order()], 0.0)?;
        }
    }
    Ok((b, d))
}

/// Perron-H-eigenpair of a Metzler tensor: `rho(B) + d` for `A = B + d I`,
/// where `d` is the smallest diagonal entry of `A`.
pub fn perron_metzler(a: &CubicalTensor, cfg: &PowerConfig) -> Result<EigenPair> {
    let (b, d) = canonical_nonneg(a)?;
    gate(a, cfg)?;
    let raw = power_iterate(&b, cfg)?;
    let value = raw.rho + d;
    let residual = eigen_residual(a, value, &raw.vector)?;
    Ok(EigenPair {
        value,
        vector: raw.vector,
        residual,
        iterations: raw.iterations,
        bracket: (raw.bracket.0 + d, raw.bracket.1 + d),
    })
}

/// Upper bound on the Perron value of any Metzler tensor, reducible or not,
/// from the Collatz-Wielandt ratio along the power iterates. Equals the
/// Perron value (within `tol`) when the iteration converges.
pub fn perron_upper_bound(a: &CubicalTensor, cfg: &PowerConfig) -> Result<f64> {
    let (b, d) = canonical_nonneg(a)?;
    let b = &b;
    let n = b.dim();
    let p = (b.order() - 1) as i32;
    let root = 1.0 / (b.order() - 1) as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut best = f64::INFINITY;
    for _ in 0..cfg.max_iter.max(1) {
        let mut y = b.tv_product(&x)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (yi, xi) in y.iter_mut().zip(&x) {
            let xp = xi.powi(p);
            *yi += xp;
            let r = *yi / xp;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if !hi.is_finite() {
            break;
        }
        best = best.min(hi - 1.0);
        if (hi - lo) / hi.abs().max(1.0) < cfg.tol {
            break;
        }
        let mut next: Vec<f64> = y.iter().map(|v| v.powf(root)).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        if next.iter().any(|&v| v <= 0.0) {
            break;
        }
        x = next;
    }
    Ok(best + d)
}

/// H-eigenvector centrality of a strongly connected uniform hypergraph.
/// Metzler input is reduced to its nonnegative part, which has the same
/// eigenvector; the reported eigenvalue is that of the input tensor.
pub fn hec_centrality(t: &CubicalTensor) -> Result<CentralityResult> {
    let cfg = PowerConfig::default();
    if !is_strongly_connected(t) {
        return Err(Error::NotIrreducible);
    }
    let pair = if is_nonnegative(t) {
        perron_nonnegative(t, &cfg)?
    } else {
        perron_metzler(t, &cfg)?
    };
    Ok(CentralityResult {
        scores: pair.vector,
        eigenvalue: pair.value,
        order: t.order(),
    })
}

/// Largest absolute componentwise difference of two vectors.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    linf(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{sunflower_tensor, uniform_tensor};

    #[test]
    fn stable_quartic_nonneg_part() {
        let b = uniform_tensor(4, 4, 1.0, 0.0).unwrap();
        let e = perron_nonnegative(&b, &PowerConfig::default()).unwrap();
        assert!((e.value - 63.0).abs() < 1e-9);
        assert!(max_abs_diff(&e.vector, &[0.25; 4]) < 1e-12);
    }

    #[test]
    fn identity_keeps_start_vector() {
        let id = CubicalTensor::identity(3, 3).unwrap();
        let e = perron_nonnegative(
            &id,
            &PowerConfig {
                assume_irreducible: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&e.vector, &[1.0 / 3.0; 3]) < 1e-15);
        // without the override the diagonal pattern is rejected
        assert_eq!(
            perron_nonnegative(&id, &PowerConfig::default()).unwrap_err(),
            Error::NotIrreducible
        );
    }

    #[test]
    fn sunflower_closed_form() {
        // (k-1)! r^{1/k} with k = 4, r = 5
        let s = sunflower_tensor(4, 5, 1.0).unwrap();
        let e = perron_nonnegative(&s, &PowerConfig::default()).unwrap();
        let expected = 6.0 * 5f64.powf(0.25);
        assert!((e.value - expected).abs() < 1e-8, "{}", e.value);
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn metzler_examples() {
        let cfg = PowerConfig::default();
        let a = uniform_tensor(4, 4, 1.0, -64.0).unwrap();
        let e = perron_metzler(&a, &cfg).unwrap();
        assert!((e.value + 1.0).abs() < 1e-9);
        assert!(max_abs_diff(&e.vector, &[0.25; 4]) < 1e-12);

        let unstable = uniform_tensor(4, 4, 1.0, -62.0).unwrap();
        assert!((perron_metzler(&unstable, &cfg).unwrap().value - 1.0).abs() < 1e-9);

        let closed = uniform_tensor(4, 4, 0.5, -62.0).unwrap();
        assert!((perron_metzler(&closed, &cfg).unwrap().value + 30.5).abs() < 1e-9);
    }

    #[test]
    fn residual_examples() {
        let a = uniform_tensor(4, 4, 1.0, -64.0).unwrap();
        assert!(eigen_residual(&a, -1.0, &[0.25; 4]).unwrap() < 1e-12);
        let r = eigen_residual(&a, 0.0, &[0.25; 4]).unwrap();
        assert!((r - 1.0 / 64.0).abs() < 1e-15);
        let id = CubicalTensor::identity(3, 2).unwrap();
        assert_eq!(eigen_residual(&id, 1.0, &[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn single_node_degenerate() {
        let a = CubicalTensor::from_entries(3, 1, vec![(vec![0, 0, 0], -2.5)]).unwrap();
        let e = perron_metzler(&a, &PowerConfig::default()).unwrap();
        assert_eq!(e.value, -2.5);
        assert_eq!(e.vector, vec![1.0]);
    }

    #[test]
    fn rejects_wrong_signs() {
        let cfg = PowerConfig::default();
        let a = uniform_tensor(3, 2, 1.0, -3.0).unwrap();
        assert!(matches!(
            perron_nonnegative(&a, &cfg),
            Err(Error::NotNonnegative { .. })
        ));
        let mut m = a.clone();
        m.set(vec![0, 1, 1], -1.0).unwrap();
        assert!(matches!(perron_metzler(&m, &cfg), Err(Error::NotMetzler { .. })));
    }

    #[test]
    fn max_iter_reports_bracket() {
        let s = sunflower_tensor(4, 5, 1.0).unwrap();
        let cfg = PowerConfig {
            max_iter: 2,
            ..Default::default()
        };
        match perron_nonnegative(&s, &cfg) {
            Err(Error::MaxIterExceeded { lower, upper, .. }) => {
                let rho = 6.0 * 5f64.powf(0.25);
                assert!(lower <= rho + 1e-9 && rho <= upper + 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn centrality_examples() {
        let s = sunflower_tensor(4, 5, 1.0).unwrap();
        let c = hec_centrality(&s).unwrap();
        let ratio = c.scores[0] / c.scores[1];
        assert!((ratio - 5f64.powf(0.25)).abs() < 1e-6);
        assert!((c.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let u = hec_centrality(&uniform_tensor(3, 4, 1.0, 0.0).unwrap()).unwrap();
        assert!(max_abs_diff(&u.scores, &[0.25; 4]) < 1e-12);

        let a = uniform_tensor(4, 4, 1.0, -64.0).unwrap();
        let b = uniform_tensor(4, 4, 1.0, 0.0).unwrap();
        let ca = hec_centrality(&a).unwrap();
        let cb = hec_centrality(&b).unwrap();
        assert!(max_abs_diff(&ca.scores, &cb.scores) < 1e-12);
        assert!((ca.eigenvalue + 1.0).abs() < 1e-9);

        assert_eq!(
            hec_centrality(&CubicalTensor::identity(3, 3).unwrap()).unwrap_err(),
            Error::NotIrreducible
        );
    }

    #[test]
    fn upper_bound_on_reducible_diagonal() {
        let d = CubicalTensor::diagonal(4, &[-62.0, -61.0, -70.0]).unwrap();
        let ub = perron_upper_bound(&d, &PowerConfig::default()).unwrap();
        assert!((ub + 61.0).abs() < 1e-12);
    }
}
