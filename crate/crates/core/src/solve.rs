//! Positive solutions of M-tensor equations `(eta I - B) x^{k-1} = b`.
//!
//! The fixed-point map `x <- ((B x^{k-1} + b) / eta)^{[1/(k-1)]}` is monotone
//! in `x` and keeps every iterate positive. Started from `(b / eta)^{[1/(k-1)]}`
//! it increases towards the unique positive solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{perron_metzler, PowerConfig};
use crate::tensor::{is_diagonally_dominant, is_strongly_connected, linf, metzler_split, CubicalTensor, MetzlerSplit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Absolute residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Positive and boundary equilibria of `x' = diag(x)(A x^{k-1} + b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LvEquilibria {
    pub positive: SolveReport,
    pub boundary: Vec<f64>,
}

/// `|aneg x^{k-1} - b|_inf`.
pub fn mtensor_residual(aneg: &CubicalTensor, b: &[f64], x: &[f64]) -> Result<f64> {
    let ax = aneg.tv_product(x)?;
    let d: Vec<f64> = ax.iter().zip(b).map(|(u, v)| u - v).collect();
    Ok(linf(&d))
}

/// Range `(lo, hi)` of `(B x^{k-1} + b)_i / (eta x_i^{k-1})` over `i`, with
/// `aneg = eta I - B` the minimal split. Equals `(1, 1)` exactly at the
/// solution; along the fixed-point iteration `max(hi, 1)` never increases and
/// `min(lo, 1)` never decreases.
pub fn fixed_point_bracket(aneg: &CubicalTensor, b: &[f64], x: &[f64]) -> Result<(f64, f64)> {
    let split = metzler_split(&aneg.scale(-1.0))?;
    let eta = split.shift;
    let p = (aneg.order() - 1) as i32;
    let bx = split.nonneg.tv_product(x)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..x.len() {
        let r = (bx[i] + b[i]) / (eta * x[i].powi(p));
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Checks that `aneg` is a nonsingular M-tensor and returns the split of `-aneg`.
/// Strongly connected inputs are tested by the sign of the Perron value; other
/// inputs need strict diagonal dominance with a positive diagonal.
pub fn check_nonsingular_m(aneg: &CubicalTensor) -> Result<MetzlerSplit> {
    let neg = aneg.scale(-1.0);
    let split = metzler_split(&neg).map_err(|e| Error::NotMTensor {
        reason: format!("negation is not Metzler ({e})"),
    })?;
    let dominant = is_diagonally_dominant(aneg, true) && (0..aneg.dim()).all(|i| aneg.diag(i) > 0.0);
    if dominant {
        return Ok(split);
    }
    if is_strongly_connected(aneg) {
        let pair = perron_metzler(&neg, &PowerConfig::default()).map_err(|e| Error::NotMTensor {
            reason: format!("Perron value unavailable ({e})"),
        })?;
        if pair.value < 0.0 {
            return Ok(split);
        }
        return Err(Error::NotMTensor {
            reason: format!("Perron value of the negation is {} >= 0", pair.value),
        });
    }
    Err(Error::NotMTensor {
        reason: "reducible and not strictly diagonally dominant".into(),
    })
}

fn check_rhs(aneg: &CubicalTensor, b: &[f64]) -> Result<()> {
    if b.len() != aneg.dim() {
        return Err(Error::DimensionMismatch {
            expected: aneg.dim(),
            actual: b.len(),
        });
    }
    if let Some((index, &value)) = b.iter().enumerate().find(|(_, v)| v.is_nan() || **v <= 0.0) {
        return Err(Error::NotPositiveRhs { index, value });
    }
    Ok(())
}

/// Solves `aneg x^{k-1} = b` for the unique positive `x`.
pub fn solve_mtensor(aneg: &CubicalTensor, b: &[f64], cfg: &SolveConfig) -> Result<SolveReport> {
    solve_mtensor_inner(aneg, b, None, cfg)
}

/// As [`solve_mtensor`], starting the iteration from a caller-supplied positive vector.
pub fn solve_mtensor_from(aneg: &CubicalTensor, b: &[f64], start: &[f64], cfg: &SolveConfig) -> Result<SolveReport> {
    if start.len() != aneg.dim() {
        return Err(Error::DimensionMismatch {
            expected: aneg.dim(),
            actual: start.len(),
        });
    }
    if start.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInitialState(format!("start {start:?} is not positive")));
    }
    solve_mtensor_inner(aneg, b, Some(start), cfg)
}

fn solve_mtensor_inner(
    aneg: &CubicalTensor,
    b: &[f64],
    start: Option<&[f64]>,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    check_rhs(aneg, b)?;
    let split = check_nonsingular_m(aneg)?;
    let eta = split.shift;
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::NotMTensor {
            reason: "diagonal is not positive".into(),
        });
    }
    let root = 1.0 / (aneg.order() - 1) as f64;
    let step = |x: &[f64]| -> Result<Vec<f64>> {
        let bx = split.nonneg.tv_product(x)?;
        Ok(bx.iter().zip(b).map(|(u, v)| ((u + v) / eta).powf(root)).collect())
    };
    let mut x: Vec<f64> = match start {
        Some(s) => s.to_vec(),
        None => b.iter().map(|v| (v / eta).powf(root)).collect(),
    };
    let mut residual = mtensor_residual(aneg, b, &x)?;
    for iter in 0..=cfg.max_iter {
        if residual <= cfg.tol {
            return Ok(SolveReport {
                solution: x,
                residual,
                iterations: iter,
                method: SolveMethod::FixedPoint,
            });
        }
        if iter == cfg.max_iter {
            break;
        }
        x = step(&x)?;
        residual = mtensor_residual(aneg, b, &x)?;
    }
    Err(Error::SolverMaxIter {
        iterations: cfg.max_iter,
        residual,
        last: x,
    })
}

/// Positive equilibrium of `x' = A x^{k-1} + b`.
pub fn equilibrium_affine(a: &CubicalTensor, b: &[f64], cfg: &SolveConfig) -> Result<SolveReport> {
    solve_mtensor(&a.scale(-1.0), b, cfg)
}

/// Positive equilibrium of `x' = diag(x)(A x^{k-1} + b)` plus the origin.
pub fn equilibrium_lv(a: &CubicalTensor, b: &[f64], cfg: &SolveConfig) -> Result<LvEquilibria> {
    let positive = equilibrium_affine(a, b, cfg)?;
    Ok(LvEquilibria {
        positive,
        boundary: vec![0.0; a.dim()],
    })
}

/// Some `y > 0` with `(-A) y^{k-1} > 0`: the solution of `(-A) y^{k-1} = 1`.
pub fn find_positive_vector(a: &CubicalTensor) -> Result<Vec<f64>> {
    let ones = vec![1.0; a.dim()];
    Ok(solve_mtensor(&a.scale(-1.0), &ones, &SolveConfig::default())?.solution)
}
