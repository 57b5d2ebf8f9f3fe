//! State feedback `u = q x^{[k-1]}` or `u = D x^{k-1}` for `x' = A x^{k-1} + u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{perron_metzler, perron_upper_bound, PowerConfig};
use crate::tensor::{distinct_permutations, is_strongly_connected, metzler_split, CubicalTensor};

/// Default bisection tolerance on the gain scale.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-12;

/// Entries of the nonnegative part that the tensor gain may act on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "tuples", rename_all = "snake_case")]
pub enum Mask {
    AllOffDiagonal,
    /// Exactly these off-diagonal index tuples.
    Entries(Vec<Vec<usize>>),
    /// Every permutation of each listed tuple, i.e. the whole hyperedge.
    RemoveHyperedges(Vec<Vec<usize>>),
}

impl Mask {
    fn check_tuple(t: &[usize], a: &CubicalTensor) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidMask {
                index: t.to_vec(),
                reason: reason.into(),
            })
        };
        if t.len() != a.order() {
            return bad("wrong length");
        }
        if t.iter().any(|&i| i >= a.dim()) {
            return bad("index out of range");
        }
        if CubicalTensor::is_diagonal_index(t) {
            return bad("diagonal entries cannot be masked");
        }
        Ok(())
    }

    /// `B` restricted to the mask.
    pub fn restrict(&self, b: &CubicalTensor) -> Result<CubicalTensor> {
        let mut out = CubicalTensor::zeros(b.order(), b.dim())?;
        match self {
            Mask::AllOffDiagonal => {
                for (idx, v) in b.entries() {
                    if !CubicalTensor::is_diagonal_index(idx) {
                        out.set(idx.to_vec(), v)?;
                    }
                }
            }
            Mask::Entries(ts) => {
                for t in ts {
                    Self::check_tuple(t, b)?;
                    out.set(t.clone(), b.get(t))?;
                }
            }
            Mask::RemoveHyperedges(ts) => {
                for t in ts {
                    Self::check_tuple(t, b)?;
                    for p in distinct_permutations(t) {
                        let v = b.get(&p);
                        out.set(p, v)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum GainKind {
    ScalarDiag { q: f64 },
    TensorGain { d: CubicalTensor, mask: Mask, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainDesign {
    pub kind: GainKind,
    pub open_loop_value: f64,
    /// Perron value of the closed loop, or an upper bound on it when the
    /// closed loop is not strongly connected.
    pub closed_loop_value: f64,
    pub margin: f64,
    /// `|q|`, or the sum of absolute entries of `D`.
    pub cost: f64,
    /// The open loop already met the margin.
    pub unnecessary: bool,
}

fn check_margin(margin: f64) -> Result<()> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::InvalidConfig(format!("margin must be >= 0, got {margin}")));
    }
    Ok(())
}

/// `q = -(lambda(A) + margin)`, so that `A + q I` has Perron value `-margin`.
pub fn design_scalar_gain(a: &CubicalTensor, margin: f64) -> Result<GainDesign> {
    check_margin(margin)?;
    let cfg = PowerConfig::default();
    let open = perron_metzler(a, &cfg)?.value;
    let q = -(open + margin);
    let closed = perron_metzler(&a.shift_diagonal(q), &cfg)?.value;
    Ok(GainDesign {
        kind: GainKind::ScalarDiag { q },
        open_loop_value: open,
        closed_loop_value: closed,
        margin,
        cost: q.abs(),
        unnecessary: q >= 0.0,
    })
}

fn loop_value(t: &CubicalTensor, cfg: &PowerConfig) -> Result<f64> {
    if is_strongly_connected(t) {
        Ok(perron_metzler(t, cfg)?.value)
    } else {
        perron_upper_bound(t, cfg)
    }
}

/// Smallest `alpha` in `[0, 1]` (within `tol`) such that
/// `A - alpha B|mask` has Perron value at most `-margin`. The value is
/// non-increasing in `alpha` because the nonnegative part only shrinks.
pub fn design_tensor_gain(a: &CubicalTensor, mask: &Mask, margin: f64, tol: f64) -> Result<GainDesign> {
    check_margin(margin)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let cfg = PowerConfig::default();
    let split = metzler_split(a)?;
    let open = perron_metzler(a, &cfg)?.value;
    let masked = mask.restrict(&split.nonneg)?;
    let closed_at = |alpha: f64| -> Result<(CubicalTensor, f64)> {
        let t = a.sub(&masked.scale(alpha))?;
        let v = loop_value(&t, &cfg)?;
        Ok((t, v))
    };
    let finish = |alpha: f64, value: f64| GainDesign {
        kind: GainKind::TensorGain {
            d: masked.scale(-alpha),
            mask: mask.clone(),
            alpha,
        },
        open_loop_value: open,
        closed_loop_value: value,
        margin,
        cost: alpha * masked.l1_norm(),
        unnecessary: alpha == 0.0,
    };
    if open <= -margin {
        return Ok(finish(0.0, open));
    }
    let (_, full) = closed_at(1.0)?;
    if full > -margin {
        return Err(Error::InfeasibleMask {
            closed_loop_value: full,
        });
    }
    let (mut lo, mut hi, mut hi_value) = (0.0, 1.0, full);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (_, v) = closed_at(mid)?;
        if v <= -margin {
            hi = mid;
            hi_value = v;
        } else {
            lo = mid;
        }
    }
    Ok(finish(hi, hi_value))
}

/// `A + q I` or `A + D`.
pub fn closed_loop(a: &CubicalTensor, design: &GainDesign) -> Result<CubicalTensor> {
    match &design.kind {
        GainKind::ScalarDiag { q } => Ok(a.shift_diagonal(*q)),
        GainKind::TensorGain { d, .. } => a.add(d),
    }
}
