//! Stability certificates for `x' = sum_i A_i x^{k_i - 1}` with Metzler layers
//! and for the simplicial SIS model.

use serde::Serialize;

use crate::dynamics::SisModel;
use crate::error::{Error, Result};
use crate::solve::{check_nonsingular_m, find_positive_vector};
use crate::spectral::{max_abs_diff, perron_metzler, EigenPair, PowerConfig};
use crate::tensor::{is_diagonally_dominant, is_supersymmetric, CubicalTensor};

/// Half-width of the band around zero in which eigenvalue tests are silent.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Componentwise tolerance for comparing normalized Perron vectors.
pub const SHARED_VECTOR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    GloballyStable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    PerronSign,
    SharedEigenvector,
    CommonPositiveVector,
    DiagDominance,
    OnesVector,
    SisUniform,
    SisSumCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
}

impl Witness {
    fn eigen(p: &EigenPair) -> Self {
        Self {
            value: Some(p.value),
            vector: Some(p.vector.clone()),
        }
    }

    fn vector(v: Vec<f64>) -> Self {
        Self {
            value: None,
            vector: Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub verdict: Verdict,
    pub method: Method,
    pub margin: f64,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl StabilityCertificate {
    fn inconclusive(method: Method, margin: f64, note: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::Inconclusive,
            method,
            margin,
            witness: None,
            diagnostics: vec![note.into()],
        }
    }

    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::GloballyStable
    }
}

/// Sign test on the Perron value of an irreducible Metzler tensor.
pub fn certify_uniform(a: &CubicalTensor, tol: f64) -> Result<StabilityCertificate> {
    let pair = perron_metzler(a, &PowerConfig::default())?;
    let v = pair.value;
    let verdict = if v < -tol {
        Verdict::GloballyStable
    } else if v > tol {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    };
    let diagnostics = if verdict == Verdict::Inconclusive {
        vec![format!("Perron value {v} lies within +-{tol} of zero")]
    } else {
        Vec::new()
    };
    Ok(StabilityCertificate {
        verdict,
        method: Method::PerronSign,
        margin: v.abs(),
        witness: Some(Witness::eigen(&pair)),
        diagnostics,
    })
}

/// Gershgorin shortcut: supersymmetric, strictly diagonally dominant and
/// negative on the diagonal. Never reports instability.
pub fn quick_check_diag_dominant(a: &CubicalTensor) -> StabilityCertificate {
    let method = Method::DiagDominance;
    if !is_supersymmetric(a) {
        return StabilityCertificate::inconclusive(method, 0.0, "not supersymmetric");
    }
    if (0..a.dim()).any(|i| a.diag(i) >= 0.0) {
        return StabilityCertificate::inconclusive(method, 0.0, "diagonal not negative");
    }
    if !is_diagonally_dominant(a, true) {
        return StabilityCertificate::inconclusive(method, 0.0, "not strictly diagonally dominant");
    }
    let mut radius = vec![0.0; a.dim()];
    for (idx, v) in a.entries() {
        if !CubicalTensor::is_diagonal_index(idx) {
            radius[idx[0]] += v.abs();
        }
    }
    let margin = (0..a.dim())
        .map(|i| a.diag(i).abs() - radius[i])
        .fold(f64::INFINITY, f64::min);
    StabilityCertificate {
        verdict: Verdict::GloballyStable,
        method,
        margin,
        witness: None,
        diagnostics: Vec::new(),
    }
}

fn check_layers(layers: &[CubicalTensor]) -> Result<usize> {
    let first = layers.first().ok_or_else(|| Error::InvalidModel("no layers".into()))?;
    let n = first.dim();
    for l in layers {
        if l.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: l.dim(),
            });
        }
    }
    Ok(n)
}

/// `min_i min_j ((-A_i) y^{k_i-1})_j`.
pub fn image_margin(layers: &[CubicalTensor], y: &[f64]) -> Result<f64> {
    let mut m = f64::INFINITY;
    for l in layers {
        for v in l.tv_product(y)? {
            m = m.min(-v);
        }
    }
    Ok(m)
}

/// `Some(1)` iff `(-A_i) 1^{k_i-1} > 0` for every layer.
pub fn check_ones_vector(layers: &[CubicalTensor]) -> Option<Vec<f64>> {
    let n = check_layers(layers).ok()?;
    let ones = vec![1.0; n];
    match image_margin(layers, &ones) {
        Ok(m) if m > 0.0 => Some(ones),
        _ => None,
    }
}

/// All layers stable with a common Perron vector.
pub fn certify_nonuniform_shared_eigvec(layers: &[CubicalTensor], tol: f64) -> Result<StabilityCertificate> {
    check_layers(layers)?;
    if layers.len() == 1 {
        return certify_uniform(&layers[0], tol);
    }
    let method = Method::SharedEigenvector;
    let cfg = PowerConfig::default();
    let pairs: Vec<EigenPair> = layers.iter().map(|l| perron_metzler(l, &cfg)).collect::<Result<_>>()?;
    let worst = pairs.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    if worst >= -tol {
        return Ok(StabilityCertificate::inconclusive(
            method,
            worst.abs(),
            format!("largest layer Perron value is {worst}"),
        ));
    }
    let spread = pairs
        .iter()
        .skip(1)
        .map(|p| max_abs_diff(&p.vector, &pairs[0].vector))
        .fold(0.0f64, f64::max);
    if spread > SHARED_VECTOR_TOL {
        return Ok(StabilityCertificate::inconclusive(
            method,
            -worst,
            format!("Perron vectors differ by {spread}"),
        ));
    }
    Ok(StabilityCertificate {
        verdict: Verdict::GloballyStable,
        method,
        margin: -worst,
        witness: Some(Witness {
            value: Some(worst),
            vector: Some(pairs[0].vector.clone()),
        }),
        diagnostics: Vec::new(),
    })
}

/// Searches for `y > 0` with `(-A_i) y^{k_i-1} > 0` on every layer, trying
/// `1`, each layer's Perron vector, each layer's solution of `(-A_j) y = 1`,
/// then `candidates`, in that order.
pub fn certify_common_positive_vector(
    layers: &[CubicalTensor],
    candidates: &[Vec<f64>],
) -> Result<StabilityCertificate> {
    let n = check_layers(layers)?;
    let method = Method::CommonPositiveVector;
    let mut diagnostics = Vec::new();
    for (i, l) in layers.iter().enumerate() {
        if let Err(e) = check_nonsingular_m(&l.scale(-1.0)) {
            return Ok(StabilityCertificate::inconclusive(
                method,
                0.0,
                format!("layer {i}: {e}"),
            ));
        }
    }
    let mut pool: Vec<Vec<f64>> = vec![vec![1.0; n]];
    let cfg = PowerConfig::default();
    for (i, l) in layers.iter().enumerate() {
        match perron_metzler(l, &cfg) {
            Ok(p) => pool.push(p.vector),
            Err(e) => diagnostics.push(format!("layer {i} Perron vector: {e}")),
        }
    }
    for (i, l) in layers.iter().enumerate() {
        match find_positive_vector(l) {
            Ok(y) => pool.push(y),
            Err(e) => diagnostics.push(format!("layer {i} solve: {e}")),
        }
    }
    for c in candidates {
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: c.len(),
            });
        }
        pool.push(c.clone());
    }
    for y in pool {
        if y.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            continue;
        }
        let margin = image_margin(layers, &y)?;
        if margin > 0.0 {
            return Ok(StabilityCertificate {
                verdict: Verdict::GloballyStable,
                method,
                margin,
                witness: Some(Witness::vector(y)),
                diagnostics,
            });
        }
    }
    diagnostics.push("no candidate has a positive image on every layer".into());
    Ok(StabilityCertificate {
        verdict: Verdict::Inconclusive,
        method,
        margin: 0.0,
        witness: None,
        diagnostics,
    })
}

/// Healthy-state stability for SIS: the uniform test on `beta2 C - D_hat` when
/// there is no pairwise infection, the row-sum condition otherwise.
pub fn certify_sis(model: &SisModel, tol: f64) -> Result<StabilityCertificate> {
    model.validate()?;
    if model.beta1 == 0.0 {
        let t = model.uniform_comparison_tensor();
        return Ok(match certify_uniform(&t, tol) {
            Ok(mut c) => {
                c.method = Method::SisUniform;
                if c.verdict == Verdict::Unstable {
                    c.verdict = Verdict::Inconclusive;
                    c.diagnostics
                        .push("positive Perron value proves nothing for SIS".into());
                }
                c
            }
            Err(Error::NotIrreducible) => StabilityCertificate::inconclusive(
                Method::SisUniform,
                0.0,
                "comparison tensor is not strongly connected",
            ),
            Err(e) => return Err(e),
        });
    }
    let sums = model.infection_row_sums();
    let margin = model
        .recovery
        .iter()
        .zip(&sums)
        .map(|(g, s)| g - s)
        .fold(f64::INFINITY, f64::min);
    let verdict = if margin > 0.0 {
        Verdict::GloballyStable
    } else {
        Verdict::Inconclusive
    };
    Ok(StabilityCertificate {
        verdict,
        method: Method::SisSumCondition,
        margin,
        witness: None,
        diagnostics: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateKind {
    Convergence,
    FiniteTimeBlowup,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    pub kind: RateKind,
    /// Perron value of the tensor.
    pub rate: f64,
    /// Lower bound on the blowup time (the reported prediction).
    pub blowup_time: Option<f64>,
    /// Upper bound on the blowup time; absent when some `x0_i = 0`.
    pub blowup_upper: Option<f64>,
}

/// Convergence rate or blowup-time bracket for `x' = A x^{k-1}` from `x0`.
///
/// With `delta` the Perron vector and `w = max_i x_i / delta_i`,
/// `w' <= lambda delta_max^{k-2} w^{k-1}`, so `x` stays finite until
/// `w0^{2-k} / ((k-2) lambda delta_max^{k-2})`. The same argument on
/// `z = min_i x_i / delta_i` gives the upper end.
pub fn rate_estimate(a: &CubicalTensor, x0: &[f64]) -> Result<RateEstimate> {
    let k = a.order();
    if k <= 2 {
        return Err(Error::OrderTooLow { order: k });
    }
    if x0.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: x0.len(),
        });
    }
    if x0.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidInitialState(format!("{x0:?} is not nonnegative")));
    }
    let pair = perron_metzler(a, &PowerConfig::default())?;
    let lambda = pair.value;
    if lambda == 0.0 {
        return Err(Error::ZeroPerronValue { value: lambda });
    }
    if lambda < 0.0 {
        return Ok(RateEstimate {
            kind: RateKind::Convergence,
            rate: lambda,
            blowup_time: None,
            blowup_upper: None,
        });
    }
    let d = &pair.vector;
    let p = (k - 2) as i32;
    let ratios: Vec<f64> = x0.iter().zip(d).map(|(x, d)| x / d).collect();
    let w0 = ratios.iter().cloned().fold(0.0f64, f64::max);
    let z0 = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_max = d.iter().cloned().fold(0.0f64, f64::max);
    let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let time = |r: f64, dd: f64| {
        let t = 1.0 / ((k - 2) as f64 * lambda * dd.powi(p) * r.powi(p));
        (r > 0.0 && t.is_finite()).then_some(t)
    };
    Ok(RateEstimate {
        kind: RateKind::FiniteTimeBlowup,
        rate: lambda,
        blowup_time: time(w0, d_max),
        blowup_upper: time(z0, d_min),
    })
}

/// Outcome of one certification method inside [`certify_cascade`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attempt {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<StabilityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeReport {
    pub result: StabilityCertificate,
    pub attempts: Vec<Attempt>,
}

/// Runs the cheap tests first (dominance, then the ones vector) and the
/// eigenvalue and search methods after, stopping at the first decisive verdict.
pub fn certify_cascade(layers: &[CubicalTensor], candidates: &[Vec<f64>], tol: f64) -> Result<CascadeReport> {
    check_layers(layers)?;
    let mut attempts = Vec::new();
    let mut record = |method: Method, r: Result<StabilityCertificate>| -> Option<StabilityCertificate> {
        match r {
            Ok(c) => {
                let decisive = c.verdict != Verdict::Inconclusive;
                attempts.push(Attempt {
                    method,
                    certificate: Some(c.clone()),
                    error: None,
                });
                decisive.then_some(c)
            }
            Err(e) => {
                attempts.push(Attempt {
                    method,
                    certificate: None,
                    error: Some(e.to_string()),
                });
                None
            }
        }
    };
    let single = layers.len() == 1;
    let mut found = None;
    if single {
        found = record(Method::DiagDominance, Ok(quick_check_diag_dominant(&layers[0])));
    }
    if found.is_none() {
        let ones = match check_ones_vector(layers) {
            Some(y) => {
                let margin = image_margin(layers, &y)?;
                StabilityCertificate {
                    verdict: Verdict::GloballyStable,
                    method: Method::OnesVector,
                    margin,
                    witness: Some(Witness::vector(y)),
                    diagnostics: Vec::new(),
                }
            }
            None => StabilityCertificate::inconclusive(Method::OnesVector, 0.0, "some image of 1 is not positive"),
        };
        found = record(Method::OnesVector, Ok(ones));
    }
    if found.is_none() {
        found = if single {
            record(Method::PerronSign, certify_uniform(&layers[0], tol))
        } else {
            record(Method::SharedEigenvector, certify_nonuniform_shared_eigvec(layers, tol))
        };
    }
    if found.is_none() && !single {
        found = record(
            Method::CommonPositiveVector,
            certify_common_positive_vector(layers, candidates),
        );
    }
    let result = match found {
        Some(c) => c,
        None => attempts
            .iter()
            .rev()
            .find_map(|a| a.certificate.clone())
            .unwrap_or_else(|| StabilityCertificate::inconclusive(Method::PerronSign, 0.0, "every method failed")),
    };
    Ok(CascadeReport { result, attempts })
}
