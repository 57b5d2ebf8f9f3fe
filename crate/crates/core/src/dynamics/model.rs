use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{linf, CubicalTensor};

/// How the summed layer field is wrapped before it becomes `x'`.
#[derive(Debug, Clone, PartialEq)]
pub enum Wrapper {
    None,
    /// `x' = -diag(recovery) x + (I - diag(x)) (sum of layers)`.
    SusceptibleMask {
        recovery: Vec<f64>,
    },
    /// `x' = diag(x) (sum of layers + b)`.
    LogisticPrefactor,
}

/// Non-uniform hypergraph system: layers of strictly decreasing order sharing
/// one dimension, an optional constant term, and an optional wrapper or shift.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphModel {
    layers: Vec<CubicalTensor>,
    constant: Option<Vec<f64>>,
    wrapper: Wrapper,
    shift: Option<Vec<f64>>,
    /// Largest absolute slice sum of each layer.
    row_abs_max: Vec<f64>,
}

/// Region the flow is known to keep invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    PositiveOrthant,
    UnitBox,
    AboveShift(Vec<f64>),
}

impl HypergraphModel {
    pub fn new(
        layers: Vec<CubicalTensor>,
        constant: Option<Vec<f64>>,
        wrapper: Wrapper,
        shift: Option<Vec<f64>>,
    ) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidModel("model needs at least one layer".into()))?;
        let n = first.dim();
        for w in layers.windows(2) {
            if w[1].order() >= w[0].order() {
                return Err(Error::InvalidModel(format!(
                    "layer orders must strictly decrease, got {} then {}",
                    w[0].order(),
                    w[1].order()
                )));
            }
        }
        if let Some(l) = layers.iter().find(|l| l.dim() != n) {
            return Err(Error::InvalidModel(format!(
                "layers disagree on dimension: {} vs {}",
                n,
                l.dim()
            )));
        }
        for (name, v) in [("constant", &constant), ("shift", &shift)] {
            if let Some(v) = v {
                check_vec(name, v, n)?;
            }
        }
        match &wrapper {
            Wrapper::SusceptibleMask { recovery } => {
                if constant.is_some() {
                    return Err(Error::InvalidModel(
                        "susceptible mask does not take a constant term".into(),
                    ));
                }
                check_vec("recovery", recovery, n)?;
                if shift.is_some() {
                    return Err(Error::InvalidModel("shift and wrapper are exclusive".into()));
                }
            }
            Wrapper::LogisticPrefactor if shift.is_some() => {
                return Err(Error::InvalidModel("shift and wrapper are exclusive".into()));
            }
            _ => {}
        }
        if let Some(a) = &shift {
            if a.iter().any(|&v| v.is_nan() || v <= 0.0) {
                return Err(Error::InvalidModel("shift vector must be positive".into()));
            }
        }
        let row_abs_max = layers
            .iter()
            .map(|l| {
                let mut rows = vec![0.0; n];
                for (idx, v) in l.entries() {
                    rows[idx[0]] += v.abs();
                }
                rows.into_iter().fold(0.0, f64::max)
            })
            .collect();
        Ok(Self {
            layers,
            constant,
            wrapper,
            shift,
            row_abs_max,
        })
    }

    pub fn dim(&self) -> usize {
        self.layers[0].dim()
    }

    pub fn layers(&self) -> &[CubicalTensor] {
        &self.layers
    }

    /// Highest layer order.
    pub fn order(&self) -> usize {
        self.layers[0].order()
    }

    pub fn constant(&self) -> Option<&[f64]> {
        self.constant.as_deref()
    }

    pub fn wrapper(&self) -> &Wrapper {
        &self.wrapper
    }

    pub fn shift(&self) -> Option<&[f64]> {
        self.shift.as_deref()
    }

    pub fn region(&self) -> Region {
        match (&self.wrapper, &self.shift) {
            (Wrapper::SusceptibleMask { .. }, _) => Region::UnitBox,
            (_, Some(a)) => Region::AboveShift(a.clone()),
            _ => Region::PositiveOrthant,
        }
    }

    /// Evaluates `x'` at `x`.
    pub fn field(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut f = self.unwrapped(x)?;
        match &self.wrapper {
            Wrapper::None => {}
            Wrapper::SusceptibleMask { recovery } => {
                for (i, fi) in f.iter_mut().enumerate() {
                    *fi = -recovery[i] * x[i] + (1.0 - x[i]) * *fi;
                }
            }
            Wrapper::LogisticPrefactor => {
                f.iter_mut().zip(x).for_each(|(fi, xi)| *fi *= xi);
            }
        }
        Ok(f)
    }

    fn argument(&self, x: &[f64]) -> Vec<f64> {
        match &self.shift {
            Some(a) => x.iter().zip(a).map(|(u, v)| u - v).collect(),
            None => x.to_vec(),
        }
    }

    /// Layer sum plus constant, before the wrapper.
    fn unwrapped(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        let arg = self.argument(x);
        let mut f = vec![0.0; n];
        for layer in &self.layers {
            for (fi, v) in f.iter_mut().zip(layer.tv_product(&arg)?) {
                *fi += v;
            }
        }
        if let Some(b) = &self.constant {
            f.iter_mut().zip(b).for_each(|(fi, bi)| *fi += bi);
        }
        Ok(f)
    }

    /// Upper bound on `|J(x)|_inf` for the Jacobian of [`field`](Self::field),
    /// from absolute slice sums of each layer.
    pub fn jacobian_bound(&self, x: &[f64]) -> Result<f64> {
        let r = linf(&self.argument(x));
        let mut lin = 0.0;
        for (layer, row_max) in self.layers.iter().zip(&self.row_abs_max) {
            let p = layer.order() - 1;
            lin += p as f64 * row_max * r.powi(p as i32 - 1);
        }
        Ok(match &self.wrapper {
            Wrapper::None => lin,
            Wrapper::SusceptibleMask { recovery } => {
                let f = linf(&self.unwrapped(x)?);
                recovery.iter().cloned().fold(0.0, f64::max) + f + lin
            }
            Wrapper::LogisticPrefactor => linf(&self.unwrapped(x)?) + linf(x) * lin,
        })
    }
}

fn check_vec(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::InvalidModel(format!(
            "{name} has length {}, expected {n}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel(format!("{name} has non-finite entries")));
    }
    Ok(())
}

/// Simplicial SIS parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SisModel {
    /// Pairwise infection matrix (order 2), nonnegative.
    pub pairwise: CubicalTensor,
    /// Triadic infection tensor (order 3), nonnegative.
    pub triadic: CubicalTensor,
    pub beta1: f64,
    pub beta2: f64,
    pub recovery: Vec<f64>,
}

impl SisModel {
    pub fn new(
        pairwise: CubicalTensor,
        triadic: CubicalTensor,
        beta1: f64,
        beta2: f64,
        recovery: Vec<f64>,
    ) -> Result<Self> {
        let m = Self {
            pairwise,
            triadic,
            beta1,
            beta2,
            recovery,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.triadic.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidSisParameters(s));
        if self.pairwise.order() != 2 {
            return bad(format!("pairwise tensor has order {}", self.pairwise.order()));
        }
        if self.triadic.order() != 3 {
            return bad(format!("triadic tensor has order {}", self.triadic.order()));
        }
        let n = self.triadic.dim();
        if self.pairwise.dim() != n || self.recovery.len() != n {
            return bad("dimensions disagree".into());
        }
        if !(self.beta1 >= 0.0 && self.beta2 >= 0.0) || !self.beta1.is_finite() || !self.beta2.is_finite() {
            return bad(format!(
                "rates must be >= 0 (beta1 = {}, beta2 = {})",
                self.beta1, self.beta2
            ));
        }
        if self.recovery.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return bad("recovery rates must be positive".into());
        }
        if self.pairwise.entries().any(|(_, v)| v < 0.0) || self.triadic.entries().any(|(_, v)| v < 0.0) {
            return bad("infection weights must be nonnegative".into());
        }
        Ok(())
    }

    /// `beta1 sum_j a_ij + beta2 sum_jk c_ijk` per node.
    pub fn infection_row_sums(&self) -> Vec<f64> {
        let n = self.dim();
        let mut s = vec![0.0; n];
        for (idx, v) in self.pairwise.entries() {
            s[idx[0]] += self.beta1 * v;
        }
        for (idx, v) in self.triadic.entries() {
            s[idx[0]] += self.beta2 * v;
        }
        s
    }

    /// `beta2 C - D_hat` with `D_hat` the order-3 diagonal tensor of recovery rates.
    pub fn uniform_comparison_tensor(&self) -> CubicalTensor {
        let d_hat = CubicalTensor::diagonal(3, &self.recovery).expect("validated dimension");
        self.triadic.scale(self.beta2).sub(&d_hat).expect("validated shapes")
    }
}

pub fn build_homogeneous(a: CubicalTensor) -> Result<HypergraphModel> {
    HypergraphModel::new(vec![a], None, Wrapper::None, None)
}

pub fn build_polynomial(layers: Vec<CubicalTensor>, constant: Option<Vec<f64>>) -> Result<HypergraphModel> {
    HypergraphModel::new(layers, constant, Wrapper::None, None)
}

pub fn build_affine(a: CubicalTensor, b: Vec<f64>) -> Result<HypergraphModel> {
    HypergraphModel::new(vec![a], Some(b), Wrapper::None, None)
}

pub fn build_lv(a: CubicalTensor, b: Vec<f64>) -> Result<HypergraphModel> {
    HypergraphModel::new(vec![a], Some(b), Wrapper::LogisticPrefactor, None)
}

pub fn build_shifted(a: CubicalTensor, shift: Vec<f64>) -> Result<HypergraphModel> {
    HypergraphModel::new(vec![a], None, Wrapper::None, Some(shift))
}

pub fn build_sis(sis: &SisModel) -> Result<HypergraphModel> {
    sis.validate()?;
    let mut layers = vec![sis.triadic.scale(sis.beta2)];
    let pair = sis.pairwise.scale(sis.beta1);
    if pair.nnz() > 0 {
        layers.push(pair);
    }
    HypergraphModel::new(
        layers,
        None,
        Wrapper::SusceptibleMask {
            recovery: sis.recovery.clone(),
        },
        None,
    )
}
