//! JSON formats for tensors and models.
//!
//! Tensor files list stored entries, or name a generator:
//!
//! ```json
//! {"order": 3, "dim": 2, "entries": [{"idx": [0, 1, 1], "val": 0.5}]}
//! {"generator": "uniform", "order": 4, "dim": 4, "off_diag": 1, "diag": -64}
//! {"generator": "sunflower", "order": 4, "petals": 5}
//! ```
//!
//! Duplicate `idx` entries are summed. Model files carry a `kind` tag
//! (`homogeneous`, `polynomial`, `affine`, `lv`, `shifted`, `sis`); a bare
//! tensor file is read as a homogeneous model.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{
    build_affine, build_homogeneous, build_lv, build_polynomial, build_shifted, build_sis, HypergraphModel, SisModel,
};
use crate::error::{Error, Result};
use crate::tensor::{sunflower_tensor, uniform_tensor, CubicalTensor};

/// Largest number of entries a generator may materialize.
pub const MAX_GENERATED_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    idx: Vec<usize>,
    val: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    order: Option<usize>,
    dim: Option<usize>,
    entries: Option<Vec<EntryJson>>,
    generator: Option<String>,
    off_diag: Option<f64>,
    diag: Option<f64>,
    petals: Option<usize>,
    weight: Option<f64>,
}

#[derive(Serialize)]
struct TensorOut<'a> {
    order: usize,
    dim: usize,
    entries: Vec<EntryRef<'a>>,
}

#[derive(Serialize)]
struct EntryRef<'a> {
    idx: &'a [usize],
    val: f64,
}

fn need<T>(v: Option<T>, field: &str, generator: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parse(format!("generator {generator:?} needs \"{field}\"")))
}

impl TensorFile {
    fn into_tensor(self) -> Result<CubicalTensor> {
        let order = need(self.order, "order", "none")?;
        if let Some(g) = self.generator.as_deref() {
            if self.entries.is_some() {
                return Err(Error::Parse(
                    "give either \"entries\" or \"generator\", not both".into(),
                ));
            }
            return match g {
                "uniform" => {
                    let dim = need(self.dim, "dim", g)?;
                    let off = need(self.off_diag, "off_diag", g)?;
                    let diag = need(self.diag, "diag", g)?;
                    let total = dim.checked_pow(order.try_into().unwrap_or(u32::MAX));
                    if total.is_none_or(|t| t > MAX_GENERATED_ENTRIES) {
                        return Err(Error::Parse(format!(
                            "uniform tensor of order {order}, dim {dim} is too large"
                        )));
                    }
                    if !off.is_finite() || !diag.is_finite() {
                        return Err(Error::Parse("generator values must be finite".into()));
                    }
                    uniform_tensor(order, dim, off, diag)
                }
                "sunflower" => {
                    let petals = need(self.petals, "petals", g)?;
                    let weight = self.weight.unwrap_or(1.0);
                    if !weight.is_finite() {
                        return Err(Error::Parse("generator values must be finite".into()));
                    }
                    let perms = (1..order).try_fold(1usize, |acc, i| acc.checked_mul(i + 1));
                    if perms
                        .and_then(|p| p.checked_mul(petals))
                        .is_none_or(|t| t > MAX_GENERATED_ENTRIES)
                    {
                        return Err(Error::Parse(format!(
                            "sunflower with order {order} and {petals} petals is too large"
                        )));
                    }
                    let t = sunflower_tensor(order, petals, weight)?;
                    if let Some(d) = self.dim {
                        if d != t.dim() {
                            return Err(Error::Parse(format!(
                                "sunflower with {petals} petals has dim {}, file says {d}",
                                t.dim()
                            )));
                        }
                    }
                    Ok(t)
                }
                other => Err(Error::Parse(format!("unknown generator {other:?}"))),
            };
        }
        let dim = need(self.dim, "dim", "none")?;
        let mut t = CubicalTensor::zeros(order, dim)?;
        for (i, e) in self.entries.unwrap_or_default().into_iter().enumerate() {
            let idx = e.idx.clone();
            t.add_to(e.idx, e.val)
                .map_err(|err| Error::Parse(format!("entries[{i}] (idx {idx:?}): {err}")))?;
        }
        Ok(t)
    }
}

impl Serialize for CubicalTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorOut {
            order: self.order(),
            dim: self.dim(),
            entries: self.entries().map(|(idx, val)| EntryRef { idx, val }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubicalTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        TensorFile::deserialize(d)?.into_tensor().map_err(|e| match e {
            Error::Parse(msg) => D::Error::custom(msg),
            other => D::Error::custom(other),
        })
    }
}

pub fn parse_tensor(text: &str) -> Result<CubicalTensor> {
    Ok(serde_json::from_str(text)?)
}

pub fn tensor_to_json(t: &CubicalTensor) -> String {
    serde_json::to_string_pretty(t).expect("tensor serialization cannot fail")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Homogeneous {
        tensor: CubicalTensor,
    },
    /// Layers in strictly decreasing order, plus an optional constant.
    Polynomial {
        layers: Vec<CubicalTensor>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        constant: Option<Vec<f64>>,
    },
    Affine {
        tensor: CubicalTensor,
        b: Vec<f64>,
    },
    Lv {
        tensor: CubicalTensor,
        b: Vec<f64>,
    },
    Shifted {
        tensor: CubicalTensor,
        shift: Vec<f64>,
    },
    Sis {
        /// Absent means no pairwise infection.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairwise: Option<CubicalTensor>,
        triadic: CubicalTensor,
        #[serde(default)]
        beta1: f64,
        beta2: f64,
        recovery: Vec<f64>,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<HypergraphModel> {
        match self {
            ModelSpec::Homogeneous { tensor } => build_homogeneous(tensor.clone()),
            ModelSpec::Polynomial { layers, constant } => build_polynomial(layers.clone(), constant.clone()),
            ModelSpec::Affine { tensor, b } => build_affine(tensor.clone(), b.clone()),
            ModelSpec::Lv { tensor, b } => build_lv(tensor.clone(), b.clone()),
            ModelSpec::Shifted { tensor, shift } => build_shifted(tensor.clone(), shift.clone()),
            ModelSpec::Sis { .. } => build_sis(&self.sis().expect("sis variant")?),
        }
    }

    /// SIS parameters, for the `sis` kind only.
    pub fn sis(&self) -> Option<Result<SisModel>> {
        let ModelSpec::Sis {
            pairwise,
            triadic,
            beta1,
            beta2,
            recovery,
        } = self
        else {
            return None;
        };
        let pairwise = match pairwise {
            Some(p) => p.clone(),
            None => match CubicalTensor::zeros(2, triadic.dim()) {
                Ok(z) => z,
                Err(e) => return Some(Err(e)),
            },
        };
        Some(SisModel::new(
            pairwise,
            triadic.clone(),
            *beta1,
            *beta2,
            recovery.clone(),
        ))
    }

    /// Tensor layers of the polynomial part, highest order first.
    pub fn layers(&self) -> Vec<CubicalTensor> {
        match self {
            ModelSpec::Homogeneous { tensor }
            | ModelSpec::Affine { tensor, .. }
            | ModelSpec::Lv { tensor, .. }
            | ModelSpec::Shifted { tensor, .. } => vec![tensor.clone()],
            ModelSpec::Polynomial { layers, .. } => layers.clone(),
            ModelSpec::Sis { pairwise, triadic, .. } => {
                let mut v = vec![triadic.clone()];
                v.extend(pairwise.clone());
                v
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Homogeneous { .. } => "homogeneous",
            ModelSpec::Polynomial { .. } => "polynomial",
            ModelSpec::Affine { .. } => "affine",
            ModelSpec::Lv { .. } => "lv",
            ModelSpec::Shifted { .. } => "shifted",
            ModelSpec::Sis { .. } => "sis",
        }
    }
}

/// Reads a model file; a plain tensor file becomes a homogeneous model.
/// The returned spec has passed the model invariants.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let spec = if value.get("kind").is_some() {
        serde_json::from_value(value)?
    } else {
        ModelSpec::Homogeneous {
            tensor: serde_json::from_value(value)?,
        }
    };
    spec.build()?;
    Ok(spec)
}

pub fn model_to_json(spec: &ModelSpec) -> String {
    serde_json::to_string_pretty(spec).expect("model serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_round_trip() {
        let t = uniform_tensor(3, 3, 0.5, -2.0).unwrap();
        assert_eq!(parse_tensor(&tensor_to_json(&t)).unwrap(), t);
    }

    #[test]
    fn generators() {
        let t = parse_tensor(r#"{"generator":"uniform","order":4,"dim":4,"off_diag":1,"diag":-64}"#).unwrap();
        assert_eq!(t, uniform_tensor(4, 4, 1.0, -64.0).unwrap());
        let t = parse_tensor(r#"{"generator":"sunflower","order":4,"petals":5}"#).unwrap();
        assert_eq!(t, sunflower_tensor(4, 5, 1.0).unwrap());
        assert!(parse_tensor(r#"{"generator":"sunflower","order":4,"petals":5,"dim":3}"#).is_err());
        assert!(parse_tensor(r#"{"generator":"uniform","order":40,"dim":40,"off_diag":1,"diag":0}"#).is_err());
        assert!(parse_tensor(r#"{"generator":"sunflower","order":30,"petals":1}"#).is_err());
        assert!(parse_tensor(r#"{"generator":"ring","order":3}"#).is_err());
    }

    #[test]
    fn duplicates_are_summed() {
        let t =
            parse_tensor(r#"{"order":2,"dim":2,"entries":[{"idx":[0,1],"val":1},{"idx":[0,1],"val":2.5}]}"#).unwrap();
        assert_eq!(t.get(&[0, 1]), 3.5);
        assert_eq!(t.nnz(), 1);
    }

    #[test]
    fn bad_entry_is_named() {
        let err = parse_tensor(r#"{"order":3,"dim":2,"entries":[{"idx":[0,1,1],"val":1},{"idx":[0,1],"val":2}]}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("entries[1]"), "{msg}");
        assert!(matches!(err, Error::Parse(_)));
        let err = parse_tensor(r#"{"order":2,"dim":2,"entries":[{"idx":[0,2],"val":1}]}"#).unwrap_err();
        assert!(err.to_string().contains("entries[0]"));
        assert!(parse_tensor(r#"{"order":1,"dim":2,"entries":[]}"#).is_err());
        assert!(parse_tensor(r#"{"order":2,"dim":2,"entries":[],"extra":1}"#).is_err());
        assert!(parse_tensor("not json").is_err());
    }

    #[test]
    fn models() {
        let t = r#"{"generator":"uniform","order":4,"dim":4,"off_diag":1,"diag":-64}"#;
        let m = parse_model(t).unwrap();
        assert_eq!(m.kind(), "homogeneous");
        let m = parse_model(&format!(r#"{{"kind":"affine","tensor":{t},"b":[1,1,1,1]}}"#)).unwrap();
        assert_eq!(m.build().unwrap().field(&[1.0; 4]).unwrap(), vec![0.0; 4]);
        assert_eq!(parse_model(&model_to_json(&m)).unwrap(), m);
        assert!(parse_model(&format!(r#"{{"kind":"affine","tensor":{t},"b":[1,1]}}"#)).is_err());

        let sis = r#"{"kind":"sis","triadic":{"generator":"uniform","order":3,"dim":4,"off_diag":0.01,"diag":0},"beta2":1,"recovery":[0.9,0.9,0.9,0.9]}"#;
        let m = parse_model(sis).unwrap();
        let s = m.sis().unwrap().unwrap();
        assert_eq!(s.beta1, 0.0);
        assert_eq!(m.layers().len(), 1);
        assert!(parse_model(&sis.replace("0.9,0.9,0.9,0.9", "0.9,-1,0.9,0.9")).is_err());

        let poly = format!(
            r#"{{"kind":"polynomial","layers":[{t},{{"generator":"uniform","order":2,"dim":4,"off_diag":1,"diag":-5}}]}}"#
        );
        assert_eq!(parse_model(&poly).unwrap().layers().len(), 2);
        assert!(parse_model(r#"{"kind":"quartic"}"#).is_err());
    }
}
