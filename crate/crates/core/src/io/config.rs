//! JSON description of an IFS.
//!
//! Either a family shorthand,
//!
//! ```json
//! {"family": "quad2d", "a": 0.4, "b": 0.6}
//! ```
//!
//! or explicit maps with an optional mask (tops priority `1..N` when absent):
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "maps": [{"linear": [[0.5, 0], [0, 0.5]], "offset": [0, 0]}, ...],
//!   "mask": {"kind": "tops", "order": [1, 2, 3, 4], "tolerance": 1e-9}
//! }
//! ```
//!
//! A strip mask is `{"kind": "strip", "axis": 0, "threshold": 0.5}`. Both
//! forms accept a `precision` object with any of `epsilon`, `code_length`,
//! `unit_roundoff`, `max_error_budget` and `adaptive`. Unknown fields are
//! errors everywhere.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::families::{validate_maps, FamilyParams, ValidationReport};
use crate::geometry::AffineMap;
use crate::mask::{MaskKind, MaskSpec, Symbol, DEFAULT_TOLERANCE};
use crate::precision::PrecisionPolicy;
use crate::system::{AnySystem, IfsSystem};

/// One affine map as written in a config: rows of the linear part and the
/// offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub linear: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

/// Optional replacements for fields of a [`PrecisionPolicy`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_roundoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_error_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<bool>,
}

impl PrecisionOverrides {
    pub fn is_empty(&self) -> bool {
        *self == PrecisionOverrides::default()
    }

    pub fn apply(&self, mut base: PrecisionPolicy) -> PrecisionPolicy {
        if let Some(e) = self.epsilon {
            base.epsilon = e;
        }
        if let Some(m) = self.code_length {
            base.code_length = Some(m);
        }
        if let Some(u) = self.unit_roundoff {
            base.unit_roundoff = u;
        }
        if let Some(b) = self.max_error_budget {
            base.max_error_budget = Some(b);
        }
        if let Some(a) = self.adaptive {
            base.adaptive = a;
        }
        base
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemSpec {
    Family(FamilyParams),
    Explicit { dimension: usize, maps: Vec<MapSpec> },
}

/// A parsed config. `mask` is only ever set for explicit maps.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigDoc {
    pub system: SystemSpec,
    pub mask: Option<MaskSpec>,
    pub precision: PrecisionOverrides,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum MaskDoc {
    Tops {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<u8>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Strip {
        axis: usize,
        threshold: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

// Family bodies are read through plain structs rather than the tagged enum
// so that errors keep their field paths.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadDoc {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CornerDoc {
    s: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StripDoc {
    w: f64,
    t: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitDoc {
    dimension: usize,
    maps: Vec<MapSpec>,
    #[serde(default)]
    mask: Option<MaskDoc>,
    #[serde(default)]
    precision: PrecisionOverrides,
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn typed<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix, inner.as_str()) {
            (p, ".") => if p.is_empty() { ".".into() } else { p.to_string() },
            ("", i) => i.to_string(),
            (p, i) => format!("{p}.{i}"),
        };
        config_err(path, e.into_inner().to_string())
    })
}

fn mask_from_doc(doc: MaskDoc, maps: usize) -> Result<MaskSpec> {
    Ok(match doc {
        MaskDoc::Tops { order, tolerance } => {
            let spec = match order {
                None => MaskSpec::tops(maps),
                Some(order) => {
                    let mut symbols = Vec::with_capacity(order.len());
                    for (k, v) in order.into_iter().enumerate() {
                        let s = Symbol::new(v)
                            .filter(|s| s.index() < maps)
                            .ok_or_else(|| {
                                config_err(
                                    format!("mask.order[{k}]"),
                                    format!("{v} is not a map symbol (1..={maps})"),
                                )
                            })?;
                        symbols.push(s);
                    }
                    MaskSpec::priority(symbols)
                }
            };
            spec.with_tolerance(tolerance.unwrap_or(DEFAULT_TOLERANCE))
        }
        MaskDoc::Strip {
            axis,
            threshold,
            tolerance,
        } => MaskSpec::strip(axis, threshold).with_tolerance(tolerance.unwrap_or(DEFAULT_TOLERANCE)),
    })
}

fn mask_to_doc(spec: &MaskSpec) -> MaskDoc {
    match &spec.kind {
        MaskKind::TopsPriority(order) => MaskDoc::Tops {
            order: Some(order.iter().map(|s| s.get()).collect()),
            tolerance: Some(spec.tolerance),
        },
        MaskKind::StripThreshold { axis, threshold } => MaskDoc::Strip {
            axis: *axis,
            threshold: *threshold,
            tolerance: Some(spec.tolerance),
        },
    }
}

/// Parses and checks the shape of a config. Whether the maps form a valid
/// IFS is left to [`ConfigDoc::validate`] and [`ConfigDoc::build`].
pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    let value: Value = typed(
        serde_json::from_str::<Value>(text).map_err(|e| config_err(".", e.to_string()))?,
        "",
    )?;
    let Value::Object(mut obj) = value else {
        return Err(config_err(".", "expected a JSON object"));
    };
    if obj.contains_key("family") {
        for key in ["maps", "dimension", "mask"] {
            if obj.contains_key(key) {
                return Err(config_err(
                    key,
                    "a config gives either a family or explicit maps, not both",
                ));
            }
        }
        let precision = match obj.remove("precision") {
            Some(p) => typed(p, "precision")?,
            None => PrecisionOverrides::default(),
        };
        let name = obj.remove("family").unwrap_or(Value::Null);
        let body = Value::Object(obj);
        let params = match name.as_str() {
            Some("quad2d") => {
                let QuadDoc { a, b } = typed(body, "")?;
                FamilyParams::Quad2d { a, b }
            }
            Some("corner3d") => {
                let CornerDoc { s } = typed(body, "")?;
                FamilyParams::Corner3d { s }
            }
            Some("strip2d") => {
                let StripDoc { w, t } = typed(body, "")?;
                FamilyParams::Strip2d { w, t }
            }
            _ => {
                return Err(config_err(
                    "family",
                    format!("unknown family {name}; expected quad2d, corner3d or strip2d"),
                ))
            }
        };
        return Ok(ConfigDoc {
            system: SystemSpec::Family(params),
            mask: None,
            precision,
        });
    }

    let doc: ExplicitDoc = typed(Value::Object(obj), "")?;
    let d = doc.dimension;
    if d != 2 && d != 3 {
        return Err(config_err("dimension", format!("must be 2 or 3, got {d}")));
    }
    if doc.maps.len() < 2 {
        return Err(config_err("maps", format!("need at least 2 maps, got {}", doc.maps.len())));
    }
    for (i, m) in doc.maps.iter().enumerate() {
        if m.linear.len() != d || m.linear.iter().any(|r| r.len() != d) {
            return Err(config_err(format!("maps[{i}].linear"), format!("must be a {d}x{d} matrix")));
        }
        if m.offset.len() != d {
            return Err(config_err(format!("maps[{i}].offset"), format!("must have {d} entries")));
        }
        if m.linear.iter().flatten().chain(&m.offset).any(|v| !v.is_finite()) {
            return Err(config_err(format!("maps[{i}]"), "non-finite entry"));
        }
    }
    let mask = doc.mask.map(|m| mask_from_doc(m, doc.maps.len())).transpose()?;
    Ok(ConfigDoc {
        system: SystemSpec::Explicit {
            dimension: d,
            maps: doc.maps,
        },
        mask,
        precision: doc.precision,
    })
}

/// Canonical JSON for a config: explicit masks are written in full, and
/// numbers in their shortest round-tripping form.
pub fn write_config(doc: &ConfigDoc) -> String {
    let mut obj = match &doc.system {
        SystemSpec::Family(p) => match serde_json::to_value(p) {
            Ok(Value::Object(o)) => o,
            _ => unreachable!("family params serialize to an object"),
        },
        SystemSpec::Explicit { dimension, maps } => {
            let mut o = Map::new();
            o.insert("dimension".into(), Value::from(*dimension));
            o.insert("maps".into(), serde_json::to_value(maps).expect("maps serialize"));
            if let Some(mask) = &doc.mask {
                o.insert("mask".into(), serde_json::to_value(mask_to_doc(mask)).expect("mask serializes"));
            }
            o
        }
    };
    if !doc.precision.is_empty() {
        obj.insert(
            "precision".into(),
            serde_json::to_value(&doc.precision).expect("precision serializes"),
        );
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("value serializes");
    text.push('\n');
    text
}

fn to_array<const D: usize>(rows: &[Vec<f64>]) -> [[f64; D]; D] {
    let mut a = [[0.0; D]; D];
    for (r, row) in rows.iter().enumerate() {
        a[r].copy_from_slice(row);
    }
    a
}

fn affine_maps<const D: usize>(maps: &[MapSpec]) -> Result<Vec<AffineMap<D>>> {
    maps.iter()
        .enumerate()
        .map(|(i, m)| {
            let mut offset = [0.0; D];
            offset.copy_from_slice(&m.offset);
            AffineMap::with_index(to_array::<D>(&m.linear), offset, i)
        })
        .collect()
}

fn explicit_system<const D: usize>(maps: &[MapSpec], mask: &MaskSpec) -> Result<IfsSystem<D>> {
    let sys = IfsSystem::new(affine_maps::<D>(maps)?, mask.clone())?;
    let report = validate_maps(sys.maps(), mask);
    if !report.is_valid() {
        return Err(Error::Validation(Box::new(report)));
    }
    Ok(sys)
}

impl ConfigDoc {
    pub fn family(params: FamilyParams) -> Self {
        ConfigDoc {
            system: SystemSpec::Family(params),
            mask: None,
            precision: PrecisionOverrides::default(),
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.system {
            SystemSpec::Family(p) => p.dimension(),
            SystemSpec::Explicit { dimension, .. } => *dimension,
        }
    }

    fn effective_mask(&self, n: usize) -> MaskSpec {
        self.mask.clone().unwrap_or_else(|| MaskSpec::tops(n))
    }

    /// Full validation report. Fails only when a map cannot be represented
    /// at all (a singular linear part) or a family parameter is out of range.
    pub fn validate(&self) -> Result<ValidationReport> {
        let mut report = match &self.system {
            SystemSpec::Family(p) => p.build()?.validate(),
            SystemSpec::Explicit { dimension, maps } => {
                let mask = self.effective_mask(maps.len());
                match dimension {
                    2 => validate_maps(&affine_maps::<2>(maps)?, &mask),
                    _ => validate_maps(&affine_maps::<3>(maps)?, &mask),
                }
            }
        };
        if let SystemSpec::Explicit { maps, .. } = &self.system {
            if self.mask.is_none() {
                report
                    .notes
                    .push(format!("no mask given; defaults to tops priority 1..{}", maps.len()));
            }
        }
        Ok(report)
    }

    /// The system the config describes, rejecting anything that fails
    /// validation.
    pub fn build(&self) -> Result<AnySystem> {
        match &self.system {
            SystemSpec::Family(p) => p.build(),
            SystemSpec::Explicit { dimension, maps } => {
                let mask = self.effective_mask(maps.len());
                Ok(match dimension {
                    2 => AnySystem::Planar(explicit_system::<2>(maps, &mask)?),
                    _ => AnySystem::Spatial(explicit_system::<3>(maps, &mask)?),
                })
            }
        }
    }

    /// `base` with this config's precision overrides applied.
    pub fn precision_policy(&self, base: PrecisionPolicy) -> PrecisionPolicy {
        self.precision.apply(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{family_corner3d, family_quad2d};

    const DYADIC: &str = r#"{
        "dimension": 2,
        "maps": [
            {"linear": [[0.5, 0], [0, 0.5]], "offset": [0, 0]},
            {"linear": [[0.5, 0], [0, 0.5]], "offset": [0.5, 0]},
            {"linear": [[0.5, 0], [0, 0.5]], "offset": [0.5, 0.5]},
            {"linear": [[0.5, 0], [0, 0.5]], "offset": [0, 0.5]}
        ]
    }"#;

    #[test]
    fn family_shorthand() {
        let doc = parse_config(r#"{"family":"quad2d","a":0.5,"b":0.5}"#).unwrap();
        let sys = doc.build().unwrap();
        assert_eq!(sys.planar().unwrap(), &family_quad2d(0.5, 0.5).unwrap());
    }

    #[test]
    fn corner3d_shorthand() {
        let doc = parse_config(r#"{"family":"corner3d","s":[0.3,0.5,0.7]}"#).unwrap();
        let sys = doc.build().unwrap();
        assert_eq!(sys.len(), 8);
        let s = sys.spatial().unwrap();
        assert_eq!(s, &family_corner3d([0.3, 0.5, 0.7]).unwrap());
        assert!((s.contraction() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn explicit_dyadic_equals_family() {
        let doc = parse_config(DYADIC).unwrap();
        assert_eq!(doc.build().unwrap().planar().unwrap(), &family_quad2d(0.5, 0.5).unwrap());
        let report = doc.validate().unwrap();
        assert!(report.is_valid());
        assert!(report.notes.iter().any(|n| n.contains("tops priority")));
    }

    #[test]
    fn singular_map_named() {
        let text = DYADIC.replacen("[[0.5, 0], [0, 0.5]], \"offset\": [0.5, 0]", "[[0.5, 0.5], [0.5, 0.5]], \"offset\": [0.5, 0]", 1);
        let err = parse_config(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::SingularMap { index: 1, .. }), "{err}");
        assert!(err.to_string().contains("map 2"));
    }

    #[test]
    fn expanding_map_rejected() {
        let text = DYADIC.replacen("[[0.5, 0], [0, 0.5]], \"offset\": [0, 0]", "[[1.2, 0], [0, 0.5]], \"offset\": [0, 0]", 1);
        let err = parse_config(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::NonContractive { index: 0, .. }), "{err}");
        assert!(!parse_config(&text).unwrap().validate().unwrap().is_valid());
    }

    #[test]
    fn gaps_fail_validation() {
        let text = DYADIC.replace("0.5, 0], [0, 0.5]", "0.4, 0], [0, 0.4]");
        assert!(matches!(parse_config(&text).unwrap().build(), Err(Error::Validation(_))));
    }

    #[test]
    fn unknown_fields_have_paths() {
        let err = parse_config(r#"{"family":"quad2d","a":0.5,"b":0.5,"c":1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
        let err = parse_config(&DYADIC.replacen("\"offset\": [0, 0]", "\"offset\": [0, 0], \"bias\": 1", 1)).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "maps[0].bias");
                assert!(message.contains("bias"));
            }
            e => panic!("{e}"),
        }
        let err = parse_config(r#"{"family":"quad2d","a":0.5,"b":0.5,"precision":{"eps":1}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path.starts_with("precision")), "{err}");
    }

    #[test]
    fn shape_errors_have_paths() {
        let err = parse_config(&DYADIC.replacen("[[0.5, 0], [0, 0.5]]", "[[0.5, 0]]", 1)).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "maps[0].linear"), "{err}");
        let err = parse_config(r#"{"family":"quad2d","a":"x","b":0.5}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "a"), "{err}");
        let err = parse_config(&DYADIC.replacen("\"dimension\": 2", "\"dimension\": 2, \"family\": \"quad2d\"", 1)).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        let err = parse_config(r#"{"family":"hex2d"}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "family"), "{err}");
        let err = parse_config(&DYADIC.replacen("]\n    }", "], \"mask\": {\"kind\":\"tops\",\"order\":[1,2,3,9]}\n    }", 1)).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "mask.order[3]"), "{err}");
    }

    #[test]
    fn out_of_range_family_parameter() {
        let doc = parse_config(r#"{"family":"quad2d","a":1.2,"b":0.5}"#).unwrap();
        assert!(matches!(doc.build(), Err(Error::InvalidParameter { name: "a", .. })));
    }

    #[test]
    fn canonical_round_trip() {
        let texts = [
            r#"{"family":"strip2d","w":0.6,"t":0.45,"precision":{"code_length":12,"adaptive":true}}"#.to_string(),
            DYADIC.to_string(),
            DYADIC.replacen("]\n    }", "], \"mask\": {\"kind\":\"strip\",\"axis\":1,\"threshold\":0.5}\n    }", 1),
        ];
        for t in &texts {
            let doc = parse_config(t).unwrap();
            let canon = write_config(&doc);
            let again = parse_config(&canon).unwrap();
            assert_eq!(write_config(&again), canon);
            if doc.mask.is_some() || matches!(doc.system, SystemSpec::Family(_)) {
                assert_eq!(again, doc);
            }
        }
    }

    #[test]
    fn overrides_apply() {
        let o = PrecisionOverrides {
            code_length: Some(7),
            adaptive: Some(true),
            ..Default::default()
        };
        let p = o.apply(PrecisionPolicy::for_pitch(0.01));
        assert_eq!(p.code_length, Some(7));
        assert!(p.adaptive);
        assert_eq!(p.epsilon, 0.01);
    }
}
