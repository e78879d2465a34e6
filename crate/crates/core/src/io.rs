//! JSON documents: a versioned envelope around every artifact.

use crate::error::{Error, Result};
use crate::graph::RadiusFunction;
use crate::hirota::ComparisonFunction;
use crate::pattern::CirclePattern;
use crate::projection::LiftedEmbedding;
use crate::sg::DiscreteMap;
use crate::solver::RadiusProblem;
use crate::surface::QuadSurface;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

pub const SCHEMA: &str = "qcp/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum Payload {
    Embedding(LiftedEmbedding),
    Surface(QuadSurface),
    Pattern(CirclePattern),
    Map(DiscreteMap),
    Comparison(ComparisonFunction),
    Report(serde_json::Value),
    Problem(RadiusProblem),
    Radii(RadiusFunction),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Embedding(_) => "embedding",
            Payload::Surface(_) => "surface",
            Payload::Pattern(_) => "pattern",
            Payload::Map(_) => "map",
            Payload::Comparison(_) => "comparison",
            Payload::Report(_) => "report",
            Payload::Problem(_) => "problem",
            Payload::Radii(_) => "radii",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    #[serde(flatten)]
    pub payload: Payload,
    pub provenance: Provenance,
}

impl Document {
    pub fn new(payload: Payload, command: &str, parameters: &[(&str, String)]) -> Self {
        Document {
            schema: SCHEMA.to_string(),
            payload,
            provenance: Provenance {
                command: command.to_string(),
                parameters: parameters.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            },
        }
    }
}

/// Writes floats as `d.dddddddddddddddde±x` (17 significant digits).
#[derive(Debug, Clone, Copy, Default)]
pub struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes any value with the 17-digit float format.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn save(doc: &Document) -> Result<Vec<u8>> {
    to_json(doc)
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in bytes.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(bytes.len());
        }
        offset += l.len() + 1;
    }
    bytes.len()
}

fn parse_error(bytes: &[u8], e: serde_json::Error) -> Error {
    let offset = if e.is_eof() { bytes.len() } else { byte_offset(bytes, e.line(), e.column()) };
    Error::Parse { line: e.line(), column: e.column(), offset, message: e.to_string() }
}

pub fn load(bytes: &[u8]) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, e))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => return Err(Error::Version(other.to_string())),
        None => {
            return Err(Error::Parse { line: 1, column: 1, offset: 0, message: "missing schema field".into() })
        }
    }
    serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, e))
}

/// Serde adapter storing an ordered map as a list of [key, value] pairs, for
/// keys that are not strings.
pub mod entries {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sg::zgamma_map;

    #[test]
    fn map_round_trip_is_exact() {
        let m = zgamma_map(1.5, 2.0, 3).unwrap();
        let doc = Document::new(Payload::Map(m), "zgamma-sg", &[("gamma", "1.5".into())]);
        let bytes = save(&doc).unwrap();
        assert_eq!(load(&bytes).unwrap(), doc);
        assert_eq!(save(&load(&bytes).unwrap()).unwrap(), bytes);
    }

    #[test]
    fn seventeen_digits() {
        let bytes = to_json(&vec![0.1f64, 1.0, -2.5e-300]).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap().trim(),
            "[1.0000000000000001e-1,1.0000000000000000e0,-2.5000000000000000e-300]"
        );
    }

    #[test]
    fn truncated_and_future() {
        let m = zgamma_map(1.0, 2.0, 1).unwrap();
        let bytes = save(&Document::new(Payload::Map(m), "t", &[])).unwrap();
        match load(&bytes[..40]) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 40),
            other => panic!("{other:?}"),
        }
        let s = String::from_utf8(bytes).unwrap().replace("qcp/1", "qcp/2");
        assert!(matches!(load(s.as_bytes()), Err(Error::Version(v)) if v == "qcp/2"));
    }
}
