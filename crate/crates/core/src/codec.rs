//! JSON documents.
//!
//! Every document is an object carrying `"version"` and a `"kind"` tag next
//! to the payload fields. Floats are written with 17 significant digits and
//! parsed with correct rounding, so `read(write(x)) == x` bit for bit.

use serde::{Deserialize, Serialize};

use crate::certify::CertReport;
use crate::error::{Error, Result};
use crate::models::{CanonicalNLocalForm, DiscreteNLocalModel, FullExpansion, TriangleModel};
use crate::quantum::QuantumRealization;
use crate::tensor::CorrelationTensor;

pub const FORMAT_VERSION: u32 = 1;

/// Serializers writing `f64` as `{:.16e}` raw JSON numbers.
pub mod precise {
    use serde::ser::{SerializeSeq, Serializer};
    use serde_json::value::RawValue;

    pub(crate) fn raw(v: f64) -> Box<RawValue> {
        // Non-finite values never reach the codec: constructors reject them.
        RawValue::from_string(format!("{v:.16e}")).expect("finite float is valid JSON")
    }

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for &v in values {
            seq.serialize_element(&raw(v))?;
        }
        seq.end()
    }

    pub fn serialize_nested<S, V, R>(rows: &R, s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        V: AsRef<[f64]>,
        R: AsRef<[V]> + ?Sized,
    {
        struct Row<'a>(&'a [f64]);
        impl serde::Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                serialize(self.0, s)
            }
        }
        let rows = rows.as_ref();
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            seq.serialize_element(&Row(r.as_ref()))?;
        }
        seq.end()
    }

    pub fn serialize_one<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&raw(*v), s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Tensor(CorrelationTensor),
    Nlocal(DiscreteNLocalModel),
    Triangle(TriangleModel),
    Canonical(CanonicalNLocalForm),
    Expansion(FullExpansion),
    Realization(QuantumRealization),
    Report(CertReport),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Tensor(_) => "tensor",
            Document::Nlocal(_) => "nlocal",
            Document::Triangle(_) => "triangle",
            Document::Canonical(_) => "canonical",
            Document::Expansion(_) => "expansion",
            Document::Realization(_) => "realization",
            Document::Report(_) => "report",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<D> {
    version: u32,
    #[serde(flatten)]
    document: D,
}

pub fn to_string(doc: &Document) -> Result<String> {
    Ok(serde_json::to_string(&Envelope {
        version: FORMAT_VERSION,
        document: doc,
    })?)
}

pub fn from_str(text: &str) -> Result<Document> {
    #[derive(Deserialize)]
    struct Header {
        version: Option<u32>,
    }
    let header: Header = serde_json::from_str(text)?;
    match header.version {
        Some(FORMAT_VERSION) => {}
        Some(v) => {
            return Err(Error::Codec(format!(
                "unsupported document version {v} (expected {FORMAT_VERSION})"
            )))
        }
        None => return Err(Error::Codec("document has no version tag".into())),
    }
    let env: Envelope<Document> = serde_json::from_str(text)?;
    Ok(env.document)
}

macro_rules! typed {
    ($name:ident, $variant:ident, $ty:ty) => {
        impl From<$ty> for Document {
            fn from(v: $ty) -> Self {
                Document::$variant(v)
            }
        }

        impl Document {
            pub fn $name(self) -> Result<$ty> {
                match self {
                    Document::$variant(v) => Ok(v),
                    other => Err(Error::Codec(format!(
                        "expected a {} document, found {}",
                        stringify!($name).trim_start_matches("into_"),
                        other.kind()
                    ))),
                }
            }
        }
    };
}

typed!(into_tensor, Tensor, CorrelationTensor);
typed!(into_nlocal, Nlocal, DiscreteNLocalModel);
typed!(into_triangle, Triangle, TriangleModel);
typed!(into_canonical, Canonical, CanonicalNLocalForm);
typed!(into_expansion, Expansion, FullExpansion);
typed!(into_realization, Realization, QuantumRealization);
typed!(into_report, Report, CertReport);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn tensor_document_roundtrip() {
        let t = examples::not_bilocal();
        let text = to_string(&t.clone().into()).unwrap();
        assert!(text.contains("\"kind\":\"tensor\""));
        assert!(text.contains("\"version\":1"));
        let back = from_str(&text).unwrap().into_tensor().unwrap();
        assert_eq!(back, t);
        assert_eq!(to_string(&back.into()).unwrap(), text);
    }

    #[test]
    fn awkward_floats_roundtrip_bitwise() {
        let s = crate::tensor::Scenario::probability(vec![3], 1).unwrap();
        let vals = vec![0.1 + 0.2, 1.0 / 3.0, 1.0 - 0.3 - 1.0 / 3.0];
        let t = CorrelationTensor::new(s, vals.clone()).unwrap();
        let back = from_str(&to_string(&t.into()).unwrap())
            .unwrap()
            .into_tensor()
            .unwrap();
        for (a, b) in back.values().iter().zip(&vals) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_unknown_kind_and_version() {
        let t = to_string(&examples::shared_coin().into()).unwrap();
        assert!(from_str(&t.replace("\"kind\":\"tensor\"", "\"kind\":\"blob\"")).is_err());
        let err = from_str(&t.replace("\"version\":1", "\"version\":7")).unwrap_err();
        assert!(err.to_string().contains("version"));
        let err = from_str(&t.replace("outputs-fastest", "inputs-fastest")).unwrap_err();
        assert!(err.to_string().contains("layout"));
    }

    #[test]
    fn wrong_kind_is_reported() {
        let t = to_string(&examples::shared_coin().into()).unwrap();
        let err = from_str(&t).unwrap().into_nlocal().unwrap_err();
        assert!(err.to_string().contains("nlocal"));
    }
}
