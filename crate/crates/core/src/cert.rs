//! Versioned certificate documents. Every construction command emits one;
//! `verify` re-checks it from the recorded input and result alone.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA: &str = "promc-certificate/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Hom,
    Levelize,
    Matching,
    DetectSpecial,
    Factor,
    Lift,
    ProFactorIso,
    ZigzagWe,
    TwoOfThree,
    ProperPullback,
    Cocell,
    TowerLimit,
    Adjunction,
    CheckAxioms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub schema: String,
    pub kind: Kind,
    pub instance: String,
    pub input: Value,
    pub result: Value,
}

impl Certificate {
    pub fn new(kind: Kind, instance: &str, input: Value, result: Value) -> Self {
        Certificate { schema: SCHEMA.to_string(), kind, instance: instance.to_string(), input, result }
    }

    pub fn parse(v: &Value) -> Result<Self> {
        let schema = v.get("schema").and_then(Value::as_str).unwrap_or_default();
        if schema != SCHEMA {
            return Err(Error::MalformedObject(format!("unsupported certificate schema {schema:?}, expected {SCHEMA:?}")));
        }
        Certificate::deserialize(v).map_err(|e| Error::MalformedObject(format!("certificate: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn schema_tag_is_checked() {
        let c = Certificate::new(Kind::Lift, "set-bij", json!({}), json!({}));
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(Certificate::parse(&v).unwrap(), c);
        let mut bad = v.clone();
        bad["schema"] = json!("promc-certificate/0");
        assert!(Certificate::parse(&bad).is_err());
    }
}
