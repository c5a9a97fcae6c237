//! JSON result documents and number rendering.

use emdkit::scalar::{decimal_string, rational_string};
use emdkit::Rational;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const DEFAULT_DIGITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultDocument {
    pub command: String,
    /// SHA-256 of the raw input bytes, or of the canonical argument string
    /// for commands without an input file.
    pub inputs_digest: String,
    pub method: Value,
    pub values: Map<String, Value>,
}

impl ResultDocument {
    pub fn new(command: &str, digest: String) -> Self {
        ResultDocument {
            command: command.to_string(),
            inputs_digest: digest,
            method: Value::Null,
            values: Map::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents always serialize")
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `{"exact": "p/q", "decimal": "..."}`.
pub fn exact_value(r: &Rational, digits: usize) -> Value {
    json!({ "exact": rational_string(r), "decimal": decimal_string(r, digits) })
}

/// `{"exact": null, "decimal": "..."}` for a float result.
pub fn float_value(v: f64, digits: usize) -> Value {
    let decimal = match Rational::from_float(v) {
        Some(r) => decimal_string(&r, digits),
        None => v.to_string(),
    };
    json!({ "exact": null, "decimal": decimal })
}

pub fn exact_list(values: &[Rational], digits: usize) -> Value {
    Value::Array(values.iter().map(|v| exact_value(v, digits)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use emdkit::scalar::{parse_rational, ratio};
    use proptest::prelude::*;

    #[test]
    fn renders_both_forms() {
        let v = exact_value(&ratio(7, 2), 10);
        assert_eq!(v["exact"], "7/2");
        assert_eq!(v["decimal"], "3.5");
        let f = float_value(72.66851, 6);
        assert_eq!(f["decimal"], "72.6685");
        assert!(f["exact"].is_null());
    }

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    proptest! {
        #[test]
        fn decimal_agrees_with_exact(p in -1_000_000i64..1_000_000, q in 1i64..10_000, digits in 1usize..=12) {
            let r = ratio(p, q);
            let v = exact_value(&r, digits);
            let exact = parse_rational(v["exact"].as_str().unwrap()).unwrap();
            prop_assert_eq!(&exact, &r);
            let back = parse_rational(v["decimal"].as_str().unwrap()).unwrap();
            let tol = (if r < ratio(0, 1) { -r.clone() } else { r.clone() }) * parse_rational(&format!("5e-{digits}")).unwrap();
            let err = if back > r { back - &r } else { &r - back };
            prop_assert!(err <= tol);
        }
    }
}
