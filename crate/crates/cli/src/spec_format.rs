//! JSON text format for enumeration specs.
//!
//! ```json
//! {"prefix": ["3/2", "1/8"], "tail": {"kind": "constant", "value": "2"}}
//! ```
//!
//! Tails are `{"kind":"constant","value":r}`, `{"kind":"cycle"}` or
//! `{"kind":"affine","a":r,"b":r}`. Every rational is a `"p/q"` string.
//! Errors carry a line/column for syntax problems and a JSON path for
//! everything else.

use escape_core::{EnumerationError, EnumerationSpec, Rational, TailRule};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("at {path}: {message}")]
    Invalid { path: String, message: String },
}

impl SpecError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SpecError> {
    value
        .as_object()
        .ok_or_else(|| SpecError::at(path, "expected an object"))
}

fn only_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), SpecError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(SpecError::at(format!("{path}.{k}"), "unexpected field")),
        None => Ok(()),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, SpecError> {
    obj.get(key)
        .ok_or_else(|| SpecError::at(path, format!("missing field \"{key}\"")))
}

fn rational(value: &Value, path: &str) -> Result<Rational, SpecError> {
    let text = value
        .as_str()
        .ok_or_else(|| SpecError::at(path, "expected a rational string \"p/q\""))?;
    text.parse()
        .map_err(|e: escape_core::numerics::NumericsError| SpecError::at(path, e.to_string()))
}

fn tail_rule(value: &Value) -> Result<TailRule, SpecError> {
    let obj = object(value, "$.tail")?;
    let kind = field(obj, "kind", "$.tail")?
        .as_str()
        .ok_or_else(|| SpecError::at("$.tail.kind", "expected a string"))?;
    match kind {
        "constant" => {
            only_keys(obj, &["kind", "value"], "$.tail")?;
            Ok(TailRule::Constant(rational(
                field(obj, "value", "$.tail")?,
                "$.tail.value",
            )?))
        }
        "cycle" => {
            only_keys(obj, &["kind"], "$.tail")?;
            Ok(TailRule::Cycle)
        }
        "affine" => {
            only_keys(obj, &["kind", "a", "b"], "$.tail")?;
            let a = rational(field(obj, "a", "$.tail")?, "$.tail.a")?;
            let b = rational(field(obj, "b", "$.tail")?, "$.tail.b")?;
            Ok(TailRule::Affine { a, b })
        }
        other => Err(SpecError::at(
            "$.tail.kind",
            format!("unknown tail kind {other:?} (expected constant, cycle or affine)"),
        )),
    }
}

pub fn parse_spec(text: &[u8]) -> Result<EnumerationSpec, SpecError> {
    let root: Value = serde_json::from_slice(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = object(&root, "$")?;
    only_keys(obj, &["prefix", "tail"], "$")?;
    let prefix = field(obj, "prefix", "$")?
        .as_array()
        .ok_or_else(|| SpecError::at("$.prefix", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| rational(v, &format!("$.prefix[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let tail = tail_rule(field(obj, "tail", "$")?)?;
    EnumerationSpec::new(prefix, tail).map_err(|e| match e {
        EnumerationError::CycleWithoutPrefix => {
            SpecError::at("$.tail", "cycle needs a nonempty prefix")
        }
        other => SpecError::at("$", other.to_string()),
    })
}

pub fn spec_to_json(spec: &EnumerationSpec) -> Value {
    let tail = match spec.tail() {
        TailRule::Constant(c) => json!({"kind": "constant", "value": c}),
        TailRule::Cycle => json!({"kind": "cycle"}),
        TailRule::Affine { a, b } => json!({"kind": "affine", "a": a, "b": b}),
    };
    json!({"prefix": spec.prefix(), "tail": tail})
}

/// Canonical single-line form; `parse_spec` accepts it back unchanged.
pub fn serialize_spec(spec: &EnumerationSpec) -> String {
    spec_to_json(spec).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn invalid_path(text: &str) -> String {
        match parse_spec(text.as_bytes()) {
            Err(SpecError::Invalid { path, .. }) => path,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn parses_worked_example() {
        let spec =
            parse_spec(br#"{"prefix":["3/2","1/8"],"tail":{"kind":"constant","value":"2"}}"#)
                .unwrap();
        assert_eq!(spec.prefix(), &[q("3/2"), q("1/8")]);
        assert_eq!(spec.tail(), &TailRule::Constant(q("2")));
    }

    #[test]
    fn cycle_needs_prefix() {
        let err = parse_spec(br#"{"prefix":[],"tail":{"kind":"cycle"}}"#).unwrap_err();
        assert_eq!(err.to_string(), "at $.tail: cycle needs a nonempty prefix");
    }

    #[test]
    fn decimals_are_rejected_with_position() {
        let text = r#"{"prefix":["1","0.5"],"tail":{"kind":"constant","value":"1"}}"#;
        let err = parse_spec(text.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("at $.prefix[1]:"), "{err}");
        assert!(err.to_string().contains("decimal"));
    }

    #[test]
    fn other_malformed_inputs() {
        assert_eq!(invalid_path(r#"{"prefix":[],"tail":{"kind":"linear"}}"#), "$.tail.kind");
        assert_eq!(invalid_path(r#"{"prefix":[1],"tail":{"kind":"cycle"}}"#), "$.prefix[0]");
        assert_eq!(invalid_path(r#"{"prefix":[],"tail":{"kind":"affine","a":"1"}}"#), "$.tail");
        assert_eq!(
            invalid_path(r#"{"prefix":[],"tail":{"kind":"affine","a":"1","b":"1/0"}}"#),
            "$.tail.b"
        );
        assert_eq!(invalid_path(r#"{"prefix":[],"tail":{"kind":"cycle","n":1}}"#), "$.tail.n");
        assert_eq!(invalid_path(r#"{"tail":{"kind":"cycle"}}"#), "$");
        assert_eq!(invalid_path(r#"[1,2]"#), "$");
        match parse_spec(b"{\n  \"prefix\": [,]\n}") {
            Err(SpecError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn affine_zero_slope_normalizes_to_constant() {
        let spec =
            parse_spec(br#"{"prefix":[],"tail":{"kind":"affine","a":"0","b":"5/3"}}"#).unwrap();
        assert_eq!(spec.tail(), &TailRule::Constant(q("5/3")));
        assert_eq!(
            serialize_spec(&spec),
            r#"{"prefix":[],"tail":{"kind":"constant","value":"5/3"}}"#
        );
    }

    #[test]
    fn serialization_is_canonical() {
        let spec = parse_spec(br#"{"tail":{"b":"-2/4","a":"6/3","kind":"affine"},"prefix":["2/4"]}"#)
            .unwrap();
        assert_eq!(
            serialize_spec(&spec),
            r#"{"prefix":["1/2"],"tail":{"a":"2","b":"-1/2","kind":"affine"}}"#
        );
    }
}
