//! Structured reports: named assertions with their tolerances.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub tolerance: f64,
    pub pass: bool,
}

/// JSON number, or the string `"unbounded"` for infinities and `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::from("nan")
    } else if x.is_infinite() {
        Value::from(if x > 0.0 { "unbounded" } else { "-unbounded" })
    } else {
        Value::from(x)
    }
}

/// Serializes `f64` through [`num`], for `#[serde(serialize_with)]`.
pub fn ser_num<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    num(*x).serialize(s)
}

pub fn ser_nums<S: serde::Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
    x.iter().map(|v| num(*v)).collect::<Vec<_>>().serialize(s)
}

pub fn ser_opt_num<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    x.map(num).serialize(s)
}

impl Assertion {
    /// `|actual − expected| ≤ tolerance`; two infinities of the same sign agree.
    pub fn close(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        let pass = if expected.is_infinite() || actual.is_infinite() {
            expected == actual
        } else {
            (actual - expected).abs() <= tolerance
        };
        Assertion { name: name.into(), expected: num(expected), actual: num(actual), tolerance, pass }
    }

    /// `actual ≤ bound`.
    pub fn at_most(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        Assertion {
            name: name.into(),
            expected: Value::from(format!("<= {bound}")),
            actual: num(actual),
            tolerance: bound,
            pass: actual <= bound,
        }
    }

    /// `actual ≥ bound`.
    pub fn at_least(name: impl Into<String>, actual: f64, bound: f64) -> Self {
        Assertion {
            name: name.into(),
            expected: Value::from(format!(">= {bound}")),
            actual: num(actual),
            tolerance: bound,
            pass: actual >= bound,
        }
    }

    pub fn equal<T: Serialize + PartialEq>(name: impl Into<String>, expected: T, actual: T) -> Self {
        let pass = expected == actual;
        Assertion {
            name: name.into(),
            expected: serde_json::to_value(&expected).unwrap_or(Value::Null),
            actual: serde_json::to_value(&actual).unwrap_or(Value::Null),
            tolerance: 0.0,
            pass,
        }
    }

    pub fn holds(name: impl Into<String>, pass: bool) -> Self {
        Assertion::equal(name, true, pass)
    }
}

pub fn all_pass(assertions: &[Assertion]) -> bool {
    assertions.iter().all(|a| a.pass)
}

/// Top-level CLI report. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub scene: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, scene: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            scene: scene.into(),
            parameters: Map::new(),
            results: Value::Null,
            assertions: Vec::new(),
            pass: true,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn results(mut self, value: impl Serialize) -> Self {
        self.results = serde_json::to_value(value).unwrap_or(Value::Null);
        self
    }

    pub fn assert_all(mut self, assertions: impl IntoIterator<Item = Assertion>) -> Self {
        self.assertions.extend(assertions);
        self.pass = all_pass(&self.assertions);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
