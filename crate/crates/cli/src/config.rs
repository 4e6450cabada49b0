//! Experiment configuration files.
//!
//! Parsing runs in two passes. Every field is first decoded on its own so
//! that one bad field does not hide the next, then the semantic rules that
//! tie fields together are checked. All violations are reported at once.

use std::path::PathBuf;

use conidx_core::{Convention, EvalAt, ExperimentSpec, Interval, NamedIrrational, Operator, PointSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A point as written in a config: `{"rational":[p,q]}` or
/// `{"irrational":"name"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointJson {
    Rational([u64; 2]),
    Irrational(String),
}

impl PointJson {
    pub fn to_spec(&self) -> Result<PointSpec, String> {
        match self {
            PointJson::Rational([p, q]) => PointSpec::rational(*p, *q).map_err(|e| e.to_string()),
            PointJson::Irrational(name) => NamedIrrational::from_name(name)
                .map(PointSpec::Irrational)
                .ok_or_else(|| {
                    format!("unknown irrational \"{name}\"; presets are {}", NamedIrrational::preset_list())
                }),
        }
    }

    /// `p/q` or a preset name, as accepted on the command line.
    pub fn parse_arg(text: &str) -> Result<Self, String> {
        match text.split_once('/') {
            Some((p, q)) => {
                let p = p.trim().parse().map_err(|_| format!("bad numerator in \"{text}\""))?;
                let q = q.trim().parse().map_err(|_| format!("bad denominator in \"{text}\""))?;
                Ok(PointJson::Rational([p, q]))
            }
            None => Ok(PointJson::Irrational(text.trim().to_string())),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// One `index` run. Lagrange kinds take `theta` (and `gamma`) as `θ₀/π`,
/// Shepard kinds take the jump abscissas `x0` (and `y0`) plus `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: Operator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Value of the univariate Lagrange step at its jump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_x: Option<EvalAt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_y: Option<EvalAt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_targets: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cross_check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
}

const FIELDS: [&str; 18] = [
    "schema_version",
    "kind",
    "theta",
    "gamma",
    "x0",
    "y0",
    "s",
    "d",
    "n",
    "at_x",
    "at_y",
    "convention",
    "epsilon",
    "checkpoints",
    "tol",
    "measure_targets",
    "cross_check",
    "output",
];

struct Checker<'a> {
    obj: &'a Map<String, Value>,
    errors: Vec<String>,
}

impl Checker<'_> {
    fn field<T: DeserializeOwned>(&mut self, name: &str, required: bool) -> Option<T> {
        match self.obj.get(name) {
            None | Some(Value::Null) => {
                if required {
                    self.errors.push(format!("missing required field \"{name}\""));
                }
                None
            }
            Some(v) => match serde_json::from_value(v.clone()) {
                Ok(t) => Some(t),
                Err(e) => {
                    self.errors.push(format!("{name}: {e}"));
                    None
                }
            },
        }
    }

    fn point(&mut self, name: &str, required: bool, shepard: bool) {
        let Some(p) = self.field::<PointJson>(name, required) else {
            return;
        };
        let checked = p.to_spec().and_then(|spec| {
            if shepard {
                spec.validate_grid()
            } else {
                spec.validate_angle()
            }
            .map_err(|e| e.to_string())
        });
        if let Err(e) = checked {
            self.errors.push(format!("{name}: {e}"));
        }
    }

    fn forbid(&mut self, name: &str, kind: Operator) {
        if self.obj.get(name).is_some_and(|v| !v.is_null()) {
            self.errors.push(format!("field \"{name}\" does not apply to {}", kind.name()));
        }
    }

    fn positive(&mut self, name: &str) {
        if let Some(v) = self.field::<f64>(name, false) {
            if !(v > 0.0 && v.is_finite()) {
                self.errors.push(format!("{name} must be positive and finite, got {v}"));
            }
        }
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(vec![format!("malformed JSON: {e}")]))?;
    parse_config_value(&value)
}

pub fn parse_config_value(value: &Value) -> Result<ExperimentConfig, CliError> {
    let Some(obj) = value.as_object() else {
        return Err(CliError::Config(vec!["config must be a JSON object".into()]));
    };
    let mut c = Checker { obj, errors: Vec::new() };
    for key in obj.keys() {
        if !FIELDS.contains(&key.as_str()) {
            c.errors.push(format!("unknown field \"{key}\""));
        }
    }

    if let Some(v) = c.field::<u32>("schema_version", true) {
        if v != SCHEMA_VERSION {
            c.errors.push(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}"));
        }
    }
    let kind = c.field::<Operator>("kind", true);
    if let Some(n) = c.field::<usize>("n", true) {
        if n < 16 {
            c.errors.push(format!("n must be at least 16, got {n}"));
        }
    }
    for name in ["at_x", "at_y"] {
        c.field::<EvalAt>(name, false);
    }
    c.field::<Convention>("convention", false);
    c.positive("epsilon");
    c.positive("tol");
    if let Some(k) = c.field::<usize>("checkpoints", false) {
        if k < 2 {
            c.errors.push(format!("checkpoints must be at least 2, got {k}"));
        }
    }
    if let Some(ivs) = c.field::<Vec<[f64; 2]>>("measure_targets", false) {
        for [lo, hi] in ivs {
            if let Err(e) = Interval::new(lo, hi) {
                c.errors.push(format!("measure_targets: {e}"));
            }
        }
    }
    c.field::<bool>("cross_check", false);
    c.field::<OutputPaths>("output", false);

    if let Some(kind) = kind {
        if kind.is_shepard() {
            c.point("x0", true, true);
            if kind.is_bivariate() {
                c.point("y0", true, true);
            } else {
                c.forbid("y0", kind);
            }
            if let Some(s) = c.field::<f64>("s", true) {
                if !(s >= 1.0 && s.is_finite()) {
                    c.errors.push(format!("s must be ≥ 1, got {s}"));
                }
            }
            for name in ["theta", "gamma", "d"] {
                c.forbid(name, kind);
            }
        } else {
            c.point("theta", true, false);
            if kind.is_bivariate() {
                c.point("gamma", true, false);
                c.forbid("d", kind);
            } else {
                c.forbid("gamma", kind);
                if let Some(d) = c.field::<f64>("d", false) {
                    if !d.is_finite() {
                        c.errors.push("d must be finite".into());
                    }
                }
            }
            for name in ["x0", "y0", "s", "convention"] {
                c.forbid(name, kind);
            }
        }
        if !kind.is_bivariate() {
            c.forbid("at_y", kind);
            c.forbid("cross_check", kind);
        }
    }

    if !c.errors.is_empty() {
        return Err(CliError::Config(c.errors));
    }
    let config: ExperimentConfig =
        serde_json::from_value(value.clone()).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    // budget and remaining cross-field rules
    config.to_spec()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Harness experiment described by this config.
    pub fn to_spec(&self) -> Result<ExperimentSpec, CliError> {
        let point = |name: &str, p: &Option<PointJson>| -> Result<PointSpec, CliError> {
            p.as_ref()
                .ok_or_else(|| CliError::Config(vec![format!("missing required field \"{name}\"")]))?
                .to_spec()
                .map_err(|e| CliError::Config(vec![format!("{name}: {e}")]))
        };
        let mut spec = match self.kind {
            Operator::Lagrange1d => ExperimentSpec::lagrange_1d(point("theta", &self.theta)?, self.d.unwrap_or(1.0), self.n),
            Operator::Lagrange2d => {
                ExperimentSpec::lagrange_2d(point("theta", &self.theta)?, point("gamma", &self.gamma)?, self.n)
            }
            Operator::Shepard1d => ExperimentSpec::shepard_1d(self.s.unwrap_or(f64::NAN), point("x0", &self.x0)?, self.n),
            Operator::Shepard2d => ExperimentSpec::shepard_2d(
                self.s.unwrap_or(f64::NAN),
                point("x0", &self.x0)?,
                point("y0", &self.y0)?,
                self.n,
            ),
        };
        spec.at_x = self.at_x.unwrap_or(EvalAt::Jump);
        spec.at_y = self.at_y.unwrap_or(EvalAt::Jump);
        if let Some(conv) = self.convention {
            spec.convention = conv;
        }
        spec.epsilon = self.epsilon;
        spec.tol = self.tol;
        if let Some(k) = self.checkpoints {
            spec.checkpoints = k;
        }
        if let Some(ivs) = &self.measure_targets {
            spec.measure_targets = ivs.iter().map(|&[lo, hi]| Interval { lo, hi }).collect();
        }
        spec.validate().map_err(|e| CliError::Config(vec![e.to_string()]))?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(CliError::Config(v)) => v,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_lagrange_config() {
        let c = parse_config(r#"{"schema_version":1,"kind":"lagrange1d","theta":{"rational":[1,3]},"n":3000}"#).unwrap();
        assert_eq!(c.kind, Operator::Lagrange1d);
        let spec = c.to_spec().unwrap();
        assert_eq!(spec.x, PointSpec::Rational { p: 1, q: 3 });
        assert_eq!(spec.d, 1.0);
    }

    #[test]
    fn s_below_one() {
        let v = violations(r#"{"schema_version":1,"kind":"shepard1d","x0":{"rational":[1,2]},"s":0.5,"n":100}"#);
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("s must be ≥ 1"), "{v:?}");
    }

    #[test]
    fn unknown_irrational_lists_presets() {
        let v = violations(r#"{"schema_version":1,"kind":"lagrange1d","theta":{"irrational":"sqrt3"},"n":100}"#);
        assert!(v[0].contains("sqrt3") && v[0].contains(&NamedIrrational::preset_list()), "{v:?}");
    }

    #[test]
    fn all_violations_are_collected() {
        let v = violations(
            r#"{"schema_version":2,"kind":"shepard2d","x0":{"rational":[1,0]},"s":0.5,"n":8,"colour":"red","theta":{"rational":[1,3]}}"#,
        );
        let joined = v.join("\n");
        for needle in ["schema_version", "colour", "n must be", "nonzero", "y0", "s must be", "theta"] {
            assert!(joined.contains(needle), "missing {needle} in {joined}");
        }
        assert!(v.len() >= 7);
    }

    #[test]
    fn budget_is_enforced_after_field_checks() {
        let v = violations(r#"{"schema_version":1,"kind":"lagrange2d","theta":{"rational":[1,3]},"gamma":{"rational":[1,2]},"n":5000}"#);
        assert!(v[0].contains("budget"), "{v:?}");
    }

    #[test]
    fn round_trip() {
        let text = r#"{"schema_version":1,"kind":"shepard2d","x0":{"rational":[1,2]},"y0":{"irrational":"golden_frac"},
            "s":2.0,"n":500,"at_x":{"value":0.25},"convention":"lower_left_open","epsilon":0.01,"checkpoints":12,
            "tol":0.03,"measure_targets":[[0.1,0.2]],"cross_check":true,"output":{"report":"r.json"}}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.to_json()).unwrap(), c);
        assert_eq!(c.to_spec().unwrap().convention, Convention::LowerLeftOpen);
    }

    #[test]
    fn point_args() {
        assert_eq!(PointJson::parse_arg("1/3").unwrap(), PointJson::Rational([1, 3]));
        assert_eq!(PointJson::parse_arg("inv_sqrt2").unwrap(), PointJson::Irrational("inv_sqrt2".into()));
        assert!(PointJson::parse_arg("x/3").is_err());
    }
}
