//! Run configuration: a scenario name plus flat `key = value` parameters
//! checked against a typed schema.
//!
//! Configuration files hold one `key = value` per line; `#` starts a
//! comment. Command-line parameters (`key=value` or `--key value`) are
//! applied after the file and override it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    TaylorGreen,
    MildSolve,
    HarnackProbe,
    AxisymRun,
    BlowupAnalyze,
    KernelTable,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::TaylorGreen,
        Scenario::MildSolve,
        Scenario::HarnackProbe,
        Scenario::AxisymRun,
        Scenario::BlowupAnalyze,
        Scenario::KernelTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TaylorGreen => "taylor-green",
            Scenario::MildSolve => "mild-solve",
            Scenario::HarnackProbe => "harnack-probe",
            Scenario::AxisymRun => "axisym-run",
            Scenario::BlowupAnalyze => "blowup-analyze",
            Scenario::KernelTable => "kernel-table",
        }
    }

    pub fn schema(self) -> &'static [Param] {
        match self {
            Scenario::TaylorGreen => TAYLOR_GREEN,
            Scenario::MildSolve => MILD_SOLVE,
            Scenario::HarnackProbe => HARNACK,
            Scenario::AxisymRun => AXISYM,
            Scenario::BlowupAnalyze => BLOWUP,
            Scenario::KernelTable => KERNEL_TABLE,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(
                "scenario",
                format!(
                    "unknown scenario '{s}'; expected one of {}",
                    Scenario::ALL.map(|k| k.name()).join(", ")
                ),
            ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Integer with a lower bound.
    Int(i64),
    /// Finite float.
    Float,
    /// Strictly positive float.
    Positive,
    /// Positive float or `auto`.
    PositiveOrAuto,
    Bool,
    Choice(&'static [&'static str]),
    /// Comma-separated floats.
    FloatList,
    /// `lo:hi:count`.
    Range,
    Text,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn p(key: &'static str, kind: Kind, default: &'static str, doc: &'static str) -> Param {
    Param {
        key,
        kind,
        default: Some(default),
        doc,
    }
}

const fn required(key: &'static str, kind: Kind, doc: &'static str) -> Param {
    Param {
        key,
        kind,
        default: None,
        doc,
    }
}

const TAYLOR_GREEN: &[Param] = &[
    p("N", Kind::Int(4), "64", "grid points per side (even)"),
    p("T", Kind::Positive, "1.0", "horizon"),
    p("dt", Kind::PositiveOrAuto, "auto", "time step; auto is T/128"),
    p("amplitude", Kind::Float, "1.0", "initial amplitude"),
    p("tol", Kind::Positive, "1e-10", "Picard sup-distance tolerance"),
    p("max_iter", Kind::Int(1), "50", "Picard iteration cap"),
];

const MILD_SOLVE: &[Param] = &[
    p("datum", Kind::Choice(&["taylor-green", "abc", "random-band", "erf"]), "taylor-green", "initial datum"),
    p("N", Kind::Int(4), "64", "grid points per side (even)"),
    p("dim", Kind::Int(2), "2", "2 or 3; abc needs 3"),
    p("T", Kind::Positive, "1.0", "horizon"),
    p("dt", Kind::PositiveOrAuto, "auto", "time step; auto is T/128"),
    p("tol", Kind::Positive, "1e-10", "Picard sup-distance tolerance"),
    p("max_iter", Kind::Int(1), "50", "Picard iteration cap"),
    p("amplitude", Kind::Float, "1.0", "datum scale"),
    p("k_lo", Kind::Positive, "1.0", "random-band lower wavenumber"),
    p("k_hi", Kind::Positive, "2.5", "random-band upper wavenumber"),
    p("smoothing_k", Kind::Int(0), "1", "spatial order of the smoothing diagnostic"),
    p("smoothing_l", Kind::Int(0), "0", "time order of the smoothing diagnostic"),
];

const HARNACK: &[Param] = &[
    p("lower", Kind::FloatList, "-1.0", "domain lower corner"),
    p("upper", Kind::FloatList, "1.0", "domain upper corner"),
    p("k_lower", Kind::FloatList, "0.0", "probe set K, lower corner"),
    p("k_upper", Kind::FloatList, "0.0", "probe set K, upper corner"),
    p("omega_lower", Kind::FloatList, "-0.5", "interior set, lower corner"),
    p("omega_upper", Kind::FloatList, "0.5", "interior set, upper corner"),
    p("T", Kind::Positive, "1.0", "horizon"),
    p("tau", Kind::Positive, "0.5", "start of the observation window"),
    p("deltas", Kind::FloatList, "0.5,0.2,0.1,0.05", "delta values"),
    p("drift", Kind::Float, "0.0", "constant drift along the first axis"),
    p("nodes", Kind::Int(5), "81", "grid nodes per axis"),
    p("dt", Kind::PositiveOrAuto, "auto", "time step; auto is T/400"),
    p("windows", Kind::FloatList, "1,0.5,0.25,0.125,0.0625,0.03125", "boundary pulse lengths as fractions of T"),
    p("levels", Kind::FloatList, "0,0.25,0.5,0.75,1", "initial levels"),
];

const AXISYM: &[Param] = &[
    p("case", Kind::Choice(&["swirl-bump", "no-swirl-bump", "coupled-bump", "rigid"]), "swirl-bump", "initial data"),
    p("r_max", Kind::Positive, "2.0", "cylinder radius"),
    p("z_min", Kind::Float, "-2.0", "lower end"),
    p("z_max", Kind::Float, "2.0", "upper end"),
    p("nr", Kind::Int(8), "33", "radial nodes"),
    p("nz", Kind::Int(8), "65", "axial nodes"),
    p("dt", Kind::Positive, "0.002", "time step"),
    p("steps", Kind::Int(1), "200", "number of steps"),
    p("every", Kind::Int(1), "10", "monitor and field output stride"),
    p("amplitude", Kind::Float, "1.0", "swirl (or vorticity, for no-swirl-bump) amplitude"),
    p("vorticity", Kind::Float, "4.0", "vorticity amplitude of coupled-bump"),
    p("sigma", Kind::Positive, "0.5", "bump width"),
    p("z_center", Kind::Float, "0.0", "bump centre"),
    p("swirl_source", Kind::Bool, "true", "couple swirl into the vorticity equation"),
];

const BLOWUP: &[Param] = &[
    required("traj", Kind::Text, "trace CSV with columns t,h and optionally sup_rho_u"),
    required("T", Kind::Positive, "candidate blow-up time"),
    p("window", Kind::Int(8), "16", "fit window in samples"),
];

const KERNEL_TABLE: &[Param] = &[
    p("kind", Kind::Choice(&["gamma", "g", "phi", "kij", "kijk"]), "kij", "kernel"),
    p("n", Kind::Int(2), "3", "space dimension (2 or 3)"),
    p("scales", Kind::Range, "1:100:20", "log-spaced scales lo:hi:count"),
];

fn bad(key: &str, message: impl Into<String>) -> Error {
    Error::config(key, message)
}

fn parse_float(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| bad(key, format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(bad(key, format!("'{s}' is not finite")));
    }
    Ok(v)
}

fn typed(param: &Param, raw: &str) -> Result<Value> {
    let key = param.key;
    let raw = raw.trim();
    Ok(match param.kind {
        Kind::Int(min) => {
            let v: i64 = raw.parse().map_err(|_| bad(key, format!("'{raw}' is not an integer")))?;
            if v < min {
                return Err(bad(key, format!("must be at least {min}, got {v}")));
            }
            json!(v)
        }
        Kind::Float => json!(parse_float(key, raw)?),
        Kind::Positive => {
            let v = parse_float(key, raw)?;
            if v <= 0.0 {
                return Err(bad(key, format!("must be positive, got {v}")));
            }
            json!(v)
        }
        Kind::PositiveOrAuto => {
            if raw == "auto" {
                json!("auto")
            } else {
                let v = parse_float(key, raw)?;
                if v <= 0.0 {
                    return Err(bad(key, format!("must be positive or auto, got {v}")));
                }
                json!(v)
            }
        }
        Kind::Bool => match raw {
            "true" | "1" | "yes" => json!(true),
            "false" | "0" | "no" => json!(false),
            _ => return Err(bad(key, format!("'{raw}' is not a boolean"))),
        },
        Kind::Choice(options) => {
            let lower = raw.to_ascii_lowercase();
            if !options.contains(&lower.as_str()) {
                return Err(bad(key, format!("'{raw}' is not one of {}", options.join(", "))));
            }
            json!(lower)
        }
        Kind::FloatList => {
            let v: Vec<f64> = raw.split(',').map(|s| parse_float(key, s)).collect::<Result<_>>()?;
            json!(v)
        }
        Kind::Range => {
            let parts: Vec<&str> = raw.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(key, format!("expected lo:hi:count, got '{raw}'")));
            }
            let lo = parse_float(key, parts[0])?;
            let hi = parse_float(key, parts[1])?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad(key, format!("bad count '{}'", parts[2])))?;
            if !(lo > 0.0 && hi > lo) || count < 2 {
                return Err(bad(key, format!("need 0 < lo < hi and count >= 2, got '{raw}'")));
            }
            json!({ "lo": lo, "hi": hi, "count": count })
        }
        Kind::Text => {
            if raw.is_empty() {
                return Err(bad(key, "must not be empty"));
            }
            json!(raw)
        }
    })
}

/// Validated configuration with every schema key resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
}

impl RunConfig {
    /// Resolve `entries` (in order, later wins) against the scenario schema.
    /// The key `seed` is accepted for every scenario.
    pub fn resolve(scenario: Scenario, entries: &[(String, String)], seed: Option<u64>) -> Result<Self> {
        let schema = scenario.schema();
        let mut raw: BTreeMap<&str, &str> = BTreeMap::new();
        let mut seed_value = 0u64;
        for (k, v) in entries {
            if k == "seed" {
                seed_value = v.trim().parse().map_err(|_| bad("seed", format!("'{v}' is not a non-negative integer")))?;
                continue;
            }
            let param = schema.iter().find(|p| p.key == k).ok_or_else(|| {
                bad(
                    k,
                    format!(
                        "unknown key for {scenario}; accepted keys: {}",
                        schema.iter().map(|p| p.key).collect::<Vec<_>>().join(", ")
                    ),
                )
            })?;
            raw.insert(param.key, v);
        }
        let mut params = BTreeMap::new();
        for param in schema {
            let text = match (raw.get(param.key), param.default) {
                (Some(v), _) => *v,
                (None, Some(d)) => d,
                (None, None) => return Err(bad(param.key, "required key is missing")),
            };
            params.insert(param.key.to_string(), typed(param, text)?);
        }
        Ok(Self {
            scenario,
            seed: seed.unwrap_or(seed_value),
            params,
        })
    }

    /// Parse `key = value` lines.
    pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value, got '{line}'", n + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", n + 1)));
            }
            out.push((k.to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    /// Parse command-line parameters: `key=value` or `--key value`.
    pub fn parse_args(args: &[String]) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if let Some(key) = a.strip_prefix("--") {
                if let Some((k, v)) = key.split_once('=') {
                    out.push((k.to_string(), v.to_string()));
                } else {
                    let v = it.next().ok_or_else(|| bad(key, "flag is missing its value"))?;
                    out.push((key.to_string(), v.clone()));
                }
            } else if let Some((k, v)) = a.split_once('=') {
                out.push((k.to_string(), v.to_string()));
            } else {
                return Err(bad(a, "expected key=value or --key value"));
            }
        }
        Ok(out)
    }

    fn value(&self, key: &str) -> &Value {
        self.params
            .get(key)
            .unwrap_or_else(|| panic!("key '{key}' is not in the {} schema", self.scenario))
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.value(key).as_f64().unwrap_or(f64::NAN)
    }

    pub fn usize(&self, key: &str) -> usize {
        self.value(key).as_u64().unwrap_or(0) as usize
    }

    pub fn bool(&self, key: &str) -> bool {
        self.value(key).as_bool().unwrap_or(false)
    }

    pub fn str(&self, key: &str) -> &str {
        self.value(key).as_str().unwrap_or("")
    }

    /// `None` for `auto`.
    pub fn auto_f64(&self, key: &str) -> Option<f64> {
        self.value(key).as_f64()
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        self.value(key)
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_f64).collect())
            .unwrap_or_default()
    }

    pub fn range(&self, key: &str) -> (f64, f64, usize) {
        let v = self.value(key);
        (
            v["lo"].as_f64().unwrap_or(f64::NAN),
            v["hi"].as_f64().unwrap_or(f64::NAN),
            v["count"].as_u64().unwrap_or(0) as usize,
        )
    }

    /// The resolved configuration as embedded in every output.
    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.scenario.name(),
            "seed": self.seed,
            "params": self.params,
        })
    }

    /// One `# key = value` line per resolved entry, for CSV headers.
    pub fn comment_lines(&self) -> String {
        let mut s = format!("# scenario = {}\n# seed = {}\n", self.scenario, self.seed);
        for (k, v) in &self.params {
            match v {
                Value::String(text) => s.push_str(&format!("# {k} = {text}\n")),
                other => s.push_str(&format!("# {k} = {other}\n")),
            }
        }
        s
    }
}
