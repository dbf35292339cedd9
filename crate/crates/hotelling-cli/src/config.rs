//! Strict JSON run configuration.
//!
//! The document has top-level blocks `scenario`, `grid`, `output` and an
//! optional `sweep`. Parsing is strict: any key outside the schema is
//! rejected by name — a typo in a scientific parameter must never silently
//! fall back to a default. Parsed configs have already passed scenario
//! validation, so a `RunConfig` in hand is solvable as-is.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use hotelling_core::{
    CostSpec, EconError, GridSpec, HorizonPolicy, RevenueSpec, Scenario, ScenarioSpec,
    SolverError, SweepParameter, DEFAULT_LAMBDA_TOL,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Malformed JSON; the message carries line and column.
    #[error("config parse error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown key `{key}` in {context}")]
    UnknownKey { key: String, context: String },
    #[error("missing key `{key}` in {context}")]
    MissingKey { key: &'static str, context: String },
    #[error("`{context}` must be {expected}")]
    WrongType { context: String, expected: &'static str },
    #[error("unknown {what} `{got}`; expected one of {allowed}")]
    UnknownVariant {
        what: &'static str,
        got: String,
        allowed: &'static str,
    },
    #[error("`{context}`: {detail}")]
    Invalid { context: String, detail: String },
    #[error(transparent)]
    Scenario(#[from] EconError),
    #[error(transparent)]
    Grid(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub formats: Vec<OutputFormat>,
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// A fully parsed and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridSpec,
    pub lambda_tol: f64,
    pub output: OutputSpec,
    pub sweep: Option<SweepSpec>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text)?;
    let root = as_object(&value, "top level")?;
    check_keys(root, "top level", &["scenario", "grid", "output", "sweep"])?;

    let scenario = parse_scenario(require(root, "scenario", "top level")?)?;
    let (grid, lambda_tol) = parse_grid(require(root, "grid", "top level")?)?;
    let output = parse_output(require(root, "output", "top level")?)?;
    let sweep = match root.get("sweep") {
        Some(v) => Some(parse_sweep(v)?),
        None => None,
    };

    Ok(RunConfig { scenario, grid, lambda_tol, output, sweep })
}

fn parse_scenario(value: &Value) -> Result<Scenario, ConfigError> {
    let block = as_object(value, "scenario")?;
    check_keys(block, "scenario", &["revenue", "cost", "rho", "stock"])?;

    let revenue_map = as_object(require(block, "revenue", "scenario")?, "scenario.revenue")?;
    let kind = string_field(revenue_map, "kind", "scenario.revenue")?;
    let revenue = match kind.as_str() {
        "price_taker" => {
            check_keys(revenue_map, "scenario.revenue", &["kind", "p0"])?;
            RevenueSpec::PriceTaker { p0: number_field(revenue_map, "p0", "scenario.revenue")? }
        }
        "iso_elastic" => {
            check_keys(revenue_map, "scenario.revenue", &["kind", "p0", "epsilon"])?;
            RevenueSpec::IsoElastic {
                p0: number_field(revenue_map, "p0", "scenario.revenue")?,
                epsilon: number_field(revenue_map, "epsilon", "scenario.revenue")?,
            }
        }
        "drift" => {
            check_keys(revenue_map, "scenario.revenue", &["kind", "p0", "g"])?;
            RevenueSpec::Drift {
                p0: number_field(revenue_map, "p0", "scenario.revenue")?,
                g: number_field(revenue_map, "g", "scenario.revenue")?,
            }
        }
        "linear_demand" => {
            check_keys(revenue_map, "scenario.revenue", &["kind", "a", "b"])?;
            RevenueSpec::LinearDemand {
                a: number_field(revenue_map, "a", "scenario.revenue")?,
                b: number_field(revenue_map, "b", "scenario.revenue")?,
            }
        }
        other => {
            return Err(ConfigError::UnknownVariant {
                what: "revenue kind",
                got: other.to_string(),
                allowed: "price_taker, iso_elastic, drift, linear_demand",
            })
        }
    };

    let cost_map = as_object(require(block, "cost", "scenario")?, "scenario.cost")?;
    let kind = string_field(cost_map, "kind", "scenario.cost")?;
    let cost = match kind.as_str() {
        "quadratic" => {
            check_keys(cost_map, "scenario.cost", &["kind", "c", "d"])?;
            CostSpec::Quadratic {
                c: number_field(cost_map, "c", "scenario.cost")?,
                d: number_field(cost_map, "d", "scenario.cost")?,
            }
        }
        "power" => {
            check_keys(cost_map, "scenario.cost", &["kind", "a", "beta"])?;
            CostSpec::Power {
                a: number_field(cost_map, "a", "scenario.cost")?,
                beta: number_field(cost_map, "beta", "scenario.cost")?,
            }
        }
        other => {
            return Err(ConfigError::UnknownVariant {
                what: "cost kind",
                got: other.to_string(),
                allowed: "quadratic, power",
            })
        }
    };

    let spec = ScenarioSpec {
        revenue,
        cost,
        rho: number_field(block, "rho", "scenario")?,
        stock: number_field(block, "stock", "scenario")?,
    };
    Ok(spec.validate()?)
}

fn parse_grid(value: &Value) -> Result<(GridSpec, f64), ConfigError> {
    let block = as_object(value, "grid")?;
    check_keys(block, "grid", &["points", "horizon", "tail_mass_tol", "lambda_tol"])?;

    let points_value = require(block, "points", "grid")?;
    let points = points_value
        .as_u64()
        .ok_or(ConfigError::WrongType {
            context: "grid.points".to_string(),
            expected: "a positive integer",
        })? as usize;

    let horizon = match block.get("horizon") {
        None => HorizonPolicy::ToExhaustion,
        Some(Value::String(s)) if s == "to_exhaustion" => HorizonPolicy::ToExhaustion,
        Some(Value::String(s)) => {
            return Err(ConfigError::UnknownVariant {
                what: "horizon policy",
                got: s.clone(),
                allowed: "\"to_exhaustion\" or {\"fixed\": t_max}",
            })
        }
        Some(v) => {
            let map = as_object(v, "grid.horizon")?;
            check_keys(map, "grid.horizon", &["fixed"])?;
            HorizonPolicy::Fixed(number_field(map, "fixed", "grid.horizon")?)
        }
    };

    let mut grid = GridSpec::new(points).with_horizon(horizon);
    if let Some(v) = block.get("tail_mass_tol") {
        grid.tail_mass_tol = finite_number(v, "grid.tail_mass_tol")?;
    }
    grid.validate()?;

    let lambda_tol = match block.get("lambda_tol") {
        Some(v) => {
            let tol = finite_number(v, "grid.lambda_tol")?;
            if tol <= 0.0 {
                return Err(ConfigError::Invalid {
                    context: "grid.lambda_tol".to_string(),
                    detail: format!("must be positive, got {tol}"),
                });
            }
            tol
        }
        None => DEFAULT_LAMBDA_TOL,
    };
    Ok((grid, lambda_tol))
}

fn parse_output(value: &Value) -> Result<OutputSpec, ConfigError> {
    let block = as_object(value, "output")?;
    check_keys(block, "output", &["formats", "dir"])?;
    let formats_value = require(block, "formats", "output")?;
    let list = formats_value.as_array().ok_or(ConfigError::WrongType {
        context: "output.formats".to_string(),
        expected: "an array of format names",
    })?;
    let mut formats = Vec::with_capacity(list.len());
    for entry in list {
        let name = entry.as_str().ok_or(ConfigError::WrongType {
            context: "output.formats".to_string(),
            expected: "an array of format names",
        })?;
        formats.push(match name {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "svg" => OutputFormat::Svg,
            other => {
                return Err(ConfigError::UnknownVariant {
                    what: "output format",
                    got: other.to_string(),
                    allowed: "csv, json, svg",
                })
            }
        });
    }
    let dir = match block.get("dir") {
        Some(v) => PathBuf::from(v.as_str().ok_or(ConfigError::WrongType {
            context: "output.dir".to_string(),
            expected: "a directory path string",
        })?),
        None => PathBuf::from("."),
    };
    Ok(OutputSpec { formats, dir })
}

fn parse_sweep(value: &Value) -> Result<SweepSpec, ConfigError> {
    let block = as_object(value, "sweep")?;
    check_keys(block, "sweep", &["parameter", "values"])?;
    let parameter = match string_field(block, "parameter", "sweep")?.as_str() {
        "rho" => SweepParameter::Rho,
        "epsilon" => SweepParameter::Epsilon,
        "g" => SweepParameter::G,
        other => {
            return Err(ConfigError::UnknownVariant {
                what: "sweep parameter",
                got: other.to_string(),
                allowed: "rho, epsilon, g",
            })
        }
    };
    let raw = require(block, "values", "sweep")?
        .as_array()
        .ok_or(ConfigError::WrongType {
            context: "sweep.values".to_string(),
            expected: "an array of numbers",
        })?;
    if raw.is_empty() {
        return Err(ConfigError::Invalid {
            context: "sweep.values".to_string(),
            detail: "must not be empty".to_string(),
        });
    }
    let values = raw
        .iter()
        .map(|v| finite_number(v, "sweep.values"))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(SweepSpec { parameter, values })
}

// Canonical serialization: all effective values written out, fixed key
// order, so parse -> serialize -> parse is the identity on `RunConfig`.

#[derive(Serialize)]
struct ConfigJson<'a> {
    scenario: &'a ScenarioSpec,
    grid: GridJson,
    output: OutputJson<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepJson<'a>>,
}

#[derive(Serialize)]
struct GridJson {
    points: usize,
    horizon: HorizonJson,
    tail_mass_tol: f64,
    lambda_tol: f64,
}

enum HorizonJson {
    ToExhaustion,
    Fixed(f64),
}

impl Serialize for HorizonJson {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            HorizonJson::ToExhaustion => serializer.serialize_str("to_exhaustion"),
            HorizonJson::Fixed(t) => {
                use serde::ser::SerializeMap;
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("fixed", t)?;
                map.end()
            }
        }
    }
}

#[derive(Serialize)]
struct OutputJson<'a> {
    formats: &'a [OutputFormat],
    dir: &'a str,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    parameter: SweepParameter,
    values: &'a [f64],
}

pub fn serialize_config(config: &RunConfig) -> String {
    let json = ConfigJson {
        scenario: config.scenario.spec(),
        grid: GridJson {
            points: config.grid.points,
            horizon: match config.grid.horizon {
                HorizonPolicy::ToExhaustion => HorizonJson::ToExhaustion,
                HorizonPolicy::Fixed(t) => HorizonJson::Fixed(t),
            },
            tail_mass_tol: config.grid.tail_mass_tol,
            lambda_tol: config.lambda_tol,
        },
        output: OutputJson {
            formats: &config.output.formats,
            dir: config.output.dir.to_str().unwrap_or("."),
        },
        sweep: config.sweep.as_ref().map(|s| SweepJson {
            parameter: s.parameter,
            values: &s.values,
        }),
    };
    serde_json::to_string_pretty(&json).expect("config serialization cannot fail")
}

fn as_object<'a>(value: &'a Value, context: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    value.as_object().ok_or(ConfigError::WrongType {
        context: context.to_string(),
        expected: "a JSON object",
    })
}

fn check_keys(
    map: &Map<String, Value>,
    context: &str,
    allowed: &[&str],
) -> Result<(), ConfigError> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                key: key.clone(),
                context: context.to_string(),
            });
        }
    }
    Ok(())
}

fn require<'a>(
    map: &'a Map<String, Value>,
    key: &'static str,
    context: &str,
) -> Result<&'a Value, ConfigError> {
    map.get(key).ok_or(ConfigError::MissingKey { key, context: context.to_string() })
}

fn finite_number(value: &Value, context: &str) -> Result<f64, ConfigError> {
    let x = value.as_f64().ok_or(ConfigError::WrongType {
        context: context.to_string(),
        expected: "a number",
    })?;
    if !x.is_finite() {
        return Err(ConfigError::Invalid {
            context: context.to_string(),
            detail: "must be a finite decimal".to_string(),
        });
    }
    Ok(x)
}

fn number_field(
    map: &Map<String, Value>,
    key: &'static str,
    context: &str,
) -> Result<f64, ConfigError> {
    finite_number(require(map, key, context)?, &format!("{context}.{key}"))
}

fn string_field(
    map: &Map<String, Value>,
    key: &'static str,
    context: &str,
) -> Result<String, ConfigError> {
    Ok(require(map, key, context)?
        .as_str()
        .ok_or(ConfigError::WrongType {
            context: format!("{context}.{key}"),
            expected: "a string",
        })?
        .to_string())
}
