//! CSV and JSON emission. All outputs are deterministic functions of their
//! inputs: fixed header, fixed key order, 12 significant digits, `\n` line
//! endings, exactly one trailing newline.

use serde::Serialize;
use serde_json::json;

use hotelling_core::{
    front_load_time, Exhaustion, ExtractionPath, ScenarioSpec, SweepResult, Verdict,
};

/// Format with 12 significant digits (scientific, decimal point always `.`).
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV of a solved path: `t,q,cumulative,marginal_profit,shadow_value`, one
/// row per grid point. `marginal_profit` is `MR(q, t) - C'(q)` at the node;
/// `shadow_value` is `lambda e^(rho t)`.
pub fn emit_csv(path: &ExtractionPath) -> String {
    let scenario = path.scenario();
    let mut out = String::from("t,q,cumulative,marginal_profit,shadow_value\n");
    for ((&t, &q), &cum) in path.times().iter().zip(path.rates()).zip(path.cumulative()) {
        let margin = scenario
            .net_marginal_profit(q, t)
            .expect("grid nodes are nonnegative in rate and time");
        let shadow = path.lambda() * (scenario.rho() * t).exp();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig12(t),
            sig12(q),
            sig12(cum),
            sig12(margin),
            sig12(shadow)
        ));
    }
    out
}

/// Exhaustion time as a JSON value: a number, or the string `"infinite"`.
struct ExhaustionJson(Exhaustion);

impl Serialize for ExhaustionJson {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Exhaustion::Finite(t) => serializer.serialize_f64(t),
            Exhaustion::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

#[derive(Serialize)]
struct PathSummary<'a> {
    lambda: f64,
    exhaustion_time: ExhaustionJson,
    /// Front-load half-time; `null` for zero-stock paths where the metric is
    /// undefined.
    t50: Option<f64>,
    value: f64,
    stock: f64,
    scenario: &'a ScenarioSpec,
}

/// JSON summary of a solved path, keys in fixed order:
/// `lambda`, `exhaustion_time`, `t50`, `value`, `stock`, `scenario`.
pub fn emit_summary_json(path: &ExtractionPath) -> String {
    let summary = PathSummary {
        lambda: path.lambda(),
        exhaustion_time: ExhaustionJson(path.exhaustion()),
        t50: front_load_time(path, 0.5).ok(),
        value: path.value(),
        stock: path.scenario().stock(),
        scenario: path.scenario().spec(),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serialization");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct SweepRowJson {
    param: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustion_time: Option<ExhaustionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t50: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    parameter: String,
    rows: Vec<SweepRowJson>,
    verdicts: Vec<serde_json::Value>,
    #[serde(skip)]
    _marker: std::marker::PhantomData<&'a ()>,
}

/// JSON summary of a sweep: `parameter`, `rows`, `verdicts`, in that order.
pub fn emit_sweep_json(sweep: &SweepResult) -> String {
    let rows = sweep
        .rows
        .iter()
        .map(|row| match &row.outcome {
            Ok(sol) => SweepRowJson {
                param: row.param,
                lambda: Some(sol.lambda),
                exhaustion_time: Some(ExhaustionJson(sol.exhaustion)),
                t50: Some(sol.t50),
                value: Some(sol.value),
                error: None,
            },
            Err(message) => SweepRowJson {
                param: row.param,
                lambda: None,
                exhaustion_time: None,
                t50: None,
                value: None,
                error: Some(message.clone()),
            },
        })
        .collect();

    let direction = match sweep.parameter.claimed_direction() {
        hotelling_core::Direction::Increasing => "increasing",
        hotelling_core::Direction::Decreasing => "decreasing",
    };
    let verdict = match &sweep.verdict {
        Verdict::Pass => json!({
            "claim": format!("t50 {direction} in {}", sweep.parameter),
            "status": "PASS",
        }),
        Verdict::Fail { param_lo, t50_lo, param_hi, t50_hi } => json!({
            "claim": format!("t50 {direction} in {}", sweep.parameter),
            "status": "FAIL",
            "violating_pair": [
                {"param": param_lo, "t50": t50_lo},
                {"param": param_hi, "t50": t50_hi},
            ],
        }),
        Verdict::Inconclusive { reason } => json!({
            "claim": format!("t50 {direction} in {}", sweep.parameter),
            "status": "INCONCLUSIVE",
            "reason": reason,
        }),
    };

    let summary = SweepSummary {
        parameter: sweep.parameter.to_string(),
        rows,
        verdicts: vec![verdict],
        _marker: std::marker::PhantomData,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("sweep serialization");
    text.push('\n');
    text
}

/// CSV of the solved sweep rows: `param,lambda,exhaustion_time,t50,value`;
/// rows that failed to solve are omitted (they are recorded in the JSON).
/// An infinite exhaustion time is written as `inf`.
pub fn emit_sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("param,lambda,exhaustion_time,t50,value\n");
    for row in &sweep.rows {
        if let Ok(sol) = &row.outcome {
            let exhaustion = match sol.exhaustion {
                Exhaustion::Finite(t) => sig12(t),
                Exhaustion::Infinite => "inf".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                sig12(row.param),
                sig12(sol.lambda),
                exhaustion,
                sig12(sol.t50),
                sig12(sol.value)
            ));
        }
    }
    out
}
