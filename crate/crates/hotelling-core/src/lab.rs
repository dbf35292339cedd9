//! Comparative statics and qualitative checks on solved paths.
//!
//! The timing claims under test are expressed through the front-load
//! half-time `t50`: the instant by which half the stock has been extracted.
//! Holding the stock fixed across compared scenarios isolates timing from
//! volume, so "more aggressive early extraction" reads as a strictly smaller
//! `t50`. The verdicts are computed, not assumed: a sweep that moves the
//! wrong way reports FAIL with the violating pair.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::econ::{CostSpec, EconError, RevenueSpec, Scenario, ScenarioSpec};
use crate::solver::{solve_path, ExtractionPath, Exhaustion, GridSpec, SolverError,
    DEFAULT_LAMBDA_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error(transparent)]
    Econ(#[from] EconError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("front-load fraction must lie strictly inside (0, 1), got {0}")]
    FractionOutOfRange(f64),
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
    #[error(
        "path integrity violated: net marginal profit {margin} is nonpositive at t = {t} \
         where the rate is positive"
    )]
    Integrity { t: f64, margin: f64 },
    #[error("parameter `{parameter}` cannot be substituted into {revenue_kind} revenue")]
    UnsupportedSubstitution {
        parameter: SweepParameter,
        revenue_kind: &'static str,
    },
    #[error("country list is empty")]
    EmptyCountryList,
}

/// Smallest `t` with `cumulative(t) >= fraction * S`, by monotone linear
/// interpolation on the path's cumulative series (error bounded by the grid
/// spacing).
pub fn front_load_time(path: &ExtractionPath, fraction: f64) -> Result<f64, LabError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(LabError::FractionOutOfRange(fraction));
    }
    let stock = path.scenario().stock();
    if stock <= 0.0 {
        return Err(LabError::UndefinedMetric("front-load time of a zero-stock path"));
    }
    let target = fraction * stock;
    let times = path.times();
    let cumulative = path.cumulative();
    if target <= cumulative[0] {
        return Ok(times[0]);
    }
    for i in 1..times.len() {
        if cumulative[i] >= target {
            let dc = cumulative[i] - cumulative[i - 1];
            if dc <= 0.0 {
                return Ok(times[i]);
            }
            let w = (target - cumulative[i - 1]) / dc;
            return Ok(times[i - 1] + w * (times[i] - times[i - 1]));
        }
    }
    // Truncated tails can leave the target marginally uncovered; the last
    // node is then the best estimate within the stated error bound.
    Ok(*times.last().unwrap())
}

/// Maximum log-residual of the Hotelling rule over grid points with positive
/// extraction: `|ln(MR - MC) - ln(lambda) - rho t|`.
pub fn hotelling_residual(path: &ExtractionPath) -> Result<f64, LabError> {
    let scenario = path.scenario();
    let ln_lambda = path.lambda().ln();
    let rho = scenario.rho();
    let mut worst: Option<f64> = None;
    for (&t, &q) in path.times().iter().zip(path.rates()) {
        if q <= 0.0 {
            continue;
        }
        let margin = scenario.net_marginal_profit(q, t)?;
        if margin <= 0.0 {
            return Err(LabError::Integrity { t, margin });
        }
        let residual = (margin.ln() - ln_lambda - rho * t).abs();
        worst = Some(worst.map_or(residual, |w: f64| w.max(residual)));
    }
    worst.ok_or(LabError::UndefinedMetric("Hotelling residual of an all-zero path"))
}

/// Parameter swept in comparative statics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Rho,
    Epsilon,
    G,
}

impl SweepParameter {
    /// Claimed direction of `t50` as this parameter rises, the form in which
    /// the qualitative statements are mechanically checkable: higher demand
    /// elasticity front-loads extraction (t50 falls), stronger price drift
    /// defers it (t50 rises), heavier discounting front-loads it (t50
    /// falls).
    pub fn claimed_direction(&self) -> Direction {
        match self {
            SweepParameter::Rho => Direction::Decreasing,
            SweepParameter::Epsilon => Direction::Decreasing,
            SweepParameter::G => Direction::Increasing,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::Rho => "rho",
            SweepParameter::Epsilon => "epsilon",
            SweepParameter::G => "g",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// One solved sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    /// Solved quantities, or the error text when the substituted scenario
    /// was rejected (the sweep keeps going).
    pub outcome: Result<SweepSolution, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSolution {
    pub lambda: f64,
    pub exhaustion: Exhaustion,
    pub t50: f64,
    pub value: f64,
}

/// Monotonicity verdict on `t50` across a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    /// The violating adjacent pair, sorted by parameter.
    Fail {
        param_lo: f64,
        t50_lo: f64,
        param_hi: f64,
        t50_hi: f64,
    },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail { param_lo, t50_lo, param_hi, t50_hi } => write!(
                f,
                "FAIL (t50 {t50_lo} at {param_lo} vs t50 {t50_hi} at {param_hi})"
            ),
            Verdict::Inconclusive { reason } => write!(f, "INCONCLUSIVE ({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    /// Rows sorted by parameter value; each row reproduces a standalone
    /// solve of the substituted scenario.
    pub rows: Vec<SweepRow>,
    pub verdict: Verdict,
}

/// Rebuild the base scenario with one parameter replaced. `epsilon` turns a
/// price taker into iso-elastic revenue, `g` turns it into a drift scenario;
/// substitutions that make no sense for the base revenue kind are errors.
pub fn substitute_parameter(
    base: &Scenario,
    parameter: SweepParameter,
    value: f64,
) -> Result<Scenario, LabError> {
    let mut spec: ScenarioSpec = *base.spec();
    match parameter {
        SweepParameter::Rho => spec.rho = value,
        SweepParameter::Epsilon => {
            spec.revenue = match spec.revenue {
                RevenueSpec::PriceTaker { p0 } | RevenueSpec::IsoElastic { p0, .. } => {
                    RevenueSpec::IsoElastic { p0, epsilon: value }
                }
                RevenueSpec::Drift { .. } => {
                    return Err(LabError::UnsupportedSubstitution {
                        parameter,
                        revenue_kind: "drift",
                    })
                }
                RevenueSpec::LinearDemand { .. } => {
                    return Err(LabError::UnsupportedSubstitution {
                        parameter,
                        revenue_kind: "linear_demand",
                    })
                }
            };
        }
        SweepParameter::G => {
            spec.revenue = match spec.revenue {
                RevenueSpec::PriceTaker { p0 } | RevenueSpec::Drift { p0, .. } => {
                    RevenueSpec::Drift { p0, g: value }
                }
                RevenueSpec::IsoElastic { .. } => {
                    return Err(LabError::UnsupportedSubstitution {
                        parameter,
                        revenue_kind: "iso_elastic",
                    })
                }
                RevenueSpec::LinearDemand { .. } => {
                    return Err(LabError::UnsupportedSubstitution {
                        parameter,
                        revenue_kind: "linear_demand",
                    })
                }
            };
        }
    }
    Ok(spec.validate()?)
}

/// One full solve per parameter value; the stock and everything else stay
/// fixed at the base scenario. Invalid substitutions become per-row errors
/// and the sweep continues.
pub fn sweep(
    base: &Scenario,
    parameter: SweepParameter,
    values: &[f64],
    grid: &GridSpec,
) -> SweepResult {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows: Vec<SweepRow> = sorted
        .iter()
        .map(|&v| SweepRow { param: v, outcome: solve_row(base, parameter, v, grid) })
        .collect();
    let verdict = verdict_for(parameter, &rows);
    SweepResult { parameter, rows, verdict }
}

fn solve_row(
    base: &Scenario,
    parameter: SweepParameter,
    value: f64,
    grid: &GridSpec,
) -> Result<SweepSolution, String> {
    let scenario = substitute_parameter(base, parameter, value).map_err(|e| e.to_string())?;
    let path = solve_path(&scenario, grid, DEFAULT_LAMBDA_TOL).map_err(|e| e.to_string())?;
    let t50 = front_load_time(&path, 0.5).map_err(|e| e.to_string())?;
    Ok(SweepSolution {
        lambda: path.lambda(),
        exhaustion: path.exhaustion(),
        t50,
        value: path.value(),
    })
}

/// Strict-monotonicity verdict over the solved rows (re-sorted by parameter,
/// so the result is order-insensitive).
pub fn verdict_for(parameter: SweepParameter, rows: &[SweepRow]) -> Verdict {
    let mut solved: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|s| (r.param, s.t50)))
        .collect();
    solved.sort_by(|a, b| a.0.total_cmp(&b.0));
    if solved.len() < 2 {
        return Verdict::Inconclusive {
            reason: format!("{} solved row(s); need at least two to compare", solved.len()),
        };
    }
    let direction = parameter.claimed_direction();
    for pair in solved.windows(2) {
        let ((p_lo, t_lo), (p_hi, t_hi)) = (pair[0], pair[1]);
        let ok = match direction {
            Direction::Increasing => t_hi > t_lo,
            Direction::Decreasing => t_hi < t_lo,
        };
        if !ok {
            return Verdict::Fail {
                param_lo: p_lo,
                t50_lo: t_lo,
                param_hi: p_hi,
                t50_hi: t_hi,
            };
        }
    }
    Verdict::Pass
}

/// Verdict report across several sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimCheck {
    pub parameter: SweepParameter,
    pub direction: Direction,
    pub verdict: Verdict,
    /// The (parameter, t50) witnesses the verdict was computed from.
    pub witnesses: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QualitativeReport {
    pub checks: Vec<ClaimCheck>,
}

impl QualitativeReport {
    pub fn all_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.verdict.is_pass())
    }
}

impl fmt::Display for QualitativeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let dir = match check.direction {
                Direction::Increasing => "increasing",
                Direction::Decreasing => "decreasing",
            };
            writeln!(f, "t50 {dir} in {}: {}", check.parameter, check.verdict)?;
        }
        Ok(())
    }
}

/// Recompute every sweep's verdict from its rows (order-insensitive) and
/// collect them into one report.
pub fn qualitative_checks(sweeps: &[SweepResult]) -> QualitativeReport {
    let checks = sweeps
        .iter()
        .map(|s| {
            let mut witnesses: Vec<(f64, f64)> = s
                .rows
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok().map(|sol| (r.param, sol.t50)))
                .collect();
            witnesses.sort_by(|a, b| a.0.total_cmp(&b.0));
            ClaimCheck {
                parameter: s.parameter,
                direction: s.parameter.claimed_direction(),
                verdict: verdict_for(s.parameter, &s.rows),
                witnesses,
            }
        })
        .collect();
    QualitativeReport { checks }
}

/// One country in the separable multi-country problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountrySpec {
    pub label: String,
    pub stock: f64,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryResult {
    pub country: CountrySpec,
    pub path: ExtractionPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiCountryResult {
    pub countries: Vec<CountryResult>,
    /// Common grid for the aggregate series.
    pub aggregate_times: Vec<f64>,
    /// Pointwise sum of the per-country rates on the common grid.
    pub aggregate_rates: Vec<f64>,
}

/// Solve each country's price-taking problem independently — the problem is
/// separable, one shadow price per country — and aggregate extraction on a
/// common grid.
pub fn multi_country_solve(
    countries: &[CountrySpec],
    p0: f64,
    rho: f64,
    grid: &GridSpec,
) -> Result<MultiCountryResult, LabError> {
    if countries.is_empty() {
        return Err(LabError::EmptyCountryList);
    }
    let mut results = Vec::with_capacity(countries.len());
    for country in countries {
        let scenario = ScenarioSpec {
            revenue: RevenueSpec::PriceTaker { p0 },
            cost: country.cost,
            rho,
            stock: country.stock,
        }
        .validate()?;
        let path = solve_path(&scenario, grid, DEFAULT_LAMBDA_TOL)?;
        results.push(CountryResult { country: country.clone(), path });
    }

    let horizon = results
        .iter()
        .map(|r| *r.path.times().last().unwrap())
        .fold(0.0f64, f64::max);
    let n = grid.points;
    let aggregate_times: Vec<f64> = (0..n)
        .map(|i| horizon * i as f64 / (n - 1) as f64)
        .collect();
    let aggregate_rates: Vec<f64> = aggregate_times
        .iter()
        .map(|&t| results.iter().map(|r| r.path.rate_at(t)).sum())
        .collect();

    Ok(MultiCountryResult { countries: results, aggregate_times, aggregate_rates })
}

/// Bundled scenario families spanning all four revenue kinds and both cost
/// kinds; the verification suites solve every one of them.
pub fn scenario_suite() -> Vec<(String, Scenario)> {
    let inv_e = (-1.0f64).exp();
    let quad = |c: f64, d: f64| CostSpec::Quadratic { c, d };
    let power = |a: f64, beta: f64| CostSpec::Power { a, beta };
    let entries: Vec<(&str, ScenarioSpec)> = vec![
        (
            "price_taker_benchmark",
            ScenarioSpec {
                revenue: RevenueSpec::PriceTaker { p0: 2.0 },
                cost: quad(1.0, 1.0),
                rho: 1.0,
                stock: inv_e,
            },
        ),
        (
            "price_taker_slow_discount",
            ScenarioSpec {
                revenue: RevenueSpec::PriceTaker { p0: 1.0 },
                cost: quad(0.0, 0.5),
                rho: 0.5,
                stock: 1.0,
            },
        ),
        (
            "price_taker_power_cost",
            ScenarioSpec {
                revenue: RevenueSpec::PriceTaker { p0: 3.0 },
                cost: power(1.0, 2.0),
                rho: 1.0,
                stock: 0.5,
            },
        ),
        (
            "price_taker_cubic_cost",
            ScenarioSpec {
                revenue: RevenueSpec::PriceTaker { p0: 2.0 },
                cost: power(0.5, 3.0),
                rho: 0.8,
                stock: 1.0,
            },
        ),
        (
            "iso_half",
            ScenarioSpec {
                revenue: RevenueSpec::IsoElastic { p0: 1.0, epsilon: 0.5 },
                cost: quad(0.0, 1.0),
                rho: 1.0,
                stock: 1.0,
            },
        ),
        (
            "iso_with_cost_floor",
            ScenarioSpec {
                revenue: RevenueSpec::IsoElastic { p0: 2.0, epsilon: 0.7 },
                cost: quad(0.5, 1.0),
                rho: 1.0,
                stock: 1.0,
            },
        ),
        (
            "iso_near_unit_power_cost",
            ScenarioSpec {
                revenue: RevenueSpec::IsoElastic { p0: 1.0, epsilon: 0.9 },
                cost: power(1.0, 2.0),
                rho: 0.7,
                stock: 2.0,
            },
        ),
        (
            "drift_benchmark",
            ScenarioSpec {
                revenue: RevenueSpec::Drift { p0: 2.0, g: 0.3 },
                cost: quad(1.0, 1.0),
                rho: 1.0,
                stock: inv_e,
            },
        ),
        (
            "drift_mild",
            ScenarioSpec {
                revenue: RevenueSpec::Drift { p0: 1.0, g: 0.2 },
                cost: quad(0.2, 0.5),
                rho: 0.6,
                stock: 1.0,
            },
        ),
        (
            "drift_declining_price",
            ScenarioSpec {
                revenue: RevenueSpec::Drift { p0: 2.0, g: -0.1 },
                cost: power(1.0, 2.0),
                rho: 0.5,
                stock: 1.0,
            },
        ),
        // Strong drift over a high cost floor with a small stock: the
        // discounted margin peaks in the interior, so extraction starts
        // late and the path has a dead zone at the front.
        (
            "drift_delayed_start",
            ScenarioSpec {
                revenue: RevenueSpec::Drift { p0: 1.0, g: 0.5 },
                cost: quad(0.9, 1.0),
                rho: 1.0,
                stock: 0.05,
            },
        ),
        (
            "linear_demand_sloped",
            ScenarioSpec {
                revenue: RevenueSpec::LinearDemand { a: 2.0, b: 0.5 },
                cost: quad(0.2, 1.0),
                rho: 1.0,
                stock: 0.8,
            },
        ),
        (
            "linear_demand_power_cost",
            ScenarioSpec {
                revenue: RevenueSpec::LinearDemand { a: 3.0, b: 1.0 },
                cost: power(1.0, 2.0),
                rho: 0.5,
                stock: 1.0,
            },
        ),
        (
            "linear_demand_flat",
            ScenarioSpec {
                revenue: RevenueSpec::LinearDemand { a: 2.0, b: 0.0 },
                cost: quad(1.0, 1.0),
                rho: 1.0,
                stock: inv_e,
            },
        ),
        (
            "unit_elasticity_normalized",
            ScenarioSpec {
                revenue: RevenueSpec::IsoElastic { p0: 2.0, epsilon: 1.0 },
                cost: quad(1.0, 1.0),
                rho: 1.0,
                stock: inv_e,
            },
        ),
    ];
    entries
        .into_iter()
        .map(|(name, spec)| (name.to_string(), spec.validate().expect("suite scenario is valid")))
        .collect()
}
