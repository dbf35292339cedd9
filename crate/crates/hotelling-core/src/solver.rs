//! Continuous-time depletion solver.
//!
//! The optimal schedule satisfies, wherever extraction is positive,
//!
//! ```text
//! MR(q, t) - C'(q) = lambda * e^(rho t)
//! ```
//!
//! with the shadow price `lambda` pinned by the stock constraint
//! `integral of q over [0, inf) = S`. The solver inverts the first-order
//! condition pointwise in time (closed form where the marginal revenue does
//! not depend on `q`, bracketed bisection otherwise), integrates the
//! resulting rate with adaptive quadrature, and bisects `lambda` against the
//! stock — valid because cumulative extraction is strictly decreasing in
//! `lambda`. Bisection over Newton is deliberate: a full solve is
//! sub-millisecond, so robustness wins.

use serde::Serialize;
use thiserror::Error;

use crate::econ::{EconError, RevenueSpec, Scenario};
use crate::numeric::{self, NumericError};

/// Default relative tolerance on the stock constraint when solving `lambda`.
pub const DEFAULT_LAMBDA_TOL: f64 = 1e-10;
/// Default relative quadrature tolerance for cumulative and objective
/// integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Pointwise inversion residual: `|MR - MC - lambda e^(rho t)|` is driven
/// below this times `max(1, lambda e^(rho t))`.
pub const RATE_RESIDUAL_TOL: f64 = 1e-12;
/// Default fraction of the stock allowed beyond the grid truncation horizon
/// on infinite-exhaustion (iso-elastic) paths.
pub const DEFAULT_TAIL_MASS_TOL: f64 = 1e-9;

/// Grid span used for identically-zero paths (zero stock), where no
/// exhaustion time exists to set a natural scale.
const ZERO_PATH_SPAN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Econ(#[from] EconError),
    #[error("shadow price must be positive, got {0}")]
    NonPositiveShadowPrice(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("grid needs at least 2 points, got {0}")]
    TooFewGridPoints(usize),
    #[error("fixed grid horizon must be positive and finite, got {0}")]
    InvalidFixedHorizon(f64),
    #[error("tail mass tolerance must be positive, got {0}")]
    InvalidTailTolerance(f64),
    #[error(
        "zero stock has no shadow price under iso-elastic revenue: marginal revenue \
         diverges at zero extraction, so every finite price admits a positive rate"
    )]
    ZeroStockIsoElastic,
    #[error(
        "stock constraint cannot bind: cumulative extraction reaches at most \
         {max_extractable} of the requested stock {stock} over the whole representable \
         shadow-price range"
    )]
    StockInfeasible { max_extractable: f64, stock: f64 },
    #[error("internal bracketing failure in {context}: {source}")]
    Bracket {
        context: &'static str,
        source: NumericError,
    },
    #[error("internal solver produced a non-finite {context}; this is a bug signal")]
    NonFinite { context: &'static str },
    #[error(
        "shadow price bisection exhausted its bracket with stock residual {residual} \
         above tolerance {tol}"
    )]
    Stalled { residual: f64, tol: f64 },
    #[error("sample path is malformed: {0}")]
    InvalidSamples(&'static str),
}

/// Exhaustion time of an optimal path: the last instant with positive
/// extraction, or the infinite marker for paths that never shut down
/// (iso-elastic demand keeps marginal revenue above any finite shadow value
/// as `q -> 0+`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exhaustion {
    Finite(f64),
    Infinite,
}

impl Exhaustion {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Exhaustion::Finite(t) => Some(t),
            Exhaustion::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exhaustion::Infinite)
    }
}

/// How far the time grid of a solved path extends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonPolicy {
    /// Span `[0, T]` for finite exhaustion, or the truncation horizon where
    /// the analytic tail envelope drops below the tail mass tolerance.
    ToExhaustion,
    /// Span `[0, t_max]` regardless of exhaustion.
    Fixed(f64),
}

/// Time grid settings for assembled paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Number of grid nodes (>= 2), uniformly spaced over the span.
    pub points: usize,
    pub horizon: HorizonPolicy,
    /// Fraction of the stock allowed beyond the truncation horizon on
    /// infinite-exhaustion paths.
    pub tail_mass_tol: f64,
}

impl GridSpec {
    pub fn new(points: usize) -> Self {
        GridSpec {
            points,
            horizon: HorizonPolicy::ToExhaustion,
            tail_mass_tol: DEFAULT_TAIL_MASS_TOL,
        }
    }

    pub fn with_horizon(mut self, horizon: HorizonPolicy) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.points < 2 {
            return Err(SolverError::TooFewGridPoints(self.points));
        }
        if let HorizonPolicy::Fixed(t_max) = self.horizon {
            if !t_max.is_finite() || t_max <= 0.0 {
                return Err(SolverError::InvalidFixedHorizon(t_max));
            }
        }
        if !self.tail_mass_tol.is_finite() || self.tail_mass_tol <= 0.0 {
            return Err(SolverError::InvalidTailTolerance(self.tail_mass_tol));
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::new(101)
    }
}

/// How an [`ExtractionPath`] evaluates rates between its grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RateModel {
    /// Rates come from the first-order condition at the stored shadow price;
    /// grid nodes are samples of that continuous function.
    Foc,
    /// Rates are the stored samples themselves, interpolated linearly; the
    /// objective and cumulative series are the trapezoid functionals of the
    /// samples. Used for synthetic or externally supplied schedules.
    Interpolated,
}

/// A solved extraction schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionPath {
    scenario: Scenario,
    lambda: f64,
    exhaustion: Exhaustion,
    times: Vec<f64>,
    rates: Vec<f64>,
    cumulative: Vec<f64>,
    value: f64,
    model: RateModel,
}

impl ExtractionPath {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn exhaustion(&self) -> Exhaustion {
        self.exhaustion
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Running integral of the rate at each grid node.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Discounted objective value of the schedule.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Extraction rate at an arbitrary time.
    ///
    /// Solved paths evaluate the first-order condition exactly (zero at and
    /// beyond a finite exhaustion time); sample paths interpolate linearly
    /// and are zero outside their grid.
    pub fn rate_at(&self, t: f64) -> f64 {
        match self.model {
            RateModel::Foc => path_rate(&self.scenario, self.lambda, self.exhaustion, t),
            RateModel::Interpolated => {
                let times = &self.times;
                if t < times[0] || t > times[times.len() - 1] {
                    return 0.0;
                }
                match times.binary_search_by(|x| x.total_cmp(&t)) {
                    Ok(i) => self.rates[i],
                    Err(i) => {
                        let (t0, t1) = (times[i - 1], times[i]);
                        let w = (t - t0) / (t1 - t0);
                        self.rates[i - 1] * (1.0 - w) + self.rates[i] * w
                    }
                }
            }
        }
    }

    /// Build a path from explicit samples.
    ///
    /// The cumulative series and objective value are the trapezoid
    /// functionals of the samples. Intended for synthetic schedules and
    /// perturbation experiments; [`solve_path`] is the entry point for
    /// optimal paths.
    pub fn from_samples(
        scenario: Scenario,
        lambda: f64,
        exhaustion: Exhaustion,
        times: Vec<f64>,
        rates: Vec<f64>,
    ) -> Result<Self, SolverError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(SolverError::NonPositiveShadowPrice(lambda));
        }
        if times.is_empty() {
            return Err(SolverError::InvalidSamples("empty time grid"));
        }
        if times.len() != rates.len() {
            return Err(SolverError::InvalidSamples("times and rates differ in length"));
        }
        if times[0] < 0.0 {
            return Err(SolverError::InvalidSamples("grid starts before t = 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SolverError::InvalidSamples("times are not strictly ascending"));
        }
        if rates.iter().any(|&q| !q.is_finite() || q < 0.0) {
            return Err(SolverError::InvalidSamples("rates must be finite and nonnegative"));
        }

        let mut cumulative = vec![0.0; times.len()];
        let mut value = 0.0;
        for i in 1..times.len() {
            let h = times[i] - times[i - 1];
            cumulative[i] = cumulative[i - 1] + 0.5 * h * (rates[i - 1] + rates[i]);
            value += 0.5
                * h
                * (scenario.discounted_profit(rates[i - 1], times[i - 1])
                    + scenario.discounted_profit(rates[i], times[i]));
        }

        Ok(ExtractionPath {
            scenario,
            lambda,
            exhaustion,
            times,
            rates,
            cumulative,
            value,
            model: RateModel::Interpolated,
        })
    }
}

/// Invert the first-order condition at one instant: the unique `q >= 0` with
/// `MR(q, t) - C'(q) = lambda e^(rho t)`, or `0` when even the limit
/// `q -> 0+` cannot reach that shadow value.
pub fn extraction_rate_at(scenario: &Scenario, lambda: f64, t: f64) -> Result<f64, SolverError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(SolverError::NonPositiveShadowPrice(lambda));
    }
    if t < 0.0 {
        return Err(SolverError::Econ(EconError::NegativeTime(t)));
    }
    let m = lambda * (scenario.rho() * t).exp();
    if m.is_infinite() {
        return Ok(0.0);
    }
    let margin_at_zero = scenario.net_marginal_at_zero(t);
    if margin_at_zero <= m {
        return Ok(0.0);
    }
    match *scenario.revenue() {
        RevenueSpec::PriceTaker { p0 } => Ok(scenario.cost().inverse_marginal(p0 - m)),
        RevenueSpec::Drift { p0, g } => {
            Ok(scenario.cost().inverse_marginal(p0 * (g * t).exp() - m))
        }
        RevenueSpec::IsoElastic { .. } | RevenueSpec::LinearDemand { .. } => {
            rate_by_bisection(scenario, m, t)
        }
    }
}

fn rate_by_bisection(scenario: &Scenario, m: f64, t: f64) -> Result<f64, SolverError> {
    let residual_tol = RATE_RESIDUAL_TOL * m.max(1.0);
    let f = |q: f64| scenario.net_marginal_profit_unchecked(q, t) - m;

    // Upper start: the rate at which marginal revenue alone has fallen to m.
    // Adding the (positive) marginal cost only pushes the residual lower, so
    // this is already past the root for both revenue kinds handled here.
    let mut hi = match *scenario.revenue() {
        RevenueSpec::IsoElastic { p0, epsilon } => {
            (m / (p0 * epsilon)).powf(1.0 / (epsilon - 1.0))
        }
        RevenueSpec::LinearDemand { a, b } if b > 0.0 => (a - m) / (2.0 * b),
        _ => 1.0,
    };
    if !hi.is_finite() || hi <= 0.0 {
        hi = 1.0;
    }
    let mut guard = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 || !hi.is_finite() {
            return Err(SolverError::Bracket {
                context: "rate inversion upper bound",
                source: NumericError::NoSignChange { lo: 0.0, hi, f_lo: f64::NAN, f_hi: f(hi) },
            });
        }
    }
    let mut lo = 0.5 * hi;
    while f(lo) <= 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            // The margin at 0+ exceeds m, yet no representable positive rate
            // does: the root sits below floating-point resolution.
            return Ok(0.0);
        }
    }

    // The bracket can span dozens of orders of magnitude (the iso-elastic
    // upper guess explodes as epsilon -> 1), so bisect in log space.
    numeric::bisect_root_log(f, lo, hi, residual_tol).map_err(|source| SolverError::Bracket {
        context: "rate inversion",
        source,
    })
}

/// Largest value of the discounted net marginal profit at zero extraction,
/// `sup_t (MR(0+, t) - C'(0)) e^(-rho t)`. Any shadow price at or above this
/// yields the identically-zero path; infinite under iso-elastic revenue.
fn peak_discounted_margin(scenario: &Scenario) -> f64 {
    let c0 = scenario.cost().marginal_at_zero();
    match *scenario.revenue() {
        RevenueSpec::IsoElastic { .. } => f64::INFINITY,
        RevenueSpec::PriceTaker { p0 } => p0 - c0,
        RevenueSpec::LinearDemand { a, .. } => a - c0,
        RevenueSpec::Drift { p0, g } => {
            let rho = scenario.rho();
            // u(t) = (p0 e^(gt) - c0) e^(-rho t) has at most one interior
            // critical point; it is a maximum only when g > 0 and the
            // initial margin still climbs.
            if g > 0.0 && c0 > 0.0 {
                let r = rho * c0 / (p0 * (rho - g));
                if r > 1.0 {
                    let t_peak = r.ln() / g;
                    return (p0 * (g * t_peak).exp() - c0) * (-rho * t_peak).exp();
                }
            }
            p0 - c0
        }
    }
}

/// First time the optimal rate reaches zero and stays there, or the infinite
/// marker when it never does.
pub fn exhaustion_time(scenario: &Scenario, lambda: f64) -> Result<Exhaustion, SolverError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(SolverError::NonPositiveShadowPrice(lambda));
    }
    let rho = scenario.rho();
    let c0 = scenario.cost().marginal_at_zero();
    match *scenario.revenue() {
        RevenueSpec::IsoElastic { .. } => Ok(Exhaustion::Infinite),
        RevenueSpec::PriceTaker { p0 } => Ok(constant_margin_exhaustion(p0 - c0, lambda, rho)),
        RevenueSpec::LinearDemand { a, .. } => Ok(constant_margin_exhaustion(a - c0, lambda, rho)),
        RevenueSpec::Drift { p0, g } => {
            if g == 0.0 {
                return Ok(constant_margin_exhaustion(p0 - c0, lambda, rho));
            }
            let u = |t: f64| (p0 * (g * t).exp() - c0) * (-rho * t).exp();
            let t_peak = if g > 0.0 && c0 > 0.0 {
                let r = rho * c0 / (p0 * (rho - g));
                if r > 1.0 {
                    r.ln() / g
                } else {
                    0.0
                }
            } else {
                0.0
            };
            if u(t_peak) <= lambda {
                return Ok(Exhaustion::Finite(0.0));
            }
            // u decays like e^((g - rho) t) past the peak, so doubling the
            // offset finds the far side of the root quickly.
            let mut hi = t_peak + 1.0;
            let mut guard = 0;
            while u(hi) > lambda {
                hi = t_peak + (hi - t_peak) * 2.0;
                guard += 1;
                if guard > 400 {
                    return Err(SolverError::Bracket {
                        context: "drift exhaustion upper bound",
                        source: NumericError::NoSignChange {
                            lo: t_peak,
                            hi,
                            f_lo: u(t_peak) - lambda,
                            f_hi: u(hi) - lambda,
                        },
                    });
                }
            }
            let t = numeric::bisect_root(|t| u(t) - lambda, t_peak, hi, 1e-13 * lambda)
                .map_err(|source| SolverError::Bracket { context: "drift exhaustion", source })?;
            Ok(Exhaustion::Finite(t))
        }
    }
}

fn constant_margin_exhaustion(m0: f64, lambda: f64, rho: f64) -> Exhaustion {
    if m0 <= lambda {
        // Includes lambda >= p0 - c: the path is identically zero, T = 0.
        Exhaustion::Finite(0.0)
    } else {
        Exhaustion::Finite((m0 / lambda).ln() / rho)
    }
}

fn path_rate(scenario: &Scenario, lambda: f64, exhaustion: Exhaustion, t: f64) -> f64 {
    if let Exhaustion::Finite(t_end) = exhaustion {
        // The clamp is left-continuous: the rate at t = T is exactly zero.
        if t >= t_end {
            return 0.0;
        }
    }
    extraction_rate_at(scenario, lambda, t).unwrap_or(f64::NAN)
}

/// Truncation horizon for an iso-elastic path: past the returned time, the
/// analytic rate envelope `(lambda e^(rho t) / (p0 eps))^(1/(eps-1))` bounds
/// the remaining mass below `target`.
fn iso_mass_horizon(scenario: &Scenario, lambda: f64, target: f64) -> f64 {
    let RevenueSpec::IsoElastic { p0, epsilon } = *scenario.revenue() else {
        unreachable!("mass horizon is only defined for iso-elastic revenue");
    };
    let rho = scenario.rho();
    // Everything in logs: the envelope prefactor overflows f64 long before
    // the horizon itself becomes large.
    let ln_envelope_at_zero = (lambda.ln() - (p0 * epsilon).ln()) / (epsilon - 1.0);
    let ln_total_envelope = ln_envelope_at_zero + ((1.0 - epsilon) / rho).ln();
    let ln_target = target.max(1e-300).ln();
    ((1.0 - epsilon) / rho * (ln_total_envelope - ln_target)).max(0.0)
}

/// Horizon past which the neglected objective mass of an iso-elastic path is
/// far below every tolerance in play.
fn iso_value_horizon(scenario: &Scenario, lambda: f64) -> f64 {
    let RevenueSpec::IsoElastic { p0, epsilon } = *scenario.revenue() else {
        unreachable!("value horizon is only defined for iso-elastic revenue");
    };
    let rho = scenario.rho();
    let stock = scenario.stock();
    let mass_horizon = iso_mass_horizon(scenario, lambda, 1e-13 * stock.max(1.0));
    // Revenue along the envelope decays at the same exponential rate as the
    // envelope itself, so the same log formula applies with the revenue
    // prefactor (kept in logs to dodge overflow).
    let ln_envelope_at_zero = (lambda.ln() - (p0 * epsilon).ln()) / (epsilon - 1.0);
    let ln_value_prefactor =
        p0.ln() + epsilon * ln_envelope_at_zero + ((1.0 - epsilon) / rho).ln();
    let ln_value_target = (1e-13 * (p0 * stock).max(1.0)).ln();
    let value_horizon =
        ((1.0 - epsilon) / rho * (ln_value_prefactor - ln_value_target)).max(0.0);
    mass_horizon.max(value_horizon).max(1.0 / rho)
}

/// Total extraction `integral of q(t; lambda) dt` over the whole (possibly
/// truncated) horizon. Strictly decreasing in `lambda`.
pub fn cumulative_extraction(scenario: &Scenario, lambda: f64) -> Result<f64, SolverError> {
    cumulative_with(
        scenario,
        lambda,
        DEFAULT_QUAD_TOL,
        1e-12 * scenario.stock().max(1.0),
    )
}

fn cumulative_with(
    scenario: &Scenario,
    lambda: f64,
    quad_rel: f64,
    tail_target: f64,
) -> Result<f64, SolverError> {
    let exhaustion = exhaustion_time(scenario, lambda)?;
    let horizon = match exhaustion {
        Exhaustion::Finite(t) => {
            if t == 0.0 {
                return Ok(0.0);
            }
            t
        }
        Exhaustion::Infinite => iso_mass_horizon(scenario, lambda, tail_target),
    };
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let total = numeric::integrate(
        |t| path_rate(scenario, lambda, exhaustion, t),
        0.0,
        horizon,
        quad_rel,
    );
    if total.is_finite() {
        Ok(total)
    } else {
        Err(SolverError::NonFinite { context: "cumulative extraction" })
    }
}

/// Solve the shadow price so the stock constraint binds:
/// `|cumulative(lambda) - S| <= tol * max(S, 1)`.
///
/// Brackets from above by the peak discounted margin (grown by doubling under
/// iso-elastic revenue, where no finite price shuts extraction off), from
/// below by halving until cumulative extraction overshoots the stock, then
/// bisects. Zero stock returns the shutdown price directly.
pub fn solve_shadow_price(scenario: &Scenario, tol: f64) -> Result<f64, SolverError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(SolverError::InvalidTolerance(tol));
    }
    let stock = scenario.stock();
    if !stock.is_finite() || stock < 0.0 {
        return Err(SolverError::Econ(EconError::InvalidStock(stock)));
    }

    let sup = peak_discounted_margin(scenario);
    if stock == 0.0 {
        if matches!(scenario.revenue(), RevenueSpec::IsoElastic { .. }) {
            return Err(SolverError::ZeroStockIsoElastic);
        }
        // Any price at or above the shutdown level gives the zero path; when
        // extraction is never profitable at all, any positive price does.
        return Ok(if sup > 0.0 { sup } else { 1.0 });
    }
    if sup <= 0.0 {
        return Err(SolverError::StockInfeasible { max_extractable: 0.0, stock });
    }

    // A declining price against a positive marginal-cost floor kills the
    // margin at zero rate in finite time; past that instant nothing is ever
    // extracted, so total capacity is the integral of the unconstrained
    // profit-maximizing rate over the live window.
    if let RevenueSpec::Drift { p0, g } = *scenario.revenue() {
        let c0 = scenario.cost().marginal_at_zero();
        if g < 0.0 && c0 > 0.0 {
            let t_dead = (p0 / c0).ln() / -g;
            let capacity = numeric::integrate(
                |t| scenario.cost().inverse_marginal(p0 * (g * t).exp()),
                0.0,
                t_dead,
                1e-10,
            );
            if capacity < stock * (1.0 - 1e-9) {
                return Err(SolverError::StockInfeasible { max_extractable: capacity, stock });
            }
        }
    }

    let tol_abs = tol * stock.max(1.0);
    // One order below the stock tolerance keeps quadrature bias out of the
    // bisection without demanding precision beneath the rate inversion's
    // own noise.
    let quad_rel = (tol * 0.1).clamp(1e-12, DEFAULT_QUAD_TOL);
    let tail_target = (tol_abs * 1e-2).max(1e-300);
    let cum = |lambda: f64| cumulative_with(scenario, lambda, quad_rel, tail_target);

    let mut hi = match *scenario.revenue() {
        // Inverting the envelope bound at the target stock lands just above
        // the true shadow price; the doubling loop below mops up the rest.
        RevenueSpec::IsoElastic { p0, epsilon } => {
            p0 * epsilon * (stock * scenario.rho() / (1.0 - epsilon)).powf(epsilon - 1.0)
        }
        _ => sup,
    };
    let mut guard = 0;
    while cum(hi)? > stock {
        hi *= 2.0;
        guard += 1;
        if guard > 300 || !hi.is_finite() {
            return Err(SolverError::Stalled { residual: f64::INFINITY, tol: tol_abs });
        }
    }
    // Probe downward in coarse factor-256 steps: the geometric bisection
    // below digests a wide bracket in a handful of extra iterations, so a
    // tight lower endpoint buys nothing.
    let mut lo = hi;
    let mut prev_total = 0.0;
    let mut probes = 0usize;
    loop {
        lo *= 2f64.powi(-8);
        probes += 1;
        if lo < 1e-300 {
            // Exhausted the representable price range without reaching the
            // stock (rates can be pinned near zero by a cost floor while the
            // live window only grows logarithmically in 1/lambda).
            return Err(SolverError::StockInfeasible { max_extractable: prev_total, stock });
        }
        let total = cum(lo)?;
        if total > stock {
            break;
        }
        // Fallback capacity detection (e.g. declining price over a power
        // cost, where the margin never dies but total extraction still
        // converges): once lambda sits far below every margin scale and the
        // cumulative has stopped moving at relative noise level, the stock
        // is genuinely out of reach.
        let plateau = (total - prev_total).abs()
            <= (1e-10 * total.abs()).max(tol_abs * 1e-3).max(1e-15);
        if probes > 8 && plateau {
            return Err(SolverError::StockInfeasible { max_extractable: total, stock });
        }
        prev_total = total;
    }

    // Geometric bisection: the shadow price ranges over many scales, and
    // cumulative extraction is strictly decreasing in it.
    let mut mid = lo.sqrt() * hi.sqrt();
    for _ in 0..300 {
        mid = lo.sqrt() * hi.sqrt();
        let total = cum(mid)?;
        if (total - stock).abs() <= tol_abs {
            return Ok(mid);
        }
        if total > stock {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo <= 1.0 + 4.0 * f64::EPSILON {
            return Err(SolverError::Stalled {
                residual: (total - stock).abs(),
                tol: tol_abs,
            });
        }
    }
    let residual = (cum(mid)? - stock).abs();
    Err(SolverError::Stalled { residual, tol: tol_abs })
}

fn objective_value(
    scenario: &Scenario,
    lambda: f64,
    exhaustion: Exhaustion,
) -> Result<f64, SolverError> {
    let horizon = match exhaustion {
        Exhaustion::Finite(t) => t,
        Exhaustion::Infinite => iso_value_horizon(scenario, lambda),
    };
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let value = numeric::integrate(
        |t| scenario.discounted_profit(path_rate(scenario, lambda, exhaustion, t), t),
        0.0,
        horizon,
        DEFAULT_QUAD_TOL,
    );
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SolverError::NonFinite { context: "objective value" })
    }
}

/// Discounted objective of a path.
///
/// Solved paths re-evaluate the first-order-condition rate under adaptive
/// quadrature over `[0, T]` (or the truncated tail); sample paths are valued
/// by the trapezoid functional of their samples, which is exact for the
/// piecewise-linear schedule they represent. Returns NaN only if an internal
/// evaluation failed, which signals a bug rather than a domain condition.
pub fn present_value(path: &ExtractionPath) -> f64 {
    match path.model {
        RateModel::Foc => objective_value(&path.scenario, path.lambda, path.exhaustion)
            .unwrap_or(f64::NAN),
        RateModel::Interpolated => path.value,
    }
}

/// Full solve: shadow price, exhaustion time, rates on the grid, cumulative
/// series and objective value.
pub fn solve_path(
    scenario: &Scenario,
    grid: &GridSpec,
    tol: f64,
) -> Result<ExtractionPath, SolverError> {
    grid.validate()?;
    let lambda = solve_shadow_price(scenario, tol)?;
    let exhaustion = exhaustion_time(scenario, lambda)?;

    let span = match grid.horizon {
        HorizonPolicy::ToExhaustion => match exhaustion {
            Exhaustion::Finite(t) if t > 0.0 => t,
            Exhaustion::Finite(_) => ZERO_PATH_SPAN,
            Exhaustion::Infinite => {
                iso_mass_horizon(scenario, lambda, grid.tail_mass_tol * scenario.stock())
                    .max(1.0 / scenario.rho())
            }
        },
        HorizonPolicy::Fixed(t_max) => t_max,
    };

    let n = grid.points;
    let mut times: Vec<f64> = (0..n)
        .map(|i| span * i as f64 / (n - 1) as f64)
        .collect();
    times[n - 1] = span;

    let rates: Vec<f64> = times
        .iter()
        .map(|&t| path_rate(scenario, lambda, exhaustion, t))
        .collect();
    if rates.iter().any(|q| !q.is_finite()) {
        return Err(SolverError::NonFinite { context: "grid rate" });
    }

    let mut cumulative = vec![0.0; n];
    for i in 1..n {
        let segment = numeric::integrate(
            |t| path_rate(scenario, lambda, exhaustion, t),
            times[i - 1],
            times[i],
            DEFAULT_QUAD_TOL,
        );
        cumulative[i] = cumulative[i - 1] + segment;
    }
    if !cumulative[n - 1].is_finite() {
        return Err(SolverError::NonFinite { context: "cumulative series" });
    }

    let value = objective_value(scenario, lambda, exhaustion)?;

    Ok(ExtractionPath {
        scenario: *scenario,
        lambda,
        exhaustion,
        times,
        rates,
        cumulative,
        value,
        model: RateModel::Foc,
    })
}
