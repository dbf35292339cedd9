//! Cost and revenue primitives and scenario well-posedness.
//!
//! A scenario pairs a revenue form with a strictly convex development-cost
//! function, a positive discount rate, and a finite stock. Everything the
//! solvers need reduces to four evaluations: total and marginal cost, total
//! and marginal revenue. Marginal cost is strictly increasing, marginal
//! revenue nonincreasing in the rate, so the net marginal profit
//! `MR(q, t) - C'(q)` is strictly decreasing in `q` — the property all the
//! downstream inversions rely on.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EconError {
    #[error("extraction rate must be nonnegative, got {0}")]
    NegativeRate(f64),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("parameter `{param}` must be finite, got {value}")]
    NonFiniteParameter { param: &'static str, value: f64 },
    #[error("parameter `{param}` must be positive, got {value}")]
    NonPositiveParameter { param: &'static str, value: f64 },
    #[error("parameter `{param}` must be nonnegative, got {value}")]
    NegativeParameter { param: &'static str, value: f64 },
    #[error(
        "cost is not strictly convex (`{param}` = {value}): with linear or concave cost the \
         interior first-order condition holds at a single instant only, a degenerate \
         bang-bang schedule this solver rejects"
    )]
    NonConvexCost { param: &'static str, value: f64 },
    #[error("demand exponent epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(f64),
    #[error(
        "discounted objective is unbounded: price drift g = {g} must stay below the \
         discount rate rho = {rho}"
    )]
    UnboundedObjective { g: f64, rho: f64 },
    #[error("discount rate must be positive, got {0}")]
    NonPositiveDiscount(f64),
    #[error("stock must be finite and nonnegative, got {0}")]
    InvalidStock(f64),
}

/// Development-cost function `C(q)` with `C(0) = 0` and strictly increasing
/// marginal cost on `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    /// `C(q) = c q + d q^2 / 2`, so `C'(q) = c + d q`. Requires `d > 0`,
    /// `c >= 0`.
    Quadratic { c: f64, d: f64 },
    /// `C(q) = a q^beta`, so `C'(q) = a beta q^(beta - 1)`. Requires `a > 0`,
    /// `beta > 1`.
    Power { a: f64, beta: f64 },
}

impl CostSpec {
    pub fn validate(&self) -> Result<(), EconError> {
        match *self {
            CostSpec::Quadratic { c, d } => {
                require_finite("c", c)?;
                require_finite("d", d)?;
                if c < 0.0 {
                    return Err(EconError::NegativeParameter { param: "c", value: c });
                }
                if d <= 0.0 {
                    return Err(EconError::NonConvexCost { param: "d", value: d });
                }
            }
            CostSpec::Power { a, beta } => {
                require_finite("a", a)?;
                require_finite("beta", beta)?;
                if a <= 0.0 {
                    return Err(EconError::NonPositiveParameter { param: "a", value: a });
                }
                if beta <= 1.0 {
                    return Err(EconError::NonConvexCost { param: "beta", value: beta });
                }
            }
        }
        Ok(())
    }

    /// Total cost `C(q)`.
    pub fn total(&self, q: f64) -> Result<f64, EconError> {
        if q < 0.0 {
            return Err(EconError::NegativeRate(q));
        }
        Ok(self.total_unchecked(q))
    }

    pub(crate) fn total_unchecked(&self, q: f64) -> f64 {
        match *self {
            CostSpec::Quadratic { c, d } => c * q + 0.5 * d * q * q,
            CostSpec::Power { a, beta } => a * q.powf(beta),
        }
    }

    /// Marginal cost `C'(q)`; strictly increasing in `q`.
    pub fn marginal(&self, q: f64) -> Result<f64, EconError> {
        if q < 0.0 {
            return Err(EconError::NegativeRate(q));
        }
        Ok(self.marginal_unchecked(q))
    }

    pub(crate) fn marginal_unchecked(&self, q: f64) -> f64 {
        match *self {
            CostSpec::Quadratic { c, d } => c + d * q,
            CostSpec::Power { a, beta } => {
                if q == 0.0 {
                    0.0
                } else {
                    a * beta * q.powf(beta - 1.0)
                }
            }
        }
    }

    /// Marginal cost at zero extraction, `C'(0)`.
    pub fn marginal_at_zero(&self) -> f64 {
        match *self {
            CostSpec::Quadratic { c, .. } => c,
            CostSpec::Power { .. } => 0.0,
        }
    }

    /// Inverse of the marginal cost: the unique `q >= 0` with `C'(q) = m`
    /// when `m > C'(0)`, and `0` when `m <= C'(0)`. The clamp is deliberate:
    /// optimal paths hit `q = 0` exactly at exhaustion.
    pub fn inverse_marginal(&self, m: f64) -> f64 {
        match *self {
            CostSpec::Quadratic { c, d } => {
                if m <= c {
                    0.0
                } else {
                    (m - c) / d
                }
            }
            CostSpec::Power { a, beta } => {
                if m <= 0.0 {
                    0.0
                } else {
                    (m / (a * beta)).powf(1.0 / (beta - 1.0))
                }
            }
        }
    }
}

/// Gross revenue form `R(q, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RevenueSpec {
    /// `R = p0 q`: the producer takes the world price as given.
    PriceTaker { p0: f64 },
    /// `R = p0 q^epsilon` with `epsilon` in (0, 1]. At `epsilon = 1` this is
    /// exactly the price taker and validation normalizes it to one.
    IsoElastic { p0: f64, epsilon: f64 },
    /// `R = p0 q e^(g t)`: price drifts exponentially at rate `g`. Requires
    /// `g < rho` or the discounted objective diverges.
    Drift { p0: f64, g: f64 },
    /// `R = (a - b q) q`: linear inverse demand, a concrete instance of a
    /// general concave revenue.
    LinearDemand { a: f64, b: f64 },
}

impl RevenueSpec {
    pub fn validate(&self) -> Result<(), EconError> {
        match *self {
            RevenueSpec::PriceTaker { p0 } => require_positive("p0", p0),
            RevenueSpec::IsoElastic { p0, epsilon } => {
                require_positive("p0", p0)?;
                require_finite("epsilon", epsilon)?;
                if epsilon <= 0.0 || epsilon > 1.0 {
                    return Err(EconError::EpsilonOutOfRange(epsilon));
                }
                Ok(())
            }
            RevenueSpec::Drift { p0, g } => {
                require_positive("p0", p0)?;
                require_finite("g", g)
            }
            RevenueSpec::LinearDemand { a, b } => {
                require_positive("a", a)?;
                require_finite("b", b)?;
                if b < 0.0 {
                    return Err(EconError::NegativeParameter { param: "b", value: b });
                }
                Ok(())
            }
        }
    }

    /// Total revenue `R(q, t)`.
    pub fn total(&self, q: f64, t: f64) -> Result<f64, EconError> {
        if q < 0.0 {
            return Err(EconError::NegativeRate(q));
        }
        if t < 0.0 {
            return Err(EconError::NegativeTime(t));
        }
        Ok(self.total_unchecked(q, t))
    }

    pub(crate) fn total_unchecked(&self, q: f64, t: f64) -> f64 {
        match *self {
            RevenueSpec::PriceTaker { p0 } => p0 * q,
            RevenueSpec::IsoElastic { p0, epsilon } => p0 * q.powf(epsilon),
            RevenueSpec::Drift { p0, g } => p0 * q * (g * t).exp(),
            RevenueSpec::LinearDemand { a, b } => (a - b * q) * q,
        }
    }

    /// Marginal revenue `dR/dq` at `(q, t)`.
    ///
    /// For iso-elastic revenue with `epsilon < 1` the marginal revenue
    /// diverges as `q -> 0+`; the call returns `f64::INFINITY` there, which
    /// is a divergence signal rather than an error — callers treat it as
    /// "any finite shadow value admits a positive rate".
    pub fn marginal(&self, q: f64, t: f64) -> Result<f64, EconError> {
        if q < 0.0 {
            return Err(EconError::NegativeRate(q));
        }
        if t < 0.0 {
            return Err(EconError::NegativeTime(t));
        }
        Ok(self.marginal_unchecked(q, t))
    }

    pub(crate) fn marginal_unchecked(&self, q: f64, t: f64) -> f64 {
        match *self {
            RevenueSpec::PriceTaker { p0 } => p0,
            RevenueSpec::IsoElastic { p0, epsilon } => {
                if epsilon == 1.0 {
                    p0
                } else if q == 0.0 {
                    f64::INFINITY
                } else {
                    p0 * epsilon * q.powf(epsilon - 1.0)
                }
            }
            RevenueSpec::Drift { p0, g } => p0 * (g * t).exp(),
            RevenueSpec::LinearDemand { a, b } => a - 2.0 * b * q,
        }
    }

    /// Marginal revenue in the limit `q -> 0+` (infinite for iso-elastic
    /// demand with `epsilon < 1`).
    pub(crate) fn marginal_at_zero(&self, t: f64) -> f64 {
        match *self {
            RevenueSpec::PriceTaker { p0 } => p0,
            RevenueSpec::IsoElastic { p0, epsilon } => {
                if epsilon == 1.0 {
                    p0
                } else {
                    f64::INFINITY
                }
            }
            RevenueSpec::Drift { p0, g } => p0 * (g * t).exp(),
            RevenueSpec::LinearDemand { a, .. } => a,
        }
    }
}

/// A full problem statement: revenue form, cost function, discount rate and
/// total stock. Validate into a [`Scenario`] before handing to the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub revenue: RevenueSpec,
    pub cost: CostSpec,
    /// Discount rate per unit time; must be positive.
    pub rho: f64,
    /// Total extractable stock; must be finite and nonnegative.
    pub stock: f64,
}

impl ScenarioSpec {
    /// Check all invariants and normalize degenerate forms.
    ///
    /// Iso-elastic revenue with `epsilon = 1` is rewritten to the price
    /// taker it equals pointwise. Drift scenarios require `g < rho`.
    pub fn validate(mut self) -> Result<Scenario, EconError> {
        self.revenue.validate()?;
        self.cost.validate()?;
        require_finite("rho", self.rho)?;
        if self.rho <= 0.0 {
            return Err(EconError::NonPositiveDiscount(self.rho));
        }
        if !self.stock.is_finite() || self.stock < 0.0 {
            return Err(EconError::InvalidStock(self.stock));
        }
        if let RevenueSpec::Drift { g, .. } = self.revenue {
            if g >= self.rho {
                return Err(EconError::UnboundedObjective { g, rho: self.rho });
            }
        }
        if let RevenueSpec::IsoElastic { p0, epsilon } = self.revenue {
            if epsilon == 1.0 {
                self.revenue = RevenueSpec::PriceTaker { p0 };
            }
        }
        Ok(Scenario { spec: self })
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.revenue {
            RevenueSpec::PriceTaker { p0 } => write!(f, "price_taker(p0={p0})")?,
            RevenueSpec::IsoElastic { p0, epsilon } => {
                write!(f, "iso_elastic(p0={p0}, eps={epsilon})")?
            }
            RevenueSpec::Drift { p0, g } => write!(f, "drift(p0={p0}, g={g})")?,
            RevenueSpec::LinearDemand { a, b } => write!(f, "linear_demand(a={a}, b={b})")?,
        }
        match self.cost {
            CostSpec::Quadratic { c, d } => write!(f, " quadratic(c={c}, d={d})")?,
            CostSpec::Power { a, beta } => write!(f, " power(a={a}, beta={beta})")?,
        }
        write!(f, " rho={} S={}", self.rho, self.stock)
    }
}

/// A [`ScenarioSpec`] that has passed validation (and normalization).
///
/// All solver entry points take `&Scenario`, so an unvalidated spec cannot
/// reach them. The wrapper is cheap to clone and freely shareable across
/// threads; nothing in the crate mutates it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Scenario {
    spec: ScenarioSpec,
}

impl Scenario {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn revenue(&self) -> &RevenueSpec {
        &self.spec.revenue
    }

    pub fn cost(&self) -> &CostSpec {
        &self.spec.cost
    }

    pub fn rho(&self) -> f64 {
        self.spec.rho
    }

    pub fn stock(&self) -> f64 {
        self.spec.stock
    }

    /// Net marginal profit `MR(q, t) - C'(q)`; strictly decreasing in `q`.
    pub fn net_marginal_profit(&self, q: f64, t: f64) -> Result<f64, EconError> {
        Ok(self.spec.revenue.marginal(q, t)? - self.spec.cost.marginal(q)?)
    }

    pub(crate) fn net_marginal_profit_unchecked(&self, q: f64, t: f64) -> f64 {
        self.spec.revenue.marginal_unchecked(q, t) - self.spec.cost.marginal_unchecked(q)
    }

    /// Net marginal profit in the limit `q -> 0+` at time `t`. Infinite for
    /// iso-elastic revenue with `epsilon < 1`.
    pub fn net_marginal_at_zero(&self, t: f64) -> f64 {
        let mr0 = self.spec.revenue.marginal_at_zero(t);
        if mr0.is_infinite() {
            mr0
        } else {
            mr0 - self.spec.cost.marginal_at_zero()
        }
    }

    /// Instantaneous profit `R(q, t) - C(q)` discounted back to time zero.
    pub fn discounted_profit(&self, q: f64, t: f64) -> f64 {
        (self.spec.revenue.total_unchecked(q, t) - self.spec.cost.total_unchecked(q))
            * (-self.spec.rho * t).exp()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.spec.fmt(f)
    }
}

fn require_finite(param: &'static str, value: f64) -> Result<(), EconError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(EconError::NonFiniteParameter { param, value })
    }
}

fn require_positive(param: &'static str, value: f64) -> Result<(), EconError> {
    require_finite(param, value)?;
    if value <= 0.0 {
        return Err(EconError::NonPositiveParameter { param, value });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(c: f64, d: f64) -> CostSpec {
        CostSpec::Quadratic { c, d }
    }

    #[test]
    fn marginal_cost_examples() {
        assert_eq!(quad(1.0, 2.0).marginal(3.0).unwrap(), 7.0);
        assert_eq!(CostSpec::Power { a: 1.0, beta: 2.0 }.marginal(0.0).unwrap(), 0.0);
        assert_eq!(quad(0.0, 1.0).marginal(0.5).unwrap(), 0.5);
    }

    #[test]
    fn marginal_cost_rejects_negative_rate() {
        assert_eq!(quad(1.0, 1.0).marginal(-0.1), Err(EconError::NegativeRate(-0.1)));
    }

    #[test]
    fn inverse_marginal_examples() {
        assert_eq!(quad(1.0, 2.0).inverse_marginal(7.0), 3.0);
        // Below C'(0) the inverse clamps to zero rather than erroring.
        assert_eq!(quad(1.0, 2.0).inverse_marginal(0.5), 0.0);
        assert_eq!(CostSpec::Power { a: 1.0, beta: 2.0 }.inverse_marginal(4.0), 2.0);
    }

    #[test]
    fn cost_vanishes_at_origin() {
        assert_eq!(quad(1.0, 2.0).total(0.0).unwrap(), 0.0);
        assert_eq!(CostSpec::Power { a: 2.0, beta: 1.5 }.total(0.0).unwrap(), 0.0);
    }

    #[test]
    fn marginal_revenue_examples() {
        let pt = RevenueSpec::PriceTaker { p0: 2.0 };
        assert_eq!(pt.marginal(17.0, 0.0).unwrap(), 2.0);

        let iso = RevenueSpec::IsoElastic { p0: 1.0, epsilon: 0.5 };
        assert!((iso.marginal(4.0, 0.0).unwrap() - 0.25).abs() < 1e-15);

        let drift = RevenueSpec::Drift { p0: 1.0, g: 0.1 };
        assert!((drift.marginal(1.0, 10.0).unwrap() - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn iso_elastic_diverges_at_zero_rate() {
        let iso = RevenueSpec::IsoElastic { p0: 1.0, epsilon: 0.5 };
        assert_eq!(iso.marginal(0.0, 0.0).unwrap(), f64::INFINITY);
        // Distinct from the domain error on negative rates.
        assert!(matches!(iso.marginal(-1.0, 0.0), Err(EconError::NegativeRate(_))));
    }

    #[test]
    fn linear_demand_marginal() {
        let lin = RevenueSpec::LinearDemand { a: 2.0, b: 0.5 };
        assert_eq!(lin.marginal(1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn validate_rejects_unbounded_drift() {
        let spec = ScenarioSpec {
            revenue: RevenueSpec::Drift { p0: 1.0, g: 0.2 },
            cost: quad(1.0, 1.0),
            rho: 0.1,
            stock: 1.0,
        };
        assert_eq!(
            spec.validate().unwrap_err(),
            EconError::UnboundedObjective { g: 0.2, rho: 0.1 }
        );
    }

    #[test]
    fn validate_normalizes_unit_elasticity() {
        let spec = ScenarioSpec {
            revenue: RevenueSpec::IsoElastic { p0: 3.0, epsilon: 1.0 },
            cost: quad(1.0, 1.0),
            rho: 1.0,
            stock: 1.0,
        };
        let scenario = spec.validate().unwrap();
        assert_eq!(*scenario.revenue(), RevenueSpec::PriceTaker { p0: 3.0 });
    }

    #[test]
    fn validate_accepts_wellposed_scenario() {
        let spec = ScenarioSpec {
            revenue: RevenueSpec::PriceTaker { p0: 2.0 },
            cost: quad(1.0, 1.0),
            rho: 1.0,
            stock: 1.0,
        };
        let scenario = spec.validate().unwrap();
        assert_eq!(*scenario.spec(), spec);
    }

    #[test]
    fn validate_rejects_degenerate_costs() {
        let linear_cost = ScenarioSpec {
            revenue: RevenueSpec::PriceTaker { p0: 2.0 },
            cost: quad(1.0, 0.0),
            rho: 1.0,
            stock: 1.0,
        };
        assert!(matches!(
            linear_cost.validate().unwrap_err(),
            EconError::NonConvexCost { param: "d", .. }
        ));

        let concave_power = ScenarioSpec {
            revenue: RevenueSpec::PriceTaker { p0: 2.0 },
            cost: CostSpec::Power { a: 1.0, beta: 1.0 },
            rho: 1.0,
            stock: 1.0,
        };
        assert!(matches!(
            concave_power.validate().unwrap_err(),
            EconError::NonConvexCost { param: "beta", .. }
        ));
    }

    #[test]
    fn validate_rejects_bad_epsilon_rho_stock() {
        let base = ScenarioSpec {
            revenue: RevenueSpec::IsoElastic { p0: 1.0, epsilon: 1.5 },
            cost: quad(0.0, 1.0),
            rho: 1.0,
            stock: 1.0,
        };
        assert_eq!(base.validate().unwrap_err(), EconError::EpsilonOutOfRange(1.5));

        let zero_eps = ScenarioSpec {
            revenue: RevenueSpec::IsoElastic { p0: 1.0, epsilon: 0.0 },
            ..base
        };
        assert_eq!(zero_eps.validate().unwrap_err(), EconError::EpsilonOutOfRange(0.0));

        let bad_rho = ScenarioSpec {
            revenue: RevenueSpec::PriceTaker { p0: 1.0 },
            rho: 0.0,
            ..base
        };
        assert_eq!(bad_rho.validate().unwrap_err(), EconError::NonPositiveDiscount(0.0));

        let bad_stock = ScenarioSpec {
            revenue: RevenueSpec::PriceTaker { p0: 1.0 },
            stock: -1.0,
            ..base
        };
        assert_eq!(bad_stock.validate().unwrap_err(), EconError::InvalidStock(-1.0));
    }

    #[test]
    fn net_marginal_profit_decreases_in_rate() {
        let scenario = ScenarioSpec {
            revenue: RevenueSpec::LinearDemand { a: 2.0, b: 0.5 },
            cost: quad(0.1, 1.0),
            rho: 1.0,
            stock: 1.0,
        }
        .validate()
        .unwrap();
        let lo = scenario.net_marginal_profit(0.2, 0.0).unwrap();
        let hi = scenario.net_marginal_profit(0.8, 0.0).unwrap();
        assert!(hi < lo);
    }
}
