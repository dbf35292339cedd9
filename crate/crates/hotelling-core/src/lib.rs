//! Optimal depletion of an exhaustible resource stock.
//!
//! The owner of a finite stock `S` chooses extraction rates `Q(t) >= 0` to
//! maximize discounted profit subject to `integral Q dt = S`. Along the
//! optimum, net marginal profit grows at exactly the discount rate — the
//! Hotelling rule — which reduces the whole problem to a single shadow price
//! on the stock. This crate provides:
//!
//! - [`econ`]: cost and revenue primitives (price-taking, iso-elastic,
//!   exponentially drifting price, linear demand) and scenario validation;
//! - [`solver`]: first-order-condition inversion, shadow-price bisection,
//!   and assembled extraction paths with objective values;
//! - [`oracle`]: an independent discrete transcription (dual bisection on a
//!   midpoint grid) used to cross-validate the continuous solver;
//! - [`lab`]: comparative statics, the front-load half-time metric,
//!   multi-country aggregation, and mechanical verdicts on the qualitative
//!   over-extraction/conservation claims;
//! - [`numeric`]: the bisection and adaptive Gauss–Kronrod quadrature
//!   routines everything above rests on.
//!
//! Everything is pure and deterministic over immutable inputs; independent
//! solves can run on separate threads with no coordination.

pub mod econ;
pub mod lab;
pub mod numeric;
pub mod oracle;
pub mod solver;

pub use econ::{CostSpec, EconError, RevenueSpec, Scenario, ScenarioSpec};
pub use lab::{
    front_load_time, hotelling_residual, multi_country_solve, qualitative_checks,
    scenario_suite, substitute_parameter, sweep, CountrySpec, Direction, LabError,
    MultiCountryResult, QualitativeReport, SweepParameter, SweepResult, SweepRow,
    SweepSolution, Verdict,
};
pub use oracle::{compare_paths, solve_discrete, Deviation, DiscretePath, OracleError};
pub use solver::{
    cumulative_extraction, exhaustion_time, extraction_rate_at, present_value,
    solve_path, solve_shadow_price, Exhaustion, ExtractionPath, GridSpec, HorizonPolicy,
    SolverError, DEFAULT_LAMBDA_TOL, DEFAULT_QUAD_TOL, DEFAULT_TAIL_MASS_TOL,
    RATE_RESIDUAL_TOL,
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_types_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<Scenario>();
        check::<ScenarioSpec>();
        check::<ExtractionPath>();
        check::<DiscretePath>();
        check::<GridSpec>();
        check::<SweepResult>();
        check::<MultiCountryResult>();
    }
}
