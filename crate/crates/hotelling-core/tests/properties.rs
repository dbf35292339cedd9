//! Property tests for the model invariants.

use proptest::prelude::*;

use hotelling_core::{
    cumulative_extraction, front_load_time, solve_path, CostSpec, GridSpec, RevenueSpec,
    Scenario, ScenarioSpec,
};

/// Solve, treating the bounded-capacity rejection as a discard: a declining
/// price against a cost floor caps total profitable extraction, and a stock
/// drawn beyond that capacity is a valid refusal rather than a solver defect.
fn try_solve(scenario: &Scenario) -> Option<hotelling_core::ExtractionPath> {
    match solve_path(scenario, &GridSpec::new(101), 1e-10) {
        Ok(path) => Some(path),
        Err(hotelling_core::SolverError::StockInfeasible { .. }) => None,
        Err(other) => panic!("solve failed: {other}"),
    }
}

fn cost_strategy() -> impl Strategy<Value = CostSpec> {
    prop_oneof![
        (0.0..2.0f64, 0.1..3.0f64).prop_map(|(c, d)| CostSpec::Quadratic { c, d }),
        (0.3..2.0f64, 1.2..3.0f64).prop_map(|(a, beta)| CostSpec::Power { a, beta }),
    ]
}

/// Scenarios constrained to be profitable (the shutdown margin at t = 0 is
/// positive) so that every draw supports a nontrivial path.
fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    let revenue = prop_oneof![
        (0.5..3.0f64).prop_map(|p0| RevenueSpec::PriceTaker { p0 }),
        (0.5..3.0f64, 0.3..0.95f64)
            .prop_map(|(p0, epsilon)| RevenueSpec::IsoElastic { p0, epsilon }),
        (0.5..3.0f64, -0.3..0.25f64).prop_map(|(p0, g)| RevenueSpec::Drift { p0, g }),
        (0.8..3.0f64, 0.0..1.0f64).prop_map(|(a, b)| RevenueSpec::LinearDemand { a, b }),
    ];
    (revenue, cost_strategy(), 0.4..2.0f64, 0.1..1.5f64).prop_filter_map(
        "well-posed and profitable",
        |(revenue, cost, rho, stock)| {
            let spec = ScenarioSpec { revenue, cost, rho, stock };
            let scenario = spec.validate().ok()?;
            if scenario.net_marginal_at_zero(0.0) > 0.05 {
                Some(scenario)
            } else {
                None
            }
        },
    )
}

proptest! {
    #[test]
    fn marginal_cost_strictly_increases(cost in cost_strategy(), q1 in 0.0..5.0f64, dq in 1e-6..5.0f64) {
        let q2 = q1 + dq;
        prop_assert!(cost.marginal(q1).unwrap() < cost.marginal(q2).unwrap());
    }

    #[test]
    fn marginal_cost_round_trips_through_inverse(cost in cost_strategy(), above in 1e-6..5.0f64) {
        let m = cost.marginal_at_zero() + above;
        let q = cost.inverse_marginal(m);
        let back = cost.marginal(q).unwrap();
        prop_assert!((back - m).abs() <= 1e-12 * m.max(1.0), "m {m} -> q {q} -> {back}");
    }

    #[test]
    fn unit_elasticity_equals_price_taker(p0 in 0.5..3.0f64, q in 0.0..5.0f64, t in 0.0..5.0f64) {
        let iso = RevenueSpec::IsoElastic { p0, epsilon: 1.0 };
        let taker = RevenueSpec::PriceTaker { p0 };
        prop_assert_eq!(iso.marginal(q, t).unwrap(), taker.marginal(q, t).unwrap());
        prop_assert!((iso.total(q, t).unwrap() - taker.total(q, t).unwrap()).abs() <= 1e-12 * (p0 * q).max(1.0));
    }

    #[test]
    fn iso_marginal_revenue_decreases_in_rate(
        p0 in 0.5..3.0f64,
        epsilon in 0.3..0.95f64,
        q1 in 0.01..5.0f64,
        dq in 1e-6..5.0f64,
    ) {
        let iso = RevenueSpec::IsoElastic { p0, epsilon };
        prop_assert!(iso.marginal(q1, 0.0).unwrap() > iso.marginal(q1 + dq, 0.0).unwrap());
    }

    #[test]
    fn drift_marginal_revenue_increases_in_time(
        p0 in 0.5..3.0f64,
        g in 0.01..0.5f64,
        t1 in 0.0..5.0f64,
        dt in 1e-6..5.0f64,
    ) {
        let drift = RevenueSpec::Drift { p0, g };
        prop_assert!(drift.marginal(1.0, t1).unwrap() < drift.marginal(1.0, t1 + dt).unwrap());
    }
}

proptest! {
    // Full solves are milliseconds each; keep the case count moderate.
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solved_paths_satisfy_foc_and_stock(scenario in scenario_strategy()) {
        let Some(path) = try_solve(&scenario) else { return Ok(()) };

        // First-order condition at every interior node with positive rate.
        for (&t, &q) in path.times().iter().zip(path.rates()) {
            if q > 0.0 {
                let shadow = path.lambda() * (scenario.rho() * t).exp();
                let residual = scenario.net_marginal_profit(q, t).unwrap() - shadow;
                prop_assert!(
                    residual.abs() <= 1e-8 * shadow.max(1.0),
                    "residual {} at t {}", residual, t
                );
            }
        }

        // Stock feasibility.
        let cum_end = *path.cumulative().last().unwrap();
        prop_assert!(
            (cum_end - scenario.stock()).abs() <= 1e-7 * scenario.stock().max(1.0),
            "cum {} vs stock {}", cum_end, scenario.stock()
        );

        // Rates never negative; cumulative never decreasing.
        prop_assert!(path.rates().iter().all(|&q| q >= 0.0));
        prop_assert!(path.cumulative().windows(2).all(|w| w[1] >= w[0]));

        // Price-taker rates are nonincreasing in time.
        if matches!(scenario.revenue(), RevenueSpec::PriceTaker { .. }) {
            prop_assert!(path.rates().windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }

    #[test]
    fn cumulative_extraction_decreases_in_lambda(
        scenario in scenario_strategy(),
        lambda in 0.01..0.5f64,
        bump in 0.05..1.0f64,
    ) {
        let sup = scenario.net_marginal_at_zero(0.0);
        let lo_lambda = if sup.is_finite() { lambda * sup } else { lambda };
        let hi_lambda = lo_lambda * (1.0 + bump);
        let lo = cumulative_extraction(&scenario, lo_lambda).unwrap();
        let hi = cumulative_extraction(&scenario, hi_lambda).unwrap();
        prop_assert!(lo >= hi, "cumulative rose: {} at {} vs {} at {}", lo, lo_lambda, hi, hi_lambda);
        if lo > 1e-9 {
            prop_assert!(lo > hi, "strict monotonicity on the interior");
        }
    }

    #[test]
    fn front_load_time_is_monotone_in_fraction(
        scenario in scenario_strategy(),
        f1 in 0.05..0.9f64,
        df in 0.01..0.09f64,
    ) {
        let Some(path) = try_solve(&scenario) else { return Ok(()) };
        let t1 = front_load_time(&path, f1).unwrap();
        let t2 = front_load_time(&path, f1 + df).unwrap();
        prop_assert!(t2 >= t1);
    }
}
