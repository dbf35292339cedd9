//! Benchmark-only crate; scenarios shared by the criterion targets.

use hotelling_core::{CostSpec, RevenueSpec, Scenario, ScenarioSpec};

pub fn benchmark_scenario() -> Scenario {
    ScenarioSpec {
        revenue: RevenueSpec::PriceTaker { p0: 2.0 },
        cost: CostSpec::Quadratic { c: 1.0, d: 1.0 },
        rho: 1.0,
        stock: (-1.0f64).exp(),
    }
    .validate()
    .unwrap()
}

pub fn iso_scenario() -> Scenario {
    ScenarioSpec {
        revenue: RevenueSpec::IsoElastic { p0: 1.0, epsilon: 0.5 },
        cost: CostSpec::Quadratic { c: 0.0, d: 1.0 },
        rho: 1.0,
        stock: 1.0,
    }
    .validate()
    .unwrap()
}

pub fn drift_scenario() -> Scenario {
    ScenarioSpec {
        revenue: RevenueSpec::Drift { p0: 2.0, g: 0.3 },
        cost: CostSpec::Quadratic { c: 1.0, d: 1.0 },
        rho: 1.0,
        stock: (-1.0f64).exp(),
    }
    .validate()
    .unwrap()
}
