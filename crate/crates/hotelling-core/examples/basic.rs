//! Solve the closed-form benchmark scenario and print its headline numbers.

use hotelling_core::{
    front_load_time, solve_path, CostSpec, GridSpec, RevenueSpec, ScenarioSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = ScenarioSpec {
        revenue: RevenueSpec::PriceTaker { p0: 2.0 },
        cost: CostSpec::Quadratic { c: 1.0, d: 1.0 },
        rho: 1.0,
        stock: (-1.0f64).exp(),
    }
    .validate()?;

    let path = solve_path(&scenario, &GridSpec::new(101), 1e-10)?;
    println!("lambda = {}", path.lambda());
    println!("T      = {:?}", path.exhaustion());
    println!("V      = {}", path.value());
    println!("t50    = {}", front_load_time(&path, 0.5)?);
    Ok(())
}
