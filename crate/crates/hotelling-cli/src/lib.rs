//! Library surface behind the `hotelling` binary, exposed so integration
//! tests can exercise parsing, emission, and rendering directly.

pub mod app;
pub mod config;
pub mod emit;
pub mod svg;

pub use app::{main_with_args, Cli, Failure, EXIT_CONFIG, EXIT_DEVIATION, EXIT_SOLVER};
pub use config::{parse_config, serialize_config, ConfigError, OutputFormat, RunConfig};
pub use emit::{emit_csv, emit_summary_json, emit_sweep_csv, emit_sweep_json};
pub use svg::render_svg;
