//! Scenario files, the proposition suite and random scenarios for
//! `relcx-core`.

pub mod checks;
pub mod gen;
pub mod oracle;
pub mod randalg;
pub mod scenario;

pub use checks::{run_checks, select, CheckReport, CHECKS};
pub use gen::{gen_scenario, Sizes};
pub use scenario::{load_scenario, parse_scenario, LoadError, Scenario};
