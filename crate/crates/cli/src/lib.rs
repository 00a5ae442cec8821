//! Command-line front end for `cpamm-core`: swap quotes, liquidity-provider
//! analytics, scenario replay and figure data, all as CSV.

pub mod cli;
pub mod figures;
pub mod scenario_file;

pub use cli::run;
