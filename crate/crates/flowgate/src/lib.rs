//! Scenario files, parameter sweeps and report output for `flowgate-core`.

pub mod error;
pub mod report;
pub mod scenario;
pub mod sections;
pub mod sweep;
pub mod topofile;

pub use error::{Error, ParseError};
pub use scenario::{OutputFormat, Scenario};
pub use sweep::{SweepAxis, SweepResult, SweepSpec};
