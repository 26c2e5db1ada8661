//! Scans and verification checks with persisted results.

pub mod calibration;
pub mod checks;
pub mod corpus;
pub mod profile;
pub mod report;
pub mod scans;
pub mod suite;

pub use calibration::{Calibration, Constants, Measured};
pub use profile::{Profile, ProfileName};
pub use report::{CheckReport, Relation, ScanTable, Status};
pub use suite::{run_suite, SuiteOutput};
