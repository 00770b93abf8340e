//! Standard-library front end for `gomea-core`: wall clock and entropy,
//! statistics CSV, benchmark setup from files and flags, seed sweeps and
//! the `gomea` command-line tool.

pub mod cli;
pub mod clock;
pub mod csv_stats;
pub mod error;
pub mod problem;
pub mod request;
pub mod sweep;

pub use clock::{resolve_seed, StdClock};
pub use csv_stats::{parse_csv, read_csv, to_csv_string, write_csv};
pub use error::{CliError, Result};
pub use problem::{Mode, Outcome, Problem, ProblemKind, ProblemSpec};
pub use request::RunRequest;
pub use sweep::{Spread, SummaryRow, Sweep};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
