//! Experiment drivers behind the command-line subcommands: sweeps that emit
//! figure data as CSV, the verification suites, and the worked-example trace.

pub mod sweep;
pub mod trace;
pub mod verify;

pub use sweep::{
    csv_string, entropy_grid, figure_grid, linear_grid, run_sweep, write_csv, SweepConfig, SweepOutput, SweepProtocol,
    SweepRecord, CSV_HEADER,
};
pub use trace::{parse_probability, trace_report, TraceReport};
pub use verify::{designed_n8, designed_n16, example_n4, run_verify, CheckResult, VerifyOptions, VerifyReport};
