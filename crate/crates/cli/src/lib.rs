//! Command-line front end for the exact spectral-triple certificates.
//!
//! The binary is a thin wrapper over [`run_from_args`]; everything below
//! that, including argument parsing and exit-code selection, lives in the
//! library so the integration tests can drive it in process.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use commands::run_from_args;

/// Every requested certificate held.
pub const EXIT_PASS: i32 = 0;
/// At least one certificate failed; the failing identity is named.
pub const EXIT_CERT_FAIL: i32 = 1;
/// The invocation or configuration could not be understood.
pub const EXIT_USAGE: i32 = 2;
