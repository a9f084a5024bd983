//! Library side of the comshift command-line tool: config parsing, scenario
//! execution, analysis sweeps, summaries, and golden-file verification.

pub mod analyze;
pub mod config;
pub mod runner;
pub mod summary;
pub mod verify;

/// Process exit codes.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const DIVERGENCE: i32 = 3;
    pub const VERIFY_MISMATCH: i32 = 4;
}
