//! Library surface of the harness, exposed so integration tests can drive
//! the same checks, presets, and experiments the binary runs.

pub mod checks;
pub mod config;
pub mod evalcmd;
pub mod experiments;
pub mod presets;
pub mod report;
