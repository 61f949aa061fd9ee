//! File formats and subcommands of the `nfold` command-line tool.

pub mod commands;
pub mod files;

pub use commands::{
    check_solution, cmd_check, cmd_complexity, cmd_encode, cmd_graver, cmd_solve, CliError,
    EncodeKind, Exit, RunOptions, Verdict,
};
pub use files::{
    parse_decimal, parse_grid, parse_json, Dec, Diagnostic, InstanceFile, SolutionFile, Status,
    SCHEMA_VERSION,
};
