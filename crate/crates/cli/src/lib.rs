//! Command-line front end for the sequential-auction solver: argument and
//! config-file handling, CSV/SVG artifacts, and exit-code mapping.

pub mod commands;
pub mod config;
pub mod figures;
pub mod output;
pub mod svg;

use anyhow::Result;

use crate::commands::GateFailure;
use crate::config::{resolve, Cli, CommandKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_GATE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Exit code for an error: gate failures first, then I/O anywhere in the
/// cause chain, otherwise validation.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|c| c.is::<GateFailure>()) {
        return EXIT_GATE;
    }
    if err
        .chain()
        .any(|c| c.is::<std::io::Error>() || c.is::<csv::Error>())
    {
        return EXIT_IO;
    }
    EXIT_VALIDATION
}

/// Resolves configuration and runs the command, on a dedicated thread pool
/// when `threads` is set.
pub fn run(cli: &Cli) -> Result<()> {
    let kind = cli.command.kind();
    let cfg = resolve(kind, cli.command.flags())?;
    let go = || match kind {
        CommandKind::Solve => commands::cmd_solve(&cfg),
        CommandKind::Simulate => commands::cmd_simulate(&cfg),
        CommandKind::Figures => commands::cmd_figures(&cfg),
        CommandKind::Limits => commands::cmd_limits(&cfg),
    };
    match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()?
            .install(go),
        None => go(),
    }
}
