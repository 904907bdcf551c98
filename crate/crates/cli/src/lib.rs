// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: table building, synthesis, verification and the
//! experiment drivers.

pub mod commands;
pub mod experiments;
pub mod linear;
pub mod opts;
pub mod report;
pub mod tables;

pub use opts::{Cli, Command, GlobalOpts};

/// What a command produced: a human-readable text, a JSON document, and
/// whether every check it made passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub text: String,
    pub json: serde_json::Value,
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if let Some(t) = cli.global.threads {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let g = &cli.global;
    match &cli.command {
        Command::Bfs { out } => commands::cmd_bfs(g, out.as_deref()),
        Command::Synth { spec } => commands::cmd_synth(g, spec),
        Command::Verify { spec, circuit } => commands::cmd_verify(spec, circuit),
        Command::Linear => commands::cmd_linear(g),
        Command::Random { samples } => commands::cmd_random(g, *samples),
        Command::Benchmarks => commands::cmd_benchmarks(g),
        Command::Searchall(args) => commands::cmd_searchall(g, args),
        Command::TableInfo => commands::cmd_table_info(g),
    }
}
