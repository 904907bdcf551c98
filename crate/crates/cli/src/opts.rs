// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revsynth::Architecture;

#[derive(Debug, Parser)]
#[command(name = "revsynth", version, about = "Optimal synthesis of small reversible circuits")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_arch(s: &str) -> Result<Architecture, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Table file: loaded when it exists, otherwise built and written there.
    #[arg(long, global = true)]
    pub tables: Option<PathBuf>,
    #[arg(long, global = true, default_value = "full", value_parser = parse_arch)]
    pub arch: Architecture,
    /// Number of lines.
    #[arg(long, global = true, default_value_t = 4)]
    pub n: u8,
    /// Table depth.
    #[arg(long, global = true)]
    pub k: Option<u8>,
    /// Largest circuit size searched, between k and 2k (default 2k).
    #[arg(long = "L", global = true)]
    pub l: Option<u8>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Refuse table levels or bit sets needing more memory than this.
    #[arg(long = "budget-bytes", global = true)]
    pub budget_bytes: Option<u64>,
}

impl Default for GlobalOpts {
    fn default() -> Self {
        GlobalOpts {
            tables: None,
            arch: Architecture::Full,
            n: 4,
            k: None,
            l: None,
            seed: 1,
            json: false,
            threads: None,
            budget_bytes: None,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build the table of class representatives up to size k.
    Bfs {
        /// Where to write the table (defaults to --tables).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find an optimal circuit for a truth table such as `[1,0,3,2,...]`.
    Synth {
        #[arg(long)]
        spec: String,
    },
    /// Check that a circuit implements a truth table.
    Verify {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        circuit: String,
    },
    /// Optimal sizes of every 4-bit linear function.
    Linear,
    /// Optimal sizes of uniformly random 4-bit functions.
    Random {
        #[arg(long, default_value_t = 300)]
        samples: usize,
    },
    /// Synthesize the built-in benchmark functions.
    Benchmarks,
    /// Enumerate whole size classes with the bit-set pipeline.
    Searchall(SearchallArgs),
    /// Describe a table file.
    TableInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StorageArg {
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Args)]
pub struct SearchallArgs {
    /// Size of the seed set (taken from a table of that depth).
    #[arg(long)]
    pub from: u8,
    /// Last size to produce; without it the run stops at the first empty size.
    #[arg(long)]
    pub to: Option<u8>,
    #[arg(long, default_value_t = 1)]
    pub slices: usize,
    #[arg(long, default_value_t = 2)]
    pub collectors: usize,
    /// Checkpoint directory, resumed if it already holds finished sizes.
    #[arg(long)]
    pub work_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub storage: StorageArg,
    /// Compose by scanning class members instead of the boundary table.
    #[arg(long)]
    pub naive: bool,
    /// Allow dense bit sets beyond the desk-scale limit.
    #[arg(long = "i-have-terabytes")]
    pub i_have_terabytes: bool,
}
