// SPDX-License-Identifier: Apache-2.0

//! Gate-count-optimal synthesis of 3- and 4-bit reversible circuits over
//! NOT, CNOT, Toffoli and 4-bit Toffoli gates.

pub mod catalog;
pub mod context;
pub mod equiv;
pub mod findopt;
pub mod gate;
pub mod perm;
pub mod searchall;
pub mod table;

pub use context::Context;
pub use findopt::{find_min_circuit, reconstruct, synthesize, FindError, Method, SynthesisResult};
pub use equiv::{EquivWitness, OrderConvention, SymmetryGroup};
pub use gate::{parse_circuit, format_circuit, Architecture, Circuit, Gate, GateKind, GateLibrary};
pub use perm::{parse_truth_table, LinePerm, PermWord, Width};
pub use table::{bfs_build, BfsOptions, CanonTable};
