//! Text formats: the graph generator DSL, edge-list and permutation files, time
//! expressions and JSON reports.

pub mod dsl;
pub mod edge_list;
pub mod group_file;
pub mod report;
pub mod time;

use std::path::Path;

use crate::error::Result;
use crate::graph::GeneratorSpec;

/// Resolves a `--graph` argument: `@path` reads an edge-list file, anything else is DSL.
pub fn load_graph_arg(arg: &str) -> Result<GeneratorSpec> {
    match arg.strip_prefix('@') {
        Some(path) => edge_list::read_edge_list(Path::new(path)),
        None => dsl::parse_graph_dsl(arg),
    }
}
