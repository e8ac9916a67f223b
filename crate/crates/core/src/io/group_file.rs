//! Permutation files for `--group @path`: one generator per line, written as the
//! 1-based images of `1..n` separated by spaces or commas. `#` starts a comment.

use std::path::Path;

use crate::error::{Error, Result};
use crate::symmetry::Permutation;

pub fn parse_group_file(text: &str) -> Result<Vec<Permutation>> {
    let mut gens = Vec::new();
    let mut offset = 0;
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        let mut images = Vec::new();
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: usize = tok.parse().map_err(|_| Error::parse(offset, format!("bad vertex {tok:?}")))?;
            images.push(v);
        }
        if !images.is_empty() {
            if let Some(first) = gens.first().map(Permutation::n) {
                if first != images.len() {
                    return Err(Error::parse(offset, format!("generator on {} points, expected {first}", images.len())));
                }
            }
            gens.push(Permutation::from_one_based(&images)?);
        }
        offset += line.len() + 1;
    }
    if gens.is_empty() {
        return Err(Error::parse(0, "no generators"));
    }
    Ok(gens)
}

pub fn read_group_file(path: &Path) -> Result<Vec<Permutation>> {
    parse_group_file(&std::fs::read_to_string(path)?)
}
