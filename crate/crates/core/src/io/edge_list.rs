//! Edge-list files: a header line `n <count>`, then one `u v` pair per line
//! (1-based). `#` starts a comment; blank lines are ignored.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::GeneratorSpec;

pub fn parse_edge_list(text: &str) -> Result<GeneratorSpec> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let pos = offset;
        offset += line.len();
        let body = line.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(pos, format!("bad number {s:?}")));
        match (n, fields.as_slice()) {
            (None, ["n", count]) => n = Some(num(count)?),
            (None, _) => return Err(Error::parse(pos, "expected header line `n <count>`")),
            (Some(_), [a, b]) => edges.push((num(a)?, num(b)?)),
            (Some(_), _) => return Err(Error::parse(pos, format!("expected `u v`, got {body:?}"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing header line `n <count>`"))?;
    let spec = GeneratorSpec::EdgeList { n, edges };
    spec.build()?;
    Ok(spec)
}

pub fn read_edge_list(path: &Path) -> Result<GeneratorSpec> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let text = "# path on three vertices\nn 3\n1 2 # first\n\n2 3\n";
        let spec = parse_edge_list(text).unwrap();
        assert_eq!(spec, GeneratorSpec::EdgeList { n: 3, edges: vec![(1, 2), (2, 3)] });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_edge_list("1 2\n").is_err());
        assert!(parse_edge_list("n 2\n1 3\n").is_err());
        assert!(parse_edge_list("n 2\n1 1\n").is_err());
        assert!(parse_edge_list("n 3\n1 2 3\n").is_err());
        assert!(parse_edge_list("").is_err());
    }
}
