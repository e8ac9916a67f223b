//! Recursive-descent parser for graph specs such as `product(doublestar:2,complete:2)`.
//!
//! ```text
//! spec  := name [':' args] | op '(' spec [',' spec] ')'
//! op    := product | join | complement
//! ```

use crate::graph::GeneratorSpec;
use crate::error::{Error, Result};

pub fn parse_graph_dsl(input: &str) -> Result<GeneratorSpec> {
    let mut p = Parser { src: input.as_bytes(), pos: 0 };
    p.skip_ws();
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::parse(p.pos, format!("unexpected trailing input {:?}", &input[p.pos..])));
    }
    Ok(spec)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a graph family name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).to_ascii_lowercase())
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(start, "number too large"))
    }

    fn spec(&mut self) -> Result<GeneratorSpec> {
        use GeneratorSpec::*;
        let start = self.pos;
        let name = self.ident()?;
        let spec = match name.as_str() {
            "product" | "join" => {
                self.expect(b'(')?;
                let a = self.spec()?;
                self.expect(b',')?;
                let b = self.spec()?;
                self.expect(b')')?;
                if name == "product" {
                    Product(Box::new(a), Box::new(b))
                } else {
                    Join(Box::new(a), Box::new(b))
                }
            }
            "complement" => {
                self.expect(b'(')?;
                let a = self.spec()?;
                self.expect(b')')?;
                Complement(Box::new(a))
            }
            "petersen" => Petersen,
            "mckay" => McKay,
            "path" | "cycle" | "complete" | "hypercube" | "doublestar" | "paley" => {
                self.expect(b':')?;
                let k = self.number()?;
                match name.as_str() {
                    "path" => Path(k),
                    "cycle" => Cycle(k),
                    "complete" => Complete(k),
                    "hypercube" => Hypercube(k),
                    "doublestar" => DoubleStar(k),
                    _ => Paley(k),
                }
            }
            "cbip" => {
                self.expect(b':')?;
                let a = self.number()?;
                self.expect(b',')?;
                CompleteBipartite(a, self.number()?)
            }
            "cmulti" => {
                self.expect(b':')?;
                let parts = self.number()?;
                self.expect(b'x')?;
                CompleteMultipartite { parts, size: self.number()? }
            }
            "edges" => {
                self.expect(b':')?;
                let n = self.number()?;
                self.expect(b':')?;
                let mut edges = Vec::new();
                self.skip_ws();
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    loop {
                        let a = self.number()?;
                        self.expect(b'-')?;
                        edges.push((a, self.number()?));
                        // A comma followed by a digit continues the list; otherwise it
                        // belongs to an enclosing product/join.
                        let save = self.pos;
                        self.skip_ws();
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                            self.skip_ws();
                            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                                continue;
                            }
                        }
                        self.pos = save;
                        break;
                    }
                }
                EdgeList { n, edges }
            }
            other => return Err(Error::parse(start, format!("unknown graph family {other:?}"))),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeneratorSpec::*;

    #[test]
    fn families() {
        assert_eq!(parse_graph_dsl("hypercube:3").unwrap(), Hypercube(3));
        assert_eq!(parse_graph_dsl("cbip:3,3").unwrap(), CompleteBipartite(3, 3));
        assert_eq!(parse_graph_dsl("cmulti:3x2").unwrap(), CompleteMultipartite { parts: 3, size: 2 });
        assert_eq!(parse_graph_dsl(" petersen ").unwrap(), Petersen);
        assert_eq!(
            parse_graph_dsl("edges:4:1-2,2-3").unwrap(),
            EdgeList { n: 4, edges: vec![(1, 2), (2, 3)] }
        );
        assert_eq!(parse_graph_dsl("edges:3:").unwrap(), EdgeList { n: 3, edges: vec![] });
    }

    #[test]
    fn nesting() {
        let s = parse_graph_dsl("join(complement(complete:2),edges:2:1-2)").unwrap();
        assert_eq!(
            s,
            Join(
                Box::new(Complement(Box::new(Complete(2)))),
                Box::new(EdgeList { n: 2, edges: vec![(1, 2)] })
            )
        );
        let s = parse_graph_dsl("product(edges:2:1-2,cbip:1,2)").unwrap();
        assert_eq!(
            s,
            Product(Box::new(EdgeList { n: 2, edges: vec![(1, 2)] }), Box::new(CompleteBipartite(1, 2)))
        );
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "product(doublestar:2,complete:2)",
            "join(cycle:4,complement(complete:3))",
            "edges:5:1-2,4-5",
            "cmulti:2x3",
            "mckay",
        ] {
            let spec = parse_graph_dsl(src).unwrap();
            assert_eq!(spec.to_string(), src);
            assert_eq!(parse_graph_dsl(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn errors_carry_positions() {
        match parse_graph_dsl("product(path:2,,path:3)") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 15),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_graph_dsl("bogus:3"), Err(Error::Parse { pos: 0, .. })));
        assert!(parse_graph_dsl("path:3 extra").is_err());
        assert!(parse_graph_dsl("path:").is_err());
    }
}
