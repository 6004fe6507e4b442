//! Text syntax for events, the inverse of `EventSpec`'s `Display`.

use super::{Bond, EventSpec, OracleError};
use crate::walks::{LatticePoint, Site};

const MAX_LEN: usize = 4096;
const MAX_DEPTH: usize = 32;

/// Parse e.g. `and(double((o,2)),not(connect((o,0),(e1,1))))`. Whitespace is ignored.
pub fn parse_event(text: &str) -> Result<EventSpec, OracleError> {
    if text.len() > MAX_LEN {
        return Err(OracleError::Parse(format!(
            "input longer than {MAX_LEN} bytes"
        )));
    }
    let src: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    let mut p = Parser { src: &src, pos: 0 };
    let e = p.event(0)?;
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> OracleError {
        OracleError::Parse(format!("{what} at byte {}", self.pos))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), OracleError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self) -> Result<&str, OracleError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_lowercase()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an event name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default())
    }

    fn point(&mut self) -> Result<LatticePoint, OracleError> {
        let start = self.pos;
        self.expect("(")?;
        while self.peek().is_some_and(|b| b != b')') {
            self.pos += 1;
        }
        self.expect(")")?;
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err("invalid utf-8"))?;
        Ok(LatticePoint::parse(text)?)
    }

    fn site(&mut self) -> Result<Site, OracleError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b != b';') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err("invalid utf-8"))?;
        Ok(Site::parse(text)?)
    }

    fn arrow(&mut self) -> Result<(LatticePoint, LatticePoint), OracleError> {
        let a = self.point()?;
        self.expect("->")?;
        Ok((a, self.point()?))
    }

    fn events(&mut self, depth: usize) -> Result<Vec<EventSpec>, OracleError> {
        let mut v = vec![self.event(depth + 1)?];
        while self.eat(",") {
            v.push(self.event(depth + 1)?);
        }
        Ok(v)
    }

    fn event(&mut self, depth: usize) -> Result<EventSpec, OracleError> {
        if depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let name = self.ident()?.to_string();
        self.expect("(")?;
        let e = match name.as_str() {
            "connect" => {
                let a = self.point()?;
                self.expect(",")?;
                EventSpec::Connect(a, self.point()?)
            }
            "double" => EventSpec::DoubleConn(self.point()?),
            "pair" => {
                let (a, x) = self.arrow()?;
                self.expect(",")?;
                let (b, y) = self.arrow()?;
                EventSpec::DisjointPair { a, x, b, y }
            }
            "marked" => {
                let s = self.site()?;
                self.expect(";")?;
                let x = self.point()?;
                self.expect(",")?;
                EventSpec::MarkedFirstBond {
                    s,
                    x,
                    y: self.point()?,
                }
            }
            "with" => {
                let base = self.event(depth + 1)?;
                self.expect(";")?;
                let mut extras = vec![self.point()?];
                while self.eat(",") {
                    extras.push(self.point()?);
                }
                EventSpec::WithExtras(Box::new(base), extras)
            }
            "pivotal" => {
                let (from, to) = self.arrow()?;
                self.expect(";")?;
                let a = self.point()?;
                self.expect(",")?;
                EventSpec::Pivotal {
                    bond: Bond::new(from, to),
                    a,
                    x: self.point()?,
                }
            }
            "and" => EventSpec::And(self.events(depth)?),
            "or" => EventSpec::Or(self.events(depth)?),
            "not" => EventSpec::Not(Box::new(self.event(depth + 1)?)),
            other => return Err(OracleError::Parse(format!("unknown event `{other}`"))),
        };
        self.expect(")")?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for text in [
            "connect((o,0),(e1+e2,2))",
            "double((o,2))",
            "pair((o,0)->(e1,1),(o,0)->(-e1,1))",
            "marked(e1;(o,2),(2e1,2))",
            "with(double((o,2));(e1,1),(-e2,1))",
            "pivotal((o,0)->(e1,1);(o,0),(o,2))",
            "and(double((o,2)),not(or(connect((o,0),(e1,1)),connect((o,0),(-e1,1)))))",
        ] {
            let e = parse_event(text).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(parse_event(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(
            parse_event(" double( (o, 2) ) ").unwrap(),
            parse_event("double((o,2))").unwrap()
        );
    }

    #[test]
    fn rejects_garbage() {
        for bad in [
            "",
            "double",
            "double((o,2)",
            "double((o,2)))",
            "frob((o,2))",
            "and()",
            "connect((o,0))",
            "marked(;(o,2),(o,2))",
        ] {
            assert!(parse_event(bad).is_err(), "{bad}");
        }
        let deep = "not(".repeat(40) + "double((o,2))" + &")".repeat(40);
        assert!(parse_event(&deep).is_err());
    }
}
