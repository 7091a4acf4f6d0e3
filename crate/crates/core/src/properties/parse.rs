//! Property expressions:
//!
//! ```text
//! prop := connected | bipartite | empty | true | false
//!       | conn_of_order:<order set>
//!       | and(prop, ...) | or(prop, ...) | not(prop)
//! ```

use super::{BoolFormula, OrderSet, Property};
use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropertyOptions {
    /// Whether the empty graph counts as connected.
    pub empty_connected: bool,
}

impl Default for PropertyOptions {
    fn default() -> Self {
        Self { empty_connected: true }
    }
}

pub fn parse_property(text: &str, opts: PropertyOptions) -> Result<Property, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        opts,
        atoms: Vec::new(),
    };
    let formula = p.expr(0)?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("trailing input"));
    }
    // A lone atom is returned as itself.
    Ok(match formula {
        BoolFormula::Slot(0) if p.atoms.len() == 1 => p.atoms.pop().expect("one atom"),
        BoolFormula::Const(b) => Property::Const(b),
        formula => Property::Combine {
            formula,
            props: p.atoms,
        },
    })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    opts: PropertyOptions,
    atoms: Vec<Property>,
}

const MAX_NESTING: usize = 256;

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(1, self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.src.len() - start);
        self.pos += len;
        &self.src[start..start + len]
    }

    fn expr(&mut self, depth: usize) -> Result<BoolFormula, ParseError> {
        if depth > MAX_NESTING {
            return Err(self.err("nesting too deep"));
        }
        let start = self.pos;
        let name = self.ident().to_string();
        let atom = |p: &mut Self, prop: Property| {
            p.atoms.push(prop);
            BoolFormula::Slot(p.atoms.len() - 1)
        };
        let empty_connected = self.opts.empty_connected;
        Ok(match name.as_str() {
            "connected" => atom(self, Property::Connected { empty_connected }),
            "bipartite" => atom(self, Property::Bipartite),
            "empty" => atom(self, Property::Empty),
            "true" => BoolFormula::Const(true),
            "false" => BoolFormula::Const(false),
            "conn_of_order" => {
                if !self.eat(':') {
                    return Err(self.err("expected `:` after conn_of_order"));
                }
                let spec_start = self.pos;
                let mut braces = 0usize;
                for c in self.src[spec_start..].chars() {
                    match c {
                        '{' => braces += 1,
                        '}' => braces = braces.saturating_sub(1),
                        ',' | ')' if braces == 0 => break,
                        _ => {}
                    }
                    self.pos += c.len_utf8();
                }
                let spec = self.src[spec_start..self.pos].trim();
                let orders: OrderSet = spec.parse().map_err(|e: ParseError| {
                    ParseError::new(1, spec_start + 1, e.message)
                })?;
                atom(self, Property::ConnOfOrder { orders, empty_connected })
            }
            "not" | "and" | "or" => {
                if !self.eat('(') {
                    return Err(self.err(format!("expected `(` after {name}")));
                }
                let mut args = vec![self.expr(depth + 1)?];
                while self.eat(',') {
                    args.push(self.expr(depth + 1)?);
                }
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                match name.as_str() {
                    "not" if args.len() == 1 => BoolFormula::Not(Box::new(args.pop().expect("one"))),
                    "not" => return Err(self.err("not takes one argument")),
                    "and" => BoolFormula::And(args),
                    _ => BoolFormula::Or(args),
                }
            }
            "" => return Err(ParseError::new(1, start + 1, "expected a property")),
            other => return Err(ParseError::new(1, start + 1, format!("unknown property `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ColoredGraph;

    fn parse(s: &str) -> Property {
        parse_property(s, PropertyOptions::default()).unwrap()
    }

    #[test]
    fn atoms() {
        assert_eq!(parse("connected"), Property::connected());
        assert_eq!(parse(" bipartite "), Property::Bipartite);
        assert_eq!(parse("true"), Property::Const(true));
        assert_eq!(parse("conn_of_order:{3,5}+2Z+0").to_string(), "conn_of_order:{3,5}+2Z+0");
        let no = parse_property("connected", PropertyOptions { empty_connected: false }).unwrap();
        assert!(!no.eval(&ColoredGraph::empty(0)));
    }

    #[test]
    fn combinators_round_trip() {
        for s in [
            "and(connected,not(bipartite))",
            "or(empty,conn_of_order:{1,2}+3Z+0,false)",
            "not(conn_of_order:evens)",
        ] {
            let p = parse(s);
            let again = parse(&p.to_string());
            assert_eq!(p, again, "{s}");
        }
        let p = parse("and(connected, not(bipartite))");
        assert!(p.eval(&ColoredGraph::complete(3)));
        assert!(!p.eval(&ColoredGraph::path(3)));
    }

    #[test]
    fn errors() {
        for s in ["", "connect", "and(connected", "not(a,b)", "conn_of_order", "conn_of_order:{1", "connected x"] {
            assert!(parse_property(s, PropertyOptions::default()).is_err(), "{s}");
        }
    }
}
