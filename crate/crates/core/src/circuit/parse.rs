//! S-expression reader for circuits.
//!
//! ```text
//! x
//! (leaf "graph n=1 k=1\nc 1 1")   (leaf @name)
//! (union A B) (join A B) (tensor A B) (cartesian A B)
//! (fuse i A) (recolor i j A) (eta i j A)
//! (subst "<template graph text>" A1 ... Ar)
//! ```
//!
//! `;` starts a comment that runs to the end of the line.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Circuit, Leaf, OpKind};
use crate::error::ParseError;
use crate::graph::ColoredGraph;

const MAX_NESTING: usize = 4096;

/// Resolves `@name` leaves.
pub trait LeafNames {
    fn resolve(&self, name: &str) -> Option<Arc<ColoredGraph>>;
}

impl LeafNames for HashMap<String, Arc<ColoredGraph>> {
    fn resolve(&self, name: &str) -> Option<Arc<ColoredGraph>> {
        self.get(name).cloned()
    }
}

#[derive(Default, Clone, Copy)]
pub struct ParseEnv<'a> {
    pub names: Option<&'a dyn LeafNames>,
    /// When set, color parameters above this bound are rejected.
    pub max_color: Option<u8>,
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse_circuit_with(text, &ParseEnv::default())
}

pub fn parse_circuit_with(text: &str, env: &ParseEnv<'_>) -> Result<Circuit, ParseError> {
    let mut reader = Reader::new(text);
    let expr = reader.expr(0)?;
    reader.skip_trivia();
    if let Some(pos) = reader.peek_pos() {
        return Err(ParseError::new(pos.0, pos.1, "trailing input after circuit"));
    }
    convert(&expr, env)
}

#[derive(Debug)]
enum Sexp {
    Atom(String),
    Str(String),
    List(Vec<Node>),
}

#[derive(Debug)]
struct Node {
    sexp: Sexp,
    line: usize,
    column: usize,
}

impl Node {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, msg)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn peek_pos(&mut self) -> Option<(usize, usize)> {
        self.chars.peek().map(|_| (self.line, self.column))
    }

    fn expr(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        let err = |m: &str| ParseError::new(line, column, m);
        if depth > MAX_NESTING {
            return Err(err("nesting too deep"));
        }
        let sexp = match self.chars.peek().copied() {
            None => return Err(err("unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(err("unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            break;
                        }
                        Some(_) => items.push(self.expr(depth + 1)?),
                    }
                }
                Sexp::List(items)
            }
            Some(')') => return Err(err("unexpected `)`")),
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(err("unterminated string")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            _ => return Err(ParseError::new(self.line, self.column, "bad escape in string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                Sexp::Str(s)
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Sexp::Atom(s)
            }
        };
        Ok(Node { sexp, line, column })
    }
}

fn convert(node: &Node, env: &ParseEnv<'_>) -> Result<Circuit, ParseError> {
    let items = match &node.sexp {
        Sexp::Atom(a) if a == "x" => return Ok(Circuit::Free),
        Sexp::Atom(a) => return Err(node.err(format!("unknown symbol `{a}`"))),
        Sexp::Str(_) => return Err(node.err("unexpected string")),
        Sexp::List(items) => items,
    };
    let Some((head, rest)) = items.split_first() else {
        return Err(node.err("empty form"));
    };
    let Sexp::Atom(keyword) = &head.sexp else {
        return Err(head.err("expected an operation keyword"));
    };
    let param_count: usize = match keyword.as_str() {
        "leaf" => {
            return match rest {
                [arg] => leaf(arg, env),
                _ => Err(node.err(format!("`leaf` expects 1 argument, found {}", rest.len()))),
            }
        }
        "union" | "join" | "tensor" | "cartesian" => 0,
        "fuse" | "subst" => 1,
        "recolor" | "eta" => 2,
        other => return Err(head.err(format!("unknown operation `{other}`"))),
    };
    let (params, operands) = rest.split_at(param_count.min(rest.len()));
    let kind = match keyword.as_str() {
        "union" => OpKind::Union,
        "join" => OpKind::Join,
        "tensor" => OpKind::Tensor,
        "cartesian" => OpKind::Cartesian,
        "fuse" => OpKind::Fuse(color(params.first(), node, env)?),
        "recolor" => OpKind::Recolor(color(params.first(), node, env)?, color(params.get(1), node, env)?),
        "eta" => OpKind::Eta(color(params.first(), node, env)?, color(params.get(1), node, env)?),
        "subst" => {
            let Some(Node { sexp: Sexp::Str(text), .. }) = params.first() else {
                return Err(node.err("`subst` expects a quoted template graph"));
            };
            let t = ColoredGraph::parse_text(text).map_err(|e| node.err(e.to_string()))?;
            OpKind::Subst(Arc::new(t))
        }
        _ => unreachable!(),
    };
    if operands.len() != kind.arity() {
        return Err(node.err(format!(
            "`{keyword}` expects {} operand{}, found {}",
            kind.arity(),
            if kind.arity() == 1 { "" } else { "s" },
            operands.len()
        )));
    }
    kind.validate().map_err(|m| node.err(m))?;
    let children = operands.iter().map(|c| convert(c, env)).collect::<Result<Vec<_>, _>>()?;
    Ok(Circuit::Op(kind, children))
}

fn color(param: Option<&Node>, form: &Node, env: &ParseEnv<'_>) -> Result<u8, ParseError> {
    let Some(p) = param else {
        return Err(form.err("missing color index"));
    };
    let Sexp::Atom(a) = &p.sexp else {
        return Err(p.err("expected a color index"));
    };
    let i: u8 = a.parse().map_err(|_| p.err(format!("expected a color index, found `{a}`")))?;
    if i == 0 {
        return Err(p.err("color indices start at 1"));
    }
    if let Some(max) = env.max_color {
        if i > max {
            return Err(p.err(format!("color index {i} out of range 1..={max}")));
        }
    }
    Ok(i)
}

fn leaf(arg: &Node, env: &ParseEnv<'_>) -> Result<Circuit, ParseError> {
    match &arg.sexp {
        Sexp::Str(text) => {
            let g = ColoredGraph::parse_text(text).map_err(|e| arg.err(e.to_string()))?;
            Ok(Circuit::leaf(g))
        }
        Sexp::Atom(a) if a.starts_with('@') && a.len() > 1 => {
            let name = &a[1..];
            let graph = env
                .names
                .and_then(|n| n.resolve(name))
                .ok_or_else(|| arg.err(format!("unknown structure `@{name}`")))?;
            Ok(Circuit::Leaf(Leaf {
                name: Some(Arc::from(name)),
                graph,
            }))
        }
        _ => Err(arg.err("`leaf` expects a quoted graph or @name")),
    }
}
