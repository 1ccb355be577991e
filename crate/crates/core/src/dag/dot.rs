//! Reader and writer for the DOT subset used to describe causal models:
//! a single `digraph`, node statements with an optional `label`, and `->`
//! edge chains. Edge `label`s carry numeric weights (the form discovery
//! output takes). Everything else is rejected.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Dag, GraphError};

/// `(key, value, (line, column))`.
type Attr = (String, String, (usize, usize));

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DotError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("node `{node}` declared with conflicting labels {first:?} and {second:?}")]
    ConflictingLabel {
        node: String,
        first: String,
        second: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Quoted(String),
    Arrow,
    UndirectedArrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> DotError {
    DotError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_id_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || !c.is_ascii()
}

fn is_id_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || !c.is_ascii()
}

fn lex(text: &str) -> Result<Vec<Spanned>, DotError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            })
        };
        match c {
            _ if c.is_whitespace() => bump!(),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    bump!();
                }
            }
            '#' if col == 1 => {
                while i < chars.len() && chars[i] != '\n' {
                    bump!();
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                bump!();
                bump!();
                loop {
                    if i + 1 >= chars.len() {
                        return Err(syntax(l0, c0, "unterminated comment"));
                    }
                    if chars[i] == '*' && chars[i + 1] == '/' {
                        bump!();
                        bump!();
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | '[' | ']' | '=' | ';' | ',' => {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '=' => Tok::Eq,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                push(&mut out, tok);
                bump!();
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(&mut out, Tok::Arrow);
                bump!();
                bump!();
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::UndirectedArrow);
                bump!();
                bump!();
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(l0, c0, "unterminated string")),
                        Some('"') => {
                            bump!();
                            break;
                        }
                        Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                            bump!();
                            s.push(chars[i]);
                            bump!();
                        }
                        Some(&ch) => {
                            s.push(ch);
                            bump!();
                        }
                    }
                }
                push(&mut out, Tok::Quoted(s));
            }
            _ if is_id_start(c) => {
                let mut s = String::new();
                while i < chars.len() && is_id_char(chars[i]) {
                    s.push(chars[i]);
                    bump!();
                }
                push(&mut out, Tok::Id(s));
            }
            _ if c.is_ascii_digit() || c == '.' || c == '-' => {
                let mut s = String::new();
                s.push(c);
                bump!();
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '.' | '+' | '-'))
                    && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
                {
                    s.push(chars[i]);
                    bump!();
                }
                push(&mut out, Tok::Id(s));
            }
            _ => return Err(syntax(l0, c0, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.column)).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> DotError {
        let (l, c) = self.here();
        syntax(l, c, message)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), DotError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn id(&mut self, what: &str) -> Result<String, DotError> {
        match self.peek() {
            Some(Tok::Id(s)) | Some(Tok::Quoted(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    /// `[k=v, ...]`, as `(key, value, position)` in source order.
    fn attrs(&mut self) -> Result<Vec<Attr>, DotError> {
        let mut out = Vec::new();
        if self.peek() != Some(&Tok::LBracket) {
            return Ok(out);
        }
        self.pos += 1;
        loop {
            match self.peek() {
                Some(Tok::RBracket) => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(Tok::Comma) | Some(Tok::Semi) => self.pos += 1,
                Some(Tok::Id(_)) | Some(Tok::Quoted(_)) => {
                    let at = self.here();
                    let key = self.id("attribute name")?;
                    self.expect(Tok::Eq, "`=` after attribute name")?;
                    let val = self.id("attribute value")?;
                    out.push((key, val, at));
                }
                _ => return Err(self.err("expected attribute or `]`")),
            }
        }
    }
}

/// Parses a DOT `digraph` into a validated [`Dag`].
///
/// Chained edges `A -> B -> C` expand to `A -> B` and `B -> C`. Only the
/// `label` attribute is accepted; on nodes it is a display string, on edges it
/// must parse as a number and becomes the edge weight.
pub fn parse_dot(text: &str) -> Result<Dag, DotError> {
    let toks = lex(text)?;
    let end = {
        let lines = text.split('\n').count();
        let last = text.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        (lines, last)
    };
    let mut p = Parser { toks, pos: 0, end };

    if let Some(Tok::Id(kw)) = p.peek() {
        if kw == "strict" {
            p.pos += 1;
        }
    }
    match p.peek() {
        Some(Tok::Id(kw)) if kw == "digraph" => p.pos += 1,
        Some(Tok::Id(kw)) if kw == "graph" => return Err(p.err("undirected `graph` is not supported; use `digraph`")),
        _ => return Err(p.err("expected `digraph`")),
    }
    if let Some(Tok::Id(_)) | Some(Tok::Quoted(_)) = p.peek() {
        p.pos += 1;
    }
    p.expect(Tok::LBrace, "`{`")?;

    let mut g = Dag::new();
    loop {
        match p.peek() {
            None => return Err(p.err("expected `}`")),
            Some(Tok::RBrace) => {
                p.pos += 1;
                break;
            }
            Some(Tok::Semi) => p.pos += 1,
            Some(Tok::Id(_)) | Some(Tok::Quoted(_)) => statement(&mut p, &mut g)?,
            Some(_) => return Err(p.err("expected a node or edge statement")),
        }
    }
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input after closing `}`"));
    }
    Ok(g)
}

fn statement(p: &mut Parser, g: &mut Dag) -> Result<(), DotError> {
    let at = p.here();
    let bare = matches!(p.peek(), Some(Tok::Id(_)));
    let first = p.id("node name")?;
    if bare && matches!(first.as_str(), "node" | "edge" | "graph" | "subgraph") {
        return Err(syntax(at.0, at.1, format!("`{first}` statements are not supported")));
    }
    let mut chain = vec![first];
    loop {
        match p.peek() {
            Some(Tok::Arrow) => {
                p.pos += 1;
                chain.push(p.id("node name after `->`")?);
            }
            Some(Tok::UndirectedArrow) => return Err(p.err("undirected edge `--` is not allowed in a digraph")),
            Some(Tok::Eq) => return Err(p.err("graph attributes are not supported")),
            _ => break,
        }
    }
    let attrs = p.attrs()?;
    let mut label = None;
    for (k, v, (l, c)) in attrs {
        if k != "label" {
            return Err(syntax(l, c, format!("unsupported attribute `{k}`")));
        }
        label = Some((v, (l, c)));
    }

    if chain.len() == 1 {
        let name = &chain[0];
        let fresh = !g.contains(name);
        g.add_node(name);
        if let Some((lab, _)) = label {
            match g.label(name) {
                Some(prev) if prev != lab && !fresh => {
                    return Err(DotError::ConflictingLabel {
                        node: name.clone(),
                        first: prev.to_string(),
                        second: lab,
                    })
                }
                _ => g.set_label(name, lab)?,
            }
        }
    } else {
        let weight = match label {
            None => None,
            Some((v, (l, c))) => Some(
                v.parse::<f64>()
                    .map_err(|_| syntax(l, c, format!("edge label `{v}` is not a number")))?,
            ),
        };
        for pair in chain.windows(2) {
            g.add_node(&pair[0]);
            g.add_node(&pair[1]);
            match weight {
                Some(w) => g.add_weighted_edge(&pair[0], &pair[1], w)?,
                None => g.add_edge(&pair[0], &pair[1])?,
            }
        }
    }
    match p.peek() {
        Some(Tok::Semi) => p.pos += 1,
        Some(Tok::Comma) => return Err(p.err("unexpected `,`")),
        _ => {}
    }
    Ok(())
}

pub(crate) fn quote_id(s: &str) -> String {
    let bare = s.chars().next().is_some_and(is_id_start) && s.chars().all(is_id_char);
    let keyword = matches!(
        s.to_ascii_lowercase().as_str(),
        "node" | "edge" | "graph" | "digraph" | "subgraph" | "strict"
    );
    if bare && !keyword {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Writes `g` in the same DOT subset [`parse_dot`] reads.
pub fn serialize_dot(g: &Dag) -> String {
    let mut out = String::from("digraph {\n");
    for name in g.nodes() {
        let _ = match g.label(name) {
            Some(l) => writeln!(out, "    {} [label={}];", quote_id(name), quote_id_always(l)),
            None => writeln!(out, "    {};", quote_id(name)),
        };
    }
    for e in g.edges() {
        let _ = match e.weight {
            Some(w) => writeln!(
                out,
                "    {} -> {} [label=\"{}\"];",
                quote_id(&e.from),
                quote_id(&e.to),
                w
            ),
            None => writeln!(out, "    {} -> {};", quote_id(&e.from), quote_id(&e.to)),
        };
    }
    out.push_str("}\n");
    out
}

fn quote_id_always(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
