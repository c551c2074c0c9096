//! The line-oriented game format, and DOT export.
//!
//! ```text
//! # comment
//! objective mcr
//! vertex v1 max
//! vertex v3 max target
//! edge v1 v3 -50
//! ```

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use qg_core::arena::is_valid_name;
use qg_core::{Arena, ArenaBuilder, ArenaError, Limits, Objective, Player, ValueVector, VertexId};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("line {line}: vertex {name} is not declared")]
    UndeclaredVertex { name: String, line: usize },
    #[error("line {line}: vertex {name} already declared on line {first}")]
    DuplicateVertex { name: String, line: usize, first: usize },
    #[error("line {line}: {error}")]
    Invalid { line: usize, error: ArenaError },
    #[error("{0}")]
    InvalidArena(ArenaError),
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::UndeclaredVertex { line, .. }
            | ParseError::DuplicateVertex { line, .. }
            | ParseError::Invalid { line, .. } => Some(*line),
            ParseError::InvalidArena(_) => None,
        }
    }
}

/// A parsed document: the arena plus non-fatal diagnostics.
#[derive(Clone, Debug)]
pub struct GameDocument {
    pub arena: Arena,
    pub warnings: Vec<String>,
    /// Line on which each vertex was declared.
    pub vertex_lines: Vec<usize>,
}

pub fn parse(text: &[u8]) -> Result<GameDocument, ParseError> {
    parse_with(text, Limits::default())
}

pub fn parse_with(text: &[u8], limits: Limits) -> Result<GameDocument, ParseError> {
    let text = std::str::from_utf8(text).map_err(|e| {
        let line = text[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError::Syntax { line, col: 1, expected: "UTF-8 text".into() }
    })?;
    Parser::new(limits).run(text)
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &code[s..i], col: code[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct Parser {
    builder: ArenaBuilder,
    objective: Option<Objective>,
    ids: HashMap<String, (VertexId, usize)>,
    edges: BTreeMap<(VertexId, VertexId), (i64, usize)>,
    vertex_lines: Vec<usize>,
    warnings: Vec<String>,
}

impl Parser {
    fn new(limits: Limits) -> Self {
        Parser {
            builder: ArenaBuilder::with_limits(limits),
            objective: None,
            ids: HashMap::new(),
            edges: BTreeMap::new(),
            vertex_lines: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn run(mut self, text: &str) -> Result<GameDocument, ParseError> {
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let toks = tokens(raw.strip_suffix('\r').unwrap_or(raw));
            if toks.is_empty() {
                continue;
            }
            self.directive(line, &toks)?;
        }
        let objective = self.objective.ok_or(ParseError::Syntax {
            line: last_line.max(1),
            col: 1,
            expected: "an `objective mcr|tp` line".into(),
        })?;
        for (&(src, dst), &(weight, _)) in &self.edges {
            self.builder.add_edge(src, dst, weight);
        }
        let arena = std::mem::take(&mut self.builder).build(objective).map_err(|e| self.locate(e))?;
        Ok(GameDocument { arena, warnings: self.warnings, vertex_lines: self.vertex_lines })
    }

    fn directive(&mut self, line: usize, toks: &[Token<'_>]) -> Result<(), ParseError> {
        let syntax = |tok: Option<&Token<'_>>, fallback: usize, expected: &str| ParseError::Syntax {
            line,
            col: tok.map_or(fallback, |t| t.col),
            expected: expected.into(),
        };
        let end = toks.last().map_or(1, |t| t.col + t.text.chars().count());
        let head = &toks[0];
        if self.objective.is_none() && head.text != "objective" {
            return Err(syntax(Some(head), 1, "`objective` as the first directive"));
        }
        match head.text {
            "objective" => {
                if self.objective.is_some() {
                    return Err(syntax(Some(head), 1, "a single `objective` line"));
                }
                self.objective = Some(match toks.get(1).map(|t| t.text) {
                    Some("mcr") => Objective::Mcr,
                    Some("tp") => Objective::Tp,
                    _ => return Err(syntax(toks.get(1), end, "`mcr` or `tp`")),
                });
                if let Some(extra) = toks.get(2) {
                    return Err(syntax(Some(extra), end, "end of line"));
                }
            }
            "vertex" => {
                let name = toks.get(1).ok_or_else(|| syntax(None, end, "a vertex name"))?;
                if !is_valid_name(name.text) {
                    return Err(syntax(Some(name), end, "a vertex name of letters, digits and `_`"));
                }
                let owner = match toks.get(2).map(|t| t.text) {
                    Some("max") => Player::Max,
                    Some("min") => Player::Min,
                    _ => return Err(syntax(toks.get(2), end, "`min` or `max`")),
                };
                let target = match toks.get(3).map(|t| t.text) {
                    None => false,
                    Some("target") => true,
                    Some(_) => return Err(syntax(toks.get(3), end, "`target` or end of line")),
                };
                if let Some(extra) = toks.get(4) {
                    return Err(syntax(Some(extra), end, "end of line"));
                }
                if let Some(&(_, first)) = self.ids.get(name.text) {
                    return Err(ParseError::DuplicateVertex { name: name.text.into(), line, first });
                }
                let id = self.builder.add_vertex(name.text, owner);
                self.builder.set_target(id, target);
                self.ids.insert(name.text.into(), (id, line));
                self.vertex_lines.push(line);
            }
            "edge" => {
                let endpoint = |k: usize| -> Result<VertexId, ParseError> {
                    let tok = toks.get(k).ok_or_else(|| syntax(None, end, "a vertex name"))?;
                    self.ids
                        .get(tok.text)
                        .map(|&(id, _)| id)
                        .ok_or_else(|| ParseError::UndeclaredVertex { name: tok.text.into(), line })
                };
                let src = endpoint(1)?;
                let dst = endpoint(2)?;
                let weight = toks
                    .get(3)
                    .and_then(|t| t.text.parse::<i64>().ok())
                    .ok_or_else(|| syntax(toks.get(3), end, "an integer weight"))?;
                if let Some(extra) = toks.get(4) {
                    return Err(syntax(Some(extra), end, "end of line"));
                }
                self.add_edge(src, dst, weight, line);
            }
            _ => return Err(syntax(Some(head), 1, "`objective`, `vertex` or `edge`")),
        }
        Ok(())
    }

    fn locate(&self, e: ArenaError) -> ParseError {
        let declared = |name: &str| self.ids.get(name).copied();
        let line = match &e {
            ArenaError::DeadlockVertex { vertex } => declared(vertex).map(|(_, l)| l),
            ArenaError::WeightOverflow { src, dst, .. } => {
                declared(src).zip(declared(dst)).and_then(|((s, _), (d, _))| self.edges.get(&(s, d))).map(|&(_, l)| l)
            }
            ArenaError::TooManyVertices { limit, .. } => self.vertex_lines.get(*limit).copied(),
            _ => None,
        };
        match line {
            Some(line) => ParseError::Invalid { line, error: e },
            None => ParseError::InvalidArena(e),
        }
    }

    /// Parallel edges are merged, keeping the weight the source's owner
    /// prefers.
    fn add_edge(&mut self, src: VertexId, dst: VertexId, weight: i64, line: usize) {
        match self.edges.entry((src, dst)) {
            Entry::Vacant(e) => {
                e.insert((weight, line));
            }
            Entry::Occupied(mut e) => {
                let (old, first) = *e.get();
                let keep = match self.builder.owner(src) {
                    Player::Max => old.max(weight),
                    Player::Min => old.min(weight),
                };
                self.warnings.push(format!(
                    "line {line}: parallel edge {} -> {} merged with line {first}, keeping weight {keep}",
                    self.builder.name(src),
                    self.builder.name(dst)
                ));
                e.insert((keep, first));
            }
        }
    }
}

/// Canonical text: objective, vertices in index order, edges by
/// `(src, dst)`.
pub fn serialize(arena: &Arena) -> String {
    let mut out = String::new();
    let objective = match arena.objective() {
        Objective::Mcr => "mcr",
        Objective::Tp => "tp",
    };
    writeln!(out, "objective {objective}").unwrap();
    for v in arena.vertices() {
        let target = if arena.is_target(v) { " target" } else { "" };
        writeln!(out, "vertex {} {}{target}", arena.name(v), owner_word(arena.owner(v))).unwrap();
    }
    for e in arena.edges() {
        writeln!(out, "edge {} {} {}", arena.name(e.src), arena.name(e.dst), e.weight).unwrap();
    }
    out
}

pub fn owner_word(p: Player) -> &'static str {
    match p {
        Player::Max => "max",
        Player::Min => "min",
    }
}

/// DOT digraph: Max vertices are circles, Min vertices boxes, targets are
/// doubled; values, when given, are added to the labels.
pub fn export_dot(arena: &Arena, values: Option<&ValueVector>) -> String {
    let mut out = String::from("digraph game {\n");
    for v in arena.vertices() {
        let shape = match arena.owner(v) {
            Player::Max => "circle",
            Player::Min => "box",
        };
        let label = match values {
            Some(x) => format!("{}\\n{}", arena.name(v), x[v]),
            None => arena.name(v).to_string(),
        };
        let periphery = if arena.is_target(v) { ", peripheries=2" } else { "" };
        writeln!(out, "  {} [shape={shape}, label=\"{label}\"{periphery}];", arena.name(v)).unwrap();
    }
    for e in arena.edges() {
        writeln!(out, "  {} -> {} [label=\"{}\"];", arena.name(e.src), arena.name(e.dst), e.weight).unwrap();
    }
    out.push_str("}\n");
    out
}
