//! Text formats: a Newick subset for trees, distance-matrix CSV, and
//! whitespace-separated edge lists.
//!
//! The Newick subset is `tree := subtree ";"` with
//! `subtree := "(" subtree ("," subtree)* ")" [label] [":" length] |
//! label [":" length]`; labels are unquoted, lengths must be positive,
//! and a missing length defaults to 1. Emitters write labels verbatim
//! (no quoting), so labels must avoid the structural characters; every
//! emitter/parser pair round-trips byte-identically.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};
use crate::space::{FiniteMetricSpace, MetricError};
use crate::tree::{MetricTree, TreeError};

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("branch length {len} for {label:?} must be positive")]
    NonPositiveLength { label: String, len: f64 },
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn parse_err(line: usize, col: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        col,
        message: message.into(),
    }
}

struct NewickParser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    labels: Vec<Option<String>>,
    label_pos: Vec<(usize, usize)>,
    edges: Vec<(usize, usize, f64)>,
}

impl<'a> NewickParser<'a> {
    fn new(text: &'a str) -> Self {
        NewickParser {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            labels: Vec::new(),
            label_pos: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn new_vertex(&mut self) -> usize {
        self.labels.push(None);
        self.label_pos.push((self.line, self.col));
        self.labels.len() - 1
    }

    fn is_label_byte(b: u8) -> bool {
        !matches!(b, b'(' | b')' | b',' | b':' | b';' | b' ' | b'\t' | b'\r' | b'\n')
    }

    fn read_label(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().map_or(false, Self::is_label_byte) {
            self.bump();
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        }
    }

    fn read_length(&mut self) -> Result<Option<f64>, FormatError> {
        self.skip_ws();
        if self.peek() != Some(b':') {
            return Ok(None);
        }
        self.bump();
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let token = self
            .read_label()
            .ok_or_else(|| parse_err(line, col, "expected a branch length after ':'"))?;
        let len: f64 = token
            .parse()
            .map_err(|_| parse_err(line, col, format!("invalid branch length {token:?}")))?;
        Ok(Some(len))
    }

    /// Parses one subtree; returns its vertex and the optional length of
    /// the branch above it.
    fn subtree(&mut self) -> Result<(usize, Option<f64>), FormatError> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.bump();
            let vertex = self.new_vertex();
            loop {
                let (child, len) = self.subtree()?;
                let len = len.unwrap_or(1.0);
                if !(len > 0.0) {
                    return Err(FormatError::NonPositiveLength {
                        label: self.labels[child].clone().unwrap_or_default(),
                        len,
                    });
                }
                self.edges.push((vertex, child, len));
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.bump();
                    }
                    Some(b')') => {
                        self.bump();
                        break;
                    }
                    _ => {
                        return Err(parse_err(self.line, self.col, "expected ',' or ')'"));
                    }
                }
            }
            self.skip_ws();
            let pos = (self.line, self.col);
            if let Some(label) = self.read_label() {
                self.labels[vertex] = Some(label);
                self.label_pos[vertex] = pos;
            }
            let len = self.read_length()?;
            Ok((vertex, len))
        } else {
            let pos = (self.line, self.col);
            let label = self
                .read_label()
                .ok_or_else(|| parse_err(pos.0, pos.1, "expected a label or '('"))?;
            let vertex = self.new_vertex();
            self.labels[vertex] = Some(label);
            self.label_pos[vertex] = pos;
            let len = self.read_length()?;
            Ok((vertex, len))
        }
    }

    fn finish(mut self) -> Result<MetricTree, FormatError> {
        // internal vertices without labels get fresh generated names
        let mut used: HashSet<String> = self.labels.iter().flatten().cloned().collect();
        let mut counter = 0usize;
        let labels: Vec<String> = self
            .labels
            .iter()
            .map(|slot| match slot {
                Some(s) => s.clone(),
                None => loop {
                    counter += 1;
                    let name = format!("n{counter}");
                    if used.insert(name.clone()) {
                        break name;
                    }
                },
            })
            .collect();
        // duplicate labels would make lookups ambiguous
        let mut seen: HashSet<&str> = HashSet::new();
        for (i, label) in labels.iter().enumerate() {
            if !seen.insert(label) {
                let (line, col) = self.label_pos[i];
                return Err(parse_err(line, col, format!("duplicate label {label:?}")));
            }
        }
        let edges = std::mem::take(&mut self.edges);
        Ok(MetricTree::new(labels, edges)?)
    }
}

/// Parses a Newick string into a metric tree. The root's own length, if
/// present, is validated and discarded (there is no branch above it).
pub fn parse_newick(text: &str) -> Result<MetricTree, FormatError> {
    let mut p = NewickParser::new(text);
    let (root, root_len) = p.subtree()?;
    if let Some(len) = root_len {
        if !(len > 0.0) {
            return Err(FormatError::NonPositiveLength {
                label: p.labels[root].clone().unwrap_or_default(),
                len,
            });
        }
    }
    p.skip_ws();
    if p.peek() != Some(b';') {
        return Err(parse_err(p.line, p.col, "expected ';'"));
    }
    p.bump();
    p.skip_ws();
    if p.peek().is_some() {
        return Err(parse_err(p.line, p.col, "unexpected input after ';'"));
    }
    p.finish()
}

/// Serializes a tree to Newick. The root is vertex 0 for trees of up to
/// two vertices, otherwise the smallest-index vertex of degree at least
/// two; children are emitted in index order. Parsing the output and
/// emitting again is byte-identical.
pub fn emit_newick(tree: &MetricTree) -> String {
    let n = tree.vertex_count();
    if n == 1 {
        return format!("{};", tree.label(0));
    }
    let root = if n == 2 {
        0
    } else {
        (0..n)
            .find(|&v| tree.degree(v) >= 2)
            .expect("a tree with 3+ vertices has an internal vertex")
    };
    let mut out = String::new();
    write_subtree(tree, root, usize::MAX, &mut out);
    out.push(';');
    out
}

fn write_subtree(tree: &MetricTree, v: usize, parent: usize, out: &mut String) {
    let children: Vec<(usize, f64)> = tree
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&(w, _)| w != parent)
        .collect();
    if children.is_empty() {
        out.push_str(tree.label(v));
        return;
    }
    out.push('(');
    for (i, &(child, len)) in children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_subtree(tree, child, v, out);
        let _ = write!(out, ":{len}");
    }
    out.push(')');
    out.push_str(tree.label(v));
}

/// Parses a distance-matrix CSV: a label row, then one row of numbers
/// per label.
pub fn parse_distance_csv(text: &str) -> Result<FiniteMetricSpace, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty input; expected a label row"))?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if labels.iter().any(|l| l.is_empty()) {
        return Err(parse_err(header_line, 1, "empty label in header row"));
    }
    let n = labels.len();
    let mut flat: Vec<f64> = Vec::with_capacity(n * n);
    let mut rows = 0usize;
    for (line_no, line) in lines {
        if rows == n {
            return Err(parse_err(line_no, 1, "unexpected extra row"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n {
            return Err(FormatError::DimensionMismatch {
                line: line_no,
                expected: n,
                found: fields.len(),
            });
        }
        let mut col = 1usize;
        for field in fields {
            let trimmed = field.trim();
            let value: f64 = trimmed.parse().map_err(|_| {
                parse_err(line_no, col, format!("invalid number {trimmed:?}"))
            })?;
            flat.push(value);
            col += field.len() + 1;
        }
        rows += 1;
    }
    if rows != n {
        return Err(FormatError::DimensionMismatch {
            line: rows + 1,
            expected: n,
            found: rows,
        });
    }
    Ok(FiniteMetricSpace::from_flat(labels, flat)?)
}

/// Serializes a space as distance-matrix CSV; exact round trip.
pub fn emit_csv(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    out.push_str(&space.labels().join(","));
    out.push('\n');
    for i in 0..space.len() {
        for j in 0..space.len() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", space.dist(i, j));
        }
        out.push('\n');
    }
    out
}

/// Parses a `u v length` edge list; `#` starts a comment, blank lines are
/// skipped, vertices are numbered by first appearance.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph, FormatError> {
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(parse_err(
                line_no,
                1,
                format!("expected 'u v length', found {} tokens", tokens.len()),
            ));
        }
        let len: f64 = tokens[2].parse().map_err(|_| {
            let col = raw.find(tokens[2]).map_or(1, |p| p + 1);
            parse_err(line_no, col, format!("invalid length {:?}", tokens[2]))
        })?;
        edges.push((tokens[0].to_string(), tokens[1].to_string(), len));
    }
    Ok(WeightedGraph::from_labeled_edges(&edges)?)
}

/// Serializes a graph as an edge list, edges in insertion order.
pub fn emit_graph_edge_list(graph: &WeightedGraph) -> String {
    let mut out = String::new();
    for e in graph.edges() {
        let _ = writeln!(out, "{} {} {}", graph.label(e.u), graph.label(e.v), e.len);
    }
    out
}

/// Serializes a tree as an edge list, edges in insertion order.
pub fn emit_tree_edge_list(tree: &MetricTree) -> String {
    let mut out = String::new();
    for e in tree.edges() {
        let _ = writeln!(out, "{} {} {}", tree.label(e.u), tree.label(e.v), e.len);
    }
    out
}
