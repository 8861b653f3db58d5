//! Line-oriented text format for DAGs and PAGs.
//!
//! ```text
//! pag 4
//! 0 o-> 1
//! 2 <-o 1
//! 1 --> 3
//! ```
//!
//! Each PAG edge is `A <lm>-<rm> B` with `lm` in `o < -` (mark at `A`) and
//! `rm` in `o > -` (mark at `B`). DAG files start with
//! `dag <n> obs=<ids> lat=<ids> sel=<ids>` and list edges as `A -> B`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{CausalDag, EdgeMark, MixedGraph, NodeId};

fn left_symbol(m: EdgeMark) -> char {
    match m {
        EdgeMark::Circle => 'o',
        EdgeMark::Arrowhead => '<',
        EdgeMark::Tail => '-',
    }
}

fn right_symbol(m: EdgeMark) -> char {
    match m {
        EdgeMark::Circle => 'o',
        EdgeMark::Arrowhead => '>',
        EdgeMark::Tail => '-',
    }
}

pub(crate) fn edge_token(g: &MixedGraph, a: NodeId, b: NodeId) -> String {
    let at_a = g.mark(b, a).expect("adjacent");
    let at_b = g.mark(a, b).expect("adjacent");
    format!("{a} {}-{} {b}", left_symbol(at_a), right_symbol(at_b))
}

pub fn write_pag(g: &MixedGraph) -> String {
    let mut out = format!("pag {}\n", g.node_count());
    for (a, b) in g.edges() {
        out.push_str(&edge_token(g, a, b));
        out.push('\n');
    }
    out
}

fn join(ids: &[NodeId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn write_dag(d: &CausalDag) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dag {} obs={} lat={} sel={}",
        d.node_count(),
        join(&d.observed()),
        join(&d.latent()),
        join(&d.selection())
    );
    for (a, b) in d.edges() {
        let _ = writeln!(out, "{a} -> {b}");
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_id(line: usize, s: &str) -> Result<NodeId> {
    s.parse().map_err(|_| perr(line, format!("bad node id `{s}`")))
}

fn parse_header(line: usize, l: &str, kind: &str) -> Result<(usize, Vec<String>)> {
    let mut parts = l.split_whitespace();
    if parts.next() != Some(kind) {
        return Err(perr(line, format!("expected `{kind}` header")));
    }
    let n = parts
        .next()
        .ok_or_else(|| perr(line, "missing node count"))
        .and_then(|s| parse_id(line, s))?;
    Ok((n, parts.map(str::to_owned).collect()))
}

pub fn parse_pag(text: &str) -> Result<MixedGraph> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
    let (n, rest) = parse_header(line, header, "pag")?;
    if !rest.is_empty() {
        return Err(perr(line, "unexpected tokens after node count"));
    }
    let mut g = MixedGraph::empty(n);
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [a, tok, b] = toks[..] else {
            return Err(perr(line, "expected `A <lm>-<rm> B`"));
        };
        let (a, b) = (parse_id(line, a)?, parse_id(line, b)?);
        let chars: Vec<char> = tok.chars().collect();
        let [lm, '-', rm] = chars[..] else {
            return Err(perr(line, format!("bad edge token `{tok}`")));
        };
        let at_a = match lm {
            'o' => EdgeMark::Circle,
            '<' => EdgeMark::Arrowhead,
            '-' => EdgeMark::Tail,
            _ => return Err(perr(line, format!("bad left mark `{lm}`"))),
        };
        let at_b = match rm {
            'o' => EdgeMark::Circle,
            '>' => EdgeMark::Arrowhead,
            '-' => EdgeMark::Tail,
            _ => return Err(perr(line, format!("bad right mark `{rm}`"))),
        };
        if g.check_node(a).is_ok() && g.check_node(b).is_ok() && g.is_adjacent(a, b) {
            return Err(perr(line, format!("duplicate edge {a}-{b}")));
        }
        g.add_edge(a, b, at_a, at_b).map_err(|e| perr(line, e.to_string()))?;
    }
    Ok(g)
}

fn parse_list(line: usize, field: &str, key: &str) -> Result<Vec<NodeId>> {
    let value = field
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected `{key}=...`")))?;
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| parse_id(line, s)).collect()
}

pub fn parse_dag(text: &str) -> Result<CausalDag> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
    let (n, rest) = parse_header(line, header, "dag")?;
    let [obs, lat, sel] = &rest[..] else {
        return Err(perr(line, "expected `obs=... lat=... sel=...`"));
    };
    let observed = parse_list(line, obs, "obs")?;
    let latent = parse_list(line, lat, "lat")?;
    let selection = parse_list(line, sel, "sel")?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [a, "->", b] = toks[..] else {
            return Err(perr(line, "expected `A -> B`"));
        };
        edges.push((parse_id(line, a)?, parse_id(line, b)?));
    }
    CausalDag::with_partition(n, &edges, &observed, &latent, &selection)
}
