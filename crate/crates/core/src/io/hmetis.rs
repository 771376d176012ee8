//! hMetis-style hypergraph files with optional multi-dimensional vertex weights.

use std::fmt::Write as _;
use std::path::Path;

use crate::hypergraph::{EdgeWeight, Hypergraph, VertexId};

use super::{content_lines, integral, parse_error, parse_int, FormatResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub edges: usize,
    pub vertices: usize,
    pub edge_weights: bool,
    pub vertex_weights: bool,
    pub ncon: usize,
}

fn parse_header(line: usize, text: &str) -> FormatResult<Header> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if !(2..=4).contains(&tokens.len()) {
        return Err(parse_error(line, "header must be `m n [fmt [ncon]]`"));
    }
    let edges = parse_int(tokens[0], line, "edge count")?;
    let vertices = parse_int(tokens[1], line, "vertex count")?;
    let fmt: u32 = match tokens.get(2) {
        Some(t) => parse_int(t, line, "format code")?,
        None => 0,
    };
    let (edge_weights, vertex_weights) = match fmt {
        0 => (false, false),
        1 => (true, false),
        10 => (false, true),
        11 => (true, true),
        _ => return Err(parse_error(line, format!("unsupported format code {fmt}"))),
    };
    let ncon = match tokens.get(3) {
        Some(_) if !vertex_weights => {
            return Err(parse_error(line, "ncon given but format has no vertex weights"))
        }
        Some(t) => parse_int(t, line, "constraint count")?,
        None => 1,
    };
    if ncon == 0 {
        return Err(parse_error(line, "ncon must be at least 1"));
    }
    Ok(Header {
        edges,
        vertices,
        edge_weights,
        vertex_weights,
        ncon,
    })
}

/// Parses hypergraph text. Blank lines are ignored.
pub fn parse_hypergraph(text: &str) -> FormatResult<Hypergraph> {
    let mut lines = content_lines(text).filter(|(_, l)| !l.trim().is_empty());
    let (hline, htext) = lines.next().ok_or_else(|| parse_error(1, "missing header"))?;
    let header = parse_header(hline, htext)?;
    let n = header.vertices;

    let mut edges = Vec::with_capacity(header.edges);
    let mut edge_weights = Vec::with_capacity(header.edges);
    for e in 0..header.edges {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_error(hline, format!("expected {} edges, found {e}", header.edges)))?;
        let mut tokens = text.split_whitespace();
        let weight: EdgeWeight = if header.edge_weights {
            let t = tokens.next().expect("non-blank line");
            let w = parse_int(t, line, "edge weight")?;
            if w <= 0 {
                return Err(parse_error(line, format!("edge weight {w} is not positive")));
            }
            w
        } else {
            1
        };
        let mut pins: Vec<VertexId> = Vec::new();
        for t in tokens {
            let p: usize = parse_int(t, line, "pin")?;
            if p == 0 || p > n {
                return Err(parse_error(line, format!("pin {p} out of range 1..={n}")));
            }
            pins.push(p - 1);
        }
        if pins.is_empty() {
            return Err(parse_error(line, "empty edge"));
        }
        let before = pins.len();
        let mut seen = std::collections::HashSet::with_capacity(before);
        pins.retain(|p| seen.insert(*p));
        if pins.len() != before {
            log::warn!("line {line}: removed {} duplicate pin(s)", before - pins.len());
        }
        edges.push(pins);
        edge_weights.push(weight);
    }

    let d = header.ncon;
    let weights = if header.vertex_weights {
        let mut weights = Vec::with_capacity(n * d);
        for v in 0..n {
            let (line, text) = lines
                .next()
                .ok_or_else(|| parse_error(hline, format!("expected {n} weight lines, found {v}")))?;
            let row: Vec<&str> = text.split_whitespace().collect();
            if row.len() != d {
                return Err(parse_error(line, format!("expected {d} weights, found {}", row.len())));
            }
            for t in row {
                let w: i64 = parse_int(t, line, "vertex weight")?;
                if w < 0 {
                    return Err(parse_error(line, format!("vertex weight {w} is negative")));
                }
                weights.push(w as f64);
            }
        }
        weights
    } else {
        vec![1.0; n]
    };
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, "unexpected content after the last expected line"));
    }
    Ok(Hypergraph::from_flat(n, d, weights, &edges, &edge_weights)?)
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> FormatResult<Hypergraph> {
    parse_hypergraph(&std::fs::read_to_string(path)?)
}

/// Serializes `hg`, omitting edge or vertex weights when they are all 1 and
/// the hypergraph has one dimension.
pub fn format_hypergraph(hg: &Hypergraph) -> FormatResult<String> {
    let with_edge_weights = hg.edge_weights().iter().any(|&w| w != 1);
    let with_vertex_weights = hg.dims() > 1 || hg.flat_weights().iter().any(|&w| w != 1.0);
    let mut out = String::new();
    write!(out, "{} {}", hg.num_edges(), hg.num_vertices()).unwrap();
    match (with_edge_weights, with_vertex_weights) {
        (false, false) => {}
        (true, false) => out.push_str(" 1"),
        (ew, true) => write!(out, " {} {}", if ew { 11 } else { 10 }, hg.dims()).unwrap(),
    }
    out.push('\n');
    for e in 0..hg.num_edges() {
        let mut first = true;
        if with_edge_weights {
            write!(out, "{}", hg.edge_weight(e)).unwrap();
            first = false;
        }
        for &p in hg.pins(e) {
            if !first {
                out.push(' ');
            }
            write!(out, "{}", p + 1).unwrap();
            first = false;
        }
        out.push('\n');
    }
    if with_vertex_weights {
        for v in 0..hg.num_vertices() {
            let row: Vec<String> = hg
                .weight(v)
                .iter()
                .map(|&w| integral(w).map(|w| w.to_string()))
                .collect::<FormatResult<_>>()?;
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write_hypergraph(hg: &Hypergraph, path: impl AsRef<Path>) -> FormatResult<()> {
    std::fs::write(path, format_hypergraph(hg)?)?;
    Ok(())
}
