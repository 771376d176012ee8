//! Metis graph files. Every undirected edge becomes a two-pin hyperedge.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::hypergraph::{EdgeWeight, Hypergraph, VertexId};

use super::{content_lines, integral, parse_error, parse_int, FormatError, FormatResult};

/// Parses graph text. Lines of vertices without neighbors may be blank;
/// blank lines after the last vertex are ignored.
pub fn parse_graph(text: &str) -> FormatResult<Hypergraph> {
    let mut lines = content_lines(text);
    let (hline, htext) = loop {
        match lines.next() {
            None => return Err(parse_error(1, "missing header")),
            Some((_, l)) if l.trim().is_empty() => continue,
            Some(h) => break h,
        }
    };
    let tokens: Vec<&str> = htext.split_whitespace().collect();
    if !(2..=4).contains(&tokens.len()) {
        return Err(parse_error(hline, "header must be `n m [fmt [ncon]]`"));
    }
    let n: usize = parse_int(tokens[0], hline, "vertex count")?;
    let m: usize = parse_int(tokens[1], hline, "edge count")?;
    let fmt: u32 = match tokens.get(2) {
        Some(t) => parse_int(t, hline, "format code")?,
        None => 0,
    };
    let (edge_weights, vertex_weights) = match fmt {
        0 => (false, false),
        1 => (true, false),
        10 => (false, true),
        11 => (true, true),
        _ => return Err(parse_error(hline, format!("unsupported format code {fmt}"))),
    };
    let ncon: usize = match tokens.get(3) {
        Some(_) if !vertex_weights => {
            return Err(parse_error(hline, "ncon given but format has no vertex weights"))
        }
        Some(t) => parse_int(t, hline, "constraint count")?,
        None => 1,
    };
    if ncon == 0 {
        return Err(parse_error(hline, "ncon must be at least 1"));
    }

    let mut weights = Vec::with_capacity(n * ncon);
    // (u, v) -> (weight, line) for every listed direction
    let mut arcs: HashMap<(VertexId, VertexId), (EdgeWeight, usize)> = HashMap::new();
    let mut edges = Vec::new();
    let mut ews = Vec::new();
    for u in 0..n {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_error(hline, format!("expected {n} vertex lines, found {u}")))?;
        let mut tokens = text.split_whitespace();
        if vertex_weights {
            for _ in 0..ncon {
                let t = tokens
                    .next()
                    .ok_or_else(|| parse_error(line, format!("expected {ncon} vertex weights")))?;
                let w: i64 = parse_int(t, line, "vertex weight")?;
                if w < 0 {
                    return Err(parse_error(line, format!("vertex weight {w} is negative")));
                }
                weights.push(w as f64);
            }
        } else {
            weights.push(1.0);
        }
        while let Some(t) = tokens.next() {
            let v: usize = parse_int(t, line, "neighbor")?;
            if v == 0 || v > n {
                return Err(parse_error(line, format!("neighbor {v} out of range 1..={n}")));
            }
            let v = v - 1;
            if v == u {
                return Err(parse_error(line, format!("self-loop on vertex {}", u + 1)));
            }
            let w: EdgeWeight = if edge_weights {
                let t = tokens
                    .next()
                    .ok_or_else(|| parse_error(line, "neighbor without edge weight"))?;
                let w = parse_int(t, line, "edge weight")?;
                if w <= 0 {
                    return Err(parse_error(line, format!("edge weight {w} is not positive")));
                }
                w
            } else {
                1
            };
            if arcs.insert((u, v), (w, line)).is_some() {
                return Err(parse_error(line, format!("edge {}-{} listed twice", u + 1, v + 1)));
            }
            if u < v {
                edges.push(vec![u, v]);
                ews.push(w);
            } else {
                match arcs.get(&(v, u)) {
                    Some(&(back, _)) if back == w => {}
                    Some(_) => {
                        return Err(parse_error(
                            line,
                            format!("edge {}-{} has different weights in both directions", v + 1, u + 1),
                        ))
                    }
                    None => {
                        return Err(parse_error(
                            line,
                            format!("edge {}-{} is missing from vertex {}", u + 1, v + 1, v + 1),
                        ))
                    }
                }
            }
        }
    }
    for (&(u, v), &(_, line)) in &arcs {
        if u < v && !arcs.contains_key(&(v, u)) {
            return Err(parse_error(
                line,
                format!("edge {}-{} is missing from vertex {}", u + 1, v + 1, v + 1),
            ));
        }
    }
    if edges.len() != m {
        return Err(parse_error(hline, format!("header announces {m} edges, found {}", edges.len())));
    }
    if let Some((line, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_error(line, "unexpected content after the last vertex"));
    }
    Ok(Hypergraph::from_flat(n, ncon, weights, &edges, &ews)?)
}

pub fn read_graph(path: impl AsRef<Path>) -> FormatResult<Hypergraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

/// Serializes a hypergraph whose edges all have two pins.
pub fn format_graph(hg: &Hypergraph) -> FormatResult<String> {
    if let Some(e) = (0..hg.num_edges()).find(|&e| hg.edge_size(e) != 2) {
        return Err(FormatError::Invalid(format!(
            "edge {e} has {} pins; graph files need exactly 2",
            hg.edge_size(e)
        )));
    }
    let with_edge_weights = hg.edge_weights().iter().any(|&w| w != 1);
    let with_vertex_weights = hg.dims() > 1 || hg.flat_weights().iter().any(|&w| w != 1.0);
    let mut out = String::new();
    write!(out, "{} {}", hg.num_vertices(), hg.num_edges()).unwrap();
    match (with_edge_weights, with_vertex_weights) {
        (false, false) => {}
        (true, false) => out.push_str(" 1"),
        (ew, true) => write!(out, " {} {}", if ew { 11 } else { 10 }, hg.dims()).unwrap(),
    }
    out.push('\n');
    for u in 0..hg.num_vertices() {
        let mut fields: Vec<String> = Vec::new();
        if with_vertex_weights {
            for &w in hg.weight(u) {
                fields.push(integral(w)?.to_string());
            }
        }
        for &e in hg.incident_edges(u) {
            let pins = hg.pins(e);
            let v = if pins[0] == u { pins[1] } else { pins[0] };
            fields.push((v + 1).to_string());
            if with_edge_weights {
                fields.push(hg.edge_weight(e).to_string());
            }
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_graph(hg: &Hypergraph, path: impl AsRef<Path>) -> FormatResult<()> {
    std::fs::write(path, format_graph(hg)?)?;
    Ok(())
}
