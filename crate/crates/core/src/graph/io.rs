use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

/// Reads a whitespace-separated edge list, one `u v` pair per line. Text after
/// `#` is ignored. Vertex ids may be any non-negative integers; they are
/// compacted to `0..n` in increasing order and kept as labels.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        let mut toks = body.split_whitespace();
        let Some(first) = toks.next() else { continue };
        let parse = |t: &str| {
            t.parse::<u64>()
                .map_err(|e| Error::Parse { line: idx + 1, msg: format!("bad vertex id {t:?}: {e}") })
        };
        let u = parse(first)?;
        let v = match toks.next() {
            Some(t) => parse(t)?,
            None => return Err(Error::Parse { line: idx + 1, msg: "expected two vertex ids".into() }),
        };
        if toks.next().is_some() {
            return Err(Error::Parse { line: idx + 1, msg: "trailing tokens after edge".into() });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        raw.push((u, v));
    }
    let mut ids: BTreeMap<u64, usize> = raw.iter().flat_map(|&(u, v)| [(u, 0), (v, 0)]).collect();
    for (dense, slot) in ids.values_mut().enumerate() {
        *slot = dense;
    }
    let labels: Vec<u64> = ids.keys().copied().collect();
    Graph::with_labels(labels, raw.iter().map(|(u, v)| (ids[u], ids[v])))
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}

/// Writes each edge once as `u v` using the graph's labels.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let labels = g.labels();
    for (i, j) in g.edges() {
        writeln!(out, "{} {}", labels[i], labels[j])?;
    }
    Ok(())
}
