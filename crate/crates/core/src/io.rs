//! Plain-text graph and snapshot formats.
//!
//! Edge lists are tab separated, one edge per row: `src\tdst[\tweight]` with
//! 0-based ids. Lines starting with `#` are comments, except for an optional
//! `# nodes=<n>` header that fixes the node count. Without a header the node
//! count is one more than the largest id seen.
//!
//! Snapshot files start with `t=<float>` or `t=unknown`, followed by one
//! infected node id per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::observation::InfectionSnapshot;

pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?, directed)
}

pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut rows = Vec::new();
    let mut max_id: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("nodes=") {
                if declared.is_some() || !rows.is_empty() {
                    return Err(parse_err(line_no, "node-count header must come first and only once"));
                }
                let n = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node count {value:?}")))?;
                declared = Some(n);
            }
            continue;
        }

        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                line_no,
                format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let src = parse_id(fields[0], line_no)?;
        let dst = parse_id(fields[1], line_no)?;
        let weight = match fields.get(2) {
            Some(w) => w
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad weight {w:?}")))?,
            None => 1.0,
        };
        if let Some(n) = declared {
            for id in [src, dst] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n }.at_line(line_no));
                }
            }
        }
        max_id = max_id.max(Some(src.max(dst)));
        rows.push((line_no, src, dst, weight));
    }

    let n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    // Build once to get validation, and re-run on failure to find the
    // offending line for the error message.
    match Graph::from_edges(n, directed, rows.iter().map(|&(_, s, d, w)| (s, d, w))) {
        Ok(g) => Ok(g),
        Err(err) => Err(locate(err, &rows, directed)),
    }
}

fn locate(err: Error, rows: &[(usize, usize, usize, f64)], directed: bool) -> Error {
    let key = |s: usize, d: usize| if directed { (s, d) } else { (s.min(d), s.max(d)) };
    let line = match &err {
        Error::SelfLoop(v) => rows.iter().find(|r| r.1 == *v && r.2 == *v).map(|r| r.0),
        Error::InvalidWeight { src, dst, .. } => rows
            .iter()
            .find(|r| r.1 == *src && r.2 == *dst && !(r.3 > 0.0 && r.3.is_finite()))
            .map(|r| r.0),
        Error::DuplicateEdge(a, b) => rows
            .iter()
            .filter(|r| key(r.1, r.2) == (*a, *b))
            .nth(1)
            .map(|r| r.0),
        _ => None,
    };
    match line {
        Some(l) => err.at_line(l),
        None => err,
    }
}

fn parse_id(field: &str, line: usize) -> Result<usize> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("bad node id {field:?}")))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Serializes a graph in the edge-list format, always with a node header.
/// Unit weights are omitted.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("# nodes={}\n", g.node_count());
    for e in g.edges() {
        if e.weight == 1.0 {
            let _ = writeln!(out, "{}\t{}", e.src, e.dst);
        } else {
            let _ = writeln!(out, "{}\t{}\t{}", e.src, e.dst, e.weight);
        }
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_edge_list(g))?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<InfectionSnapshot> {
    parse_snapshot(&fs::read_to_string(path)?)
}

pub fn parse_snapshot(text: &str) -> Result<InfectionSnapshot> {
    let mut time: Option<Option<f64>> = None;
    let mut infected = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if time.is_none() {
            let value = line
                .strip_prefix("t=")
                .ok_or_else(|| parse_err(line_no, "expected `t=<float|unknown>` header"))?
                .trim();
            let t = if value == "unknown" {
                None
            } else {
                let t: f64 = value
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad time {value:?}")))?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(parse_err(line_no, format!("time must be finite and >= 0, got {t}")));
                }
                Some(t)
            };
            time = Some(t);
            continue;
        }
        infected.push(parse_id(line, line_no)?);
    }
    let time = time.ok_or_else(|| parse_err(1, "missing `t=` header"))?;
    Ok(InfectionSnapshot::new(time, infected))
}

pub fn format_snapshot(snap: &InfectionSnapshot) -> String {
    let mut out = match snap.time() {
        Some(t) => format!("t={t}\n"),
        None => "t=unknown\n".to_string(),
    };
    for v in snap.infected() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_snapshot(snap: &InfectionSnapshot, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_snapshot(snap))?;
    Ok(())
}
