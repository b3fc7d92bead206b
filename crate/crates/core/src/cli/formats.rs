//! Text artifacts: edge lists, entry lists and layer maps.
//!
//! Edge list:
//!
//! ```text
//! # rsforge v1 k=3 nA=9 nB=25
//! A:0 A:4 z=B:6
//! A:0 B:6
//! ```
//!
//! A-part edges carry their layer as a trailing `z=B:<j>`; cross edges end
//! with their B-vertex. A loop is written with its vertex twice.

use std::collections::BTreeMap;

use crate::construct::{Layer, LayeredGraph, Vertex};
use crate::nof::EntrySet;

pub fn edgelist(g: &LayeredGraph) -> String {
    let mut out = format!("# rsforge v1 k={} nA={} nB={}\n", g.k(), g.n_a(), g.n_b());
    for (a, z) in g.labelled_a_edges() {
        for x in a {
            out.push_str(&format!("{} ", Vertex::A(*x)));
        }
        out.push_str(&format!("z={}\n", Vertex::B(z)));
    }
    for (c, z) in g.cross_edges() {
        for x in c {
            out.push_str(&format!("{} ", Vertex::A(*x)));
        }
        out.push_str(&format!("{}\n", Vertex::B(*z)));
    }
    out
}

fn header_field(header: &str, key: &str) -> Result<usize, String> {
    header
        .split_whitespace()
        .find_map(|w| w.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .ok_or_else(|| format!("edge list header lacks {key}="))?
        .parse()
        .map_err(|_| format!("bad {key}= in edge list header"))
}

fn vertex(tok: &str) -> Result<Vertex, String> {
    let bad = || format!("bad vertex {tok:?}");
    let (part, id) = tok.split_once(':').ok_or_else(bad)?;
    let id: usize = id.parse().map_err(|_| bad())?;
    match part {
        "A" => Ok(Vertex::A(id)),
        "B" => Ok(Vertex::B(id)),
        _ => Err(bad()),
    }
}

pub fn parse_edgelist(text: &str) -> Result<LayeredGraph, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty edge list")?;
    if !header.starts_with("# rsforge v1 ") {
        return Err(format!("unexpected edge list header {header:?}"));
    }
    let k = header_field(header, "k")?;
    let n_a = header_field(header, "nA")?;
    let n_b = header_field(header, "nB")?;
    if k < 3 {
        return Err(format!("k={k} in edge list header"));
    }
    let mut g = LayeredGraph::empty(k, n_a, n_b);
    for (no, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| format!("line {}: {msg}", no + 2);
        let mut toks: Vec<&str> = line.split_whitespace().collect();
        let layer = match toks.last().and_then(|t| t.strip_prefix("z=")) {
            Some(z) => {
                toks.pop();
                Some(z)
            }
            None => None,
        };
        let verts: Vec<Vertex> = toks.iter().map(|t| vertex(t)).collect::<Result<_, _>>().map_err(at)?;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for v in verts {
            match v {
                Vertex::A(x) if x < n_a => a.push(x),
                Vertex::B(z) if z < n_b => b.push(z),
                other => return Err(at(format!("vertex {other} out of range"))),
            }
        }
        match (layer, b.as_slice()) {
            (Some(z), []) if a.len() == k - 1 => match vertex(z).map_err(at)? {
                Vertex::B(z) if z < n_b => g.add_a_edge(a, z),
                other => return Err(at(format!("bad layer {other}"))),
            },
            (None, [z]) if a.len() == k - 2 => g.add_cross_edge(a, *z),
            _ => return Err(at(format!("not an edge of a {k}-graph: {line:?}"))),
        }
    }
    Ok(g)
}

/// One entry per line, coordinates separated by spaces.
pub fn entries_text(s: &EntrySet, transcript: &str) -> String {
    let dims: Vec<String> = s.dims().iter().map(|d| d.to_string()).collect();
    let mut out = format!(
        "# rsforge entries k={} dims={} transcript={} count={}\n",
        s.k(),
        dims.join(","),
        if transcript.is_empty() { "-" } else { transcript },
        s.len()
    );
    for e in s.iter() {
        let xs: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        out.push_str(&xs.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_entries(text: &str) -> Result<Vec<Vec<usize>>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|w| w.parse::<usize>().map_err(|_| format!("bad entry line {l:?}")))
                .collect()
        })
        .collect()
}

/// `B:<z>` followed by the layer's edges, one layer per line.
pub fn layers_text(layers: &[Layer]) -> String {
    let mut out = format!("# rsforge layers count={}\n", layers.len());
    for layer in layers {
        out.push_str(&Vertex::B(layer.z).to_string());
        for e in &layer.edges {
            let vs: Vec<String> = e.iter().map(|&x| Vertex::A(x).to_string()).collect();
            out.push_str(&format!(" {{{}}}", vs.join(" ")));
        }
        out.push('\n');
    }
    out
}

/// Number of edges per layer of an edge-list graph.
pub fn layer_sizes(g: &LayeredGraph) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for (_, z) in g.labelled_a_edges() {
        *m.entry(z).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_graph;
    use crate::nof::Provenance;

    #[test]
    fn edgelist_round_trip() {
        let s = EntrySet::new(
            vec![4, 4, 6],
            vec![vec![1, 2, 5], vec![2, 1, 5], vec![3, 3, 0]],
            Provenance::Synthetic,
        )
        .unwrap();
        let g = build_graph(&s).unwrap();
        let text = edgelist(&g);
        assert!(text.starts_with("# rsforge v1 k=3 nA=4 nB=6\n"));
        assert!(text.contains("A:1 A:2 z=B:5\n"));
        assert!(text.contains("A:3 A:3 z=B:0\n"));
        assert_eq!(parse_edgelist(&text).unwrap(), g);
    }

    #[test]
    fn empty_graph_is_just_a_header() {
        let g = LayeredGraph::empty(3, 9, 25);
        assert_eq!(edgelist(&g), "# rsforge v1 k=3 nA=9 nB=25\n");
    }

    #[test]
    fn malformed_lines() {
        for body in ["A:1 A:2\n", "A:1 A:9 z=B:0\n", "A:1 B:0 B:1\n", "C:1 A:2 z=B:0\n", "A:1 A:2 z=A:0\n"] {
            let text = format!("# rsforge v1 k=3 nA=4 nB=2\n{body}");
            assert!(parse_edgelist(&text).is_err(), "{body:?}");
        }
    }

    #[test]
    fn entries_round_trip() {
        let s = EntrySet::new(vec![3, 3, 5], vec![vec![0, 1, 2], vec![1, 0, 2]], Provenance::Synthetic).unwrap();
        let text = entries_text(&s, "0101");
        assert_eq!(parse_entries(&text).unwrap(), vec![vec![0, 1, 2], vec![1, 0, 2]]);
    }
}
