//! Layered (hyper)graphs built from symmetric entry sets.
//!
//! An entry `(x_1, …, x_{k-1}, z)` contributes every `(k-1)`-subset of its
//! vertices: one A-part edge `{x_1, …, x_{k-1}}` labelled with layer `z`, and
//! `k-1` cross edges that swap one `x_i` for the B-vertex `z`. A-vertices and
//! B-vertices are numbered independently.

mod product;
mod template;

pub use product::{build_product, ProductGraph};
pub use template::{default_template, CliqueTemplate};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nof::{check_symmetric, EntrySet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Vertex {
    A(usize),
    B(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::A(i) => write!(f, "A:{i}"),
            Vertex::B(j) => write!(f, "B:{j}"),
        }
    }
}

/// Formats a vertex multiset as `{A:1 A:2 B:0}`.
pub fn show_edge(vertices: &[Vertex]) -> String {
    format!("{{{}}}", vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
}

pub(crate) fn show_a(a: &[usize]) -> String {
    show_edge(&a.iter().map(|&x| Vertex::A(x)).collect::<Vec<_>>())
}

/// `G_S`. A-part edges are sorted vertex multisets of size `k-1`; for `k = 3`
/// a loop `{x, x}` is kept as the multiset `[x, x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredGraph {
    k: usize,
    n_a: usize,
    n_b: usize,
    a_edges: BTreeMap<Vec<usize>, BTreeSet<usize>>,
    cross_edges: BTreeSet<(Vec<usize>, usize)>,
    degenerate: Vec<Vec<usize>>,
}

impl LayeredGraph {
    pub fn empty(k: usize, n_a: usize, n_b: usize) -> Self {
        LayeredGraph {
            k,
            n_a,
            n_b,
            a_edges: BTreeMap::new(),
            cross_edges: BTreeSet::new(),
            degenerate: Vec::new(),
        }
    }

    /// Builds the edge set of a list of entries without any symmetry check.
    pub fn from_entries<'a>(
        k: usize,
        n_a: usize,
        n_b: usize,
        entries: impl IntoIterator<Item = &'a Vec<usize>>,
    ) -> Self {
        let mut g = LayeredGraph::empty(k, n_a, n_b);
        for e in entries {
            g.insert_entry(e);
        }
        g
    }

    fn insert_entry(&mut self, e: &[usize]) {
        let k = self.k;
        let mut a = e[..k - 1].to_vec();
        a.sort_unstable();
        if k > 3 && a.windows(2).any(|w| w[0] == w[1]) {
            self.degenerate.push(e.to_vec());
            return;
        }
        let z = e[k - 1];
        for i in 0..k - 1 {
            let mut c = a.clone();
            c.remove(i);
            self.cross_edges.insert((c, z));
        }
        self.a_edges.entry(a).or_default().insert(z);
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// A-part edges with every layer that claims them.
    pub fn a_edges(&self) -> &BTreeMap<Vec<usize>, BTreeSet<usize>> {
        &self.a_edges
    }

    /// Cross edges as (A-part of size `k-2`, B-vertex).
    pub fn cross_edges(&self) -> &BTreeSet<(Vec<usize>, usize)> {
        &self.cross_edges
    }

    /// Entries left out because of a repeated A-vertex (`k > 3` only).
    pub fn degenerate(&self) -> &[Vec<usize>] {
        &self.degenerate
    }

    pub fn edge_count(&self) -> usize {
        self.a_edges.len() + self.cross_edges.len()
    }

    /// Adds an A-part edge by hand, e.g. when reading an edge list.
    pub fn add_a_edge(&mut self, mut a: Vec<usize>, z: usize) {
        a.sort_unstable();
        self.a_edges.entry(a).or_default().insert(z);
    }

    pub fn add_cross_edge(&mut self, mut c: Vec<usize>, z: usize) {
        c.sort_unstable();
        self.cross_edges.insert((c, z));
    }

    /// Every edge as a sorted vertex list, A-part edges first.
    pub fn edges(&self) -> Vec<Vec<Vertex>> {
        let a = self
            .a_edges
            .keys()
            .map(|a| a.iter().map(|&x| Vertex::A(x)).collect());
        let cross = self.cross_edges.iter().map(|(c, z)| {
            let mut e: Vec<Vertex> = c.iter().map(|&x| Vertex::A(x)).collect();
            e.push(Vertex::B(*z));
            e
        });
        a.chain(cross).collect()
    }

    /// The entries realised as A-edge plus layer, as `(sorted A-part, z)`.
    pub fn labelled_a_edges(&self) -> impl Iterator<Item = (&Vec<usize>, usize)> {
        self.a_edges
            .iter()
            .flat_map(|(a, zs)| zs.iter().map(move |&z| (a, z)))
    }
}

/// `G_S` for a symmetric entry set.
pub fn build_graph(s: &EntrySet) -> Result<LayeredGraph> {
    let k = s.k();
    if k < 3 {
        return Err(Error::Parameter("graphs need k ≥ 3".into()));
    }
    let dims = s.dims();
    if dims[..k - 1].iter().any(|&d| d != dims[0]) {
        return Err(Error::Parameter("the first k-1 dimensions must agree".into()));
    }
    if !check_symmetric(s) {
        return Err(Error::Contract("entry set is not symmetric".into()));
    }
    Ok(LayeredGraph::from_entries(k, dims[0], dims[k - 1], s.iter()))
}

/// One layer `F_z` (or `E'_z`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub z: usize,
    pub edges: Vec<Vec<usize>>,
}

/// Groups A-part edges by layer, in increasing `z`; empty layers are omitted.
pub fn partition_layers(g: &LayeredGraph) -> Result<Vec<Layer>> {
    let mut by_z: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for (a, zs) in &g.a_edges {
        if zs.len() > 1 {
            let list: Vec<String> = zs.iter().map(|z| Vertex::B(*z).to_string()).collect();
            return Err(Error::Contract(format!(
                "A-edge {} lies in layers {}; the entry set is not from a weak sub-permutation",
                show_a(a),
                list.join(", ")
            )));
        }
        let z = *zs.iter().next().expect("an A-edge has a layer");
        by_z.entry(z).or_default().push(a.clone());
    }
    Ok(by_z.into_iter().map(|(z, edges)| Layer { z, edges }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nof::Provenance;

    fn set(k: usize, n: usize, big_n: usize, entries: &[&[usize]]) -> EntrySet {
        let mut dims = vec![n; k - 1];
        dims.push(big_n);
        EntrySet::new(dims, entries.iter().map(|e| e.to_vec()), Provenance::Synthetic).unwrap()
    }

    #[test]
    fn single_pair_unrolls() {
        let g = build_graph(&set(3, 4, 6, &[&[1, 2, 5], &[2, 1, 5]])).unwrap();
        assert_eq!(g.a_edges().len(), 1);
        assert_eq!(g.a_edges()[&vec![1, 2]], BTreeSet::from([5]));
        let cross: Vec<_> = g.cross_edges().iter().cloned().collect();
        assert_eq!(cross, vec![(vec![1], 5), (vec![2], 5)]);
        let layers = partition_layers(&g).unwrap();
        assert_eq!(layers, vec![Layer { z: 5, edges: vec![vec![1, 2]] }]);
    }

    #[test]
    fn empty_set_gives_isolated_vertices() {
        let g = build_graph(&set(3, 9, 25, &[])).unwrap();
        assert_eq!((g.n_a(), g.n_b(), g.edge_count()), (9, 25, 0));
        assert!(partition_layers(&g).unwrap().is_empty());
    }

    #[test]
    fn loops_survive_for_graphs() {
        let g = build_graph(&set(3, 3, 3, &[&[1, 1, 2]])).unwrap();
        assert!(g.a_edges().contains_key(&vec![1, 1]));
        assert_eq!(g.cross_edges().len(), 1);
    }

    #[test]
    fn repeated_vertices_are_degenerate_for_hypergraphs() {
        let entries: Vec<Vec<usize>> = vec![vec![0, 0, 1, 2], vec![0, 1, 0, 2], vec![1, 0, 0, 2]];
        let refs: Vec<&[usize]> = entries.iter().map(|e| e.as_slice()).collect();
        let g = build_graph(&set(4, 3, 3, &refs)).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.degenerate().len(), 3);
    }

    #[test]
    fn asymmetric_set_is_rejected() {
        let err = build_graph(&set(3, 3, 3, &[&[0, 1, 0]])).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn layer_conflict_is_reported() {
        let mut g = LayeredGraph::empty(3, 3, 3);
        g.add_a_edge(vec![0, 1], 0);
        g.add_a_edge(vec![1, 0], 2);
        assert!(matches!(partition_layers(&g), Err(Error::Contract(_))));
    }

    #[test]
    fn vertices_print_with_part_prefix() {
        assert_eq!(show_edge(&[Vertex::A(1), Vertex::B(5)]), "{A:1 B:5}");
        assert!(Vertex::A(9) < Vertex::B(0));
    }
}
