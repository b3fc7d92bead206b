//! Brute-force checks of the structural claims, each returning a report.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::construct::{show_a, show_edge, LayeredGraph, ProductGraph, Vertex};
use crate::error::{Cap, Result};
use crate::lattice::{mean_sq_dist, sq_dist, IntervalPartition, LatticePoint};
use crate::nof::EntrySet;
use crate::par;

pub const MAX_COUNTEREXAMPLES: usize = 32;

/// Outcome of one check. `passed` holds exactly when no counterexample was
/// found; `violations` counts all of them, the list keeps the first 32.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    pub violations: usize,
    pub counterexamples: Vec<String>,
    pub metrics: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub fn new(check: &str) -> Self {
        VerificationReport {
            check: check.to_string(),
            passed: true,
            violations: 0,
            counterexamples: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.violations += 1;
        self.passed = false;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(msg.into());
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.to_string(), value.into());
    }
}

fn distinct(a: &[usize]) -> Vec<usize> {
    let mut v = a.to_vec();
    v.dedup();
    v
}

/// Sub-multisets obtained by dropping one element, without repeats.
fn facets<T: Clone + PartialEq>(a: &[T]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for i in 0..a.len() {
        if i > 0 && a[i] == a[i - 1] {
            continue;
        }
        let mut f = a.to_vec();
        f.remove(i);
        out.push(f);
    }
    out
}

/// Each layer must be a partial Steiner system `S(k-2, k-1)` (a matching
/// for `k = 3`), and no edge of another layer may sit inside its vertex
/// support.
pub fn check_induced_steiner_partition(g: &LayeredGraph) -> VerificationReport {
    let mut rep = VerificationReport::new("induced-steiner-partition");
    let mut layers: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    for (a, zs) in g.a_edges() {
        if zs.len() > 1 {
            let list: Vec<String> = zs.iter().map(|z| Vertex::B(*z).to_string()).collect();
            rep.fail(format!("edge {} lies in several layers: {}", show_a(a), list.join(", ")));
        }
        for &z in zs {
            layers.entry(z).or_default().push(a);
        }
    }

    let mut steiner = 0usize;
    let mut support_of: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (&z, edges) in &layers {
        let mut owner: HashMap<Vec<usize>, &Vec<usize>> = HashMap::new();
        for &e in edges {
            for f in facets(e) {
                if let Some(prev) = owner.insert(f.clone(), e) {
                    steiner += 1;
                    rep.fail(format!(
                        "layer {}: edges {} and {} share {}",
                        Vertex::B(z),
                        show_a(prev),
                        show_a(e),
                        show_a(&f)
                    ));
                }
            }
            for &v in e {
                support_of.entry(v).or_default().insert(z);
            }
        }
    }

    let edges: Vec<(&Vec<usize>, usize)> = g.labelled_a_edges().collect();
    let hits: Vec<String> = par::filter_map_slice(&edges, |&(a, own)| {
        let verts = distinct(a);
        let mut common: BTreeSet<usize> = support_of.get(&verts[0])?.clone();
        for v in &verts[1..] {
            let s = support_of.get(v)?;
            common.retain(|z| s.contains(z));
        }
        common.remove(&own);
        let msgs: Vec<String> = common
            .into_iter()
            .map(|z| {
                format!(
                    "edge {} of layer {} lies inside the support of layer {}",
                    show_a(a),
                    Vertex::B(own),
                    Vertex::B(z)
                )
            })
            .collect();
        (!msgs.is_empty()).then_some(msgs)
    })
    .into_iter()
    .flatten()
    .collect();
    let induced = hits.len();
    for h in hits {
        rep.fail(h);
    }

    rep.metric("layers", layers.len());
    rep.metric("max_layer_size", layers.values().map(Vec::len).max().unwrap_or(0));
    rep.metric("a_edges", g.a_edges().len());
    rep.metric("N", g.n_b());
    rep.metric("steiner_violations", steiner);
    rep.metric("induced_violations", induced);
    rep
}

/// `E_S` of `g` against a fresh derivation from `s`.
pub fn check_edge_set(g: &LayeredGraph, s: &EntrySet) -> VerificationReport {
    let mut rep = VerificationReport::new("edge-set");
    let k = s.k();
    let fresh = LayeredGraph::from_entries(k, s.dims()[0], s.dims()[k - 1], s.iter());
    let have: BTreeSet<Vec<Vertex>> = g.edges().into_iter().collect();
    let want: BTreeSet<Vec<Vertex>> = fresh.edges().into_iter().collect();
    for e in have.difference(&want) {
        rep.fail(format!("edge {} does not come from S", show_edge(e)));
    }
    for e in want.difference(&have) {
        rep.fail(format!("edge {} of S is missing", show_edge(e)));
    }
    let labels_have: BTreeSet<(&Vec<usize>, usize)> = g.labelled_a_edges().collect();
    let labels_want: BTreeSet<(&Vec<usize>, usize)> = fresh.labelled_a_edges().collect();
    for (a, z) in labels_have.symmetric_difference(&labels_want) {
        rep.fail(format!("layer label {} on {} disagrees with S", Vertex::B(*z), show_a(a)));
    }
    rep.metric("edges", have.len());
    rep.metric("derived_edges", want.len());
    rep.metric("degenerate_entries", fresh.degenerate().len());
    rep
}

/// `(k-2)`-part of cross edges → their B-vertices.
fn cross_index(g: &LayeredGraph) -> HashMap<&Vec<usize>, BTreeSet<usize>> {
    let mut m: HashMap<&Vec<usize>, BTreeSet<usize>> = HashMap::new();
    for (c, z) in g.cross_edges() {
        m.entry(c).or_default().insert(*z);
    }
    m
}

/// Copies of `K_k` with `k-1` vertices in the A-part and one in the B-part,
/// as `(sorted A-part, z)`.
pub fn cross_cliques(g: &LayeredGraph) -> BTreeSet<(Vec<usize>, usize)> {
    let index = cross_index(g);
    let edges: Vec<&Vec<usize>> = g.a_edges().keys().collect();
    par::filter_map_slice(&edges, |a| {
        let fs = facets(a);
        let first = index.get(&fs[0])?;
        let found: Vec<(Vec<usize>, usize)> = first
            .iter()
            .filter(|z| fs[1..].iter().all(|f| index.get(f).is_some_and(|s| s.contains(z))))
            .map(|&z| ((*a).clone(), z))
            .collect();
        Some(found)
    })
    .into_iter()
    .flatten()
    .collect()
}

/// The cross `K_k` copies of `G_S` against `S` itself (non-degenerate part).
pub fn cross_clique_census(g: &LayeredGraph, s: &EntrySet) -> VerificationReport {
    let mut rep = VerificationReport::new("cross-clique-census");
    let k = s.k();
    let expected: BTreeSet<(Vec<usize>, usize)> = s
        .iter()
        .filter_map(|e| {
            let mut a = e[..k - 1].to_vec();
            a.sort_unstable();
            let degenerate = k > 3 && a.windows(2).any(|w| w[0] == w[1]);
            (!degenerate).then(|| (a, e[k - 1]))
        })
        .collect();
    let found = cross_cliques(g);
    for (a, z) in found.difference(&expected) {
        rep.fail(format!("clique {} + {} has no entry in S", show_a(a), Vertex::B(*z)));
    }
    for (a, z) in expected.difference(&found) {
        rep.fail(format!("entry {} + {} gives no clique", show_a(a), Vertex::B(*z)));
    }
    let mut per_edge: BTreeMap<&Vec<usize>, usize> = g.a_edges().keys().map(|a| (a, 0)).collect();
    for (a, _) in &found {
        *per_edge.get_mut(a).expect("clique A-part is an edge") += 1;
    }
    rep.metric("census", found.len());
    rep.metric("expected", expected.len());
    rep.metric("extra", found.difference(&expected).count());
    rep.metric("missing", expected.difference(&found).count());
    rep.metric("min_per_a_edge", per_edge.values().copied().min().unwrap_or(0));
    rep.metric("max_per_a_edge", per_edge.values().copied().max().unwrap_or(0));
    rep
}

/// Number of `K_k` copies through each edge of the graph, in
/// [`LayeredGraph::edges`] order.
pub fn clique_counts(g: &LayeredGraph) -> Vec<usize> {
    let edges = g.edges();
    let set: HashSet<&Vec<Vertex>> = edges.iter().collect();
    let mut link: HashMap<Vec<Vertex>, BTreeSet<Vertex>> = HashMap::new();
    for e in &edges {
        for i in 0..e.len() {
            let mut rest = e.clone();
            let v = rest.remove(i);
            link.entry(rest).or_default().insert(v);
        }
    }
    par::map_range(edges.len(), |i| {
        let e = &edges[i];
        let Some(cands) = link.get(&e[1..]) else { return 0 };
        cands
            .iter()
            .filter(|v| !e.contains(v))
            .filter(|&&v| {
                facets(e).iter().all(|f| {
                    let mut h = f.clone();
                    h.push(v);
                    h.sort_unstable();
                    set.contains(&h)
                })
            })
            .count()
    })
}

/// Every edge of `E'_{S^t}` must lie in at least one and at most `2^t`
/// copies of `K_k`.
pub fn check_product_bounds(pg: &ProductGraph) -> VerificationReport {
    let mut rep = VerificationReport::new("product-bounds");
    let g = &pg.graph;
    let edges = g.edges();
    let counts = clique_counts(g);
    let bound = 1usize << pg.t;
    for (e, &c) in edges.iter().zip(&counts) {
        if c == 0 || c > bound {
            rep.fail(format!("edge {} lies in {c} cliques, allowed [1, {bound}]", show_edge(e)));
        }
    }
    let n_a_edges = g.a_edges().len();
    let span = |xs: &[usize]| (xs.iter().copied().min().unwrap_or(0), xs.iter().copied().max().unwrap_or(0));
    let (a_min, a_max) = span(&counts[..n_a_edges]);
    let (c_min, c_max) = span(&counts[n_a_edges..]);
    let (min, max) = span(&counts);
    let va = g.n_a() as f64;
    let v = (g.n_a() + g.n_b()) as f64;
    let tdens = *pg.template.density().numer() as f64 / *pg.template.density().denom() as f64;
    rep.metric("t", pg.t);
    rep.metric("bound", bound);
    rep.metric("edges", edges.len());
    rep.metric("a_edges", n_a_edges);
    rep.metric("min_per_edge", min);
    rep.metric("max_per_edge", max);
    rep.metric("a_edge_min", a_min);
    rep.metric("a_edge_max", a_max);
    rep.metric("cross_edge_min", c_min);
    rep.metric("cross_edge_max", c_max);
    rep.metric("template_density", pg.template.density().to_string());
    rep.metric("a_edge_density", n_a_edges as f64 / (v * v));
    rep.metric("reference_density", tdens * va * va / (v * v));
    rep
}

/// Exact histogram of `‖x-y‖²` over `[q]^d × [q]^d`.
pub fn distance_histogram(q: u32, d: u32, cap: Cap) -> Result<Vec<u64>> {
    let points: Vec<LatticePoint> = {
        let n = (q as usize).pow(d);
        cap.check((n as u128) * (n as u128))?;
        (0..n)
            .map(|i| LatticePoint::from_index(q, d as usize, 1, i))
            .collect::<Result<_>>()?
    };
    let n = points.len();
    let top = (d as usize) * (q as usize - 1).pow(2);
    Ok(par::sweep_fold(
        &[n, n],
        || vec![0u64; top + 1],
        |mut h, xy| {
            let v = sq_dist(&points[xy[0]], &points[xy[1]]).expect("same lattice");
            h[v as usize] += 1;
            h
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    ))
}

/// Empirical tail of `‖x-y‖²` against `2·exp(-2t²/(d q⁴))` at every integer
/// `t ∈ [0, d q²]`, plus the mass of the interval holding the mean.
pub fn check_concentration(q: u32, d: u32, r_sq: u64, cap: Cap) -> Result<VerificationReport> {
    let partition = IntervalPartition::new(q, d, r_sq)?;
    let hist = distance_histogram(q, d, cap)?;
    let mu = mean_sq_dist(q, d)?;
    let pairs: u64 = hist.iter().sum();
    let mut rep = VerificationReport::new("concentration");
    let top = (d as i64) * (q as i64).pow(2);
    let (mn, md) = (*mu.numer(), *mu.denom());
    let mut worst = 0.0f64;
    for t in 0..=top {
        // |v - μ| ≥ t  ⇔  |v·md - mn| ≥ t·md
        let tail: u64 = hist
            .iter()
            .enumerate()
            .filter(|(v, _)| ((*v as i64) * md - mn).abs() >= t * md)
            .map(|(_, c)| c)
            .sum();
        let frac = tail as f64 / pairs as f64;
        let bound = 2.0 * (-2.0 * (t * t) as f64 / (d as f64 * (q as f64).powi(4))).exp();
        worst = worst.max(frac - bound);
        if frac > bound {
            rep.fail(format!("t={t}: tail {tail}/{pairs} = {frac:.6} exceeds bound {bound:.6}"));
        }
    }
    let mu_idx = partition.mu_index();
    let in_mu: u64 = hist
        .iter()
        .enumerate()
        .filter(|(v, _)| partition.try_index(*v as i64) == Some(mu_idx))
        .map(|(_, c)| c)
        .sum();
    rep.metric("q", q);
    rep.metric("d", d);
    rep.metric("r2", r_sq);
    rep.metric("mu", mu.to_string());
    rep.metric("pairs", pairs);
    rep.metric("mu_interval_pairs", in_mu);
    rep.metric("p", in_mu as f64 / pairs as f64);
    rep.metric("max_tail_minus_bound", worst);
    rep.metric("histogram", json!(hist));
    Ok(rep)
}

/// Instance parameters for [`bound_report`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundInputs {
    pub q: u32,
    pub d: u32,
    pub k: usize,
    pub n: usize,
    pub big_n: usize,
    pub gamma: u32,
    /// `|S|` before any augmentation.
    pub s_size: usize,
    pub layers: usize,
    /// Whether the layers come from the augmented set `S'`.
    pub augmented: bool,
}

/// `h` upper bound `(N'/n)²` evaluated at the instance.
pub fn h_bound(big_n: usize, gamma: u32, n: usize) -> f64 {
    let n_prime = big_n as f64 * 2f64.powi(gamma as i32);
    (n_prime / n as f64).powi(2)
}

/// Finite-instance counting facts: `N ≤ ((k-1)q)^d` (that is `(2q)^d` for
/// graphs), at most `N` (or `N'`) layers, and the derived bound values.
pub fn bound_report(b: &BoundInputs) -> VerificationReport {
    let mut rep = VerificationReport::new("bounds");
    let n_prime = (b.big_n as u128) << b.gamma;
    let box_side = ((b.k - 1) as u128) * b.q as u128;
    let box_size = box_side.pow(b.d);
    let n_le = (b.big_n as u128) <= box_size;
    if !n_le {
        rep.fail(format!("N = {} exceeds ({box_side})^{} = {box_size}", b.big_n, b.d));
    }
    let layer_cap = if b.augmented { n_prime } else { b.big_n as u128 };
    if b.layers as u128 > layer_cap {
        rep.fail(format!("{} layers exceed {layer_cap}", b.layers));
    }
    let cells = (b.n as f64).powi(b.k as i32 - 1);
    rep.metric("N", b.big_n);
    rep.metric("Nprime", n_prime as u64);
    rep.metric("gamma", b.gamma);
    rep.metric("p", b.s_size as f64 / cells);
    rep.metric("layers", b.layers);
    rep.metric("layer_cap", layer_cap as u64);
    rep.metric("N_le_2q_pow_d", n_le);
    rep.metric("box_size", box_size as u64);
    rep.metric("h_bound", h_bound(b.big_n, b.gamma, b.n));
    rep
}
