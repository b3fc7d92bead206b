//! Acceptance criteria 1–11, one PASS/FAIL line each.
//!
//! Every expected value is recomputed here from first principles (plain
//! coordinate arithmetic, brute-force loops) rather than read back from the
//! library.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use sha2::{Digest, Sha256};

use rsforge::construct::{build_graph, build_product, default_template, LayeredGraph};
use rsforge::functions::{check_lines, BoolFunction, enumerate_z, ones_count, FunctionSpec, LineMode};
use rsforge::lattice::IntervalPartition;
use rsforge::nof::{
    augment, check_correct, check_star_free, check_symmetric, cost, run, transcript_set, EntrySet, ProtocolKind,
    ProtocolSpec, Provenance, Scope,
};
use rsforge::pipeline::{nondegenerate, run_pipeline, PipelineConfig};
use rsforge::verify::{
    check_concentration, check_induced_steiner_partition, check_product_bounds, clique_counts, cross_clique_census,
    cross_cliques,
};
use rsforge::Cap;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const CAP: Cap = Cap::DEFAULT;
const GRAPH_SIZES: [(u32, u32); 5] = [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1)];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn timed(limit: Duration, what: &str, start: Instant) -> Result<(), String> {
    let spent = start.elapsed();
    ensure!(spent <= limit, "{what} took {:.2?}, limit {:?}", spent, limit);
    Ok(())
}

// Plain coordinate decoding, independent of the lattice module: index `i`
// of a box with `base` values per axis starting at `lo`.
fn coords(i: usize, d: u32, base: usize, lo: i64) -> Vec<i64> {
    let mut rem = i;
    (0..d)
        .map(|_| {
            let c = lo + (rem % base) as i64;
            rem /= base;
            c
        })
        .collect()
}

fn a_coords(q: u32, d: u32, i: usize) -> Vec<i64> {
    coords(i, d, q as usize, 1)
}

/// Coordinates of the last input, stored scaled by `m = k-1`.
fn z_coords(m: u32, q: u32, d: u32, j: usize) -> Vec<i64> {
    coords(j, d, (m * (q - 1) + 1) as usize, m as i64)
}

/// `Σ x_i = (k-1)·z` with `z` stored scaled.
fn midpoint_oracle(q: u32, d: u32, x: &[usize]) -> bool {
    let k = x.len();
    let z = z_coords(k as u32 - 1, q, d, x[k - 1]);
    (0..d as usize).all(|c| x[..k - 1].iter().map(|&i| a_coords(q, d, i)[c]).sum::<i64>() == z[c])
}

fn sq_dist(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn all_inputs(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).map(move |v| {
                    let mut e = p.clone();
                    e.push(v);
                    e
                })
            })
            .collect();
    }
    out
}

fn criterion_1() -> Outcome {
    let mut runs = 0;
    for (q, d) in GRAPH_SIZES {
        let start = Instant::now();
        let g = FunctionSpec::midpoint(q, d).unwrap();
        let f = FunctionSpec::cube(q, d).unwrap();
        let gv: usize = check_lines(&g, LineMode::Sub, CAP).unwrap().iter().map(|r| r.violation_count).sum();
        let fv: usize = check_lines(&f, LineMode::Weak, CAP).unwrap().iter().map(|r| r.violation_count).sum();
        ensure!(gv == 0, "g_{{{q},{d}}}: {gv} strict line violations");
        ensure!(fv == 0, "f_{{{q},{d}}}: {fv} weak line violations");
        // a sub-permutation has exactly one 1 per last-dimension line
        let n = (q as u64).pow(d);
        ensure!(ones_count(&g, CAP).unwrap() == n * n, "g_{{{q},{d}}} does not have n² ones");
        timed(Duration::from_secs(5), &format!("(q,d)=({q},{d})"), start)?;
        runs += 2;
    }
    for (k, q, d) in [(4usize, 2u32, 1u32), (4, 2, 2), (5, 2, 1)] {
        let start = Instant::now();
        let g = FunctionSpec::k_midpoint(k, q, d).unwrap();
        let v: usize = check_lines(&g, LineMode::Sub, CAP).unwrap().iter().map(|r| r.violation_count).sum();
        ensure!(v == 0, "g_{{{k},{q},{d}}}: {v} strict line violations");
        let cells = ((q as u64).pow(d)).pow(k as u32 - 1);
        ensure!(ones_count(&g, CAP).unwrap() == cells, "g_{{{k},{q},{d}}} does not have n^(k-1) ones");
        timed(Duration::from_secs(5), &format!("(k,q,d)=({k},{q},{d})"), start)?;
        runs += 1;
    }
    Ok(format!("{runs} line scans, zero violations"))
}

fn protocol_matches_oracle(p: &ProtocolSpec, g: &FunctionSpec, q: u32, d: u32) -> Result<usize, String> {
    let bad = check_correct(p, g, CAP).unwrap();
    ensure!(bad.is_empty(), "{} wrong outputs, first {:?}", bad.len(), bad[0]);
    let inputs = all_inputs(g.dims());
    for x in &inputs {
        ensure!(run(p, x).1 == midpoint_oracle(q, d, x), "output differs from x+y=2z oracle at {x:?}");
    }
    Ok(inputs.len())
}

fn criterion_2() -> Outcome {
    let mut inputs = 0;
    let limit = Duration::from_secs(30);
    for (q, d) in GRAPH_SIZES {
        let g = FunctionSpec::midpoint(q, d).unwrap();
        let start = Instant::now();
        inputs += protocol_matches_oracle(&ProtocolSpec::simple(&g).unwrap(), &g, q, d)
            .map_err(|e| format!("simple ({q},{d}): {e}"))?;
        timed(limit, "simple", start)?;
        for r2 in [d as u64, 2 * d as u64] {
            let start = Instant::now();
            let p = ProtocolSpec::interval(&g, r2, CAP).unwrap();
            inputs += protocol_matches_oracle(&p, &g, q, d).map_err(|e| format!("interval ({q},{d}) r²={r2}: {e}"))?;
            timed(limit, "interval", start)?;
        }
    }
    let g4 = FunctionSpec::k_midpoint(4, 2, 2).unwrap();
    for sym in [true, false] {
        let start = Instant::now();
        let p = ProtocolSpec::kplayer(&g4, 2, sym, CAP).unwrap();
        inputs += protocol_matches_oracle(&p, &g4, 2, 2).map_err(|e| format!("kplayer sym={sym}: {e}"))?;
        timed(limit, "kplayer", start)?;
    }
    Ok(format!("{inputs} inputs checked exhaustively"))
}

fn criterion_3() -> Outcome {
    let mut seen = Vec::new();
    for (q, d) in GRAPH_SIZES {
        let g = FunctionSpec::midpoint(q, d).unwrap();
        let c = cost(&ProtocolSpec::simple(&g).unwrap(), &g, CAP).unwrap();
        ensure!(c == 2, "cost(simple) on g_{{{q},{d}}} is {c}");
    }
    for (k, q, d) in [(4usize, 2u32, 2u32), (4, 2, 1), (5, 2, 1), (4, 3, 1)] {
        for r2 in [d as u64, 2 * d as u64] {
            let g = FunctionSpec::midpoint(q, d).unwrap();
            let gk = FunctionSpec::k_midpoint(k, q, d).unwrap();
            let ci = cost(&ProtocolSpec::interval(&g, r2, CAP).unwrap(), &g, CAP).unwrap();
            let ck = cost(&ProtocolSpec::kplayer(&gk, r2, true, CAP).unwrap(), &gk, CAP).unwrap();
            ensure!(ck == ci + 1, "k={k} q={q} d={d} r²={r2}: kplayer {ck} vs interval {ci}");
            seen.push(format!("{ci}/{ck}"));
        }
    }
    Ok(format!("simple = 2; interval/kplayer pairs {}", seen.join(" ")))
}

fn criterion_4_instance() -> rsforge::pipeline::Pipeline {
    run_pipeline(&PipelineConfig::new(3, 2, 3, ProtocolKind::Simple)).unwrap()
}

/// `S` recomputed from coordinates: 1-entries whose `‖x-y‖²` is the most
/// common value (smallest on ties).
fn simple_oracle_set(q: u32, d: u32) -> BTreeSet<Vec<usize>> {
    let n = (q as usize).pow(d);
    let big_n = (2 * q as usize - 1).pow(d);
    let ones: Vec<Vec<usize>> = all_inputs(&[n, n, big_n])
        .into_iter()
        .filter(|x| midpoint_oracle(q, d, x))
        .collect();
    let dist = |x: &Vec<usize>| sq_dist(&a_coords(q, d, x[0]), &a_coords(q, d, x[1]));
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    for x in &ones {
        *hist.entry(dist(x)).or_default() += 1;
    }
    let best = hist.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(v, _)| *v).unwrap();
    ones.into_iter().filter(|x| dist(x) == best).collect()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let p = criterion_4_instance();
    let oracle = simple_oracle_set(3, 2);
    let got: BTreeSet<Vec<usize>> = p.base.iter().cloned().collect();
    ensure!(got == oracle, "S differs from the coordinate oracle ({} vs {})", got.len(), oracle.len());
    ensure!(check_symmetric(&p.base), "S is not symmetric");
    let stars = check_star_free(&p.base, CAP).unwrap();
    ensure!(stars.is_empty(), "S has {} stars", stars.len());

    // F from S directly; the layers must partition it.
    let f: BTreeSet<Vec<usize>> = oracle
        .iter()
        .map(|e| {
            let mut a = vec![e[0], e[1]];
            a.sort_unstable();
            a
        })
        .collect();
    let mut covered = BTreeSet::new();
    for layer in &p.layers {
        for e in &layer.edges {
            ensure!(covered.insert(e.clone()), "edge {e:?} in two layers");
        }
    }
    ensure!(covered == f, "layers do not cover F");
    ensure!(p.layers.len() <= 25, "{} nonempty layers", p.layers.len());

    // induced matching: brute force over every layer and every edge of F
    for layer in &p.layers {
        let matched: HashSet<usize> = layer.edges.iter().flatten().copied().collect();
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for e in &layer.edges {
            for v in e.iter().collect::<BTreeSet<_>>() {
                *deg.entry(*v).or_default() += 1;
            }
        }
        ensure!(deg.values().all(|&c| c == 1), "layer B:{} is not a matching", layer.z);
        for e in &f {
            if !layer.edges.contains(e) {
                ensure!(!(matched.contains(&e[0]) && matched.contains(&e[1])), "layer B:{} not induced: {e:?}", layer.z);
            }
        }
    }
    let rep = check_induced_steiner_partition(&p.graph);
    ensure!(rep.passed, "library induced check: {:?}", rep.counterexamples);
    timed(Duration::from_secs(10), "pipeline", start)?;
    Ok(format!("|S| = {}, |F| = {}, {} layers ≤ 25", oracle.len(), f.len(), p.layers.len()))
}

/// Triangles `{x, y, B:z}` found by looping over all vertex triples.
fn brute_cross_triangles(g: &LayeredGraph) -> BTreeSet<(Vec<usize>, usize)> {
    let a: HashSet<Vec<usize>> = g.a_edges().keys().cloned().collect();
    let cross: HashSet<(Vec<usize>, usize)> = g.cross_edges().iter().cloned().collect();
    let mut out = BTreeSet::new();
    for x in 0..g.n_a() {
        for y in x..g.n_a() {
            if !a.contains(&vec![x, y]) {
                continue;
            }
            for z in 0..g.n_b() {
                if cross.contains(&(vec![x], z)) && cross.contains(&(vec![y], z)) {
                    out.insert((vec![x, y], z));
                }
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let p = criterion_4_instance();
    let expected: BTreeSet<(Vec<usize>, usize)> = p
        .base
        .iter()
        .map(|e| {
            let mut a = vec![e[0], e[1]];
            a.sort_unstable();
            (a, e[2])
        })
        .collect();
    let brute = brute_cross_triangles(&p.graph);
    ensure!(brute == expected, "brute-force triangles differ from S");
    ensure!(cross_cliques(&p.graph) == expected, "library census differs from S");
    let rep = cross_clique_census(&p.graph, &p.base);
    ensure!(rep.passed, "census report failed: {:?}", rep.counterexamples);
    ensure!(rep.metrics["max_per_a_edge"] == 1 && rep.metrics["min_per_a_edge"] == 1, "an A-edge is not in exactly one triangle");

    // A star centred at (0,1,B:0), closed under swapping x and y, so its
    // mirror (1,0,B:0) is a star as well.
    let star = vec![vec![2, 1, 0], vec![1, 2, 0], vec![0, 2, 0], vec![2, 0, 0], vec![0, 1, 1], vec![1, 0, 1]];
    let s = EntrySet::new(vec![3, 3, 2], star, Provenance::Synthetic).unwrap();
    ensure!(check_star_free(&s, CAP).unwrap().len() == 2, "synthetic set should hold the star and its mirror");
    let g = build_graph(&s).unwrap();
    let census = brute_cross_triangles(&g);
    let s_parts: BTreeSet<(Vec<usize>, usize)> = s
        .iter()
        .map(|e| {
            let mut a = vec![e[0], e[1]];
            a.sort_unstable();
            (a, e[2])
        })
        .collect();
    ensure!(census.is_superset(&s_parts) && census != s_parts, "fault injection did not inflate the census");
    ensure!(census.contains(&(vec![0, 1], 0)), "star centre missing from census");
    ensure!(!cross_clique_census(&g, &s).passed, "library census accepted a set with a star");
    Ok(format!("census = S ({} triangles); planted star adds its centre", expected.len()))
}

fn criterion_6() -> Outcome {
    let g = FunctionSpec::midpoint(3, 2).unwrap();
    let p = ProtocolSpec::simple(&g).unwrap();
    let base = criterion_4_instance();
    let a = augment(&g, &p, &base.transcript, CAP).unwrap();
    let gamma = cost(&p, &g, CAP).unwrap();
    ensure!(a.gamma == gamma && a.n_prime == 25 * (1 << gamma), "N' = {} with γ = {}", a.n_prime, a.gamma);
    ensure!(a.n_prime == 100, "N' = {} instead of 100", a.n_prime);
    let weak: usize = check_lines(&a.function, LineMode::Weak, CAP).unwrap().iter().map(|r| r.violation_count).sum();
    ensure!(weak == 0, "augmented function has {weak} weak line violations");
    ensure!(a.set.len() == base.base.len(), "|S'| = {} vs |S| = {}", a.set.len(), base.base.len());
    let mut cfg = PipelineConfig::new(3, 2, 3, ProtocolKind::Simple);
    cfg.augment = true;
    let aug = run_pipeline(&cfg).unwrap();
    ensure!(aug.graph.n_b() == 100, "augmented graph has {} B-vertices", aug.graph.n_b());
    ensure!(aug.layers.len() <= a.n_prime, "{} layers > N'", aug.layers.len());
    let rep = check_induced_steiner_partition(&aug.graph);
    ensure!(rep.passed, "augmented layers: {:?}", rep.counterexamples);
    Ok(format!("γ = {gamma}, N' = {}, |S'| = |S| = {}, {} layers", a.n_prime, a.set.len(), aug.layers.len()))
}

/// Number of triangles through each edge by looping over every third vertex.
fn brute_triangle_counts(g: &LayeredGraph) -> Vec<usize> {
    use rsforge::construct::Vertex;
    let edges = g.edges();
    let set: HashSet<Vec<Vertex>> = edges.iter().cloned().collect();
    let all: Vec<Vertex> = (0..g.n_a()).map(Vertex::A).chain((0..g.n_b()).map(Vertex::B)).collect();
    let has = |a: Vertex, b: Vertex| {
        let mut e = vec![a, b];
        e.sort();
        set.contains(&e)
    };
    edges
        .iter()
        .map(|e| all.iter().filter(|&&w| w != e[0] && w != e[1] && has(e[0], w) && has(e[1], w)).count())
        .collect()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let p = criterion_4_instance();
    let n = 9;
    let mut notes = Vec::new();
    for t in [1u32, 2] {
        let tpl = default_template(3, t, n).unwrap();
        let v = (n << t) as i64;
        ensure!(tpl.density() == Ratio::new(1, 4), "template density {}", tpl.density());
        ensure!(tpl.edges().len() as i64 * 4 == v * v, "template edge count off");
        ensure!(tpl.kk_free(), "template has a triangle");
        let pg = build_product(&p.base, t, &tpl).unwrap();
        // double counting: x ≠ y pairs get 2·h² template pairs, loops h²
        let h = 1usize << (t - 1);
        let predicted: usize = p
            .graph
            .a_edges()
            .keys()
            .map(|a| if a[0] == a[1] { h * h } else { 2 * h * h })
            .sum();
        ensure!(pg.graph.a_edges().len() == predicted, "|E'| = {} vs {}", pg.graph.a_edges().len(), predicted);
        let counts = brute_triangle_counts(&pg.graph);
        ensure!(counts == clique_counts(&pg.graph), "library triangle counts differ from brute force");
        let bound = 1usize << t;
        let (lo, hi) = (*counts.iter().min().unwrap(), *counts.iter().max().unwrap());
        ensure!(lo >= 1 && hi <= bound, "t={t}: counts in [{lo}, {hi}], allowed [1, {bound}]");
        let rep = check_product_bounds(&pg);
        ensure!(rep.passed, "t={t}: {:?}", rep.counterexamples);
        notes.push(format!("t={t}: {} edges in [{lo},{hi}] triangles", counts.len()));
    }
    timed(Duration::from_secs(60), "product", start)?;
    Ok(format!("density 1/4; {}", notes.join("; ")))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for r2 in [2u64, 4] {
        let mut cfg = PipelineConfig::new(2, 2, 4, ProtocolKind::KPlayer);
        cfg.r_sq = Some(r2);
        let p = run_pipeline(&cfg).unwrap();
        let realised = nondegenerate(&p.base).unwrap();
        ensure!(check_star_free(&realised, CAP).unwrap().is_empty(), "r²={r2}: stars among non-degenerate entries");
        // Steiner S(2,3): no two triples of a layer share a pair
        for layer in &p.layers {
            let mut pairs = HashSet::new();
            for e in &layer.edges {
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    ensure!(pairs.insert((e[i], e[j])), "r²={r2}: layer B:{} reuses pair {:?}", layer.z, (e[i], e[j]));
                }
            }
        }
        ensure!(p.layers.len() <= p.function.big_n(), "r²={r2}: {} layers > N", p.layers.len());
        let rep = check_induced_steiner_partition(&p.graph);
        ensure!(rep.passed, "r²={r2}: {:?}", rep.counterexamples);
        // K_4 census by brute force over triples and B-vertices
        let a: HashSet<&Vec<usize>> = p.graph.a_edges().keys().collect();
        let cross: HashSet<(Vec<usize>, usize)> = p.graph.cross_edges().iter().cloned().collect();
        let mut census = BTreeSet::new();
        for t in a.iter() {
            for z in 0..p.graph.n_b() {
                let full = [vec![t[0], t[1]], vec![t[0], t[2]], vec![t[1], t[2]]]
                    .into_iter()
                    .all(|c| cross.contains(&(c, z)));
                if full {
                    census.insert(((*t).clone(), z));
                }
            }
        }
        let expected: BTreeSet<(Vec<usize>, usize)> = realised
            .iter()
            .map(|e| {
                let mut t = e[..3].to_vec();
                t.sort_unstable();
                (t, e[3])
            })
            .collect();
        ensure!(census == expected, "r²={r2}: K_4 census differs from S");
        ensure!(cross_clique_census(&p.graph, &p.base).passed, "r²={r2}: library census failed");
        notes.push(format!(
            "r²={r2}: |S| = {}, {} non-degenerate, {} layers",
            p.base.len(),
            realised.len(),
            p.layers.len()
        ));
    }
    timed(Duration::from_secs(60), "hypergraph pipeline", start)?;
    Ok(notes.join("; "))
}

fn criterion_9() -> Outcome {
    for (q, d) in GRAPH_SIZES.into_iter().chain([(4, 2)]) {
        let z = enumerate_z(2, q, d, CAP).unwrap().len() as u64;
        ensure!(z == (2 * q as u64 - 1).pow(d), "|Z_2,{q},{d}| = {z}");
        ensure!(z <= (2 * q as u64).pow(d), "|Z| > (2q)^d at ({q},{d})");
    }
    let mut notes = Vec::new();
    for q in [2u32, 4] {
        for d in [1u32, 2] {
            let n = (q as usize).pow(d);
            let f = FunctionSpec::cube(q, d).unwrap();
            let brute = all_inputs(&[n, n, n])
                .into_iter()
                .filter(|x| {
                    let (a, b, c) = (a_coords(q, d, x[0]), a_coords(q, d, x[1]), a_coords(q, d, x[2]));
                    (0..d as usize).all(|i| a[i] + b[i] == 2 * c[i])
                })
                .count() as u64;
            let ones = ones_count(&f, CAP).unwrap();
            let lower = (q as u64).pow(d) * (q as u64 / 2).pow(d);
            ensure!(ones == brute, "|f⁻¹(1)| = {ones}, brute force {brute}");
            ensure!(ones >= lower, "|f_{{{q},{d}}}⁻¹(1)| = {ones} < {lower}");
            notes.push(format!("({q},{d}): {ones} ≥ {lower}"));
        }
    }
    Ok(format!("|Z| = (2q-1)^d ≤ (2q)^d; {}", notes.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    for (q, d) in [(3u32, 2u32), (4, 2)] {
        let r2 = d as u64;
        let rep = check_concentration(q, d, r2, CAP).unwrap();
        ensure!(rep.passed, "({q},{d}): {:?}", rep.counterexamples);
        // independent tail check in floating point over an exact histogram
        let n = (q as usize).pow(d);
        let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                *hist.entry(sq_dist(&a_coords(q, d, x), &a_coords(q, d, y))).or_default() += 1;
            }
        }
        let mu = Ratio::new(d as i64 * (q as i64 * q as i64 - 1), 6);
        for t in 0..=(d as i64 * q as i64 * q as i64) {
            let tail: u64 = hist
                .iter()
                .filter(|(&v, _)| (Ratio::from_integer(v) - mu) >= Ratio::from_integer(t) || (mu - v) >= Ratio::from_integer(t))
                .map(|(_, c)| c)
                .sum();
            let bound = 2.0 * (-2.0 * (t * t) as f64 / (d as f64 * (q as f64).powi(4))).exp();
            ensure!((tail as f64) / ((n * n) as f64) <= bound, "({q},{d}) t={t}: tail exceeds bound");
        }
        let g = FunctionSpec::midpoint(q, d).unwrap();
        let p = ProtocolSpec::interval(&g, r2, CAP).unwrap();
        let s = transcript_set(&p, &g, &p.mu_transcript().unwrap(), Scope::LastPlayer, CAP).unwrap();
        let partition = IntervalPartition::new(q, d, r2).unwrap();
        let in_mu: u64 = hist
            .iter()
            .filter(|(&v, _)| partition.try_index(v) == Some(partition.mu_index()))
            .map(|(_, c)| c)
            .sum();
        ensure!(rep.metrics["mu_interval_pairs"] == in_mu, "p numerator {} vs {in_mu}", rep.metrics["mu_interval_pairs"]);
        ensure!(s.len() as u64 == in_mu, "|S_3(I_r(μ))| = {} vs {in_mu}", s.len());
        ensure!(rep.metrics["p"] == s.len() as f64 / (n * n) as f64, "p differs from |S|/n²");
        notes.push(format!("({q},{d}): p = {}/{}", s.len(), n * n));
    }
    Ok(notes.join(", "))
}

fn hash_dir(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let bytes = std::fs::read(&path).unwrap();
        out.insert(
            path.file_name().unwrap().to_string_lossy().into_owned(),
            hex::encode(Sha256::digest(&bytes)),
        );
    }
    out
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_rsforge");
    let tmp = tempfile::tempdir().unwrap();
    let configs: [&[&str]; 5] = [
        &["--q", "3", "--d", "2", "--protocol", "simple", "--t", "2"],
        &["--q", "3", "--d", "2", "--protocol", "interval", "--r2", "4"],
        &["--q", "2", "--d", "2", "--k", "4", "--protocol", "kplayer", "--r2", "4"],
        &["--q", "3", "--d", "2", "--augment"],
        &["--q", "2", "--d", "2", "--transcript", "explicit:111111"],
    ];
    let mut files = 0;
    for (i, cfg) in configs.iter().enumerate() {
        let mut hashes = Vec::new();
        for (run, extra) in [&[][..], &["--threads", "1"][..], &["--sequential"][..]].iter().enumerate() {
            let dir = tmp.path().join(format!("c{i}-{run}"));
            let status = Command::new(bin)
                .arg("construct")
                .args(*cfg)
                .args(*extra)
                .arg("--out")
                .arg(&dir)
                .output()
                .unwrap();
            ensure!(status.status.success(), "config {cfg:?} exited {:?}", status.status.code());
            hashes.push(hash_dir(&dir));
        }
        ensure!(hashes.windows(2).all(|w| w[0] == w[1]), "config {cfg:?}: artifacts differ between runs");
        files += hashes[0].len();
    }
    Ok(format!("{} configs × 3 runs, {files} artifacts byte-identical", configs.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("sub-permutation suite", criterion_1),
        ("protocol correctness", criterion_2),
        ("exact costs", criterion_3),
        ("recipe pipeline (3,2)", criterion_4),
        ("triangle census", criterion_5),
        ("augmentation", criterion_6),
        ("product bounds", criterion_7),
        ("hypergraph pipeline k=4", criterion_8),
        ("counting identities", criterion_9),
        ("concentration", criterion_10),
        ("determinism", criterion_11),
    ];
    // Stay quiet on panics; they are reported as FAIL lines.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
