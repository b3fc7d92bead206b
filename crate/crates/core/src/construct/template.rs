//! Selector hypergraphs on `[2^t] × [n]` with no copy of `K_k`.
//!
//! Vertex `(α, x)` has id `α·n + x`. Edges are sorted multisets of `k-1`
//! ids; a repeated id is a loop. The declared density is `|E| / |V|^{k-1}`,
//! so the complete bipartite graph between two equal halves has density 1/4.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! 3 1 2          # k t n
//! 0:0 1:0        # an edge, vertices as alpha:x
//! 0:0 1:1
//! ```

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_rational::Ratio;

use crate::error::{param, Error, Result};
use crate::lattice::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueTemplate {
    k: usize,
    t: u32,
    n: usize,
    edges: BTreeSet<Vec<usize>>,
    density: Rational,
    kk_free: bool,
}

const MAX_T: u32 = 20;

impl CliqueTemplate {
    pub fn new(k: usize, t: u32, n: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if k < 3 {
            return param("templates need k ≥ 3");
        }
        if t > MAX_T || n == 0 {
            return param(format!("template size 2^{t}·{n} out of range"));
        }
        let v = n << t;
        let mut set = BTreeSet::new();
        for mut e in edges {
            if e.len() != k - 1 {
                return param(format!("template edge has {} vertices, expected {}", e.len(), k - 1));
            }
            if let Some(bad) = e.iter().find(|&&u| u >= v) {
                return param(format!("template vertex {bad} outside [0, {v})"));
            }
            e.sort_unstable();
            set.insert(e);
        }
        let cells = (v as i64)
            .checked_pow(k as u32 - 1)
            .ok_or_else(|| Error::Parameter("template too large".into()))?;
        let density = Ratio::new(set.len() as i64, cells);
        let mut tpl = CliqueTemplate {
            k,
            t,
            n,
            edges: set,
            density,
            kk_free: false,
        };
        tpl.kk_free = tpl.find_clique().is_none();
        Ok(tpl)
    }

    /// Every multiset of `k-1` vertices, loops included. With `t = 0` the
    /// product built from it is the base graph.
    pub fn complete(k: usize, t: u32, n: usize) -> Result<Self> {
        if k < 3 {
            return param("templates need k ≥ 3");
        }
        let v = n << t.min(MAX_T);
        let edges = (0..v).combinations_with_replacement(k - 1);
        CliqueTemplate::new(k, t, n, edges)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n << self.t
    }

    pub fn vertex(&self, alpha: usize, x: usize) -> usize {
        alpha * self.n + x
    }

    /// `(α, x)` of a vertex id.
    pub fn split(&self, v: usize) -> (usize, usize) {
        (v / self.n, v % self.n)
    }

    pub fn edges(&self) -> &BTreeSet<Vec<usize>> {
        &self.edges
    }

    pub fn contains(&self, sorted: &[usize]) -> bool {
        self.edges.contains(sorted)
    }

    pub fn density(&self) -> Rational {
        self.density
    }

    /// Whether the exhaustive search found no `K_k` on distinct vertices.
    pub fn kk_free(&self) -> bool {
        self.kk_free
    }

    /// Some `K_k` on distinct vertices, smallest first.
    pub fn find_clique(&self) -> Option<Vec<usize>> {
        let simple: Vec<&Vec<usize>> = self
            .edges
            .iter()
            .filter(|e| e.windows(2).all(|w| w[0] < w[1]))
            .collect();
        let mut link: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for e in &simple {
            for i in 0..e.len() {
                let mut rest = (*e).clone();
                let u = rest.remove(i);
                link.entry(rest).or_default().push(u);
            }
        }
        for e in simple {
            let top = *e.last().expect("k ≥ 3");
            let candidates = link.get(&e[1..]).map(Vec::as_slice).unwrap_or(&[]);
            let mut found: Vec<usize> = candidates.iter().copied().filter(|&w| w > top).collect();
            found.sort_unstable();
            for w in found {
                let closes = (0..e.len()).all(|i| {
                    let mut f = e.clone();
                    f.remove(i);
                    f.push(w);
                    self.edges.contains(&f)
                });
                if closes {
                    let mut clique = e.clone();
                    clique.push(w);
                    return Some(clique);
                }
            }
        }
        None
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parameter("empty template file".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|w| w.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parameter(format!("bad template header {header:?}")))?;
        let [k, t, n] = nums[..] else {
            return param(format!("template header must be `k t n`, got {header:?}"));
        };
        let t = u32::try_from(t).map_err(|_| Error::Parameter("t too large".into()))?;
        if n == 0 || t > MAX_T {
            return param(format!("template size 2^{t}·{n} out of range"));
        }
        let mut edges = Vec::new();
        for line in lines {
            let mut e = Vec::new();
            for tok in line.split_whitespace() {
                let (a, x) = tok
                    .split_once(':')
                    .ok_or_else(|| Error::Parameter(format!("bad template vertex {tok:?}")))?;
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parameter(format!("bad template vertex {tok:?}")))
                };
                let (alpha, x) = (parse(a)?, parse(x)?);
                if alpha >= 1 << t || x >= n {
                    return param(format!("template vertex {tok:?} outside [2^{t}]×[{n}]"));
                }
                e.push(alpha * n + x);
            }
            edges.push(e);
        }
        CliqueTemplate::new(k, t, n, edges)
    }

    /// Inverse of [`CliqueTemplate::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.k, self.t, self.n);
        for e in &self.edges {
            let toks: Vec<String> = e
                .iter()
                .map(|&v| {
                    let (a, x) = self.split(v);
                    format!("{a}:{x}")
                })
                .collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Complete bipartite graph between `α < 2^{t-1}` and `α ≥ 2^{t-1}`.
pub fn default_template(k: usize, t: u32, n: usize) -> Result<CliqueTemplate> {
    if k != 3 {
        return param(format!("no built-in K_{k}-free template; supply one with --template"));
    }
    if t == 0 {
        return param("the built-in template needs t ≥ 1 (two α-classes)");
    }
    if t > MAX_T || n == 0 {
        return param(format!("template size 2^{t}·{n} out of range"));
    }
    let half = (n << t) / 2;
    let edges = (0..half).cartesian_product(half..2 * half).map(|(u, v)| vec![u, v]);
    CliqueTemplate::new(k, t, n, edges)
}
