//! Blow-up of `G_S` by `[2^t]`, thinned by a template.
//!
//! Each entry `(x_1, …, x_{k-1}, z)` of `S` lifts to `((α_1, x_1), …, z)` for
//! every choice of the `α_i`; a lifted entry is kept only when its A-part is
//! a template edge, and then contributes all its `(k-1)`-subsets.

use super::{CliqueTemplate, LayeredGraph};
use crate::error::{param, Error, Result};
use crate::nof::{check_symmetric, EntrySet};
use crate::par;

#[derive(Debug, Clone)]
pub struct ProductGraph {
    pub t: u32,
    /// `n` of the base graph.
    pub base_n: usize,
    pub template: CliqueTemplate,
    /// Lifted entries that survived the template.
    pub lifted: usize,
    pub graph: LayeredGraph,
}

pub fn build_product(s: &EntrySet, t: u32, template: &CliqueTemplate) -> Result<ProductGraph> {
    let k = s.k();
    let n = s.dims()[0];
    if template.k() != k || template.t() != t || template.n() != n {
        return param(format!(
            "template is for (k,t,n)=({},{},{}), instance needs ({k},{t},{n})",
            template.k(),
            template.t(),
            template.n()
        ));
    }
    if !check_symmetric(s) {
        return Err(Error::Contract("entry set is not symmetric".into()));
    }
    let blocks = 1usize << t;
    let entries: Vec<Vec<usize>> = s.iter().cloned().collect();
    let lifted: Vec<Vec<usize>> = par::filter_map_slice(&entries, |e| {
        let mut out = Vec::new();
        let mut alphas = vec![0usize; k - 1];
        loop {
            let mut lift: Vec<usize> = (0..k - 1).map(|i| template.vertex(alphas[i], e[i])).collect();
            let mut key = lift.clone();
            key.sort_unstable();
            if template.contains(&key) {
                lift.push(e[k - 1]);
                out.push(lift);
            }
            let mut i = 0;
            loop {
                if i == k - 1 {
                    return Some(out);
                }
                alphas[i] += 1;
                if alphas[i] < blocks {
                    break;
                }
                alphas[i] = 0;
                i += 1;
            }
        }
    })
    .into_iter()
    .flatten()
    .collect();
    let graph = LayeredGraph::from_entries(k, n << t, s.dims()[k - 1], lifted.iter());
    Ok(ProductGraph {
        t,
        base_n: n,
        template: template.clone(),
        lifted: lifted.len(),
        graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_graph, default_template};
    use crate::nof::Provenance;

    fn pair_set() -> EntrySet {
        EntrySet::new(vec![3, 3, 4], vec![vec![0, 1, 2], vec![1, 0, 2]], Provenance::Synthetic).unwrap()
    }

    #[test]
    fn identity_blow_up() {
        let s = pair_set();
        let full = CliqueTemplate::complete(3, 0, 3).unwrap();
        let pg = build_product(&s, 0, &full).unwrap();
        assert_eq!(pg.graph, build_graph(&s).unwrap());
    }

    #[test]
    fn quarter_template_counts() {
        let s = pair_set();
        let tpl = default_template(3, 2, 3).unwrap();
        let pg = build_product(&s, 2, &tpl).unwrap();
        // x ≠ y: ordered α-pairs across the halves, 2·2·2 = 8 unordered edges
        assert_eq!(pg.graph.a_edges().len(), 8);
        assert_eq!(pg.lifted, 16);
        assert_eq!(pg.graph.n_a(), 12);
    }

    #[test]
    fn template_mismatch() {
        let tpl = default_template(3, 1, 4).unwrap();
        assert!(matches!(build_product(&pair_set(), 1, &tpl), Err(Error::Parameter(_))));
    }
}
