//! End-to-end construction: function, protocol, transcript, entry set,
//! graph, layers and (optionally) the product, plus every applicable check.

use serde_json::json;

use crate::bits::Bits;
use crate::construct::{build_graph, build_product, partition_layers, CliqueTemplate, Layer, LayeredGraph, ProductGraph};
use crate::error::{param, Cap, Error, Result};
use crate::functions::{check_lines, Family, FunctionSpec, LineMode};
use crate::nof::{
    augment, check_correct, check_star_free, check_symmetric, choose_transcript, cost, transcript_set, Augmented,
    EntrySet, ProtocolKind, ProtocolSpec, Scope, Star, TranscriptChoice,
};
use crate::verify::{
    bound_report, check_concentration, check_edge_set, check_induced_steiner_partition, check_product_bounds, cross_clique_census,
    BoundInputs, VerificationReport,
};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub q: u32,
    pub d: u32,
    pub k: usize,
    /// Defaults to the midpoint family of the right arity.
    pub family: Option<Family>,
    /// Squared interval length; defaults to `d`.
    pub r_sq: Option<u64>,
    pub protocol: ProtocolKind,
    pub transcript: TranscriptChoice,
    pub symmetrize: bool,
    /// Build the graph from the augmented set `S'` instead of `S_k(T)`.
    pub augment: bool,
    pub t: Option<u32>,
    pub template: Option<CliqueTemplate>,
    pub cap: Cap,
}

impl PipelineConfig {
    pub fn new(q: u32, d: u32, k: usize, protocol: ProtocolKind) -> Self {
        PipelineConfig {
            q,
            d,
            k,
            family: None,
            r_sq: None,
            protocol,
            transcript: TranscriptChoice::Auto,
            symmetrize: true,
            augment: false,
            t: None,
            template: None,
            cap: Cap::DEFAULT,
        }
    }

    pub fn r_sq(&self) -> u64 {
        self.r_sq.unwrap_or(self.d as u64)
    }

    pub fn family(&self) -> Family {
        self.family.unwrap_or(if self.k == 3 { Family::Midpoint } else { Family::KMidpoint })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return param(format!("k must be at least 3, got {}", self.k));
        }
        if self.protocol == ProtocolKind::KPlayer && self.k <= 3 {
            return param("the kplayer protocol needs k > 3");
        }
        if self.protocol != ProtocolKind::KPlayer && self.k != 3 {
            return param(format!("the {} protocol is for k = 3", self.protocol));
        }
        if self.r_sq == Some(0) {
            return param("r2 must be at least 1");
        }
        match (self.family(), self.k) {
            (Family::KMidpoint, _) | (Family::Midpoint | Family::Cube, 3) => Ok(()),
            (fam, k) => param(format!("family {fam} has arity 3, not {k}")),
        }
    }

    pub fn function(&self) -> Result<FunctionSpec> {
        match self.family() {
            Family::Cube => FunctionSpec::cube(self.q, self.d),
            Family::Midpoint => FunctionSpec::midpoint(self.q, self.d),
            Family::KMidpoint => FunctionSpec::k_midpoint(self.k, self.q, self.d),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    pub function: FunctionSpec,
    pub protocol: ProtocolSpec,
    pub gamma: u32,
    pub transcript: Bits,
    /// `S_k(T)`.
    pub base: EntrySet,
    pub augmented: Option<Augmented>,
    pub graph: LayeredGraph,
    pub layers: Vec<Layer>,
    pub product: Option<ProductGraph>,
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Pipeline> {
    cfg.validate()?;
    let function = cfg.function()?;
    let protocol = ProtocolSpec::build(cfg.protocol, &function, cfg.r_sq(), cfg.symmetrize, cfg.cap)?;
    let gamma = cost(&protocol, &function, cfg.cap)?;
    let transcript = choose_transcript(&protocol, &function, &cfg.transcript, cfg.cap)?;
    let base = transcript_set(&protocol, &function, &transcript, Scope::LastPlayer, cfg.cap)?;
    if !check_symmetric(&base) {
        return Err(Error::Contract(format!(
            "S_k(T) for T = {transcript} is not symmetric; pick another transcript"
        )));
    }
    let augmented = if cfg.augment {
        let a = augment(&function, &protocol, &transcript, cfg.cap)?;
        if !check_symmetric(&a.set) {
            return Err(Error::Contract(format!(
                "the augmented set S' is not symmetric under the {} protocol",
                cfg.protocol
            )));
        }
        Some(a)
    } else {
        None
    };
    let source = augmented.as_ref().map_or(&base, |a| &a.set);
    let graph = build_graph(source)?;
    let layers = partition_layers(&graph)?;
    let product = match cfg.t {
        None => None,
        Some(t) => {
            let n = function.n();
            let template = match &cfg.template {
                Some(tpl) => tpl.clone(),
                None => crate::construct::default_template(cfg.k, t, n)?,
            };
            Some(build_product(source, t, &template)?)
        }
    };
    Ok(Pipeline {
        config: cfg.clone(),
        function,
        protocol,
        gamma,
        transcript,
        base,
        augmented,
        graph,
        layers,
        product,
    })
}

/// Names accepted by [`Pipeline::run_checks`], in run order.
pub const CHECKS: &[&str] = &[
    "lines",
    "correctness",
    "symmetry",
    "stars",
    "edge-set",
    "induced-steiner-partition",
    "cross-clique-census",
    "product-bounds",
    "concentration",
    "bounds",
];

/// `s` without entries that repeat an A-coordinate (only for `k > 3`).
pub fn nondegenerate(s: &EntrySet) -> Result<EntrySet> {
    let k = s.k();
    let kept = s.iter().filter(|e| {
        let mut a = e[..k - 1].to_vec();
        a.sort_unstable();
        k == 3 || a.windows(2).all(|w| w[0] != w[1])
    });
    EntrySet::new(s.dims().to_vec(), kept.cloned().collect::<Vec<_>>(), s.provenance())
}

pub fn star_report(s: &EntrySet, cap: Cap) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("stars");
    let stars: Vec<Star> = check_star_free(s, cap)?;
    for st in &stars {
        rep.fail(format!("star centred at {:?} with arms {:?}", st.center, st.arms));
    }
    rep.metric("entries", s.len());
    rep.metric("stars", stars.len());
    Ok(rep)
}

impl Pipeline {
    /// The set the graph was built from.
    pub fn source(&self) -> &EntrySet {
        self.augmented.as_ref().map_or(&self.base, |a| &a.set)
    }

    pub fn n_prime(&self) -> u128 {
        (self.function.big_n() as u128) << self.gamma
    }

    pub fn bound_inputs(&self, layers: usize) -> BoundInputs {
        BoundInputs {
            q: self.config.q,
            d: self.config.d,
            k: self.config.k,
            n: self.function.n(),
            big_n: self.function.big_n(),
            gamma: self.gamma,
            s_size: self.base.len(),
            layers,
            augmented: self.augmented.is_some(),
        }
    }

    /// Runs the selected checks (all applicable ones for an empty selection)
    /// against `graph` and `product`, which may differ from the built ones
    /// when they were read back from disk.
    pub fn run_checks(
        &self,
        selection: &[String],
        graph: &LayeredGraph,
        product: Option<&ProductGraph>,
    ) -> Result<Vec<VerificationReport>> {
        for name in selection {
            if !CHECKS.contains(&name.as_str()) {
                return param(format!("unknown check {name:?}; known: {}", CHECKS.join(", ")));
            }
        }
        let wanted = |name: &str| selection.is_empty() || selection.iter().any(|s| s == name);
        let cap = self.config.cap;
        let mut out = Vec::new();
        if wanted("lines") {
            let mode = if self.function.family() == Family::Cube {
                LineMode::Weak
            } else {
                LineMode::Sub
            };
            let mut rep = VerificationReport::new("lines");
            for r in check_lines(&self.function, mode, cap)? {
                for v in &r.violations {
                    rep.fail(format!("dimension {}: line {:?} holds {} ones", r.dimension, v.fixed, v.ones));
                }
                rep.violations += r.violation_count - r.violations.len();
            }
            rep.metric("mode", json!(mode));
            if let Some(a) = &self.augmented {
                let weak = check_lines(&a.function, LineMode::Weak, cap)?;
                let ok = weak.iter().all(|r| r.passed);
                if !ok {
                    rep.fail("augmented function fails the weak line check");
                }
                rep.metric("augmented_weak", ok);
            }
            out.push(rep);
        }
        if wanted("correctness") {
            let mut rep = VerificationReport::new("correctness");
            for x in check_correct(&self.protocol, &self.function, cap)? {
                rep.fail(format!("wrong output on {x:?}"));
            }
            rep.metric("protocol", self.config.protocol.to_string());
            rep.metric("gamma", self.gamma);
            out.push(rep);
        }
        if wanted("symmetry") {
            let mut rep = VerificationReport::new("symmetry");
            if !check_symmetric(self.source()) {
                rep.fail("entry set is not closed under permuting the first k-1 coordinates");
            }
            rep.metric("entries", self.source().len());
            out.push(rep);
        }
        let realised = nondegenerate(self.source())?;
        if wanted("stars") {
            out.push(star_report(&realised, cap)?);
        }
        if wanted("edge-set") {
            out.push(check_edge_set(graph, self.source()));
        }
        if wanted("induced-steiner-partition") {
            out.push(check_induced_steiner_partition(graph));
        }
        if wanted("cross-clique-census") {
            out.push(cross_clique_census(graph, self.source()));
        }
        if wanted("product-bounds") {
            if let Some(pg) = product {
                out.push(check_product_bounds(pg));
            }
        }
        if wanted("concentration") {
            out.push(check_concentration(self.config.q, self.config.d, self.config.r_sq(), cap)?);
        }
        if wanted("bounds") {
            let layers = graph.a_edges().values().flatten().collect::<std::collections::BTreeSet<_>>().len();
            let mut rep = bound_report(&self.bound_inputs(layers));
            if let Some(a) = &self.augmented {
                if a.n_prime as u128 != self.n_prime() {
                    rep.fail(format!("N' = {} but N·2^γ = {}", a.n_prime, self.n_prime()));
                }
                if a.set.len() != self.base.len() {
                    rep.fail(format!("|S'| = {} but |S_k(T)| = {}", a.set.len(), self.base.len()));
                }
            }
            out.push(rep);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_three_two() {
        let p = run_pipeline(&PipelineConfig::new(3, 2, 3, ProtocolKind::Simple)).unwrap();
        assert_eq!(p.gamma, 2);
        assert!(p.layers.len() <= 25);
        let reports = p.run_checks(&[], &p.graph, None).unwrap();
        for r in &reports {
            assert!(r.passed, "{} failed: {:?}", r.check, r.counterexamples);
        }
    }

    #[test]
    fn bad_configs() {
        let mut c = PipelineConfig::new(3, 2, 3, ProtocolKind::KPlayer);
        assert!(matches!(run_pipeline(&c), Err(Error::Parameter(_))));
        c.protocol = ProtocolKind::Simple;
        c.k = 4;
        assert!(matches!(run_pipeline(&c), Err(Error::Parameter(_))));
    }

    #[test]
    fn asymmetric_kplayer_is_a_contract_error() {
        let mut c = PipelineConfig::new(2, 1, 4, ProtocolKind::KPlayer);
        c.symmetrize = false;
        assert!(matches!(run_pipeline(&c), Err(Error::Contract(_))));
    }
}
