//! Rayon sweeps against the sequential fallback on the same inputs.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rsforge::construct::{build_product, default_template};
use rsforge::functions::{check_lines, FunctionSpec, LineMode};
use rsforge::nof::{check_correct, last_part_histogram, ProtocolKind, ProtocolSpec};
use rsforge::pipeline::{run_pipeline, PipelineConfig};
use rsforge::verify::clique_counts;
use rsforge::{par, Cap};

const MODES: [(&str, bool); 2] = [("rayon", true), ("sequential", false)];

fn both_modes(c: &mut Criterion, group: &str, mut f: impl FnMut()) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    for (name, parallel) in MODES {
        par::set_parallel(parallel);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(&mut f));
    }
    par::set_parallel(true);
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    let cap = Cap::DEFAULT;
    let g = FunctionSpec::midpoint(4, 2).unwrap();
    let interval = ProtocolSpec::interval(&g, 2, cap).unwrap();
    both_modes(c, "check_correct/interval g(4,2)", || {
        assert!(check_correct(&interval, &g, cap).unwrap().is_empty());
    });

    let big = FunctionSpec::midpoint(5, 2).unwrap();
    both_modes(c, "check_lines/sub g(5,2)", || {
        check_lines(&big, LineMode::Sub, cap).unwrap();
    });

    both_modes(c, "last_part_histogram/interval g(4,2)", || {
        last_part_histogram(&interval, &g, cap).unwrap();
    });

    let base = run_pipeline(&PipelineConfig::new(3, 2, 3, ProtocolKind::Simple)).unwrap().base;
    let pg = build_product(&base, 3, &default_template(3, 3, 9).unwrap()).unwrap();
    both_modes(c, "clique_counts/product t=3", || {
        clique_counts(&pg.graph);
    });
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
