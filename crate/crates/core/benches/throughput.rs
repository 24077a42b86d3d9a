//! Parallel core against a single-thread pool. With the `parallel` feature
//! off both rows run the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ecmix::aligner::{AlignerConfig, AlignerModel};
use ecmix::generator::{generate_all, GeneratorConfig};
use ecmix::ngram_lm::NGramModel;
use ecmix::projector::project_pair;
use ecmix::synth::{dictionary_corpus, World};
use rayon::ThreadPool;

fn pools() -> Vec<(&'static str, ThreadPool)> {
    let build = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    vec![("1-thread", build(1)), ("rayon", build(0))]
}

fn bench(c: &mut Criterion) {
    let data = dictionary_corpus(2000, 20, 1);
    let cfg = AlignerConfig {
        iterations: 3,
        ..AlignerConfig::default()
    };
    let trees: Vec<_> = World::new(1)
        .corpus(400, 2)
        .into_iter()
        .filter_map(|s| project_pair(&s.tree, &s.pair).ok().map(|t| (s.pair.id.clone(), t)))
        .collect();
    let corpus: Vec<Vec<String>> = (0..40)
        .flat_map(|_| data.pairs.iter())
        .map(|p| p.src.iter().map(|t| t.surface.clone()).collect())
        .collect();

    let mut group = c.benchmark_group("throughput");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("aligner_em", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| AlignerModel::train(&data.pairs, &cfg).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("generate", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| generate_all(&trees, &GeneratorConfig::default())))
        });
        group.bench_with_input(BenchmarkId::new("lm_counts", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| NGramModel::train(&corpus).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
