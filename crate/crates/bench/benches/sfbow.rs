use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use sfbow::{
    bag_of_words, fuzzy_jaccard, identity_universe, kmeans, pca_universe, sfbow_embed,
    spearman_rho, tokenize, Pipeline, PipelineMeasure,
};
use sfbow_bench::{synthetic_model, synthetic_points, synthetic_sentence};

fn bench_embedding(c: &mut Criterion) {
    let model = synthetic_model(5_000, 300, 1);
    let universe = identity_universe(300).unwrap();
    let sentence = synthetic_sentence(5_000, 20, 2);
    let bag = bag_of_words(&tokenize(&sentence), model.vocab());

    c.bench_function("sfbow_embed/identity-300d/20-tokens", |b| {
        b.iter(|| sfbow_embed(black_box(&universe), black_box(&model), black_box(&bag)).unwrap())
    });
}

fn bench_fuzzy_jaccard(c: &mut Criterion) {
    let model = synthetic_model(5_000, 300, 3);
    let universe = identity_universe(300).unwrap();
    let bag_a = bag_of_words(&tokenize(&synthetic_sentence(5_000, 20, 4)), model.vocab());
    let bag_b = bag_of_words(&tokenize(&synthetic_sentence(5_000, 20, 5)), model.vocab());
    let ea = sfbow_embed(&universe, &model, &bag_a).unwrap();
    let eb = sfbow_embed(&universe, &model, &bag_b).unwrap();

    c.bench_function("fuzzy_jaccard/300d", |b| {
        b.iter(|| fuzzy_jaccard(black_box(&ea), black_box(&eb)).unwrap())
    });
}

fn bench_dynamax_pair(c: &mut Criterion) {
    let model = synthetic_model(5_000, 300, 6);
    let pipeline = Pipeline::dynamax(model, PipelineMeasure::FuzzyJaccard, true);
    let a = synthetic_sentence(5_000, 15, 7);
    let b = synthetic_sentence(5_000, 15, 8);

    c.bench_function("dynamax/300d/15-token-pair", |bench| {
        bench.iter(|| pipeline.score(black_box(&a), black_box(&b)))
    });
}

fn bench_kmeans(c: &mut Criterion) {
    let points = synthetic_points(2_000, 16, 9);
    c.bench_function("kmeans/2000x16/k8", |b| {
        b.iter(|| kmeans(black_box(&points), 8, 42).unwrap())
    });
}

fn bench_pca(c: &mut Criterion) {
    let model = synthetic_model(500, 64, 10);
    c.bench_function("pca/500x64", |b| {
        b.iter(|| pca_universe(black_box(&model)).unwrap())
    });
}

fn bench_spearman(c: &mut Criterion) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let predicted: Vec<f64> = (0..10_000).map(|_| rng.random_range(0.0..1.0)).collect();
    let gold: Vec<f64> = (0..10_000).map(|_| rng.random_range(0.0..1.0)).collect();

    c.bench_function("spearman_rho/10k", |b| {
        b.iter(|| spearman_rho(black_box(&predicted), black_box(&gold)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_embedding,
    bench_fuzzy_jaccard,
    bench_dynamax_pair,
    bench_kmeans,
    bench_pca,
    bench_spearman
);
criterion_main!(benches);
